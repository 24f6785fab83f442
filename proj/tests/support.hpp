#pragma once

// Reference implementations and generators shared by the test suites.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "pst/array.hpp"

namespace pst::testing {

// O(N^2) DFT straight from the definition, sign -1 forward.
inline ComplexField dense_dft(const ComplexField& x, int sign = -1) {
  const std::size_t w = x.width();
  const std::size_t h = x.height();
  ComplexField out(w, h);
  for (std::size_t l = 0; l < h; ++l) {
    for (std::size_t k = 0; k < w; ++k) {
      Complex sum = 0.0;
      for (std::size_t m = 0; m < h; ++m) {
        for (std::size_t n = 0; n < w; ++n) {
          const double t = static_cast<double>(k * n % w) / static_cast<double>(w) +
                           static_cast<double>(l * m % h) / static_cast<double>(h);
          sum += x(n, m) * std::polar(1.0, sign * 2.0 * std::numbers::pi * t);
        }
      }
      out(k, l) = sum;
    }
  }
  return out;
}

inline ComplexField to_complex(const Field& x) {
  ComplexField out(x.width(), x.height());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
  return out;
}

// Signed frequency of bin k, written independently of the library.
inline double bin_frequency(std::size_t k, std::size_t n) {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  return 2 * k < n ? kk / nn : (kk - nn) / nn;
}

inline Field random_field(std::size_t w, std::size_t h, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Field out(w, h);
  for (double& v : out) v = dist(rng);
  return out;
}

inline ComplexField random_complex(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  ComplexField out(w, h);
  for (auto& v : out) v = {dist(rng), dist(rng)};
  return out;
}

// Positive, band-limited random signal: a few low harmonics on a pedestal.
inline std::vector<double> smooth_random_signal(std::size_t n, std::mt19937_64& rng, std::size_t harmonics = 6,
                                                double pedestal = 1.0) {
  std::uniform_real_distribution<double> amp(-0.05, 0.05);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> out(n, pedestal);
  for (std::size_t k = 1; k <= harmonics; ++k) {
    const double a = amp(rng);
    const double p = phase(rng);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += a * std::cos(2.0 * std::numbers::pi * static_cast<double>(k * i) / static_cast<double>(n) + p);
    }
  }
  return out;
}

template <class A, class B>
double max_abs_diff(const A& a, const B& b) {
  double worst = 0.0;
  auto ib = std::begin(b);
  for (auto ia = std::begin(a); ia != std::end(a); ++ia, ++ib) worst = std::max(worst, std::abs(*ia - *ib));
  return worst;
}

template <class A>
double max_abs(const A& a) {
  double worst = 0.0;
  for (const auto& v : a) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace pst::testing
