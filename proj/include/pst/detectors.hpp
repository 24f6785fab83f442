#pragma once

// Derivative-of-Gaussian baseline, log pre-equalization, robust normalization,
// the hybrid PST + derivative detector and quantile thresholding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pst/array.hpp"
#include "pst/error.hpp"
#include "pst/transform.hpp"

namespace pst {

/// Linearly interpolated quantile (q in [0, 1]) of the values.
inline double quantile(std::vector<double> values, double q) {
  detail::require(!values.empty(), Errc::empty_domain, "quantile of an empty set");
  detail::require(q >= 0.0 && q <= 1.0, Errc::invalid_parameter, "quantile must lie in [0, 1]");
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double a = values[lo];
  if (frac == 0.0 || lo + 1 >= values.size()) return a;
  const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return a + frac * (b - a);
}

namespace detail {

// Reflection about the end samples (no repeat), folded for any offset.
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) noexcept {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < static_cast<std::ptrdiff_t>(n) ? i : period - i);
}

struct GaussianTaps {
  std::vector<double> smooth;  // sums to 1
  std::vector<double> slope;   // correlates a unit ramp to 1
  std::ptrdiff_t radius = 0;
};

inline GaussianTaps gaussian_taps(double sigma) {
  require(std::isfinite(sigma) && sigma > 0.0, Errc::invalid_parameter, "sigma must be > 0");
  GaussianTaps taps;
  taps.radius = static_cast<std::ptrdiff_t>(std::ceil(5.0 * sigma));
  double sum = 0.0;
  double moment = 0.0;
  for (std::ptrdiff_t t = -taps.radius; t <= taps.radius; ++t) {
    const auto x = static_cast<double>(t);
    const double g = std::exp(-x * x / (2.0 * sigma * sigma));
    taps.smooth.push_back(g);
    sum += g;
    moment += x * x * g;
  }
  for (std::ptrdiff_t t = -taps.radius; t <= taps.radius; ++t) {
    const std::size_t i = static_cast<std::size_t>(t + taps.radius);
    taps.slope.push_back(static_cast<double>(t) * taps.smooth[i] / moment);
  }
  for (double& g : taps.smooth) g /= sum;
  return taps;
}

// Correlation along x (rows) or y (columns) with mirrored boundaries.
inline Field correlate(const Field& in, const std::vector<double>& taps, std::ptrdiff_t radius, bool along_x) {
  Field out(in.width(), in.height());
  const std::size_t n = along_x ? in.width() : in.height();
  const std::size_t lines = along_x ? in.height() : in.width();
  for (std::size_t line = 0; line < lines; ++line) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
        const std::size_t src = reflect_index(static_cast<std::ptrdiff_t>(i) + t, n);
        sum += taps[static_cast<std::size_t>(t + radius)] * (along_x ? in(src, line) : in(line, src));
      }
      (along_x ? out(i, line) : out(line, i)) = sum;
    }
  }
  return out;
}

}  // namespace detail

/// Gradient magnitude of derivative-of-Gaussian responses (1 for a unit ramp).
inline FeatureMap smooth_derivative(const Field& image, double sigma) {
  const auto taps = detail::gaussian_taps(sigma);
  detail::require(!image.empty(), Errc::invalid_size, "empty image");
  const Field gx = detail::correlate(detail::correlate(image, taps.slope, taps.radius, true), taps.smooth,
                                     taps.radius, false);
  const Field gy = detail::correlate(detail::correlate(image, taps.smooth, taps.radius, true), taps.slope,
                                     taps.radius, false);
  Field magnitude(image.width(), image.height());
  for (std::size_t i = 0; i < magnitude.size(); ++i) magnitude[i] = std::hypot(gx[i], gy[i]);
  return make_feature_map(std::move(magnitude), Method::derivative);
}

inline FeatureMap smooth_derivative(const ImageF& image, double sigma) {
  return smooth_derivative(image.pixels, sigma);
}

/// 1D baseline: |derivative-of-Gaussian| response.
inline std::vector<double> smooth_derivative(std::span<const double> signal, double sigma) {
  const auto taps = detail::gaussian_taps(sigma);
  detail::require(!signal.empty(), Errc::invalid_size, "empty signal");
  const Field g = detail::correlate(as_row(signal), taps.slope, taps.radius, true);
  std::vector<double> out(g.begin(), g.end());
  for (double& v : out) v = std::abs(v);
  return out;
}

/// ln(1 + k*in) / ln(1 + k): fixes 0 and 1, gain at 0 is (1 + k) times the gain at 1.
inline Field log_equalize(const Field& field, double k = 255.0) {
  detail::require(std::isfinite(k) && k > 0.0, Errc::invalid_parameter, "log gain must be > 0");
  Field out(field.width(), field.height());
  const double norm = std::log1p(k);
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = std::log1p(k * field[i]) / norm;
  return out;
}

inline ImageF log_equalize(const ImageF& image, double k = 255.0) {
  ImageF out{log_equalize(image.pixels, k), image.max_code};
  for (double& v : out.pixels) v = std::clamp(v, 0.0, 1.0);
  return out;
}

/// |map| divided by its p-quantile and clipped to [0, 1]. An all-zero map is
/// returned unchanged; a map whose p-quantile is zero is scaled by its maximum.
inline FeatureMap normalize_robust(const FeatureMap& map, double p = 0.99) {
  detail::require(p > 0.5 && p <= 1.0, Errc::invalid_parameter, "percentile must lie in (0.5, 1]");
  std::vector<double> magnitude(map.values.size());
  std::transform(map.values.begin(), map.values.end(), magnitude.begin(), [](double v) { return std::abs(v); });
  if (magnitude.empty()) return map;
  const double peak = *std::max_element(magnitude.begin(), magnitude.end());
  if (peak == 0.0) return map;
  double scale = quantile(magnitude, p);
  if (scale == 0.0) scale = peak;

  Field out(map.values.width(), map.values.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(magnitude[i] / scale, 1.0);
  return make_feature_map(std::move(out), map.method);
}

struct HybridPolicy {
  double percentile = 0.99;
};

/// Per-sample max of the robustly normalized PST and derivative magnitudes.
inline FeatureMap hybrid(const FeatureMap& pst_map, const FeatureMap& deriv_map, const HybridPolicy& policy = {}) {
  detail::require(pst_map.values.same_shape(deriv_map.values), Errc::invalid_size,
                  "hybrid inputs must have equal dimensions");
  const FeatureMap a = normalize_robust(pst_map, policy.percentile);
  const FeatureMap b = normalize_robust(deriv_map, policy.percentile);
  Field out(a.values.width(), a.values.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(std::abs(a.values[i]), std::abs(b.values[i]));
  return make_feature_map(std::move(out), Method::hybrid);
}

using BinaryMap = Array2<std::uint8_t>;

/// Marks samples whose magnitude lies in [quantile(q_lo), quantile(q_hi)] of
/// the nonzero magnitudes. Zero samples are never marked.
inline BinaryMap threshold(const FeatureMap& map, double q_lo, double q_hi) {
  detail::require(q_lo >= 0.0 && q_lo < q_hi && q_hi <= 1.0, Errc::invalid_parameter,
                  "quantiles must satisfy 0 <= q_lo < q_hi <= 1");
  BinaryMap out(map.values.width(), map.values.height(), 0);
  std::vector<double> nonzero;
  for (double v : map.values) {
    if (v != 0.0) nonzero.push_back(std::abs(v));
  }
  if (nonzero.empty()) return out;
  const double lo = quantile(nonzero, q_lo);
  const double hi = quantile(nonzero, q_hi);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = std::abs(map.values[i]);
    out[i] = m != 0.0 && m >= lo && m <= hi ? 1 : 0;
  }
  return out;
}

}  // namespace pst
