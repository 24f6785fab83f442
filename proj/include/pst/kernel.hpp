#pragma once

// Warped phase kernel, localization (low-pass) kernel and the Taylor
// coefficients of the phase profile.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "pst/array.hpp"
#include "pst/error.hpp"
#include "pst/spectral.hpp"

namespace pst {

namespace detail {

// g(x) = x*atan(x) - ln(1 + x^2)/2, even in x. Near zero the two terms cancel
// to x^2/2, so a short series is used there.
inline double warp_profile(double x) noexcept {
  const double ax = std::abs(x);
  if (ax < 1e-3) {
    const double x2 = ax * ax;
    return x2 * (0.5 - x2 * (1.0 / 12.0 - x2 / 30.0));
  }
  return ax * std::atan(ax) - 0.5 * std::log1p(ax * ax);
}

inline void check_warp(double warp, double strength) {
  require(std::isfinite(warp) && warp > 0.0, Errc::invalid_parameter, "warp must be > 0");
  require(std::isfinite(strength) && strength >= 0.0, Errc::invalid_parameter, "strength must be >= 0");
}

}  // namespace detail

/// Phase in radians at radial frequency r: S * g(W r) / g(W r_max), so the
/// profile is 0 at DC and exactly S at r_max.
inline double phase_profile(double r, double warp, double strength, double r_max) {
  detail::check_warp(warp, strength);
  detail::require(std::isfinite(r_max) && r_max > 0.0, Errc::invalid_parameter, "r_max must be > 0");
  detail::require(r >= 0.0, Errc::invalid_parameter, "radial frequency must be >= 0");
  if (r == r_max) return strength;
  return strength * detail::warp_profile(warp * r) / detail::warp_profile(warp * r_max);
}

enum class KernelProfile { warped, quadratic };

/// Phase grid phi[u, v] of the unit-magnitude kernel exp(j phi).
struct PhaseKernel {
  Field phase;
  double warp = 0.0;
  double strength = 0.0;  // peak phase, reached at r_max
  double r_max = 0.0;
  KernelProfile profile = KernelProfile::warped;
};

namespace detail {

// Fills out(k, l) = value(k, l) using the evenness of the axes: bins k and
// (n - k) mod n carry opposite frequencies, so each distinct |u|,|v| pair is
// evaluated once and mirrored. Mirrored entries are bit-identical.
template <class Value>
Field fill_even(const FrequencyGrid& grid, Value&& value) {
  const std::size_t w = grid.width();
  const std::size_t h = grid.height();
  Field out(w, h);
  for (std::size_t l = 0; l < h; ++l) {
    const std::size_t lm = (h - l) % h;
    if (lm < l) {
      auto src = out.row(lm);
      std::copy(src.begin(), src.end(), out.row(l).begin());
      continue;
    }
    for (std::size_t k = 0; k < w; ++k) {
      const std::size_t km = (w - k) % w;
      out(k, l) = km < k ? out(km, l) : value(k, l);
    }
  }
  return out;
}

}  // namespace detail

inline PhaseKernel build_phase_kernel(const FrequencyGrid& grid, double warp, double strength) {
  detail::check_warp(warp, strength);
  const double r_max = grid.max_radius();
  detail::require(r_max > 0.0, Errc::invalid_size, "degenerate frequency grid");
  const double norm = strength / detail::warp_profile(warp * r_max);
  Field phase = detail::fill_even(grid, [&](std::size_t k, std::size_t l) {
    const double r = grid.radius(k, l);
    return r == r_max ? strength : norm * detail::warp_profile(warp * r);
  });
  return PhaseKernel{std::move(phase), warp, strength, r_max, KernelProfile::warped};
}

/// Test kernel phi = scale * r^2 (the quadratic case of the closed-form analysis).
inline PhaseKernel quadratic_phase_kernel(const FrequencyGrid& grid, double scale) {
  const double r_max = grid.max_radius();
  Field phase = detail::fill_even(grid, [&](std::size_t k, std::size_t l) {
    const double r = grid.radius(k, l);
    return scale * r * r;
  });
  return PhaseKernel{std::move(phase), 0.0, scale * r_max * r_max, r_max, KernelProfile::quadratic};
}

/// Real gain grid L[u, v]; Gaussian with half-amplitude radius `cutoff`.
struct LocalizationKernel {
  Field gain;
  double cutoff = std::numeric_limits<double>::infinity();
};

inline double lpf_gain(double r, double cutoff) noexcept {
  if (std::isinf(cutoff)) return 1.0;
  const double t = r / cutoff;
  return std::exp(-t * t * std::numbers::ln2);
}

/// Half-amplitude cutoff (cycles/sample) of the frequency response of a
/// spatial Gaussian with the given sigma in samples.
inline double lpf_cutoff_from_sigma(double sigma_px) {
  detail::require(std::isfinite(sigma_px) && sigma_px > 0.0, Errc::invalid_parameter,
                  "localization sigma must be > 0");
  return std::sqrt(std::numbers::ln2 / 2.0) / (std::numbers::pi * sigma_px);
}

inline LocalizationKernel build_lpf(const FrequencyGrid& grid, double cutoff) {
  detail::require(cutoff > 0.0, Errc::invalid_parameter, "localization cutoff must be > 0");
  Field gain = detail::fill_even(grid, [&](std::size_t k, std::size_t l) {
    return lpf_gain(grid.radius(k, l), cutoff);
  });
  return LocalizationKernel{std::move(gain), cutoff};
}

/// L = 1 everywhere.
inline LocalizationKernel identity_lpf(const FrequencyGrid& grid) {
  return LocalizationKernel{Field(grid.width(), grid.height(), 1.0),
                            std::numeric_limits<double>::infinity()};
}

/// Even-order Taylor coefficients phi^(2), phi^(4), ..., phi^(M) of the phase
/// profile at u = 0, in radians per (cycles/sample)^m.
struct TaylorCoeffs {
  int order = 0;
  std::vector<double> values;  // values[i] is phi^(2i+2)

  double coefficient(int m) const {
    detail::require(m >= 2 && m % 2 == 0 && m <= order, Errc::unsupported_order,
                    "no Taylor coefficient of order " + std::to_string(m));
    return values[static_cast<std::size_t>(m / 2 - 1)];
  }

  /// Truncated series sum_m phi^(m) u^m / m!.
  double evaluate(double u) const noexcept {
    double sum = 0.0;
    double power = 1.0;
    double factorial = 1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto m = static_cast<double>(2 * i + 2);
      power *= u * u;
      factorial *= (m - 1.0) * m;
      sum += values[i] * power / factorial;
    }
    return sum;
  }
};

/// g(x) = sum_k (-1)^(k+1) x^(2k) / ((2k-1) 2k), so
/// phi^(2k) = (2k)! * that coefficient * S W^(2k) / g(W r_max)
///          = (-1)^(k+1) (2k-2)! S W^(2k) / g(W r_max).
inline TaylorCoeffs taylor_coeffs(double warp, double strength, double r_max, int order) {
  detail::check_warp(warp, strength);
  detail::require(r_max > 0.0, Errc::invalid_parameter, "r_max must be > 0");
  detail::require(order >= 2 && order % 2 == 0, Errc::unsupported_order,
                  "Taylor order must be even and >= 2, got " + std::to_string(order));
  const double norm = strength / detail::warp_profile(warp * r_max);
  TaylorCoeffs out{order, {}};
  double factorial = 1.0;  // (m-2)!
  for (int m = 2; m <= order; m += 2) {
    if (m > 2) factorial *= static_cast<double>((m - 3) * (m - 2));
    const double sign = (m / 2) % 2 == 1 ? 1.0 : -1.0;
    out.values.push_back(sign * factorial * norm * std::pow(warp, m));
  }
  return out;
}

}  // namespace pst
