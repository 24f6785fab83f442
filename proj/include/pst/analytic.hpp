#pragma once

// Closed-form small-phase approximations of the transform, used as oracles:
//
//   general kernel   PST{x} ~ sum_m (-1)^(m/2) phi^(m) / (m! (2 pi)^m) D_m x  /  x
//   phi = u^2        PST{x} ~ -D_2 x / (2 pi)^2  /  x
//   phi = u^2, with sin/cos of the phase expanded to third order
//                    PST{x} ~ [-D2/(2pi)^2 + D6/(3!(2pi)^6) - D10/(5!(2pi)^10)]
//                           / [x - D4/(2!(2pi)^4) + D8/(4!(2pi)^8)]
//
// D_m is the spectral derivative. Samples whose denominator does not exceed
// epsilon * max(x) are masked out rather than clamped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "pst/error.hpp"
#include "pst/kernel.hpp"
#include "pst/spectral.hpp"

namespace pst {

/// Oracle output with its valid-domain mask; masked samples hold 0.
struct OracleResponse {
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  std::size_t valid_count() const noexcept {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
  }
};

enum class SmallPhaseRoute {
  derivative_sum,     // weighted sum of spectral derivatives
  filtered_spectrum,  // Im of IDFT{(1 + j phi_T(u)) X(u)}, one transform
};

namespace detail {

inline double max_value(std::span<const double> x) {
  require(!x.empty(), Errc::invalid_size, "empty signal");
  return *std::max_element(x.begin(), x.end());
}

inline double power_of_two_pi(int m) { return std::pow(2.0 * std::numbers::pi, m); }

inline double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

// numerator / denominator on the samples where denominator > floor.
inline OracleResponse masked_ratio(std::span<const double> numerator, std::span<const double> denominator,
                                   double floor) {
  OracleResponse out{std::vector<double>(numerator.size(), 0.0),
                     std::vector<std::uint8_t>(numerator.size(), 0)};
  for (std::size_t i = 0; i < numerator.size(); ++i) {
    if (denominator[i] > floor) {
      out.values[i] = numerator[i] / denominator[i];
      out.valid[i] = 1;
    }
  }
  require(out.valid_count() > 0, Errc::empty_domain, "every sample lies below the epsilon floor");
  return out;
}

inline double epsilon_floor(std::span<const double> signal, double epsilon) {
  require(epsilon > 0.0, Errc::invalid_parameter, "epsilon must be > 0");
  const double peak = max_value(signal);
  require(peak > 0.0, Errc::empty_domain, "signal has no positive samples");
  return epsilon * peak;
}

}  // namespace detail

/// Small-phase transfer function for a general even kernel described by its
/// Taylor coefficients.
inline OracleResponse pst_smallphase(std::span<const double> signal, const TaylorCoeffs& coeffs,
                                     double epsilon = 1e-6,
                                     SmallPhaseRoute route = SmallPhaseRoute::derivative_sum) {
  const double floor = detail::epsilon_floor(signal, epsilon);
  std::vector<double> numerator(signal.size(), 0.0);

  if (route == SmallPhaseRoute::derivative_sum) {
    for (int m = 2; m <= coeffs.order; m += 2) {
      const double sign = (m / 2) % 2 == 0 ? 1.0 : -1.0;
      const double weight =
          sign * coeffs.coefficient(m) / (detail::factorial(m) * detail::power_of_two_pi(m));
      const auto dm = spectral_derivative(signal, m);
      for (std::size_t i = 0; i < numerator.size(); ++i) numerator[i] += weight * dm[i];
    }
  } else {
    const auto grid = freq_grid_1d(signal.size());
    Spectrum spectrum = forward(signal);
    apply_gain(spectrum, grid, [&](double u, double) { return Complex(1.0, coeffs.evaluate(u)); });
    const ComplexField field = inverse(std::move(spectrum));
    for (std::size_t i = 0; i < numerator.size(); ++i) numerator[i] = field[i].imag();
  }
  return detail::masked_ratio(numerator, signal, floor);
}

/// Quadratic kernel phi = u^2 under the small-phase approximation.
inline OracleResponse pst_quadratic(std::span<const double> signal, double epsilon = 1e-6) {
  const double floor = detail::epsilon_floor(signal, epsilon);
  auto numerator = spectral_derivative(signal, 2);
  const double scale = -1.0 / detail::power_of_two_pi(2);
  for (double& v : numerator) v *= scale;
  return detail::masked_ratio(numerator, signal, floor);
}

/// Quadratic kernel with the sine and cosine of the phase expanded to third order.
inline OracleResponse pst_quadratic_order3(std::span<const double> signal, double epsilon = 1e-6) {
  const double floor = detail::epsilon_floor(signal, epsilon);
  const auto d2 = spectral_derivative(signal, 2);
  const auto d4 = spectral_derivative(signal, 4);
  const auto d6 = spectral_derivative(signal, 6);
  const auto d8 = spectral_derivative(signal, 8);
  const auto d10 = spectral_derivative(signal, 10);
  using detail::factorial;
  using detail::power_of_two_pi;

  std::vector<double> numerator(signal.size());
  std::vector<double> denominator(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    numerator[i] = -d2[i] / power_of_two_pi(2) + d6[i] / (factorial(3) * power_of_two_pi(6)) -
                   d10[i] / (factorial(5) * power_of_two_pi(10));
    denominator[i] = signal[i] - d4[i] / (factorial(2) * power_of_two_pi(4)) +
                     d8[i] / (factorial(4) * power_of_two_pi(8));
  }
  return detail::masked_ratio(numerator, denominator, floor);
}

struct OracleReport {
  double max_abs_deviation = 0.0;
  double normalized_deviation = 0.0;  // max abs deviation / max |analytic| on the mask
  double correlation = 0.0;           // Pearson, masked samples only
  std::size_t samples = 0;
  std::vector<std::uint8_t> mask;
};

/// Compares a numerical response against an oracle on the masked samples.
/// Zero-variance inputs have correlation 1 if they coincide, else 0.
inline OracleReport compare_oracle(std::span<const double> numerical, std::span<const double> analytic,
                                   std::span<const std::uint8_t> mask) {
  detail::require(numerical.size() == analytic.size() && mask.size() == numerical.size(),
                  Errc::invalid_size, "oracle comparison needs equal lengths");
  OracleReport report;
  report.mask.assign(mask.begin(), mask.end());

  double peak = 0.0;
  double sum_n = 0.0;
  double sum_a = 0.0;
  for (std::size_t i = 0; i < numerical.size(); ++i) {
    if (!mask[i]) continue;
    ++report.samples;
    report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(numerical[i] - analytic[i]));
    peak = std::max(peak, std::abs(analytic[i]));
    sum_n += numerical[i];
    sum_a += analytic[i];
  }
  detail::require(report.samples > 0, Errc::empty_domain, "oracle comparison mask is empty");

  const auto count = static_cast<double>(report.samples);
  const double mean_n = sum_n / count;
  const double mean_a = sum_a / count;
  double cov = 0.0;
  double var_n = 0.0;
  double var_a = 0.0;
  for (std::size_t i = 0; i < numerical.size(); ++i) {
    if (!mask[i]) continue;
    const double dn = numerical[i] - mean_n;
    const double da = analytic[i] - mean_a;
    cov += dn * da;
    var_n += dn * dn;
    var_a += da * da;
  }

  if (peak > 0.0) {
    report.normalized_deviation = report.max_abs_deviation / peak;
  } else {
    report.normalized_deviation =
        report.max_abs_deviation == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  if (var_n > 0.0 && var_a > 0.0) {
    report.correlation = std::clamp(cov / std::sqrt(var_n * var_a), -1.0, 1.0);
  } else {
    report.correlation = report.max_abs_deviation == 0.0 ? 1.0 : 0.0;
  }
  return report;
}

inline OracleReport compare_oracle(std::span<const double> numerical, const OracleResponse& analytic) {
  return compare_oracle(numerical, analytic.values, analytic.valid);
}

}  // namespace pst
