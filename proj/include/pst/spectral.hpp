#pragma once

// Frequency-grid conventions, forward/inverse DFT and spectral differentiation.
//
// Conventions used throughout the library:
//   * frequencies are in cycles/sample, u in [-0.5, 0.5)
//   * spectra are stored unshifted (DC first)
//   * forward() is unnormalized, inverse() carries the full 1/(W*H) factor

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pst/array.hpp"
#include "pst/error.hpp"

namespace pst {

/// Frequencies of an n-point DFT in unshifted order: k/n for k < n/2, (k-n)/n otherwise.
inline std::vector<double> frequency_axis(std::size_t n) {
  std::vector<double> u(n);
  const auto count = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    u[k] = 2 * k < n ? static_cast<double>(k) / count
                     : (static_cast<double>(k) - count) / count;
  }
  return u;
}

struct FrequencyGrid {
  std::vector<double> u;  // one entry per column
  std::vector<double> v;  // one entry per row; {0} for 1D grids

  std::size_t width() const noexcept { return u.size(); }
  std::size_t height() const noexcept { return v.size(); }
  bool is_1d() const noexcept { return v.size() == 1; }

  double radius(std::size_t k, std::size_t l) const noexcept { return std::sqrt(u[k] * u[k] + v[l] * v[l]); }

  /// Largest radial frequency present on the grid.
  double max_radius() const noexcept {
    auto abs_max = [](const std::vector<double>& axis) {
      double m = 0.0;
      for (double f : axis) m = std::max(m, std::abs(f));
      return m;
    };
    const double mu = abs_max(u);
    const double mv = abs_max(v);
    return std::sqrt(mu * mu + mv * mv);
  }
};

inline FrequencyGrid freq_grid_1d(std::size_t n) {
  detail::require(n >= 2, Errc::invalid_size, "1D grid needs at least 2 samples, got " + std::to_string(n));
  return FrequencyGrid{frequency_axis(n), {0.0}};
}

inline FrequencyGrid freq_grid_2d(std::size_t width, std::size_t height) {
  detail::require(width >= 2 && height >= 2, Errc::invalid_size,
                  "2D grid needs at least 2x2 samples, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  return FrequencyGrid{frequency_axis(width), frequency_axis(height)};
}

/// Grid matching the shape of an array: 1D when the array has a single row.
template <class T, class A>
FrequencyGrid grid_for(const Array2<T, A>& array) {
  return array.height() == 1 ? freq_grid_1d(array.width()) : freq_grid_2d(array.width(), array.height());
}

/// Unnormalized DFT samples in DC-first layout. Frequency-domain counterpart of a field.
struct Spectrum {
  ComplexField bins;

  std::size_t width() const noexcept { return bins.width(); }
  std::size_t height() const noexcept { return bins.height(); }
  Complex& operator()(std::size_t k, std::size_t l) noexcept { return bins(k, l); }
  const Complex& operator()(std::size_t k, std::size_t l) const noexcept { return bins(k, l); }
};

namespace detail {

enum class FftKind { forward = FFTW_FORWARD, backward = FFTW_BACKWARD, real_forward = 2, real_backward = 3 };

// FFTW plans keyed by shape and kind. Planning is serialized (the FFTW
// planner is not reentrant); executing a plan on new arrays is thread-safe.
// Real plans are out of place: r2c maps width x height reals to
// (width/2 + 1) x height bins, c2r the reverse.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  // `bins` and `real` are the caller's 64-byte aligned arrays; ESTIMATE
  // planning only inspects their alignment and never writes them. `real` is
  // unused for complex transforms.
  fftw_plan get(std::size_t width, std::size_t height, FftKind kind, fftw_complex* bins, double* real) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(width, height, kind);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int w = static_cast<int>(width);
    const int h = static_cast<int>(height);
    // ESTIMATE always yields the same plan, so results are reproducible run to run.
    const unsigned flags = FFTW_ESTIMATE;
    fftw_plan plan = nullptr;
    switch (kind) {
      case FftKind::forward:
      case FftKind::backward: {
        const int sign = static_cast<int>(kind);
        plan = height == 1 ? fftw_plan_dft_1d(w, bins, bins, sign, flags)
                           : fftw_plan_dft_2d(h, w, bins, bins, sign, flags);
        break;
      }
      case FftKind::real_forward:
        plan = height == 1 ? fftw_plan_dft_r2c_1d(w, real, bins, flags)
                           : fftw_plan_dft_r2c_2d(h, w, real, bins, flags);
        break;
      case FftKind::real_backward:
        plan = height == 1 ? fftw_plan_dft_c2r_1d(w, bins, real, flags)
                           : fftw_plan_dft_c2r_2d(h, w, bins, real, flags);
        break;
    }
    require(plan != nullptr, Errc::invalid_size, "FFT planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, FftKind>, fftw_plan> plans_;
};

inline void fft_in_place(ComplexField& data, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan = FftPlans::instance().get(data.width(), data.height(), static_cast<FftKind>(sign), buf, nullptr);
  fftw_execute_dft(plan, buf, buf);
}

inline void check_transform_shape(std::size_t width, std::size_t height) {
  require(width >= 2 && (height == 1 || height >= 2), Errc::invalid_size,
          "transform needs at least 2 samples per axis, got " + std::to_string(width) + "x" +
              std::to_string(height));
}

}  // namespace detail

inline Spectrum forward(const ComplexField& x) {
  detail::check_transform_shape(x.width(), x.height());
  Spectrum out{x};
  detail::fft_in_place(out.bins, FFTW_FORWARD);
  return out;
}

inline Spectrum forward(const Field& x) {
  detail::check_transform_shape(x.width(), x.height());
  Spectrum out{ComplexField(x.width(), x.height())};
  std::copy(x.begin(), x.end(), out.bins.begin());
  detail::fft_in_place(out.bins, FFTW_FORWARD);
  return out;
}

inline Spectrum forward(std::span<const double> x) {
  detail::require(!x.empty(), Errc::invalid_size, "empty input");
  detail::check_transform_shape(x.size(), 1);
  Spectrum out{ComplexField(x.size(), 1)};
  std::copy(x.begin(), x.end(), out.bins.begin());
  detail::fft_in_place(out.bins, FFTW_FORWARD);
  return out;
}

inline ComplexField inverse(Spectrum spectrum) {
  detail::check_transform_shape(spectrum.width(), spectrum.height());
  detail::fft_in_place(spectrum.bins, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(spectrum.bins.size());
  for (auto& z : spectrum.bins) z *= scale;
  return std::move(spectrum.bins);
}

/// inverse() after checking the spectrum against the grid it was built on.
inline ComplexField inverse(Spectrum spectrum, const FrequencyGrid& grid) {
  detail::require(spectrum.width() == grid.width() && spectrum.height() == grid.height(),
                  Errc::invalid_size, "spectrum does not match frequency grid");
  return inverse(std::move(spectrum));
}

/// Non-redundant half of the spectrum of a real field: bins k = 0..width/2 of
/// every row, in the same DC-first layout as Spectrum.
struct HalfSpectrum {
  ComplexField bins;
  std::size_t full_width = 0;

  std::size_t width() const noexcept { return bins.width(); }
  std::size_t height() const noexcept { return bins.height(); }
  Complex& operator()(std::size_t k, std::size_t l) noexcept { return bins(k, l); }
  const Complex& operator()(std::size_t k, std::size_t l) const noexcept { return bins(k, l); }
};

inline HalfSpectrum forward_real(const AlignedField& x) {
  detail::check_transform_shape(x.width(), x.height());
  HalfSpectrum out{ComplexField(x.width() / 2 + 1, x.height()), x.width()};
  // FFTW does not modify the input of an out-of-place r2c transform.
  auto* in = const_cast<double*>(x.data());
  auto* bins = reinterpret_cast<fftw_complex*>(out.bins.data());
  fftw_plan plan = detail::FftPlans::instance().get(x.width(), x.height(), detail::FftKind::real_forward, bins, in);
  fftw_execute_dft_r2c(plan, in, bins);
  return out;
}

/// Real inverse of a Hermitian spectrum given by its half, without the 1/N
/// factor, written into `out` (full_width x height). The spectrum is consumed.
inline void inverse_real_unscaled(HalfSpectrum spectrum, AlignedField& out) {
  const std::size_t width = spectrum.full_width;
  detail::require(spectrum.width() == width / 2 + 1, Errc::invalid_size, "half spectrum width mismatch");
  detail::require(out.width() == width && out.height() == spectrum.height(), Errc::invalid_size,
                  "inverse output has the wrong shape");
  detail::check_transform_shape(width, spectrum.height());
  auto* bins = reinterpret_cast<fftw_complex*>(spectrum.bins.data());
  fftw_plan plan =
      detail::FftPlans::instance().get(width, spectrum.height(), detail::FftKind::real_backward, bins, out.data());
  fftw_execute_dft_c2r(plan, bins, out.data());
}

inline AlignedField inverse_real_unscaled(HalfSpectrum spectrum) {
  AlignedField out(spectrum.full_width, spectrum.height());
  inverse_real_unscaled(std::move(spectrum), out);
  return out;
}

inline AlignedField inverse_real(HalfSpectrum spectrum) {
  AlignedField out = inverse_real_unscaled(std::move(spectrum));
  const double scale = 1.0 / static_cast<double>(out.size());
  for (double& v : out) v *= scale;
  return out;
}

/// Multiplies every bin by gain(u, v).
template <class Gain>
void apply_gain(Spectrum& spectrum, const FrequencyGrid& grid, Gain&& gain) {
  detail::require(spectrum.width() == grid.width() && spectrum.height() == grid.height(),
                  Errc::invalid_size, "spectrum does not match frequency grid");
  for (std::size_t l = 0; l < grid.height(); ++l) {
    for (std::size_t k = 0; k < grid.width(); ++k) spectrum(k, l) *= gain(grid.u[k], grid.v[l]);
  }
}

/// IDFT{ (j 2 pi u)^m DFT{x} }, the m-th derivative of the band-limited
/// interpolant of x. Only even orders are supported; the result is real.
inline std::vector<double> spectral_derivative(std::span<const double> x, int order) {
  detail::require(order >= 2 && order % 2 == 0, Errc::unsupported_order,
                  "spectral derivative order must be even and >= 2, got " + std::to_string(order));
  const auto grid = freq_grid_1d(x.size());
  Spectrum spectrum = forward(x);
  // (j 2 pi u)^m = (-1)^(m/2) (2 pi u)^m for even m
  const double sign = (order / 2) % 2 == 0 ? 1.0 : -1.0;
  apply_gain(spectrum, grid, [&](double u, double) {
    return sign * std::pow(2.0 * std::numbers::pi * u, order);
  });
  const ComplexField field = inverse(std::move(spectrum));
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = field[i].real();
  return out;
}

}  // namespace pst
