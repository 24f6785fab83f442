#pragma once

// Stretch operator E_o = IDFT{ K * L * DFT{E_i} } and the phase stretch
// transform (per-sample angle of E_o) for images and 1D signals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pst/array.hpp"
#include "pst/error.hpp"
#include "pst/kernel.hpp"
#include "pst/spectral.hpp"

namespace pst {

/// Grayscale image with intensities in [0, 1]. `max_code` is the integer code
/// that mapped to 1.0 in the source (255, 16383, 65535, ...).
struct ImageF {
  Field pixels;
  unsigned max_code = 255;

  std::size_t width() const noexcept { return pixels.width(); }
  std::size_t height() const noexcept { return pixels.height(); }

  int bit_depth() const noexcept {
    int bits = 0;
    for (unsigned v = max_code; v != 0; v >>= 1) ++bits;
    return bits;
  }
};

inline void validate_image(const ImageF& image) {
  detail::require(!image.pixels.empty(), Errc::invalid_size, "empty image");
  for (double v : image.pixels) {
    detail::require(std::isfinite(v) && v >= 0.0 && v <= 1.0, Errc::invalid_parameter,
                    "image samples must be finite and within [0, 1]");
  }
}

inline ImageF make_image(Field pixels, unsigned max_code = 255) {
  ImageF image{std::move(pixels), max_code};
  validate_image(image);
  return image;
}

enum class Method { pst, derivative, hybrid };

inline const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::pst: return "pst";
    case Method::derivative: return "derivative";
    case Method::hybrid: return "hybrid";
  }
  return "?";
}

/// Per-sample detector response tagged with the method that produced it.
struct FeatureMap {
  Field values;
  Method method = Method::pst;
  double min_value = 0.0;
  double max_value = 0.0;
};

inline FeatureMap make_feature_map(Field values, Method method) {
  FeatureMap map{std::move(values), method, 0.0, 0.0};
  if (!map.values.empty()) {
    const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
    map.min_value = *lo;
    map.max_value = *hi;
  }
  return map;
}

enum class PadMode { mirror, periodic, zero };

/// How the configured localization value is read: a half-amplitude frequency
/// cutoff in cycles/sample, or the sigma in samples of a spatial Gaussian.
enum class LpfUnits { cutoff, sigma_px };

/// Where the localization kernel is applied. Both give the same result to
/// rounding; the frequency path is canonical.
enum class LpfPath { frequency, spatial };

struct Localization {
  double value = 2.0;
  LpfUnits units = LpfUnits::sigma_px;

  double cutoff() const {
    if (units == LpfUnits::sigma_px) return lpf_cutoff_from_sigma(value);
    detail::require(value > 0.0, Errc::invalid_parameter, "localization cutoff must be > 0");
    return value;
  }
};

struct PstConfig {
  double warp = 12.15;
  double strength = 0.48;
  std::optional<Localization> lpf = Localization{};  // nullopt: L = 1
  LpfPath lpf_path = LpfPath::frequency;
  PadMode pad = PadMode::mirror;
  std::optional<std::size_t> pad_width;  // default per axis: max(16, n/8)
  int taylor_order = 6;
  double epsilon = 1e-6;  // fraction of max intensity
  double q_lo = 0.0;
  double q_hi = 1.0;

  void validate() const {
    detail::check_warp(warp, strength);
    detail::require(q_lo >= 0.0 && q_lo < q_hi && q_hi <= 1.0, Errc::invalid_parameter,
                    "quantiles must satisfy 0 <= q_lo < q_hi <= 1");
    detail::require(epsilon > 0.0, Errc::invalid_parameter, "epsilon must be > 0");
    detail::require(taylor_order >= 2 && taylor_order % 2 == 0, Errc::unsupported_order,
                    "Taylor order must be even and >= 2");
    if (lpf) {
      detail::require(std::isfinite(lpf->value) && lpf->value > 0.0, Errc::invalid_parameter,
                      "localization value must be > 0");
    }
  }
};

// ---------------------------------------------------------------------------
// Padding

namespace detail {

inline std::size_t source_index(std::ptrdiff_t i, std::size_t n, PadMode mode) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  switch (mode) {
    case PadMode::mirror:
      if (i < 0) return static_cast<std::size_t>(-i);
      if (i >= sn) return static_cast<std::size_t>(2 * (sn - 1) - i);
      return static_cast<std::size_t>(i);
    case PadMode::periodic:
      return static_cast<std::size_t>(((i % sn) + sn) % sn);
    case PadMode::zero:
      break;
  }
  return static_cast<std::size_t>(i);
}

inline void check_pad_width(std::size_t width, std::size_t n) {
  require(width < n, Errc::invalid_parameter,
          "pad width " + std::to_string(width) + " must be smaller than input size " + std::to_string(n));
}

}  // namespace detail

/// Extends a signal by `width` samples on each side. Mirror reflects about the
/// edge sample without repeating it: [1,2,3] -> [3,2,1,2,3,2,1] for width 2.
inline std::vector<double> pad(std::span<const double> input, PadMode mode, std::size_t width) {
  detail::check_pad_width(width, input.size());
  const std::size_t n = input.size();
  std::vector<double> out(n + 2 * width, 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto i = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(width);
    const bool inside = i >= 0 && i < static_cast<std::ptrdiff_t>(n);
    if (mode == PadMode::zero && !inside) continue;
    out[j] = input[detail::source_index(i, n, mode)];
  }
  return out;
}

namespace detail {

template <class Out>
Out pad_field(const Field& input, PadMode mode, std::size_t width_x, std::size_t width_y) {
  check_pad_width(width_x, input.width());
  if (input.height() > 1 || width_y > 0) check_pad_width(width_y, input.height());
  const std::size_t w = input.width();
  const std::size_t h = input.height();
  Out out(w + 2 * width_x, h + 2 * width_y, 0.0);
  for (std::size_t y = 0; y < out.height(); ++y) {
    const auto iy = static_cast<std::ptrdiff_t>(y) - static_cast<std::ptrdiff_t>(width_y);
    const bool row_inside = iy >= 0 && iy < static_cast<std::ptrdiff_t>(h);
    if (mode == PadMode::zero && !row_inside) continue;
    const auto src_row = input.row(source_index(iy, h, mode));
    auto dst = out.row(y);
    for (std::size_t x = 0; x < out.width(); ++x) {
      const auto ix = static_cast<std::ptrdiff_t>(x) - static_cast<std::ptrdiff_t>(width_x);
      const bool inside = ix >= 0 && ix < static_cast<std::ptrdiff_t>(w);
      if (mode == PadMode::zero && !inside) continue;
      dst[x] = src_row[source_index(ix, w, mode)];
    }
  }
  return out;
}

}  // namespace detail

inline Field pad(const Field& input, PadMode mode, std::size_t width_x, std::size_t width_y) {
  return detail::pad_field<Field>(input, mode, width_x, width_y);
}

template <class T>
std::vector<T> crop(std::span<const T> padded, std::size_t width) {
  detail::require(padded.size() >= 2 * width, Errc::invalid_parameter, "crop width exceeds input");
  return std::vector<T>(padded.begin() + static_cast<std::ptrdiff_t>(width),
                        padded.end() - static_cast<std::ptrdiff_t>(width));
}

inline std::vector<double> crop(const std::vector<double>& padded, std::size_t width) {
  return crop(std::span<const double>(padded), width);
}

template <class T, class A>
Array2<T, A> crop(const Array2<T, A>& padded, std::size_t width_x, std::size_t width_y) {
  detail::require(padded.width() >= 2 * width_x && padded.height() >= 2 * width_y,
                  Errc::invalid_parameter, "crop width exceeds input");
  Array2<T, A> out(padded.width() - 2 * width_x, padded.height() - 2 * width_y);
  for (std::size_t y = 0; y < out.height(); ++y) {
    const auto src = padded.row(y + width_y);
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(width_x), out.width(), out.row(y).begin());
  }
  return out;
}

/// Pad width actually used by the transform along an axis of n samples.
inline std::size_t effective_pad_width(const PstConfig& cfg, std::size_t n) {
  if (cfg.pad == PadMode::periodic || n <= 1) return 0;
  if (cfg.pad_width) {
    detail::check_pad_width(*cfg.pad_width, n);
    return *cfg.pad_width;
  }
  return std::min(std::max<std::size_t>(16, n / 8), n - 1);
}

// ---------------------------------------------------------------------------
// Stretch operator

namespace detail {

inline void check_kernels(std::size_t width, std::size_t height, const PhaseKernel& kernel,
                          const LocalizationKernel& lpf) {
  require(kernel.phase.width() == width && kernel.phase.height() == height, Errc::invalid_size,
          "phase kernel does not match input dimensions");
  require(lpf.gain.width() == width && lpf.gain.height() == height, Errc::invalid_size,
          "localization kernel does not match input dimensions");
}

// Real and imaginary parts of L * exp(j phi) on bins k = 0..width/2 and
// l = 0..height/2. Even kernels repeat row l at row height - l, so this block
// covers the whole half spectrum.
struct HalfKernel {
  AlignedField re;
  AlignedField im;
  std::size_t full_height = 0;

  std::size_t row_of(std::size_t l) const noexcept { return 2 * l <= full_height ? l : full_height - l; }
};

inline HalfKernel half_kernel(const PhaseKernel& kernel, const LocalizationKernel& lpf) {
  const std::size_t hw = kernel.phase.width() / 2 + 1;
  const std::size_t h = kernel.phase.height();
  const std::size_t hh = h / 2 + 1;
  HalfKernel out{AlignedField(hw, hh), AlignedField(hw, hh), h};
  for (std::size_t l = 0; l < hh; ++l) {
    for (std::size_t k = 0; k < hw; ++k) {
      const Complex z = std::polar(lpf.gain(k, l), kernel.phase(k, l));
      out.re(k, l) = z.real();
      out.im(k, l) = z.imag();
    }
  }
  return out;
}

// Same values as half_kernel(build_phase_kernel(...), build_lpf(...)) without
// materializing the full grids. On square grids the block is symmetric.
inline HalfKernel half_kernel(const FrequencyGrid& grid, double warp, double strength, double cutoff) {
  check_warp(warp, strength);
  const double r_max = grid.max_radius();
  require(r_max > 0.0, Errc::invalid_size, "degenerate frequency grid");
  const double norm = strength / warp_profile(warp * r_max);
  const std::size_t hw = grid.width() / 2 + 1;
  const std::size_t h = grid.height();
  const std::size_t hh = h / 2 + 1;
  const bool square = grid.width() == h;
  HalfKernel out{AlignedField(hw, hh), AlignedField(hw, hh), h};
  for (std::size_t l = 0; l < hh; ++l) {
    for (std::size_t k = 0; k < hw; ++k) {
      if (square && k < l) {
        out.re(k, l) = out.re(l, k);
        out.im(k, l) = out.im(l, k);
        continue;
      }
      const double r = grid.radius(k, l);
      const double phi = r == r_max ? strength : norm * warp_profile(warp * r);
      const Complex z = std::polar(lpf_gain(r, cutoff), phi);
      out.re(k, l) = z.real();
      out.im(k, l) = z.imag();
    }
  }
  return out;
}

// N * E_o split into real and imaginary parts. Both kernel parts are real and
// even, so each product with the Hermitian input spectrum is Hermitian and
// comes back through a real inverse transform. The input buffer is reused.
struct StretchParts {
  AlignedField re;
  AlignedField im;
};

inline StretchParts stretch_parts(AlignedField input, const HalfKernel& kernel) {
  HalfSpectrum x = forward_real(input);
  require(kernel.re.width() == x.width() && kernel.full_height == x.height(), Errc::invalid_size,
          "kernel does not match input dimensions");
  HalfSpectrum a{ComplexField(x.width(), x.height()), x.full_width};
  for (std::size_t l = 0; l < x.height(); ++l) {
    const auto kre = kernel.re.row(kernel.row_of(l));
    const auto kim = kernel.im.row(kernel.row_of(l));
    auto xs = x.bins.row(l);
    auto as = a.bins.row(l);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      as[k] = xs[k] * kre[k];
      xs[k] *= kim[k];
    }
  }
  inverse_real_unscaled(std::move(a), input);
  return {std::move(input), inverse_real_unscaled(std::move(x))};
}

inline ComplexField stretch_field(const AlignedField& input, const PhaseKernel& kernel,
                                  const LocalizationKernel& lpf) {
  const StretchParts parts = stretch_parts(input, half_kernel(kernel, lpf));
  const double scale = 1.0 / static_cast<double>(input.size());
  ComplexField out(input.width(), input.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(parts.re[i] * scale, parts.im[i] * scale);
  return out;
}

template <class Values>
AlignedField aligned_copy(const Values& values, std::size_t width, std::size_t height) {
  AlignedField out(width, height);
  std::copy(values.begin(), values.end(), out.begin());
  return out;
}

// Circular (periodic) taps of the 1D spatial kernel whose DFT is the sampled
// localization gain along an axis of n samples. taps[d] for d = 0..radius;
// the kernel is symmetric.
inline std::vector<double> localization_taps(std::size_t n, double cutoff) {
  const auto axis = frequency_axis(n);
  std::vector<double> taps;
  const std::size_t half = n / 2;
  for (std::size_t d = 0; d <= half; ++d) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sum += lpf_gain(std::abs(axis[k]), cutoff) *
             std::cos(2.0 * std::numbers::pi * axis[k] * static_cast<double>(d));
    }
    taps.push_back(sum / static_cast<double>(n));
    if (std::abs(taps.back()) < 1e-18 * std::abs(taps.front())) break;
  }
  return taps;
}

// Circular convolution along one axis with symmetric taps.
inline Field convolve_axis(const Field& in, const std::vector<double>& taps, bool along_x) {
  Field out(in.width(), in.height(), 0.0);
  const std::size_t n = along_x ? in.width() : in.height();
  const std::size_t lines = along_x ? in.height() : in.width();
  const auto radius = static_cast<std::ptrdiff_t>(taps.size()) - 1;
  const auto sn = static_cast<std::ptrdiff_t>(n);
  // Full-length kernels already cover every offset once.
  const bool full = 2 * static_cast<std::size_t>(radius) >= n;
  for (std::size_t line = 0; line < lines; ++line) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      if (full) {
        for (std::ptrdiff_t j = 0; j < sn; ++j) {
          const auto d = std::min(j, sn - j);
          const auto src = static_cast<std::size_t>((static_cast<std::ptrdiff_t>(i) - j + sn) % sn);
          const double v = along_x ? in(src, line) : in(line, src);
          if (d <= radius) sum += taps[static_cast<std::size_t>(d)] * v;
        }
      } else {
        for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
          const auto src = static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(i) - d) % sn + sn) % sn);
          const double v = along_x ? in(src, line) : in(line, src);
          sum += taps[static_cast<std::size_t>(std::abs(d))] * v;
        }
      }
      (along_x ? out(i, line) : out(line, i)) = sum;
    }
  }
  return out;
}

inline Field localize_spatially(const Field& padded, double cutoff) {
  Field out = convolve_axis(padded, localization_taps(padded.width(), cutoff), true);
  if (padded.height() > 1) out = convolve_axis(out, localization_taps(padded.height(), cutoff), false);
  return out;
}

inline double angle(const Complex& z) noexcept {
  if (z.real() == 0.0 && z.imag() == 0.0) return 0.0;
  const double a = std::atan2(z.imag(), z.real());
  return a == -std::numbers::pi ? std::numbers::pi : a;
}

}  // namespace detail

/// E_o = IDFT{ exp(j phi) * L * DFT{input} }. The kernels must be built on the
/// input's own (already padded) grid and be even in u and v, as every kernel
/// builder here produces.
inline ComplexField stretch(const Field& input, const PhaseKernel& kernel, const LocalizationKernel& lpf) {
  detail::check_kernels(input.width(), input.height(), kernel, lpf);
  detail::check_transform_shape(input.width(), input.height());
  return detail::stretch_field(detail::aligned_copy(input, input.width(), input.height()), kernel, lpf);
}

inline ComplexField stretch(std::span<const double> input, const PhaseKernel& kernel,
                            const LocalizationKernel& lpf) {
  detail::check_kernels(input.size(), 1, kernel, lpf);
  detail::check_transform_shape(input.size(), 1);
  return detail::stretch_field(detail::aligned_copy(input, input.size(), 1), kernel, lpf);
}

/// Per-sample angle of a complex field, in (-pi, pi]; zero-magnitude samples map to 0.
inline Field phase_of(const ComplexField& field) {
  Field out(field.width(), field.height());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = detail::angle(field[i]);
  return out;
}

namespace detail {

// Shared 1D/2D pipeline: pad, stretch, angle, crop. A height-1 field is a signal.
inline Field pst_field(const Field& input, const PstConfig& cfg) {
  cfg.validate();
  require(!input.empty(), Errc::invalid_size, "empty input");
  const bool is_1d = input.height() == 1;
  const std::size_t px = effective_pad_width(cfg, input.width());
  const std::size_t py = is_1d ? 0 : effective_pad_width(cfg, input.height());
  AlignedField padded;
  double cutoff = std::numeric_limits<double>::infinity();
  if (cfg.lpf && cfg.lpf_path == LpfPath::spatial) {
    const Field smoothed = localize_spatially(pad(input, cfg.pad, px, py), cfg.lpf->cutoff());
    padded = aligned_copy(smoothed, smoothed.width(), smoothed.height());
  } else {
    padded = pad_field<AlignedField>(input, cfg.pad, px, py);
    if (cfg.lpf) cutoff = cfg.lpf->cutoff();
  }
  const FrequencyGrid grid = grid_for(padded);

  const HalfKernel kernel = half_kernel(grid, cfg.warp, cfg.strength, cutoff);
  const StretchParts parts = stretch_parts(std::move(padded), kernel);
  // The common 1/N factor of the inverse transform does not change the angle.
  Field out(input.width(), input.height());
  for (std::size_t y = 0; y < out.height(); ++y) {
    for (std::size_t x = 0; x < out.width(); ++x) {
      out(x, y) = angle(Complex(parts.re(x + px, y + py), parts.im(x + px, y + py)));
    }
  }
  return out;
}

}  // namespace detail

/// Largest radial frequency of the kernel pst1d builds for an n-sample signal,
/// i.e. the r_max the closed-form oracles must use to match it.
inline double pst1d_r_max(std::size_t n, const PstConfig& cfg) {
  return freq_grid_1d(n + 2 * effective_pad_width(cfg, n)).max_radius();
}

/// Phase stretch transform of an intensity field (any positive scale).
inline FeatureMap pst2d(const Field& image, const PstConfig& cfg) {
  detail::require(image.width() >= 2 && image.height() >= 2, Errc::invalid_size,
                  "pst2d needs at least 2x2 pixels");
  return make_feature_map(detail::pst_field(image, cfg), Method::pst);
}

inline FeatureMap pst2d(const ImageF& image, const PstConfig& cfg) { return pst2d(image.pixels, cfg); }

/// 1D phase stretch transform; the kernel radius is r = |u|.
inline std::vector<double> pst1d(std::span<const double> signal, const PstConfig& cfg) {
  detail::require(signal.size() >= 2, Errc::invalid_size, "pst1d needs at least 2 samples");
  const Field out = detail::pst_field(as_row(signal), cfg);
  return {out.begin(), out.end()};
}

}  // namespace pst
