#pragma once

// Deterministic synthetic inputs with known edge locations: a smooth pulse,
// a contrast staircase, an HDR test card, and line scans of images. Also the
// ground-truth scoring helpers used by the CLI reports and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pst/array.hpp"
#include "pst/error.hpp"
#include "pst/transform.hpp"

namespace pst {

enum class Region { none, dark, bright, ramp };

inline const char* to_string(Region r) noexcept {
  switch (r) {
    case Region::none: return "none";
    case Region::dark: return "dark";
    case Region::bright: return "bright";
    case Region::ramp: return "ramp";
  }
  return "?";
}

enum class Polarity { rising, falling };

/// A vertical edge at column x spanning rows [y_begin, y_end). For signals the
/// row span is [0, 1).
struct Edge {
  std::size_t x = 0;
  std::size_t y_begin = 0;
  std::size_t y_end = 1;
  double contrast = 0.0;
  double base = 0.0;
  Polarity polarity = Polarity::rising;
  Region region = Region::none;
};

struct EdgeGroundTruth {
  std::vector<Edge> edges;
};

struct SyntheticSignal {
  std::vector<double> samples;
  EdgeGroundTruth truth;
};

struct SyntheticImage {
  ImageF image;
  EdgeGroundTruth truth;
};

namespace detail {

// Unit step smoothed by a Gaussian of the given sigma, centred at `edge`.
inline double smoothed_step(double x, double edge, double sigma) {
  if (sigma <= 0.0) return x < edge ? 0.0 : (x > edge ? 1.0 : 0.5);
  return 0.5 * (1.0 + std::erf((x - edge) / (sigma * std::numbers::sqrt2)));
}

}  // namespace detail

/// Raised-cosine pulse of full width `width` on a constant base. The taper is
/// (0.5 (1 + cos))^power; power 2 keeps derivatives continuous through third
/// order so the spectrum decays fast. Ground truth marks the two half-amplitude
/// points of the flanks.
inline SyntheticSignal smooth_pulse(std::size_t n, double center, double width, double amplitude, double base,
                                    int power = 2) {
  using detail::require;
  require(width > 0.0 && width < static_cast<double>(n), Errc::invalid_parameter, "pulse width must lie in (0, n)");
  require(base >= 0.0 && amplitude >= 0.0 && base + amplitude <= 1.0, Errc::invalid_parameter,
          "pulse must satisfy base >= 0, amplitude >= 0, base + amplitude <= 1");
  require(center - width / 2 >= 0.0 && center + width / 2 <= static_cast<double>(n - 1), Errc::invalid_parameter,
          "pulse must fit inside the signal");
  require(power >= 1, Errc::invalid_parameter, "taper power must be >= 1");

  SyntheticSignal out{std::vector<double>(n, base), {}};
  for (std::size_t k = 0; k < n; ++k) {
    const double d = static_cast<double>(k) - center;
    if (std::abs(d) >= width / 2) continue;
    const double taper = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * d / width));
    out.samples[k] = base + amplitude * std::pow(taper, power);
  }
  if (amplitude > 0.0) {
    // (0.5 (1 + cos t))^p = 1/2  =>  cos t = 2 * 2^(-1/p) - 1
    const double t = std::acos(2.0 * std::pow(0.5, 1.0 / power) - 1.0);
    const double offset = width * t / (2.0 * std::numbers::pi);
    const auto left = static_cast<std::size_t>(std::lround(center - offset));
    const auto right = static_cast<std::size_t>(std::lround(center + offset));
    out.truth.edges.push_back({left, 0, 1, amplitude, base, Polarity::rising, Region::none});
    out.truth.edges.push_back({right, 0, 1, amplitude, base, Polarity::falling, Region::none});
  }
  return out;
}

/// Rectangular steps of the given contrasts on a common base, each returning to
/// the base. Step i occupies segment i of n/len(contrasts) samples, rising at a
/// quarter and falling at three quarters of the segment. Edges are Gaussian
/// smoothed with `edge_sigma`.
inline SyntheticSignal staircase(std::size_t n, std::span<const double> contrasts, double base,
                                 double edge_sigma = 1.0) {
  using detail::require;
  require(n >= 2, Errc::invalid_parameter, "staircase needs at least 2 samples");
  require(base >= 0.0 && base <= 1.0, Errc::invalid_parameter, "base must lie in [0, 1]");
  require(edge_sigma >= 0.0, Errc::invalid_parameter, "edge sigma must be >= 0");
  SyntheticSignal out{std::vector<double>(n, base), {}};
  if (contrasts.empty()) return out;

  const double segment = static_cast<double>(n) / static_cast<double>(contrasts.size());
  require(segment >= 8.0, Errc::invalid_parameter, "too many steps for the signal length");
  for (std::size_t i = 0; i < contrasts.size(); ++i) {
    const double c = contrasts[i];
    require(c > 0.0 && base + c <= 1.0, Errc::invalid_parameter, "step contrast must be > 0 with base + contrast <= 1");
    const auto rise = static_cast<std::size_t>(std::lround(segment * static_cast<double>(i) + segment / 4));
    const auto fall = static_cast<std::size_t>(std::lround(segment * static_cast<double>(i) + 3 * segment / 4));
    for (std::size_t k = 0; k < n; ++k) {
      const auto x = static_cast<double>(k);
      const double box = detail::smoothed_step(x, static_cast<double>(rise), edge_sigma) -
                         detail::smoothed_step(x, static_cast<double>(fall), edge_sigma);
      out.samples[k] += c * box;
    }
    out.truth.edges.push_back({rise, 0, 1, c, base, Polarity::rising, Region::none});
    out.truth.edges.push_back({fall, 0, 1, c, base, Polarity::falling, Region::none});
  }
  for (double& v : out.samples) v = std::clamp(v, 0.0, 1.0);
  return out;
}

struct TestCardLevels {
  double dark_base = 0.02;
  double dark_contrast = 0.01;
  double bright_base = 0.9;
  double bright_contrast = 0.05;
  double ramp_start = 0.9;
  double ramp_end = 0.1;
  double ramp_contrast = 0.05;
  double blank = 0.5;
  std::size_t bars_per_quadrant = 4;
  double edge_sigma = 1.0;
};

/// HDR test card made of four quadrants:
///   top-left     dark base with low-contrast bars
///   top-right    bright base with bars
///   bottom-left  brightness ramp falling left to right, with bars
///   bottom-right blank mid-gray control
/// Bars are vertical; every bar contributes a rising and a falling edge.
inline SyntheticImage hdr_testcard(std::size_t width, std::size_t height, const TestCardLevels& levels = {},
                                   unsigned max_code = 16383) {
  detail::require(width >= 64 && height >= 64, Errc::invalid_parameter, "test card needs at least 64x64 pixels");
  const std::size_t qw = width / 2;
  const std::size_t qh = height / 2;
  Field pixels(width, height, levels.blank);
  EdgeGroundTruth truth;

  // Per-quadrant bar profile: offsets of each bar relative to the quadrant base.
  const double pitch = static_cast<double>(qw) / static_cast<double>(levels.bars_per_quadrant);
  std::vector<double> bars(qw, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> bar_edges;
  for (std::size_t b = 0; b < levels.bars_per_quadrant; ++b) {
    const auto rise = static_cast<std::size_t>(std::lround(pitch * static_cast<double>(b) + 0.3 * pitch));
    const auto fall = static_cast<std::size_t>(std::lround(pitch * static_cast<double>(b) + 0.7 * pitch));
    bar_edges.emplace_back(rise, fall);
    for (std::size_t x = 0; x < qw; ++x) {
      const auto fx = static_cast<double>(x);
      bars[x] += detail::smoothed_step(fx, static_cast<double>(rise), levels.edge_sigma) -
                 detail::smoothed_step(fx, static_cast<double>(fall), levels.edge_sigma);
    }
  }

  auto add_edges = [&](std::size_t x0, std::size_t y0, double contrast, Region region, auto base_at) {
    for (auto [rise, fall] : bar_edges) {
      truth.edges.push_back({x0 + rise, y0, y0 + qh, contrast, base_at(rise), Polarity::rising, region});
      truth.edges.push_back({x0 + fall, y0, y0 + qh, contrast, base_at(fall), Polarity::falling, region});
    }
  };

  const double ramp_span = static_cast<double>(qw * qh - 1);
  auto ramp_value = [&](std::size_t x, std::size_t y) {
    const double t = static_cast<double>(x * qh + y) / ramp_span;
    return levels.ramp_start + (levels.ramp_end - levels.ramp_start) * t;
  };

  for (std::size_t y = 0; y < qh; ++y) {
    for (std::size_t x = 0; x < qw; ++x) {
      pixels(x, y) = levels.dark_base + levels.dark_contrast * bars[x];
      pixels(qw + x, y) = levels.bright_base + levels.bright_contrast * bars[x];
      pixels(x, qh + y) = ramp_value(x, y) + levels.ramp_contrast * bars[x];
    }
  }
  add_edges(0, 0, levels.dark_contrast, Region::dark, [&](std::size_t) { return levels.dark_base; });
  add_edges(qw, 0, levels.bright_contrast, Region::bright, [&](std::size_t) { return levels.bright_base; });
  add_edges(0, qh, levels.ramp_contrast, Region::ramp, [&](std::size_t x) { return ramp_value(x, qh / 2); });

  for (double& v : pixels) v = std::clamp(v, 0.0, 1.0);
  return {make_image(std::move(pixels), max_code), std::move(truth)};
}

inline std::vector<double> line_scan(const ImageF& image, std::size_t row) {
  detail::require(row < image.height(), Errc::invalid_index,
                  "row " + std::to_string(row) + " outside image of height " + std::to_string(image.height()));
  const auto src = image.pixels.row(row);
  return {src.begin(), src.end()};
}

inline void write_row(ImageF& image, std::size_t row, std::span<const double> signal) {
  detail::require(row < image.height(), Errc::invalid_index, "row outside image");
  detail::require(signal.size() == image.width(), Errc::invalid_size, "signal length does not match image width");
  std::copy(signal.begin(), signal.end(), image.pixels.row(row).begin());
}

// ---------------------------------------------------------------------------
// Ground-truth scoring

/// Largest |response| within +-window samples of x on the given row.
inline double edge_response(const Field& response, std::size_t x, std::size_t y, std::size_t window) {
  const std::size_t lo = x >= window ? x - window : 0;
  const std::size_t hi = std::min(response.width() - 1, x + window);
  double peak = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) peak = std::max(peak, std::abs(response(i, y)));
  return peak;
}

/// Peak response per ground-truth edge of a signal.
inline std::vector<double> edge_peaks(std::span<const double> response, const EdgeGroundTruth& truth,
                                      std::size_t window = 4) {
  const Field row = as_row(response);
  std::vector<double> peaks;
  for (const Edge& e : truth.edges) {
    detail::require(e.x < response.size(), Errc::invalid_index, "edge outside signal");
    peaks.push_back(edge_response(row, e.x, 0, window));
  }
  return peaks;
}

/// Largest relative departure of peak_i / contrast_i from that of the first edge.
inline double proportionality_deviation(std::span<const double> peaks, std::span<const double> contrasts) {
  detail::require(peaks.size() == contrasts.size() && !peaks.empty(), Errc::invalid_size,
                  "peaks and contrasts must be non-empty and of equal length");
  const double reference = peaks[0] / contrasts[0];
  double worst = 0.0;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    worst = std::max(worst, std::abs(peaks[i] / contrasts[i] / reference - 1.0));
  }
  return worst;
}

struct EdgePixelResponse {
  std::size_t edge_index = 0;
  Region region = Region::none;
  double value = 0.0;
};

/// Edge response at every pixel of every ground-truth edge, skipping `margin`
/// rows at each end of the edge.
inline std::vector<EdgePixelResponse> edge_pixel_responses(const Field& response, const EdgeGroundTruth& truth,
                                                           std::size_t window = 3, std::size_t margin = 8) {
  std::vector<EdgePixelResponse> out;
  for (std::size_t i = 0; i < truth.edges.size(); ++i) {
    const Edge& e = truth.edges[i];
    detail::require(e.x < response.width() && e.y_end <= response.height(), Errc::invalid_index,
                    "edge outside response map");
    for (std::size_t y = e.y_begin + margin; y + margin < e.y_end; ++y) {
      out.push_back({i, e.region, edge_response(response, e.x, y, window)});
    }
  }
  return out;
}

}  // namespace pst
