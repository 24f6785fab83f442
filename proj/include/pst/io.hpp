#pragma once

// Image and signal I/O: binary/ASCII PGM (8/16-bit, any maxval), grayscale or
// color PNG via libpng, and one-sample-per-line CSV signals.
//
// Requires linking libpng (the pst::io CMake target).

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pst/error.hpp"
#include "pst/transform.hpp"

namespace pst {

using Bytes = std::vector<std::uint8_t>;

inline Bytes read_bytes(std::istream& in) {
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(static_cast<bool>(in), Errc::io, "cannot open " + path.string());
  return read_bytes(in);
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  detail::require(static_cast<bool>(out), Errc::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  detail::require(static_cast<bool>(out), Errc::io, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// PGM

namespace detail {

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Next whitespace-delimited header token, skipping '#' comments.
  std::string token() {
    for (;;) {
      while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) ++pos_;
      if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) out.push_back(static_cast<char>(bytes_[pos_++]));
    require(!out.empty(), Errc::corrupt_file, "truncated PGM header");
    return out;
  }

  unsigned long number() {
    const std::string t = token();
    require(std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }),
            Errc::corrupt_file, "malformed PGM number '" + t + "'");
    return std::stoul(t);
  }

  // Single whitespace byte separating the header from binary data.
  void skip_separator() {
    require(pos_ < bytes_.size() && std::isspace(bytes_[pos_]), Errc::corrupt_file, "malformed PGM header");
    ++pos_;
  }

  std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline ImageF decode_pgm(std::span<const std::uint8_t> bytes) {
  PgmReader reader(bytes);
  const std::string magic = reader.token();
  require(magic == "P2" || magic == "P5", Errc::format, "not a grayscale PGM");
  const auto width = reader.number();
  const auto height = reader.number();
  const auto maxval = reader.number();
  require(width > 0 && height > 0, Errc::corrupt_file, "PGM has zero size");
  require(maxval > 0 && maxval <= 65535, Errc::corrupt_file, "PGM maxval out of range");

  Field pixels(width, height);
  const double full_scale = static_cast<double>(maxval);
  if (magic == "P2") {
    for (double& v : pixels) {
      const auto code = reader.number();
      require(code <= maxval, Errc::corrupt_file, "PGM sample exceeds maxval");
      v = static_cast<double>(code) / full_scale;
    }
  } else {
    reader.skip_separator();
    const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
    const auto data = reader.rest();
    require(data.size() >= pixels.size() * sample_bytes, Errc::corrupt_file, "truncated PGM data");
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      const unsigned code = sample_bytes == 1 ? data[i] : (unsigned{data[2 * i]} << 8) | data[2 * i + 1];
      require(code <= maxval, Errc::corrupt_file, "PGM sample exceeds maxval");
      pixels[i] = static_cast<double>(code) / full_scale;
    }
  }
  return ImageF{std::move(pixels), static_cast<unsigned>(maxval)};
}

inline unsigned to_code(double v, unsigned max_code) {
  const double scaled = std::clamp(v, 0.0, 1.0) * static_cast<double>(max_code);
  return static_cast<unsigned>(std::lround(scaled));
}

}  // namespace detail

/// Binary PGM (P5). Samples are rounded to the nearest code of [0, max_code].
inline Bytes encode_pgm(const Field& pixels, unsigned max_code) {
  detail::require(max_code > 0 && max_code <= 65535, Errc::invalid_parameter, "PGM maxval must lie in [1, 65535]");
  const std::string header =
      "P5\n" + std::to_string(pixels.width()) + " " + std::to_string(pixels.height()) + "\n" +
      std::to_string(max_code) + "\n";
  Bytes out(header.begin(), header.end());
  const bool wide = max_code > 255;
  out.reserve(out.size() + pixels.size() * (wide ? 2 : 1));
  for (double v : pixels) {
    const unsigned code = detail::to_code(v, max_code);
    if (wide) out.push_back(static_cast<std::uint8_t>(code >> 8));
    out.push_back(static_cast<std::uint8_t>(code & 0xff));
  }
  return out;
}

// ---------------------------------------------------------------------------
// PNG

namespace detail {

struct PngSource {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

inline void png_fail(png_structp png, png_const_charp message) {
  // Unwinds through libpng's C frames; every libpng allocation is owned by the
  // PngRead/PngWrite guards below.
  (void)png;
  throw Error(Errc::corrupt_file, std::string("PNG: ") + message);
}

inline void png_warn(png_structp, png_const_charp) {}

inline void png_read_mem(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->pos + length > src->bytes.size()) png_error(png, "truncated data");
  std::copy_n(src->bytes.data() + src->pos, length, out);
  src->pos += length;
}

struct PngRead {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngRead() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

inline ImageF decode_png(std::span<const std::uint8_t> bytes) {
  PngRead guard;
  guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  require(guard.png != nullptr, Errc::io, "libpng initialisation failed");
  guard.info = png_create_info_struct(guard.png);
  require(guard.info != nullptr, Errc::io, "libpng initialisation failed");

  PngSource source{bytes, 0};
  png_set_read_fn(guard.png, &source, png_read_mem);
  png_read_info(guard.png, guard.info);

  const png_uint_32 width = png_get_image_width(guard.png, guard.info);
  const png_uint_32 height = png_get_image_height(guard.png, guard.info);
  const int color = png_get_color_type(guard.png, guard.info);
  int depth = png_get_bit_depth(guard.png, guard.info);

  // Significant bits: 14-bit data in a 16-bit container declares sBIT = 14.
  int significant = depth;
  png_color_8p sbit = nullptr;
  if (png_get_sBIT(guard.png, guard.info, &sbit) && sbit) {
    significant = (color & PNG_COLOR_MASK_COLOR) ? std::max({int{sbit->red}, int{sbit->green}, int{sbit->blue}})
                                                 : int{sbit->gray};
    if (significant <= 0 || significant > depth) significant = depth;
  }

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(guard.png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(guard.png);
    significant = depth = 8;
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(guard.png);
  if (depth == 16) png_set_swap(guard.png);  // host little-endian 16-bit samples
  png_read_update_info(guard.png, guard.info);

  const int channels = png_get_channels(guard.png, guard.info);
  depth = png_get_bit_depth(guard.png, guard.info);
  const std::size_t row_bytes = png_get_rowbytes(guard.png, guard.info);
  std::vector<std::uint8_t> data(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = data.data() + y * row_bytes;
  png_read_image(guard.png, rows.data());

  const unsigned shift = static_cast<unsigned>(depth - significant);
  const unsigned max_code = (1u << significant) - 1u;
  const double full_scale = static_cast<double>(max_code);
  Field pixels(width, height);
  for (png_uint_32 y = 0; y < height; ++y) {
    for (png_uint_32 x = 0; x < width; ++x) {
      auto sample = [&](int c) -> double {
        const std::size_t i = static_cast<std::size_t>(x) * channels + c;
        unsigned code = depth == 16 ? unsigned{reinterpret_cast<const std::uint16_t*>(rows[y])[i]} : rows[y][i];
        return static_cast<double>(code >> shift) / full_scale;
      };
      // Rec. 601 luma for color input.
      pixels(x, y) = channels >= 3 ? std::clamp(0.299 * sample(0) + 0.587 * sample(1) + 0.114 * sample(2), 0.0, 1.0)
                                   : sample(0);
    }
  }
  return ImageF{std::move(pixels), max_code};
}

struct PngWrite {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWrite() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

inline void png_write_mem(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

inline void png_flush_mem(png_structp) {}

}  // namespace detail

/// Grayscale PNG. Depths above 8 are stored in 16-bit samples with an sBIT
/// chunk declaring the significant bits.
inline Bytes encode_png(const Field& pixels, int depth) {
  detail::require(depth >= 1 && depth <= 16, Errc::invalid_parameter, "PNG depth must lie in [1, 16]");
  detail::PngWrite guard;
  guard.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_fail, detail::png_warn);
  detail::require(guard.png != nullptr, Errc::io, "libpng initialisation failed");
  guard.info = png_create_info_struct(guard.png);
  detail::require(guard.info != nullptr, Errc::io, "libpng initialisation failed");

  Bytes out;
  png_set_write_fn(guard.png, &out, detail::png_write_mem, detail::png_flush_mem);
  const int container = depth <= 8 ? 8 : 16;
  png_set_IHDR(guard.png, guard.info, static_cast<png_uint_32>(pixels.width()),
               static_cast<png_uint_32>(pixels.height()), container, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (depth != container) {
    png_color_8 sbit{};
    sbit.gray = static_cast<png_byte>(depth);
    png_set_sBIT(guard.png, guard.info, &sbit);
  }
  png_write_info(guard.png, guard.info);

  const unsigned max_code = (1u << depth) - 1u;
  const unsigned shift = static_cast<unsigned>(container - depth);
  std::vector<std::uint8_t> row(pixels.width() * (container / 8));
  for (std::size_t y = 0; y < pixels.height(); ++y) {
    const auto src = pixels.row(y);
    for (std::size_t x = 0; x < src.size(); ++x) {
      const unsigned code = detail::to_code(src[x], max_code) << shift;
      if (container == 16) {
        row[2 * x] = static_cast<std::uint8_t>(code >> 8);
        row[2 * x + 1] = static_cast<std::uint8_t>(code & 0xff);
      } else {
        row[x] = static_cast<std::uint8_t>(code);
      }
    }
    png_write_row(guard.png, row.data());
  }
  png_write_end(guard.png, nullptr);
  return out;
}

// ---------------------------------------------------------------------------
// Image files

inline ImageF decode_image(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  detail::require(bytes.size() >= 2, Errc::format, "input too short to identify");
  if (bytes.size() >= 8 && std::equal(std::begin(png_magic), std::end(png_magic), bytes.begin())) {
    return detail::decode_png(bytes);
  }
  if (bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return detail::decode_pgm(bytes);
  detail::fail(Errc::format, "unrecognized image format (expected PGM P2/P5 or PNG)");
}

inline ImageF load_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

inline bool has_png_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

/// Encodes by extension: .png writes PNG, anything else binary PGM.
inline Bytes encode_image(const ImageF& image, const std::filesystem::path& path) {
  if (has_png_extension(path)) return encode_png(image.pixels, image.bit_depth());
  return encode_pgm(image.pixels, image.max_code);
}

inline void save_image(const ImageF& image, const std::filesystem::path& path) {
  write_file(path, encode_image(image, path));
}

/// Saves at an explicit bit depth (max code 2^depth - 1).
inline void save_image(const ImageF& image, const std::filesystem::path& path, int depth) {
  detail::require(depth >= 1 && depth <= 16, Errc::invalid_parameter, "depth must lie in [1, 16]");
  save_image(ImageF{image.pixels, (1u << depth) - 1u}, path);
}

/// Min-max scaling applied when a feature map is written as an image.
struct MapScaling {
  double min = 0.0;
  double max = 0.0;

  std::string sidecar_text(Method method, int depth) const {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "method " << to_string(method) << "\n"
        << "min " << min << "\n"
        << "max " << max << "\n"
        << "depth " << depth << "\n";
    return out.str();
  }
};

/// Maps [min, max] of the feature map onto [0, 1]; a constant map becomes all zero.
inline ImageF scale_feature_map(const FeatureMap& map, int depth, MapScaling* scaling = nullptr) {
  const double lo = map.min_value;
  const double hi = map.max_value;
  Field pixels(map.values.width(), map.values.height(), 0.0);
  if (hi > lo) {
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = (map.values[i] - lo) / (hi - lo);
  }
  if (scaling) *scaling = {lo, hi};
  return ImageF{std::move(pixels), (1u << depth) - 1u};
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return path.string() + ".scale.txt";
}

/// Writes the min-max scaled map and a "<path>.scale.txt" sidecar with the mapping.
inline MapScaling save_feature_map(const FeatureMap& map, const std::filesystem::path& path, int depth = 8) {
  detail::require(depth >= 1 && depth <= 16, Errc::invalid_parameter, "depth must lie in [1, 16]");
  MapScaling scaling;
  const ImageF image = scale_feature_map(map, depth, &scaling);
  save_image(image, path);
  const std::string text = scaling.sidecar_text(map.method, depth);
  write_file(sidecar_path(path), std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return scaling;
}

// ---------------------------------------------------------------------------
// CSV signals

inline void write_signal_csv(std::ostream& out, std::span<const double> signal) {
  std::ostringstream text;
  text << std::setprecision(17);
  for (double v : signal) text << v << "\n";
  out << text.str();
}

inline void write_signal_csv(const std::filesystem::path& path, std::span<const double> signal) {
  std::ofstream out(path);
  detail::require(static_cast<bool>(out), Errc::io, "cannot write " + path.string());
  write_signal_csv(out, signal);
}

/// Columns of equal length under a header row.
inline void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& columns) {
  detail::require(header.size() == columns.size() && !columns.empty(), Errc::invalid_size, "malformed table");
  std::ostringstream text;
  text << std::setprecision(17);
  for (std::size_t c = 0; c < header.size(); ++c) text << (c ? "," : "") << header[c];
  text << "\n";
  for (std::size_t r = 0; r < columns[0].size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) text << (c ? "," : "") << columns[c][r];
    text << "\n";
  }
  out << text.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline bool parse_double(const std::string& text, double& value) {
  if (text.empty()) return false;
  try {
    std::size_t used = 0;
    value = std::stod(text, &used);
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace detail

/// One sample per line. An optional header row (e.g. "index,value") is
/// detected when the first non-blank line is not numeric; with several columns
/// the "value" column is read, else the last column.
inline std::vector<double> read_signal_csv(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  std::size_t column = std::numeric_limits<std::size_t>::max();  // unset: last column
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto cells = detail::split_commas(line);
    if (first) {
      first = false;
      double probe = 0.0;
      if (!detail::parse_double(cells.back(), probe)) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (cells[c] == "value") column = c;
        }
        if (column == std::numeric_limits<std::size_t>::max()) column = cells.size() - 1;
        continue;
      }
    }
    const std::size_t c = column < cells.size() ? column : cells.size() - 1;
    double value = 0.0;
    if (!detail::parse_double(cells[c], value)) {
      detail::fail(Errc::parse, "line " + std::to_string(line_no) + ": not a number: '" + line + "'");
    }
    out.push_back(value);
  }
  return out;
}

inline std::vector<double> read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), Errc::io, "cannot open " + path.string());
  return read_signal_csv(in);
}

}  // namespace pst
