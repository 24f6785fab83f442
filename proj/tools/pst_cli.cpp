// pst: command-line front end for the phase stretch transform library.
//
//   pst transform      --method pst|derivative|hybrid|oracle --in <file|-|synth:KIND>
//   pst compare-oracle [--in signal.csv] [--preset fig2] --order 6 --strength-scale small
//   pst sweep-contrast [--contrasts 0.05,0.1,0.2] [--base 0.3]
//   pst hybrid         [--in image|synth:testcard]
//   pst synth          pulse|staircase|testcard [--out file] [--truth-out truth.json]
//   pst line-scan      --in image --row R
//
// Exit codes: 0 success, 1 compute failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "pst/io.hpp"
#include "pst/pst.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitCompute = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Options

struct Options {
  // transform parameters
  std::optional<double> warp;
  std::optional<double> strength;
  std::string preset;
  std::string lpf;  // number, or "none"
  std::string lpf_domain = "spatial";
  std::string lpf_path = "frequency";
  std::string pad = "mirror";
  std::optional<std::size_t> pad_width;
  int order = 6;
  double epsilon = 1e-6;
  double q_lo = 0.0;
  double q_hi = 1.0;
  double deriv_sigma = 2.0;
  double percentile = 0.99;

  // I/O
  std::string in;
  std::string out;
  std::string report;
  std::string truth;
  std::string threshold_out;
  std::string config;
  int depth = 8;

  // command specific
  std::string method = "pst";
  std::string strength_scale = "raw";
  std::optional<std::size_t> row;
  std::string pst_out;
  std::string deriv_out;
  std::string truth_out;
  std::string kind;

  // synthetic input generators
  std::size_t n = 512;
  std::optional<double> center;
  std::optional<double> pulse_width;
  double amplitude = 0.6;
  std::optional<double> base;
  std::string contrasts = "0.05,0.1,0.2";
  double edge_sigma = 1.0;
  int taper_power = 2;
  std::size_t width = 256;
  std::size_t height = 256;
  std::optional<int> synth_depth;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

void add_transform_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--warp", o.warp, "Kernel warp W (> 0)");
  cmd->add_option("--strength", o.strength, "Kernel strength S: peak phase in radians (>= 0)");
  cmd->add_option("--preset", o.preset, "Parameter preset")->check(CLI::IsMember({"fig1", "fig2", "fig3-4"}));
  cmd->add_option("--lpf", o.lpf, "Localization kernel value, or 'none' (default: sigma 2 px)");
  cmd->add_option("--lpf-domain", o.lpf_domain, "Read --lpf as a frequency cutoff or a spatial sigma")
      ->check(CLI::IsMember({"freq", "spatial"}));
  cmd->add_option("--lpf-path", o.lpf_path, "Apply the localization kernel in frequency or spatial domain")
      ->check(CLI::IsMember({"frequency", "spatial"}));
  cmd->add_option("--pad", o.pad, "Boundary padding")->check(CLI::IsMember({"mirror", "periodic", "zero"}));
  cmd->add_option("--pad-width", o.pad_width, "Padding per side in samples (default max(16, n/8))");
  cmd->add_option("--order", o.order, "Taylor order M used by the oracle (even)");
  cmd->add_option("--epsilon", o.epsilon, "Oracle denominator floor, fraction of max intensity");
  cmd->add_option("--q-lo", o.q_lo, "Lower threshold quantile");
  cmd->add_option("--q-hi", o.q_hi, "Upper threshold quantile");
  cmd->add_option("--deriv-sigma", o.deriv_sigma, "Derivative-of-Gaussian sigma in pixels");
  cmd->add_option("--percentile", o.percentile, "Hybrid normalization percentile");
  cmd->add_option("--config", o.config, "JSON file with option values (flags take precedence)");
}

// All subcommands share one Options, so the per-command default input is
// filled in after parsing.
std::map<const CLI::App*, std::string> default_inputs;

void add_io_options(CLI::App* cmd, Options& o, const std::string& default_in) {
  default_inputs[cmd] = default_in;
  const std::string help = "Input: image (PGM/PNG), signal CSV, '-' for stdin, or synth:KIND";
  cmd->add_option("--in", o.in, default_in.empty() ? help : help + " [default: " + default_in + "]");
  cmd->add_option("--out", o.out, "Output path ('-' for stdout)");
  cmd->add_option("--report", o.report, "JSON report path ('-' for stdout)");
  cmd->add_option("--truth", o.truth, "Ground-truth JSON written by 'pst synth --truth-out'");
  cmd->add_option("--depth", o.depth, "Bit depth of feature-map images")->check(CLI::Range(1, 16));
}

void add_synth_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "Signal length");
  cmd->add_option("--center", o.center, "Pulse center (default n/2)");
  cmd->add_option("--pulse-width", o.pulse_width, "Pulse full width (default n/4)");
  cmd->add_option("--amplitude", o.amplitude, "Pulse amplitude");
  cmd->add_option("--base", o.base, "Base brightness (pulse 0.2, staircase 0.3)");
  cmd->add_option("--contrasts", o.contrasts, "Comma-separated staircase contrasts");
  cmd->add_option("--edge-sigma", o.edge_sigma, "Edge smoothing sigma in samples");
  cmd->add_option("--taper-power", o.taper_power, "Pulse taper exponent");
  cmd->add_option("--width", o.width, "Test card width");
  cmd->add_option("--height", o.height, "Test card height");
  cmd->add_option("--synth-depth", o.synth_depth, "Test card bit depth (default 14)");
  cmd->add_option("--noise", o.noise, "Additive Gaussian noise sigma");
  cmd->add_option("--seed", o.seed, "Noise seed");
}

// Values from --config fill every option not given on the command line.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!config.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    CLI::Option* opt = nullptr;
    try {
      opt = cmd->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("config file: unknown option '" + key + "'");
    }
    if (opt->count() > 0) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (const auto& v : value) text += (text.empty() ? "" : ",") + v.dump();
    } else {
      text = value.dump();
    }
    try {
      opt->add_result(text);
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw UsageError("config file: option '" + key + "': " + e.what());
    }
  }
}

pst::PstConfig build_config(const Options& o) {
  pst::PstConfig cfg;
  if (!o.preset.empty()) {
    if (o.warp || o.strength) throw UsageError("--preset conflicts with explicit --warp/--strength");
    const auto preset = pst::find_preset(o.preset);
    if (!preset) throw UsageError("unknown preset " + o.preset);
    cfg.warp = preset->warp;
    cfg.strength = preset->strength;
  }
  if (o.warp) cfg.warp = *o.warp;
  if (o.strength) cfg.strength = *o.strength;

  if (o.lpf == "none") {
    cfg.lpf.reset();
  } else if (!o.lpf.empty()) {
    double value = 0.0;
    if (!pst::detail::parse_double(o.lpf, value)) throw UsageError("--lpf expects a number or 'none'");
    cfg.lpf = pst::Localization{value, o.lpf_domain == "freq" ? pst::LpfUnits::cutoff : pst::LpfUnits::sigma_px};
  } else if (o.lpf_domain == "freq") {
    throw UsageError("--lpf-domain freq needs an explicit --lpf cutoff");
  }
  cfg.lpf_path = o.lpf_path == "spatial" ? pst::LpfPath::spatial : pst::LpfPath::frequency;
  cfg.pad = o.pad == "periodic" ? pst::PadMode::periodic
            : o.pad == "zero"   ? pst::PadMode::zero
                                : pst::PadMode::mirror;
  cfg.pad_width = o.pad_width;
  cfg.taylor_order = o.order;
  cfg.epsilon = o.epsilon;
  cfg.q_lo = o.q_lo;
  cfg.q_hi = o.q_hi;
  cfg.validate();
  return cfg;
}

json config_json(const pst::PstConfig& cfg, const Options& o) {
  json j;
  j["warp"] = cfg.warp;
  j["strength"] = cfg.strength;
  j["preset"] = o.preset.empty() ? json(nullptr) : json(o.preset);
  if (cfg.lpf) {
    j["lpf"] = {{"value", cfg.lpf->value},
                {"units", cfg.lpf->units == pst::LpfUnits::cutoff ? "cutoff" : "sigma_px"},
                {"cutoff", cfg.lpf->cutoff()}};
  } else {
    j["lpf"] = nullptr;
  }
  j["lpf_path"] = cfg.lpf_path == pst::LpfPath::spatial ? "spatial" : "frequency";
  j["pad"] = o.pad;
  j["pad_width"] = cfg.pad_width ? json(*cfg.pad_width) : json("auto");
  j["order"] = cfg.taylor_order;
  j["epsilon"] = cfg.epsilon;
  j["q_lo"] = cfg.q_lo;
  j["q_hi"] = cfg.q_hi;
  j["deriv_sigma"] = o.deriv_sigma;
  return j;
}

// ---------------------------------------------------------------------------
// Ground truth JSON

json truth_json(const pst::EdgeGroundTruth& truth) {
  json edges = json::array();
  for (const auto& e : truth.edges) {
    edges.push_back({{"x", e.x},
                     {"y_begin", e.y_begin},
                     {"y_end", e.y_end},
                     {"contrast", e.contrast},
                     {"base", e.base},
                     {"polarity", e.polarity == pst::Polarity::rising ? "rising" : "falling"},
                     {"region", pst::to_string(e.region)}});
  }
  return {{"schema", 1}, {"edges", edges}};
}

pst::EdgeGroundTruth truth_from_json(const json& j) {
  pst::EdgeGroundTruth truth;
  for (const auto& e : j.at("edges")) {
    pst::Edge edge;
    edge.x = e.at("x").get<std::size_t>();
    edge.y_begin = e.value("y_begin", std::size_t{0});
    edge.y_end = e.value("y_end", std::size_t{1});
    edge.contrast = e.at("contrast").get<double>();
    edge.base = e.value("base", 0.0);
    edge.polarity = e.value("polarity", std::string("rising")) == "falling" ? pst::Polarity::falling
                                                                            : pst::Polarity::rising;
    const std::string region = e.value("region", std::string("none"));
    edge.region = region == "dark"     ? pst::Region::dark
                  : region == "bright" ? pst::Region::bright
                  : region == "ramp"   ? pst::Region::ramp
                                       : pst::Region::none;
    truth.edges.push_back(edge);
  }
  return truth;
}

// ---------------------------------------------------------------------------
// Inputs

struct SignalInput {
  std::vector<double> samples;
};

struct ImageInput {
  pst::ImageF image;
};

struct Input {
  std::variant<SignalInput, ImageInput> data;
  std::optional<pst::EdgeGroundTruth> truth;
  std::string source;

  bool is_signal() const { return std::holds_alternative<SignalInput>(data); }
  const std::vector<double>& signal() const { return std::get<SignalInput>(data).samples; }
  const pst::ImageF& image() const { return std::get<ImageInput>(data).image; }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& cell : pst::detail::split_commas(text)) {
    if (cell.empty()) continue;
    double v = 0.0;
    if (!pst::detail::parse_double(cell, v)) throw UsageError("not a number in list: '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

void add_noise(std::span<double> values, const Options& o) {
  if (o.noise <= 0.0) return;
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> dist(0.0, o.noise);
  for (double& v : values) v = std::clamp(v + dist(rng), 0.0, 1.0);
}

Input generate(const std::string& kind, const Options& o) {
  Input input;
  input.source = "synth:" + kind;
  if (kind == "pulse") {
    const double center = o.center.value_or(static_cast<double>(o.n) / 2.0);
    const double width = o.pulse_width.value_or(static_cast<double>(o.n) / 4.0);
    auto s = pst::smooth_pulse(o.n, center, width, o.amplitude, o.base.value_or(0.2), o.taper_power);
    add_noise(s.samples, o);
    input.data = SignalInput{std::move(s.samples)};
    input.truth = std::move(s.truth);
  } else if (kind == "staircase") {
    const auto contrasts = parse_list(o.contrasts);
    auto s = pst::staircase(o.n, contrasts, o.base.value_or(0.3), o.edge_sigma);
    add_noise(s.samples, o);
    input.data = SignalInput{std::move(s.samples)};
    input.truth = std::move(s.truth);
  } else if (kind == "testcard") {
    const int depth = o.synth_depth.value_or(14);
    if (depth < 1 || depth > 16) throw UsageError("--synth-depth must lie in [1, 16]");
    auto card = pst::hdr_testcard(o.width, o.height, {}, (1u << depth) - 1u);
    add_noise(card.image.pixels.values(), o);
    input.data = ImageInput{std::move(card.image)};
    input.truth = std::move(card.truth);
  } else {
    throw UsageError("unknown synthetic input '" + kind + "' (pulse, staircase, testcard)");
  }
  return input;
}

bool looks_like_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return true;
  return bytes.size() >= 4 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G';
}

Input load_input(const Options& o) {
  if (o.in.empty()) throw UsageError("--in is required");
  Input input;
  if (o.in.rfind("synth:", 0) == 0) {
    input = generate(o.in.substr(6), o);
  } else {
    input.source = o.in;
    const pst::Bytes bytes = o.in == "-" ? pst::read_bytes(std::cin) : pst::read_file(o.in);
    if (looks_like_image(bytes)) {
      input.data = ImageInput{pst::decode_image(bytes)};
    } else {
      std::istringstream text(std::string(bytes.begin(), bytes.end()));
      input.data = SignalInput{pst::read_signal_csv(text)};
    }
  }
  if (!o.truth.empty()) {
    std::ifstream in(o.truth);
    if (!in) throw pst::Error(pst::Errc::io, "cannot open " + o.truth);
    try {
      input.truth = truth_from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw pst::Error(pst::Errc::parse, o.truth + ": " + e.what());
    }
  }
  return input;
}

json input_json(const Input& input) {
  json j{{"source", input.source}};
  if (input.is_signal()) {
    j["kind"] = "signal";
    j["length"] = input.signal().size();
  } else {
    j["kind"] = "image";
    j["width"] = input.image().width();
    j["height"] = input.image().height();
    j["max_code"] = input.image().max_code;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Outputs

void emit_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  if (path == "-") {
    std::cout.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    std::cout.flush();
  } else {
    pst::write_file(path, bytes);
  }
}

void emit_text(const std::string& path, const std::string& text) {
  emit_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string table_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  std::ostringstream out;
  pst::write_table_csv(out, header, columns);
  return out.str();
}

std::vector<double> indices(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(i);
  return out;
}

json write_map(const pst::FeatureMap& map, const std::string& path, int depth) {
  if (path.empty()) return nullptr;
  pst::MapScaling scaling;
  const pst::ImageF image = pst::scale_feature_map(map, depth, &scaling);
  if (path == "-") {
    emit_bytes(path, pst::encode_pgm(image.pixels, image.max_code));
  } else {
    pst::save_image(image, path);
    emit_text(pst::sidecar_path(path).string(), scaling.sidecar_text(map.method, depth));
  }
  return {{"path", path}, {"min", scaling.min}, {"max", scaling.max}, {"depth", depth}};
}

void write_report(const std::string& path, json report) {
  if (path.empty()) return;
  report["schema"] = 1;
  emit_text(path, report.dump(2) + "\n");
}

json range_json(std::span<const double> values) {
  if (values.empty()) return nullptr;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {{"min", *lo}, {"max", *hi}};
}

// Per-edge peaks of a 1D response plus the proportionality summary.
json signal_edge_stats(std::span<const double> response, const pst::EdgeGroundTruth& truth) {
  const auto peaks = pst::edge_peaks(response, truth);
  json edges = json::array();
  std::vector<double> contrasts;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    const auto& e = truth.edges[i];
    contrasts.push_back(e.contrast);
    edges.push_back({{"x", e.x},
                     {"contrast", e.contrast},
                     {"base", e.base},
                     {"polarity", e.polarity == pst::Polarity::rising ? "rising" : "falling"},
                     {"peak", peaks[i]},
                     {"peak_per_contrast", peaks[i] / e.contrast}});
  }
  json j{{"edges", edges}};
  j["contrast_proportionality_deviation"] =
      peaks.empty() ? json(nullptr) : json(pst::proportionality_deviation(peaks, contrasts));
  return j;
}

// Min/mean of edge responses per region of a 2D map.
json image_edge_stats(const pst::Field& response, const pst::EdgeGroundTruth& truth) {
  const auto pixels = pst::edge_pixel_responses(response, truth);
  std::map<std::string, std::vector<double>> by_region;
  std::vector<double> all;
  for (const auto& p : pixels) {
    by_region[pst::to_string(p.region)].push_back(p.value);
    all.push_back(p.value);
  }
  auto summary = [](const std::vector<double>& v) -> json {
    if (v.empty()) return nullptr;
    double sum = 0.0;
    for (double x : v) sum += x;
    return {{"min", *std::min_element(v.begin(), v.end())},
            {"mean", sum / static_cast<double>(v.size())},
            {"pixels", v.size()}};
  };
  json regions = json::object();
  for (const auto& [name, values] : by_region) regions[name] = summary(values);
  return {{"all", summary(all)}, {"regions", regions}};
}

std::vector<double> to_vector(const pst::Field& f) { return {f.begin(), f.end()}; }

// ---------------------------------------------------------------------------
// Subcommands

pst::FeatureMap detect(const pst::Field& field, const std::string& method, const pst::PstConfig& cfg,
                       const Options& o) {
  if (method == "pst") {
    return field.height() == 1 ? pst::make_feature_map(pst::as_row(pst::pst1d(field.values(), cfg)), pst::Method::pst)
                               : pst::pst2d(field, cfg);
  }
  if (method == "derivative") {
    return field.height() == 1
               ? pst::make_feature_map(pst::as_row(pst::smooth_derivative(field.values(), o.deriv_sigma)),
                                       pst::Method::derivative)
               : pst::smooth_derivative(field, o.deriv_sigma);
  }
  const auto p = detect(field, "pst", cfg, o);
  const auto d = detect(field, "derivative", cfg, o);
  return pst::hybrid(p, d, pst::HybridPolicy{o.percentile});
}

int run_transform(const Options& o) {
  const pst::PstConfig cfg = build_config(o);
  const Input input = load_input(o);
  json report{{"command", "transform"}, {"method", o.method}, {"parameters", config_json(cfg, o)},
              {"input", input_json(input)}};

  if (o.method == "oracle") {
    if (!input.is_signal()) throw UsageError("--method oracle needs a 1D signal input");
    const auto& x = input.signal();
    const auto coeffs = pst::taylor_coeffs(cfg.warp, cfg.strength, pst::pst1d_r_max(x.size(), cfg), cfg.taylor_order);
    const auto oracle = pst::pst_smallphase(x, coeffs, cfg.epsilon);
    std::vector<double> valid(oracle.valid.begin(), oracle.valid.end());
    if (!o.out.empty()) emit_text(o.out, table_text({"index", "value", "valid"}, {indices(x.size()), oracle.values, valid}));
    report["output"] = range_json(oracle.values);
    report["valid_samples"] = oracle.valid_count();
    if (input.truth) report["ground_truth"] = signal_edge_stats(oracle.values, *input.truth);
    write_report(o.report, report);
    return 0;
  }

  const pst::Field field = input.is_signal() ? pst::as_row(input.signal()) : input.image().pixels;
  const pst::FeatureMap map = detect(field, o.method, cfg, o);

  if (input.is_signal()) {
    const auto response = to_vector(map.values);
    if (!o.out.empty()) emit_text(o.out, table_text({"index", "value"}, {indices(response.size()), response}));
    report["output"] = range_json(response);
    if (input.truth) report["ground_truth"] = signal_edge_stats(response, *input.truth);
  } else {
    report["output"] = write_map(map, o.out, o.depth);
    if (report["output"].is_null()) report["output"] = range_json(map.values.values());
    if (input.truth) report["ground_truth"] = image_edge_stats(pst::normalize_robust(map, o.percentile).values, *input.truth);
  }

  if (!o.threshold_out.empty()) {
    const auto mask = pst::threshold(map, cfg.q_lo, cfg.q_hi);
    std::size_t selected = 0;
    for (auto v : mask) selected += v;
    if (input.is_signal()) {
      std::vector<double> bits(mask.begin(), mask.end());
      emit_text(o.threshold_out, table_text({"index", "value"}, {indices(bits.size()), bits}));
    } else {
      pst::Field bits(mask.width(), mask.height());
      for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = mask[i];
      emit_bytes(o.threshold_out, pst::encode_pgm(bits, 255));
    }
    report["threshold"] = {{"q_lo", cfg.q_lo}, {"q_hi", cfg.q_hi}, {"selected", selected}, {"path", o.threshold_out}};
  }
  write_report(o.report, report);
  return 0;
}

int run_compare_oracle(const Options& o) {
  pst::PstConfig cfg = build_config(o);
  cfg.lpf.reset();  // the closed form has no localization kernel
  if (o.strength_scale == "small") {
    cfg.strength = 0.05;  // max |phi| = S by normalization
  } else if (o.strength_scale != "raw") {
    double factor = 0.0;
    if (!pst::detail::parse_double(o.strength_scale, factor) || factor <= 0.0) {
      throw UsageError("--strength-scale expects raw, small, or a positive factor");
    }
    cfg.strength *= factor;
  }
  const Input input = load_input(o);
  if (!input.is_signal()) throw UsageError("compare-oracle needs a 1D signal input");
  const auto& x = input.signal();

  const auto numerical = pst::pst1d(x, cfg);
  const auto coeffs = pst::taylor_coeffs(cfg.warp, cfg.strength, pst::pst1d_r_max(x.size(), cfg), cfg.taylor_order);
  const auto oracle = pst::pst_smallphase(x, coeffs, cfg.epsilon);
  const auto cmp = pst::compare_oracle(numerical, oracle);

  if (!o.out.empty()) {
    std::vector<double> valid(oracle.valid.begin(), oracle.valid.end());
    emit_text(o.out, table_text({"index", "input", "numerical", "oracle", "valid"},
                                {indices(x.size()), x, numerical, oracle.values, valid}));
  }
  json report{{"command", "compare-oracle"},
              {"method", "oracle"},
              {"parameters", config_json(cfg, o)},
              {"strength_scale", o.strength_scale},
              {"input", input_json(input)},
              {"taylor_coefficients", coeffs.values},
              {"oracle",
               {{"max_abs_deviation", cmp.max_abs_deviation},
                {"normalized_deviation", cmp.normalized_deviation},
                {"correlation", cmp.correlation},
                {"samples", cmp.samples}}}};
  write_report(o.report, report);
  if (o.report.empty()) {
    std::cout << "correlation " << cmp.correlation << "\nnormalized_deviation " << cmp.normalized_deviation << "\n";
  }
  return 0;
}

int run_sweep_contrast(const Options& o) {
  const pst::PstConfig cfg = build_config(o);
  const Input input = load_input(o);
  if (!input.is_signal()) throw UsageError("sweep-contrast needs a 1D signal input");
  if (!input.truth) throw UsageError("sweep-contrast needs ground truth (synth input or --truth)");
  const auto& x = input.signal();
  const auto p = pst::pst1d(x, cfg);
  const auto d = pst::smooth_derivative(std::span<const double>(x), o.deriv_sigma);
  if (!o.out.empty()) {
    emit_text(o.out, table_text({"index", "input", "pst", "derivative"}, {indices(x.size()), x, p, d}));
  }
  json report{{"command", "sweep-contrast"},
              {"method", "pst+derivative"},
              {"parameters", config_json(cfg, o)},
              {"input", input_json(input)},
              {"pst", signal_edge_stats(p, *input.truth)},
              {"derivative", signal_edge_stats(d, *input.truth)}};
  write_report(o.report, report);
  return 0;
}

int run_hybrid(const Options& o) {
  const pst::PstConfig cfg = build_config(o);
  const Input input = load_input(o);
  if (input.is_signal()) throw UsageError("hybrid needs an image input");
  const auto& image = input.image();
  const auto p = pst::pst2d(image, cfg);
  const auto d = pst::smooth_derivative(image, o.deriv_sigma);
  const pst::HybridPolicy policy{o.percentile};
  const auto h = pst::hybrid(p, d, policy);

  json report{{"command", "hybrid"},
              {"method", "hybrid"},
              {"parameters", config_json(cfg, o)},
              {"percentile", o.percentile},
              {"input", input_json(input)}};
  report["output"] = write_map(h, o.out, o.depth);
  report["pst_output"] = write_map(p, o.pst_out, o.depth);
  report["derivative_output"] = write_map(d, o.deriv_out, o.depth);
  if (input.truth) {
    report["ground_truth"] = {{"pst", image_edge_stats(pst::normalize_robust(p, o.percentile).values, *input.truth)},
                              {"derivative", image_edge_stats(pst::normalize_robust(d, o.percentile).values, *input.truth)},
                              {"hybrid", image_edge_stats(h.values, *input.truth)}};
  }
  if (!o.threshold_out.empty()) {
    const auto mask = pst::threshold(h, cfg.q_lo, cfg.q_hi);
    pst::Field bits(mask.width(), mask.height());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = mask[i];
    emit_bytes(o.threshold_out, pst::encode_pgm(bits, 255));
  }
  write_report(o.report, report);
  return 0;
}

int run_synth(const Options& o) {
  const Input input = generate(o.kind, o);
  const std::string out = o.out.empty() ? "-" : o.out;
  if (input.is_signal()) {
    const auto& x = input.signal();
    emit_text(out, table_text({"index", "value"}, {indices(x.size()), x}));
  } else if (out == "-") {
    emit_bytes(out, pst::encode_pgm(input.image().pixels, input.image().max_code));
  } else {
    pst::save_image(input.image(), out);
  }
  if (!o.truth_out.empty()) emit_text(o.truth_out, truth_json(*input.truth).dump(2) + "\n");
  json report{{"command", "synth"}, {"kind", o.kind}, {"input", input_json(input)},
              {"ground_truth", truth_json(*input.truth)}, {"noise", o.noise}, {"seed", o.seed}};
  write_report(o.report, report);
  return 0;
}

int run_line_scan(const Options& o) {
  const pst::PstConfig cfg = build_config(o);
  const Input input = load_input(o);
  if (input.is_signal()) throw UsageError("line-scan needs an image input");
  if (!o.row) throw UsageError("--row is required");
  const auto scan = pst::line_scan(input.image(), *o.row);
  const auto p = pst::pst1d(scan, cfg);
  const auto d = pst::smooth_derivative(std::span<const double>(scan), o.deriv_sigma);
  if (!o.out.empty()) {
    emit_text(o.out, table_text({"index", "value", "pst", "derivative"}, {indices(scan.size()), scan, p, d}));
  }
  json report{{"command", "line-scan"},
              {"method", "pst+derivative"},
              {"row", *o.row},
              {"parameters", config_json(cfg, o)},
              {"input", input_json(input)},
              {"scan", range_json(scan)},
              {"pst", range_json(p)},
              {"derivative", range_json(d)}};
  write_report(o.report, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase stretch transform feature detection"};
  app.require_subcommand(1);
  Options o;

  auto* transform = app.add_subcommand("transform", "Run PST, derivative, hybrid or oracle on an image or signal");
  add_transform_options(transform, o);
  add_io_options(transform, o, "");
  add_synth_options(transform, o);
  transform->add_option("--method", o.method, "Detector")
      ->check(CLI::IsMember({"pst", "derivative", "hybrid", "oracle"}))
      ->capture_default_str();
  transform->add_option("--threshold-out", o.threshold_out, "Binary map of samples within [q-lo, q-hi] quantiles");

  auto* compare = app.add_subcommand("compare-oracle", "Compare the numerical 1D transform with the closed form");
  add_transform_options(compare, o);
  add_io_options(compare, o, "synth:pulse");
  add_synth_options(compare, o);
  compare->add_option("--strength-scale", o.strength_scale, "raw, small (peak phase 0.05 rad), or a factor");

  auto* sweep = app.add_subcommand("sweep-contrast", "PST vs derivative on a contrast staircase");
  add_transform_options(sweep, o);
  add_io_options(sweep, o, "synth:staircase");
  add_synth_options(sweep, o);

  auto* hyb = app.add_subcommand("hybrid", "Hybrid PST + derivative detector on an image");
  add_transform_options(hyb, o);
  add_io_options(hyb, o, "synth:testcard");
  add_synth_options(hyb, o);
  hyb->add_option("--pst-out", o.pst_out, "Write the PST map");
  hyb->add_option("--deriv-out", o.deriv_out, "Write the derivative map");
  hyb->add_option("--threshold-out", o.threshold_out, "Binary map of the hybrid response");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic input with ground truth");
  synth->add_option("kind", o.kind, "pulse, staircase or testcard")
      ->required()
      ->check(CLI::IsMember({"pulse", "staircase", "testcard"}));
  synth->add_option("--out", o.out, "Output path (default stdout)");
  synth->add_option("--truth-out", o.truth_out, "Ground-truth JSON path");
  synth->add_option("--report", o.report, "JSON report path ('-' for stdout)");
  synth->add_option("--config", o.config, "JSON file with option values");
  add_synth_options(synth, o);

  auto* scan = app.add_subcommand("line-scan", "Extract an image row and run PST and derivative on it");
  add_transform_options(scan, o);
  add_io_options(scan, o, "synth:testcard");
  add_synth_options(scan, o);
  scan->add_option("--row", o.row, "Row index");

  try {
    app.parse(argc, argv);
    CLI::App* cmd = app.get_subcommands().front();
    apply_config_file(cmd, o.config);
    if (o.in.empty()) o.in = default_inputs[cmd];
    if (cmd == transform) return run_transform(o);
    if (cmd == compare) return run_compare_oracle(o);
    if (cmd == sweep) return run_sweep_contrast(o);
    if (cmd == hyb) return run_hybrid(o);
    if (cmd == synth) return run_synth(o);
    return run_line_scan(o);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pst::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
}
