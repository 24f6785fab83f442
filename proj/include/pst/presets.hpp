#pragma once

// Warp/strength pairs of the three reference experiments.

#include <array>
#include <optional>
#include <string_view>

namespace pst {

struct Preset {
  std::string_view name;
  double warp;
  double strength;
};

inline constexpr std::array<Preset, 3> kPresets{{
    {"fig1", 22.0, 500.0},    // foggy road scenes
    {"fig2", 12.5, 4000.0},   // numerical vs closed-form comparison
    {"fig3-4", 12.15, 0.48},  // contrast staircase and HDR image
}};

inline std::optional<Preset> find_preset(std::string_view name) {
  for (const Preset& p : kPresets) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

}  // namespace pst
