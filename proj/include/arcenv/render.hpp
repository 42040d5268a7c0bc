#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "arcenv/env.hpp"
#include "arcenv/grid.hpp"
#include "arcenv/tasks.hpp"

namespace arcenv {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  std::string hex() const;  // "#rrggbb"

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Palette {
  std::array<Rgb, kNumColors> colors;
  Rgb background;
  Rgb grid_line;
  Rgb highlight;
  Rgb text;

  /// The conventional ARC colors: black, blue, red, green, yellow, grey,
  /// magenta, orange, azure, maroon.
  static Palette arc();

  /// Throws Error(InvalidConfig) unless the 10 colors are distinct.
  void validate() const;

  friend bool operator==(const Palette&, const Palette&) = default;
};

enum class RenderMode { Pair, Single, RlStep, CompleteTask };
enum class RenderBackend { Svg, Ansi, Ascii };

const char* to_string(RenderMode m);
const char* to_string(RenderBackend b);

struct RenderSpec {
  RenderMode mode = RenderMode::Single;
  RenderBackend backend = RenderBackend::Svg;
  int cell_px = 20;
  bool show_reward = true;
  std::optional<SelectionMask> highlight;
  Palette palette = Palette::arc();

  void validate() const;
};

// SVG layout constants, in pixels.
inline constexpr int kSvgMargin = 10;
inline constexpr int kSvgPanelGap = 20;
inline constexpr int kSvgCaptionHeight = 20;

/// One grid's logical region. Padding is not drawn. Cells in spec.highlight
/// are outlined.
std::string render_single(const PaddedGrid& grid, const RenderSpec& spec);

/// Input and output side by side, each panel sized to its own grid.
std::string render_pair(const PaddedGrid& input, const PaddedGrid& output, const RenderSpec& spec);

/// Working grid before and after an action. The action's selection is
/// outlined on both panels; the caption names the op and, with show_reward,
/// the reward as a signed value with 2 decimals.
std::string render_rl_step(const EnvState& before, const Action& action, const EnvState& after, double reward,
                           const RenderSpec& spec);

/// One row per demonstration pair, then one row per test input. Test outputs
/// are never drawn.
std::string render_complete_task(const RawTask& task, const RenderSpec& spec);

/// Formats a reward as "+0.48" / "-1.02".
std::string format_reward(double reward);

}  // namespace arcenv
