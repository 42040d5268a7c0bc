#pragma once

#include <cstdint>

#include "arcenv/grid.hpp"

namespace arcenv {

inline constexpr int kNumOps = 35;
inline constexpr int kFloodFillIterations = 64;

enum class OpCategory { Fill, FloodFill, Move, Transform, Edit, Special };

/// Operation id in 0..34:
///   0-9   fill with color id
///   10-19 flood fill with color id-10
///   20-23 move up, down, left, right
///   24-25 rotate clockwise, counterclockwise
///   26-27 flip horizontal (columns reversed), vertical (rows reversed)
///   28-30 copy, paste, cut
///   31-34 clear, reset to input, resize to selection, submit
class OpId {
 public:
  constexpr OpId() = default;
  constexpr explicit OpId(int value) : value_(static_cast<std::uint8_t>(value)) {}

  constexpr int value() const { return value_; }
  constexpr bool valid() const { return value_ < kNumOps; }
  OpCategory category() const;

  static constexpr int kCopy = 28;
  static constexpr int kPaste = 29;
  static constexpr int kCut = 30;
  static constexpr int kClear = 31;
  static constexpr int kResetToInput = 32;
  static constexpr int kResize = 33;
  static constexpr int kSubmit = 34;

  friend constexpr bool operator==(OpId, OpId) = default;

 private:
  std::uint8_t value_ = 0;
};

enum class Direction { Up, Down, Left, Right };
enum class Rotation { Clockwise, CounterClockwise };
enum class FlipAxis { Horizontal, Vertical };

struct Clipboard {
  PaddedGrid grid;
  SelectionMask shape;  // box-local cells that were actually copied
  bool present = false;

  friend bool operator==(const Clipboard&, const Clipboard&) = default;
};

struct OpOutcome {
  PaddedGrid working;
  Clipboard clipboard;
  bool submitted = false;
  bool applied = true;

  friend bool operator==(const OpOutcome&, const OpOutcome&) = default;
};

// Category handlers. Each takes the selection as given by the caller;
// apply_operation is responsible for auto-selection.
OpOutcome fill_color(const PaddedGrid& working, const SelectionMask& selection, Color color);
OpOutcome flood_fill(const PaddedGrid& working, const SelectionMask& selection, Color color);
OpOutcome move_selection(const PaddedGrid& working, const SelectionMask& selection, Direction direction);
OpOutcome rotate_selection(const PaddedGrid& working, const SelectionMask& selection, Rotation sense);
OpOutcome flip_selection(const PaddedGrid& working, const SelectionMask& selection, FlipAxis axis);
OpOutcome copy_to_clipboard(const PaddedGrid& working, const SelectionMask& selection);
OpOutcome paste_from_clipboard(const PaddedGrid& working, const SelectionMask& selection,
                               const Clipboard& clipboard);
OpOutcome cut_to_clipboard(const PaddedGrid& working, const SelectionMask& selection);
OpOutcome clear_cells(const PaddedGrid& working, const SelectionMask& selection);
OpOutcome reset_to_input(const PaddedGrid& working, const PaddedGrid& input);
OpOutcome resize_to_selection(const PaddedGrid& working, const SelectionMask& selection);
OpOutcome submit(const PaddedGrid& working);

/// Short name such as "fill_3", "move_left" or "submit"; "invalid" outside 0..34.
const char* op_name(OpId op);

/// Dispatches op to its handler. Throws Error(InvalidOp) when op is outside 0..34.
OpOutcome apply_operation(OpId op, const SelectionMask& selection, const PaddedGrid& working,
                          const PaddedGrid& input, const Clipboard& clipboard);

/// In-place form of apply_operation used by the stepping hot path. Returns
/// whether the op was applied; sets submitted for op 34.
bool apply_operation_in_place(OpId op, const SelectionMask& selection, PaddedGrid& working,
                              const PaddedGrid& input, Clipboard& clipboard, bool& submitted);

}  // namespace arcenv
