#include "arcenv/ops.hpp"

#include <array>
#include <string>

#include "arcenv/errors.hpp"

namespace arcenv {

OpCategory OpId::category() const {
  if (value_ <= 9) return OpCategory::Fill;
  if (value_ <= 19) return OpCategory::FloodFill;
  if (value_ <= 23) return OpCategory::Move;
  if (value_ <= 27) return OpCategory::Transform;
  if (value_ <= 30) return OpCategory::Edit;
  return OpCategory::Special;
}

const char* op_name(OpId op) {
  static constexpr std::array<const char*, kNumOps> kNames = {
      "fill_0",       "fill_1",       "fill_2",       "fill_3",       "fill_4",          "fill_5",
      "fill_6",       "fill_7",       "fill_8",       "fill_9",       "flood_fill_0",    "flood_fill_1",
      "flood_fill_2", "flood_fill_3", "flood_fill_4", "flood_fill_5", "flood_fill_6",    "flood_fill_7",
      "flood_fill_8", "flood_fill_9", "move_up",      "move_down",    "move_left",       "move_right",
      "rotate_cw",    "rotate_ccw",   "flip_horizontal", "flip_vertical", "copy",         "paste",
      "cut",          "clear",        "reset_to_input",  "resize",        "submit"};
  return op.valid() ? kNames[op.value()] : "invalid";
}

namespace {

// Auto-selected view of a selection: the effective mask, or the whole logical
// rectangle when the effective mask is empty. The box always lies inside the
// logical region.
struct Selected {
  const SelectionMask* mask = nullptr;  // null: full rectangle
  BoundingBox box;
  bool none = false;  // only for a 0x0 grid

  bool operator()(int r, int c) const { return mask == nullptr || mask->test(r, c); }
};

Selected resolve(const SelectionMask& mask, const PaddedGrid& grid) {
  if (auto box = bounding_box(mask, grid)) return {&mask, *box, false};
  if (grid.empty()) return {nullptr, {}, true};
  return {nullptr, {0, 0, grid.height() - 1, grid.width() - 1}, false};
}

bool fill_in_place(PaddedGrid& g, const Selected& sel, Color color) {
  if (sel.none) return false;
  for (int r = sel.box.r0; r <= sel.box.r1; ++r) {
    for (int c = sel.box.c0; c <= sel.box.c1; ++c) {
      if (sel(r, c)) g.set(r, c, color);
    }
  }
  return true;
}

bool flood_in_place(PaddedGrid& g, const SelectionMask& raw, Color color) {
  // Precondition checked on the raw effective selection, before auto-select.
  int seed_r = -1;
  int seed_c = -1;
  int count = 0;
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (raw.test(r, c)) {
        ++count;
        seed_r = r;
        seed_c = c;
      }
    }
  }
  if (count != 1) return false;

  const int h = g.height();
  const int w = g.width();
  const Color source = g.at(seed_r, seed_c);
  std::array<std::uint8_t, kMaxCells> cur{};
  std::array<std::uint8_t, kMaxCells> next{};
  cur[PaddedGrid::index(seed_r, seed_c)] = 1;

  // Synchronous frontier sweeps: a cell joins when a 4-neighbour was reached
  // in the previous sweep. Stopping at a fixed point gives the same result as
  // running all iterations.
  for (int it = 0; it < kFloodFillIterations; ++it) {
    bool changed = false;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const int i = PaddedGrid::index(r, c);
        std::uint8_t v = cur[i];
        if (!v && g.at(r, c) == source) {
          v = (r > 0 && cur[i - kMaxDim]) || (r + 1 < h && cur[i + kMaxDim]) ||
              (c > 0 && cur[i - 1]) || (c + 1 < w && cur[i + 1]);
          changed |= v != 0;
        }
        next[i] = v;
      }
    }
    cur.swap(next);
    if (!changed) break;
  }

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (cur[PaddedGrid::index(r, c)]) g.set(r, c, color);
    }
  }
  return true;
}

bool move_in_place(PaddedGrid& g, const Selected& sel, Direction dir) {
  if (sel.none) return false;
  const BoundingBox& b = sel.box;
  const int bh = b.height();
  const int bw = b.width();
  std::array<Color, kMaxCells> tmp;
  for (int r = 0; r < bh; ++r) {
    for (int c = 0; c < bw; ++c) tmp[r * kMaxDim + c] = g.at(b.r0 + r, b.c0 + c);
  }
  // Destination cell (r, c) takes its content from the source cell one step
  // against the direction of motion, wrapping inside the box.
  int dr = 0;
  int dc = 0;
  switch (dir) {
    case Direction::Up: dr = 1; break;
    case Direction::Down: dr = bh - 1; break;
    case Direction::Left: dc = 1; break;
    case Direction::Right: dc = bw - 1; break;
  }
  for (int r = 0; r < bh; ++r) {
    for (int c = 0; c < bw; ++c) {
      g.set(b.r0 + r, b.c0 + c, tmp[((r + dr) % bh) * kMaxDim + (c + dc) % bw]);
    }
  }
  return true;
}

bool rotate_in_place(PaddedGrid& g, const Selected& sel, Rotation sense) {
  if (sel.none) return false;
  const BoundingBox& b = sel.box;
  if (b.height() != b.width()) return false;
  const int n = b.height();
  std::array<Color, kMaxCells> tmp;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) tmp[r * kMaxDim + c] = g.at(b.r0 + r, b.c0 + c);
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Color v = tmp[r * kMaxDim + c];
      if (sense == Rotation::Clockwise) {
        g.set(b.r0 + c, b.c0 + n - 1 - r, v);
      } else {
        g.set(b.r0 + n - 1 - c, b.c0 + r, v);
      }
    }
  }
  return true;
}

bool flip_in_place(PaddedGrid& g, const Selected& sel, FlipAxis axis) {
  if (sel.none) return false;
  const BoundingBox& b = sel.box;
  if (axis == FlipAxis::Horizontal) {
    for (int r = b.r0; r <= b.r1; ++r) {
      for (int lo = b.c0, hi = b.c1; lo < hi; ++lo, --hi) {
        const Color t = g.at(r, lo);
        g.set(r, lo, g.at(r, hi));
        g.set(r, hi, t);
      }
    }
  } else {
    for (int lo = b.r0, hi = b.r1; lo < hi; ++lo, --hi) {
      for (int c = b.c0; c <= b.c1; ++c) {
        const Color t = g.at(lo, c);
        g.set(lo, c, g.at(hi, c));
        g.set(hi, c, t);
      }
    }
  }
  return true;
}

bool copy_in_place(const PaddedGrid& g, const Selected& sel, Clipboard& clip) {
  if (sel.none) return false;
  const BoundingBox& b = sel.box;
  PaddedGrid crop(b.height(), b.width());
  SelectionMask shape;
  for (int r = 0; r < b.height(); ++r) {
    for (int c = 0; c < b.width(); ++c) {
      crop.set(r, c, g.at(b.r0 + r, b.c0 + c));
      if (sel(b.r0 + r, b.c0 + c)) shape.set(r, c);
    }
  }
  clip.grid = crop;
  clip.shape = shape;
  clip.present = true;
  return true;
}

bool paste_in_place(PaddedGrid& g, const Selected& sel, const Clipboard& clip) {
  if (!clip.present || sel.none) return false;
  const int ar = sel.box.r0;
  const int ac = sel.box.c0;
  for (int i = 0; i < clip.grid.height(); ++i) {
    for (int j = 0; j < clip.grid.width(); ++j) {
      if (clip.shape.test(i, j) && g.in_region(ar + i, ac + j)) g.set(ar + i, ac + j, clip.grid.at(i, j));
    }
  }
  return true;
}

bool resize_in_place(PaddedGrid& g, const Selected& sel) {
  if (sel.none) return false;
  const BoundingBox& b = sel.box;
  PaddedGrid out(b.height(), b.width());
  for (int r = 0; r < b.height(); ++r) {
    for (int c = 0; c < b.width(); ++c) out.set(r, c, g.at(b.r0 + r, b.c0 + c));
  }
  g = out;
  return true;
}

}  // namespace

bool apply_operation_in_place(OpId op, const SelectionMask& selection, PaddedGrid& working,
                              const PaddedGrid& input, Clipboard& clipboard, bool& submitted) {
  const int id = op.value();
  if (!op.valid()) throw Error(ErrorCode::InvalidOp, "operation id " + std::to_string(id) + " outside 0..34");
  submitted = false;
  if (op.category() == OpCategory::FloodFill) {
    return flood_in_place(working, selection, static_cast<Color>(id - 10));
  }
  if (id == OpId::kResetToInput) {
    working = input;
    return true;
  }
  if (id == OpId::kSubmit) {
    submitted = true;
    return true;
  }
  const Selected sel = resolve(selection, working);
  switch (op.category()) {
    case OpCategory::Fill:
      return fill_in_place(working, sel, static_cast<Color>(id));
    case OpCategory::Move:
      return move_in_place(working, sel, static_cast<Direction>(id - 20));
    case OpCategory::Transform:
      if (id < 26) return rotate_in_place(working, sel, static_cast<Rotation>(id - 24));
      return flip_in_place(working, sel, static_cast<FlipAxis>(id - 26));
    case OpCategory::Edit:
      if (id == OpId::kCopy) return copy_in_place(working, sel, clipboard);
      if (id == OpId::kPaste) return paste_in_place(working, sel, clipboard);
      if (!copy_in_place(working, sel, clipboard)) return false;
      return fill_in_place(working, sel, 0);
    case OpCategory::Special:
      if (id == OpId::kClear) return fill_in_place(working, sel, 0);
      return resize_in_place(working, sel);
    case OpCategory::FloodFill:
      break;
  }
  return false;
}

namespace {

OpOutcome outcome(const PaddedGrid& working, const Clipboard& clipboard = {}) {
  return OpOutcome{working, clipboard, false, true};
}

}  // namespace

OpOutcome fill_color(const PaddedGrid& working, const SelectionMask& selection, Color color) {
  auto out = outcome(working);
  out.applied = fill_in_place(out.working, resolve(selection, working), color);
  return out;
}

OpOutcome flood_fill(const PaddedGrid& working, const SelectionMask& selection, Color color) {
  auto out = outcome(working);
  out.applied = flood_in_place(out.working, selection, color);
  return out;
}

OpOutcome move_selection(const PaddedGrid& working, const SelectionMask& selection, Direction direction) {
  auto out = outcome(working);
  out.applied = move_in_place(out.working, resolve(selection, working), direction);
  return out;
}

OpOutcome rotate_selection(const PaddedGrid& working, const SelectionMask& selection, Rotation sense) {
  auto out = outcome(working);
  out.applied = rotate_in_place(out.working, resolve(selection, working), sense);
  return out;
}

OpOutcome flip_selection(const PaddedGrid& working, const SelectionMask& selection, FlipAxis axis) {
  auto out = outcome(working);
  out.applied = flip_in_place(out.working, resolve(selection, working), axis);
  return out;
}

OpOutcome copy_to_clipboard(const PaddedGrid& working, const SelectionMask& selection) {
  auto out = outcome(working);
  out.applied = copy_in_place(working, resolve(selection, working), out.clipboard);
  return out;
}

OpOutcome paste_from_clipboard(const PaddedGrid& working, const SelectionMask& selection,
                               const Clipboard& clipboard) {
  auto out = outcome(working, clipboard);
  out.applied = paste_in_place(out.working, resolve(selection, working), clipboard);
  return out;
}

OpOutcome cut_to_clipboard(const PaddedGrid& working, const SelectionMask& selection) {
  auto out = outcome(working);
  const Selected sel = resolve(selection, working);
  out.applied = copy_in_place(working, sel, out.clipboard) && fill_in_place(out.working, sel, 0);
  return out;
}

OpOutcome clear_cells(const PaddedGrid& working, const SelectionMask& selection) {
  auto out = outcome(working);
  out.applied = fill_in_place(out.working, resolve(selection, working), 0);
  return out;
}

OpOutcome reset_to_input(const PaddedGrid& /*working*/, const PaddedGrid& input) { return outcome(input); }

OpOutcome resize_to_selection(const PaddedGrid& working, const SelectionMask& selection) {
  auto out = outcome(working);
  out.applied = resize_in_place(out.working, resolve(selection, working));
  return out;
}

OpOutcome submit(const PaddedGrid& working) {
  auto out = outcome(working);
  out.submitted = true;
  return out;
}

OpOutcome apply_operation(OpId op, const SelectionMask& selection, const PaddedGrid& working,
                          const PaddedGrid& input, const Clipboard& clipboard) {
  OpOutcome out{working, clipboard, false, true};
  out.applied = apply_operation_in_place(op, selection, out.working, input, out.clipboard, out.submitted);
  return out;
}

}  // namespace arcenv
