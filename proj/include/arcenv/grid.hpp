#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#ifndef ARCENV_MAX_DIM
#define ARCENV_MAX_DIM 30
#endif

namespace arcenv {

using Color = std::uint8_t;

inline constexpr int kMaxDim = ARCENV_MAX_DIM;
inline constexpr int kMaxCells = kMaxDim * kMaxDim;
inline constexpr int kNumColors = 10;

/// Value written to observation planes for cells outside a grid's logical
/// region. One past the last color id.
inline constexpr std::uint8_t kPaddingSentinel = 10;

/// Runtime grid capacity profile. Every grid in an environment fits inside
/// rows x cols, and observation planes are exactly rows x cols.
struct Capacity {
  int rows = kMaxDim;
  int cols = kMaxDim;

  static constexpr Capacity arc() { return {30, 30}; }
  static constexpr Capacity miniarc() { return {5, 5}; }

  int cells() const { return rows * cols; }
  bool fits(int h, int w) const { return h >= 1 && h <= rows && w >= 1 && w <= cols; }
  bool valid() const { return rows >= 1 && cols >= 1 && rows <= kMaxDim && cols <= kMaxDim; }

  friend bool operator==(const Capacity&, const Capacity&) = default;
};

/// Row-major color matrix as it appears in dataset files.
using RawGrid = std::vector<std::vector<int>>;

/// Fixed-capacity grid: a kMaxDim x kMaxDim color buffer plus the logical
/// height and width. Cells outside the logical region are always 0, so equal
/// logical content means equal bytes. A 0x0 grid is the canonical empty grid.
class PaddedGrid {
 public:
  PaddedGrid() { cells_.fill(0); }

  /// Zero-filled grid of the given logical size.
  PaddedGrid(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return height_ == 0; }
  bool in_region(int r, int c) const { return r >= 0 && c >= 0 && r < height_ && c < width_; }

  Color at(int r, int c) const { return cells_[index(r, c)]; }
  void set(int r, int c, Color v) { cells_[index(r, c)] = v; }

  const std::array<Color, kMaxCells>& cells() const { return cells_; }

  /// Changes the logical size, zeroing every cell that ends up outside it.
  void resize(int height, int width);

  static constexpr int index(int r, int c) { return r * kMaxDim + c; }

  friend bool operator==(const PaddedGrid&, const PaddedGrid&) = default;

 private:
  std::array<Color, kMaxCells> cells_;
  std::uint8_t height_ = 0;
  std::uint8_t width_ = 0;
};

struct BoundingBox {
  int r0 = 0;
  int c0 = 0;
  int r1 = 0;  // inclusive
  int c1 = 0;  // inclusive

  int height() const { return r1 - r0 + 1; }
  int width() const { return c1 - c0 + 1; }
  bool contains(int r, int c) const { return r >= r0 && r <= r1 && c >= c0 && c <= c1; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Binary per-cell mask over the full storage capacity. Bits outside a grid's
/// logical region are ignored by every consumer.
class SelectionMask {
 public:
  SelectionMask() { bits_.fill(0); }

  bool test(int r, int c) const { return bits_[PaddedGrid::index(r, c)] != 0; }
  void set(int r, int c, bool on = true) { bits_[PaddedGrid::index(r, c)] = on ? 1 : 0; }
  void clear() { bits_.fill(0); }

  /// Total set bits, including any outside a logical region.
  int count() const;

  static SelectionMask single(int r, int c);
  static SelectionMask rectangle(const BoundingBox& box);

  friend bool operator==(const SelectionMask&, const SelectionMask&) = default;

 private:
  std::array<std::uint8_t, kMaxCells> bits_;
};

/// Copies a raw matrix into a padded buffer. Throws Error with
/// DimensionOutOfRange or ValueOutOfRange on malformed input.
PaddedGrid pad_into_buffer(const RawGrid& raw, Capacity capacity = {});

/// Inverse of pad_into_buffer.
RawGrid crop(const PaddedGrid& grid);

/// Matching cells over the union of both logical rectangles. 1.0 exactly when
/// the grids have equal shape and content.
double similarity(const PaddedGrid& working, const PaddedGrid& target);

/// The mask restricted to the grid's logical rectangle.
SelectionMask effective_mask(const SelectionMask& mask, const PaddedGrid& grid);

/// Number of set bits inside the grid's logical rectangle.
int effective_count(const SelectionMask& mask, const PaddedGrid& grid);

std::optional<BoundingBox> bounding_box(const SelectionMask& mask, const PaddedGrid& grid);

/// Effective mask, or the full logical rectangle when the effective mask is empty.
SelectionMask auto_select(const SelectionMask& mask, const PaddedGrid& grid);

}  // namespace arcenv
