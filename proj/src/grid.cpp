#include "arcenv/grid.hpp"

#include <algorithm>
#include <string>

#include "arcenv/errors.hpp"

namespace arcenv {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DimensionOutOfRange: return "dimension-out-of-range";
    case ErrorCode::ValueOutOfRange: return "value-out-of-range";
    case ErrorCode::InvalidOp: return "invalid-op-id";
    case ErrorCode::MalformedJson: return "malformed-json";
    case ErrorCode::MissingKeys: return "missing-train/test-keys";
    case ErrorCode::RaggedMatrix: return "ragged-matrix";
    case ErrorCode::TooManyPairs: return "too-many-pairs";
    case ErrorCode::MissingDirectory: return "missing-directory";
    case ErrorCode::UnresolvedSubsetId: return "unresolved-subset-id";
    case ErrorCode::EmptyBuffer: return "empty-buffer";
    case ErrorCode::UnknownIdentifier: return "unknown-identifier";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::UnknownParser: return "unknown-parser";
    case ErrorCode::UnresolvableChannel: return "unresolvable-channel";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::UnknownDataset: return "unknown-dataset-name";
    case ErrorCode::Network: return "network-failure";
    case ErrorCode::DigestMismatch: return "digest-mismatch";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

PaddedGrid::PaddedGrid(int height, int width) {
  cells_.fill(0);
  if (height < 0 || width < 0 || height > kMaxDim || width > kMaxDim) {
    throw Error(ErrorCode::DimensionOutOfRange,
                "grid size " + std::to_string(height) + "x" + std::to_string(width) +
                    " exceeds storage " + std::to_string(kMaxDim));
  }
  height_ = static_cast<std::uint8_t>(height);
  width_ = static_cast<std::uint8_t>(width);
}

void PaddedGrid::resize(int height, int width) {
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      if (r >= height || c >= width) cells_[index(r, c)] = 0;
    }
  }
  height_ = static_cast<std::uint8_t>(height);
  width_ = static_cast<std::uint8_t>(width);
}

int SelectionMask::count() const {
  return static_cast<int>(std::count_if(bits_.begin(), bits_.end(), [](auto b) { return b != 0; }));
}

SelectionMask SelectionMask::single(int r, int c) {
  SelectionMask m;
  m.set(r, c);
  return m;
}

SelectionMask SelectionMask::rectangle(const BoundingBox& box) {
  SelectionMask m;
  for (int r = box.r0; r <= box.r1; ++r) {
    for (int c = box.c0; c <= box.c1; ++c) m.set(r, c);
  }
  return m;
}

PaddedGrid pad_into_buffer(const RawGrid& raw, Capacity capacity) {
  const int h = static_cast<int>(raw.size());
  const int w = h > 0 ? static_cast<int>(raw.front().size()) : 0;
  if (!capacity.fits(h, w)) {
    throw Error(ErrorCode::DimensionOutOfRange,
                "grid " + std::to_string(h) + "x" + std::to_string(w) + " outside capacity " +
                    std::to_string(capacity.rows) + "x" + std::to_string(capacity.cols));
  }
  PaddedGrid grid(h, w);
  for (int r = 0; r < h; ++r) {
    if (static_cast<int>(raw[r].size()) != w) {
      throw Error(ErrorCode::DimensionOutOfRange, "row " + std::to_string(r) + " has inconsistent width");
    }
    for (int c = 0; c < w; ++c) {
      const int v = raw[r][c];
      if (v < 0 || v >= kNumColors) {
        throw Error(ErrorCode::ValueOutOfRange, "color " + std::to_string(v) + " at (" +
                                                    std::to_string(r) + "," + std::to_string(c) + ")");
      }
      grid.set(r, c, static_cast<Color>(v));
    }
  }
  return grid;
}

RawGrid crop(const PaddedGrid& grid) {
  RawGrid raw(grid.height(), std::vector<int>(grid.width()));
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) raw[r][c] = grid.at(r, c);
  }
  return raw;
}

double similarity(const PaddedGrid& working, const PaddedGrid& target) {
  const int hi = std::min(working.height(), target.height());
  const int wi = std::min(working.width(), target.width());
  const int uni = working.height() * working.width() + target.height() * target.width() - hi * wi;
  if (uni == 0) return 1.0;
  int matches = 0;
  for (int r = 0; r < hi; ++r) {
    for (int c = 0; c < wi; ++c) matches += working.at(r, c) == target.at(r, c);
  }
  return static_cast<double>(matches) / static_cast<double>(uni);
}

SelectionMask effective_mask(const SelectionMask& mask, const PaddedGrid& grid) {
  SelectionMask out;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (mask.test(r, c)) out.set(r, c);
    }
  }
  return out;
}

int effective_count(const SelectionMask& mask, const PaddedGrid& grid) {
  int n = 0;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) n += mask.test(r, c);
  }
  return n;
}

std::optional<BoundingBox> bounding_box(const SelectionMask& mask, const PaddedGrid& grid) {
  BoundingBox box{kMaxDim, kMaxDim, -1, -1};
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (!mask.test(r, c)) continue;
      box.r0 = std::min(box.r0, r);
      box.c0 = std::min(box.c0, c);
      box.r1 = std::max(box.r1, r);
      box.c1 = std::max(box.c1, c);
    }
  }
  if (box.r1 < 0) return std::nullopt;
  return box;
}

SelectionMask auto_select(const SelectionMask& mask, const PaddedGrid& grid) {
  if (effective_count(mask, grid) == 0) {
    if (grid.empty()) return {};
    return SelectionMask::rectangle({0, 0, grid.height() - 1, grid.width() - 1});
  }
  return effective_mask(mask, grid);
}

}  // namespace arcenv
