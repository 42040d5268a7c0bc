#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arcenv/env.hpp"

namespace arcenv {

// Action parameterizations. Every form is converted to an (op, mask) Action
// before it reaches the core.

struct PointAction {
  int row = 0;
  int col = 0;
  OpId op;
};

struct BBoxAction {
  int r1 = 0;
  int c1 = 0;
  int r2 = 0;
  int c2 = 0;
  OpId op;
};

Action point_to_mask(const PointAction& a);

/// Corners may come in any order.
Action bbox_to_mask(const BBoxAction& a);

/// Row-major mixed-radix bijection between tuples and flat indices.
class MixedRadix {
 public:
  explicit MixedRadix(std::vector<std::int64_t> dims);

  std::int64_t size() const { return size_; }
  const std::vector<std::int64_t>& dims() const { return dims_; }

  std::int64_t encode(std::span<const std::int64_t> tuple) const;
  void decode(std::int64_t flat, std::span<std::int64_t> tuple) const;
  std::vector<std::int64_t> decode(std::int64_t flat) const;

 private:
  std::vector<std::int64_t> dims_;
  std::int64_t size_ = 1;
};

/// Dense index <-> op id for a restricted operation set. Must contain submit.
class OpSubset {
 public:
  OpSubset();  // all 35 ops
  explicit OpSubset(std::vector<int> allowed);

  int size() const { return static_cast<int>(ops_.size()); }
  OpId op_at(int index) const { return OpId(ops_.at(index)); }
  int index_of(OpId op) const;  // -1 if absent
  const std::vector<int>& ops() const { return ops_; }
  OpSet as_set() const { return OpSet(ops_); }

  friend bool operator==(const OpSubset&, const OpSubset&) = default;

 private:
  std::vector<int> ops_;
};

enum class ActionParam { Mask, Point, BBox };

const char* to_string(ActionParam p);

/// A discrete action space over tuples of integers:
///   mask:  rows*cols bits (row-major), then op index      arity rows*cols + 1
///   point: (row, col, op index)                            arity 3
///   bbox:  (r1, c1, r2, c2, op index)                      arity 5
/// With `flatten`, the space is one integer in [0, product of dims).
class ActionSpace {
 public:
  ActionSpace() : ActionSpace(ActionParam::Mask, {}, Capacity{}, false) {}
  ActionSpace(ActionParam param, OpSubset ops, Capacity capacity, bool flatten);

  ActionParam param() const { return param_; }
  const OpSubset& ops() const { return ops_; }
  Capacity capacity() const { return capacity_; }
  bool flattened() const { return flatten_; }

  /// Per-component sizes of the unflattened tuple.
  const std::vector<std::int64_t>& component_dims() const { return dims_; }
  /// Number of integers per action as seen by the agent (1 when flattened).
  int arity() const { return flatten_ ? 1 : static_cast<int>(dims_.size()); }
  /// Sizes of what the agent sends: component_dims(), or {flat size}.
  std::vector<std::int64_t> dims() const;
  std::int64_t flat_size() const { return radix_.size(); }

  /// Throws Error(ShapeMismatch) on wrong arity or out-of-range components.
  Action decode(std::span<const std::int64_t> action) const;
  void decode_into(std::span<const std::int64_t> action, Action& out) const;

  /// Expands a flat index into the component tuple.
  std::vector<std::int64_t> unflatten(std::int64_t flat) const { return radix_.decode(flat); }

  /// Uniform random action in the agent-facing encoding.
  void sample(PrngKey key, std::span<std::int64_t> out) const;

 private:
  ActionParam param_;
  OpSubset ops_;
  Capacity capacity_;
  bool flatten_;
  std::vector<std::int64_t> dims_;
  MixedRadix radix_;
};

enum class ChannelSource { Working, Answer, Input, Clipboard, DemoInput, DemoOutput };

struct Channel {
  ChannelSource source;
  int pair = 0;  // demo slot for DemoInput / DemoOutput
};

/// Enabled observation channels. Order is fixed: working, answer, input,
/// clipboard, then demo1.in, demo1.out, ..., demoN.in, demoN.out.
struct ObsSpec {
  bool answer = false;
  bool input = false;
  bool clipboard = false;
  int contextual_pairs = 0;

  static constexpr int kDefaultContextualPairs = 5;

  std::vector<Channel> channels() const;
  int channel_count() const;

  friend bool operator==(const ObsSpec&, const ObsSpec&) = default;
};

/// The parts of a lane's state that observation channels read.
struct ObsSource {
  const PaddedGrid& working;
  const PaddedGrid& input;
  const PaddedGrid& target;
  const Clipboard& clipboard;
  int task_index;
  int pair_index;

  static ObsSource of(const EnvState& s) {
    return {s.working, s.input, s.target, s.clipboard, s.task_index, s.pair_index};
  }
};

/// Writes all channels into `out` (channel_count * rows * cols bytes). In
/// train mode the demo slot of the pair being solved is left blank.
void augment_observation(const ObsSource& state, const ObsSpec& spec, const TaskBuffer& buffer, Mode mode,
                         Capacity capacity, std::span<std::uint8_t> out);

void augment_observation(const EnvState& state, const ObsSpec& spec, const TaskBuffer& buffer, Mode mode,
                         Capacity capacity, std::span<std::uint8_t> out);

Observation augment_observation(const EnvState& state, const ObsSpec& spec, const TaskBuffer& buffer, Mode mode,
                                Capacity capacity);

/// Replaces a finished episode with a fresh one from `key`. The returned
/// timestep keeps the terminal reward, discount and info and carries the new
/// episode's first observation; its kind stays Last so learners can mask the
/// boundary. Non-terminal steps pass through unchanged.
std::pair<EnvState, Timestep> auto_reset(EnvState state, Timestep timestep, PrngKey key, const EnvParams& params,
                                         const TaskBuffer& buffer);

}  // namespace arcenv
