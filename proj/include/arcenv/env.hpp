#pragma once

#include <bitset>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "arcenv/grid.hpp"
#include "arcenv/ops.hpp"
#include "arcenv/prng.hpp"
#include "arcenv/tasks.hpp"

namespace arcenv {

enum class Mode { Train, Eval };

/// Penalties are stored as non-negative magnitudes and subtracted.
struct RewardConfig {
  double similarity_weight = 1.0;
  double success_bonus = 10.0;
  double step_penalty = 0.02;
  double unsolved_submission_penalty = 1.0;

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

class OpSet {
 public:
  OpSet() { bits_.set(); }
  explicit OpSet(std::span<const int> ops);

  static OpSet none() {
    OpSet s;
    s.bits_.reset();
    return s;
  }

  bool contains(OpId op) const { return op.valid() && bits_.test(op.value()); }
  void insert(OpId op) { bits_.set(op.value()); }
  bool empty() const { return bits_.none(); }
  int size() const { return static_cast<int>(bits_.count()); }
  std::vector<int> ids() const;

  friend bool operator==(const OpSet&, const OpSet&) = default;

 private:
  std::bitset<kNumOps> bits_;
};

struct EnvParams {
  RewardConfig reward;
  Mode mode = Mode::Train;
  int max_episode_steps = 150;
  OpSet allowed_ops;
  Capacity capacity;

  /// Throws Error(InvalidConfig) when an invariant is violated.
  void validate() const;

  friend bool operator==(const EnvParams&, const EnvParams&) = default;
};

struct Action {
  OpId op;
  SelectionMask selection;

  friend bool operator==(const Action&, const Action&) = default;
};

enum class StepKind : std::uint8_t { First = 0, Mid = 1, Last = 2 };

struct StepInfo {
  double similarity = 0.0;
  bool solved = false;
  bool applied = true;

  friend bool operator==(const StepInfo&, const StepInfo&) = default;
};

/// Channel-major stack of rows x cols planes.
struct Observation {
  int channels = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int ch, int r, int c) const { return data[(static_cast<std::size_t>(ch) * rows + r) * cols + c]; }

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Timestep {
  Observation observation;
  double reward = 0.0;
  StepKind kind = StepKind::First;
  double discount = 1.0;
  StepInfo info;

  bool last() const { return kind == StepKind::Last; }

  friend bool operator==(const Timestep&, const Timestep&) = default;
};

struct EnvState {
  PaddedGrid working;
  PaddedGrid input;
  PaddedGrid target;
  Clipboard clipboard;
  int step_count = 0;
  double last_similarity = 0.0;
  bool terminated = false;
  bool truncated = false;
  int task_index = 0;
  int pair_index = 0;
  PrngKey rng;

  bool done() const { return terminated || truncated; }

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

/// Reward, kind and info of one transition, without the observation.
struct Transition {
  double reward = 0.0;
  StepKind kind = StepKind::Mid;
  double discount = 1.0;
  StepInfo info;
};

/// References into one lane's state. Lets the stepping logic run against an
/// EnvState or a column of a structure-of-arrays batch.
struct LaneRef {
  PaddedGrid& working;
  const PaddedGrid& input;
  const PaddedGrid& target;
  Clipboard& clipboard;
  int& step_count;
  double& last_similarity;
  bool& terminated;
  bool& truncated;

  static LaneRef of(EnvState& s) {
    return {s.working, s.input, s.target, s.clipboard, s.step_count, s.last_similarity, s.terminated, s.truncated};
  }
};

double compute_reward(double prev_similarity, double new_similarity, bool submitted, bool solved,
                      const EnvParams& params);

/// Initial state for a given task and pair. Eval mode uses test pair 0.
EnvState initial_state(int task_index, int pair_index, PrngKey rng, const EnvParams& params, const TaskBuffer& buffer);

/// Samples a task uniformly, then a demo pair uniformly (train) or test pair 0
/// (eval). Throws Error(EmptyBuffer) on an empty buffer.
std::pair<EnvState, Timestep> reset(PrngKey key, const EnvParams& params, const TaskBuffer& buffer);

/// Pure transition. Stepping a finished episode returns it unchanged with zero
/// reward and a Last step kind.
std::pair<EnvState, Timestep> step(const EnvState& state, const Action& action, const EnvParams& params);

/// Mutating form of step used by batched execution.
Transition step_in_place(LaneRef lane, const Action& action, const EnvParams& params);

/// Working grid as one rows x cols plane, cells outside the logical region
/// set to kPaddingSentinel.
Observation base_observation(const EnvState& state, Capacity capacity);

/// Writes a grid into a rows x cols plane with sentinel padding.
void write_plane(const PaddedGrid& grid, Capacity capacity, std::span<std::uint8_t> plane);

}  // namespace arcenv
