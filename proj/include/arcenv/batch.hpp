#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "arcenv/environment.hpp"

namespace arcenv {

/// N lanes of EnvState stored field by field, each field contiguous across lanes.
class BatchState {
 public:
  struct Flag {
    bool value = false;
    friend bool operator==(Flag, Flag) = default;
  };

  BatchState() = default;
  explicit BatchState(std::size_t lanes);

  std::size_t size() const { return step_count.size(); }

  EnvState lane(std::size_t i) const;
  void set_lane(std::size_t i, const EnvState& s);
  LaneRef ref(std::size_t i) {
    return {working[i], input[i], target[i], clipboard[i], step_count[i], last_similarity[i], terminated[i].value,
            truncated[i].value};
  }

  /// Approximate bytes per lane, for memory planning.
  static std::size_t lane_bytes();

  std::vector<PaddedGrid> working;
  std::vector<PaddedGrid> input;
  std::vector<PaddedGrid> target;
  std::vector<Clipboard> clipboard;
  std::vector<int> step_count;
  std::vector<double> last_similarity;
  std::vector<Flag> terminated;
  std::vector<Flag> truncated;
  std::vector<int> task_index;
  std::vector<int> pair_index;
  std::vector<PrngKey> rng;

  friend bool operator==(const BatchState&, const BatchState&) = default;
};

/// Per-lane timestep fields, structure-of-arrays.
struct BatchTimesteps {
  std::size_t obs_size = 0;  // bytes per lane
  std::vector<std::uint8_t> observations;
  std::vector<double> reward;
  std::vector<StepKind> kind;
  std::vector<double> discount;
  std::vector<double> similarity;
  std::vector<std::uint8_t> solved;
  std::vector<std::uint8_t> applied;

  void resize(std::size_t lanes, std::size_t obs_bytes);
  std::size_t size() const { return reward.size(); }
  std::span<const std::uint8_t> observation(std::size_t i) const {
    return std::span(observations).subspan(i * obs_size, obs_size);
  }
  Timestep lane(std::size_t i, const Environment& env) const;

  friend bool operator==(const BatchTimesteps&, const BatchTimesteps&) = default;
};

/// Writes an agent-facing action for one lane. Must be safe to call from
/// several threads at once.
using Policy = std::function<void(std::span<const std::uint8_t> observation, PrngKey key, std::span<std::int64_t> action)>;

Policy random_policy(const ActionSpace& space);

struct LaneStats {
  std::int64_t episodes = 0;
  std::int64_t successes = 0;
  double reward_sum = 0.0;

  friend bool operator==(const LaneStats&, const LaneStats&) = default;
};

struct RolloutSummary {
  std::vector<LaneStats> lanes;
  std::int64_t total_steps = 0;

  LaneStats totals() const;

  friend bool operator==(const RolloutSummary&, const RolloutSummary&) = default;
};

/// Called on the driving thread after each synchronous batch step with the
/// agent-facing actions (lanes x arity) and the resulting timesteps.
using StepObserver = std::function<void(int step, std::span<const std::int64_t> actions, const BatchTimesteps& timesteps)>;

/// Lane-parallel execution over a worker pool. Lanes are split into
/// contiguous chunks; since every lane is independent, results do not depend
/// on the worker count.
class BatchEngine {
 public:
  explicit BatchEngine(const Environment& env, unsigned workers = 1);
  ~BatchEngine();
  BatchEngine(const BatchEngine&) = delete;
  BatchEngine& operator=(const BatchEngine&) = delete;

  const Environment& env() const { return env_; }
  unsigned workers() const { return workers_; }

  /// Lane i is reset from keys[i].
  void reset(std::span<const PrngKey> keys, BatchState& state, BatchTimesteps& out) const;

  /// In-place batched step with core actions or agent-facing tuples
  /// (lanes x arity). Applies the environment's auto-reset wrapper if enabled.
  void step(BatchState& state, std::span<const Action> actions, BatchTimesteps& out) const;
  void step(BatchState& state, std::span<const std::int64_t> actions, BatchTimesteps& out) const;

  std::pair<BatchState, BatchTimesteps> batch_reset(std::span<const PrngKey> keys) const;
  std::pair<BatchState, BatchTimesteps> batch_step(const BatchState& state, std::span<const Action> actions) const;

  /// Runs `steps` synchronous batch steps. Each step, lane i draws its policy
  /// key from its own PRNG stream, so trajectories depend only on the lane's
  /// key. `timesteps` must hold the current observations (from reset or a
  /// previous rollout) and is updated in place.
  RolloutSummary rollout(BatchState& state, BatchTimesteps& timesteps, const Policy& policy, int steps,
                         bool auto_reset, const StepObserver& observer = {}) const;

 private:
  void parallel_lanes(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) const;
  void finish_lane(BatchState& state, std::size_t i, const Transition& t, bool auto_reset, BatchTimesteps& out) const;

  const Environment& env_;
  unsigned workers_;
  struct Pool;
  std::unique_ptr<Pool> pool_;
};

}  // namespace arcenv
