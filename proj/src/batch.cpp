#include "arcenv/batch.hpp"

#include <oneapi/tbb/blocked_range.h>
#include <oneapi/tbb/parallel_for.h>
#include <oneapi/tbb/partitioner.h>
#include <oneapi/tbb/task_arena.h>

#include "arcenv/errors.hpp"

namespace arcenv {

BatchState::BatchState(std::size_t lanes)
    : working(lanes),
      input(lanes),
      target(lanes),
      clipboard(lanes),
      step_count(lanes, 0),
      last_similarity(lanes, 0.0),
      terminated(lanes),
      truncated(lanes),
      task_index(lanes, 0),
      pair_index(lanes, 0),
      rng(lanes) {}

EnvState BatchState::lane(std::size_t i) const {
  return {working[i],   input[i],           target[i],      clipboard[i],  step_count[i], last_similarity[i],
          terminated[i].value, truncated[i].value, task_index[i], pair_index[i], rng[i]};
}

void BatchState::set_lane(std::size_t i, const EnvState& s) {
  working[i] = s.working;
  input[i] = s.input;
  target[i] = s.target;
  clipboard[i] = s.clipboard;
  step_count[i] = s.step_count;
  last_similarity[i] = s.last_similarity;
  terminated[i].value = s.terminated;
  truncated[i].value = s.truncated;
  task_index[i] = s.task_index;
  pair_index[i] = s.pair_index;
  rng[i] = s.rng;
}

std::size_t BatchState::lane_bytes() {
  return 3 * sizeof(PaddedGrid) + sizeof(Clipboard) + sizeof(int) * 3 + sizeof(double) + 2 * sizeof(Flag) +
         sizeof(PrngKey);
}

void BatchTimesteps::resize(std::size_t lanes, std::size_t obs_bytes) {
  obs_size = obs_bytes;
  observations.assign(lanes * obs_bytes, kPaddingSentinel);
  reward.assign(lanes, 0.0);
  kind.assign(lanes, StepKind::First);
  discount.assign(lanes, 1.0);
  similarity.assign(lanes, 0.0);
  solved.assign(lanes, 0);
  applied.assign(lanes, 1);
}

Timestep BatchTimesteps::lane(std::size_t i, const Environment& env) const {
  Timestep ts;
  const Capacity cap = env.params().capacity;
  ts.observation = {env.channels(), cap.rows, cap.cols,
                    std::vector<std::uint8_t>(observation(i).begin(), observation(i).end())};
  ts.reward = reward[i];
  ts.kind = kind[i];
  ts.discount = discount[i];
  ts.info = {similarity[i], solved[i] != 0, applied[i] != 0};
  return ts;
}

Policy random_policy(const ActionSpace& space) {
  return [space](std::span<const std::uint8_t>, PrngKey key, std::span<std::int64_t> action) {
    space.sample(key, action);
  };
}

LaneStats RolloutSummary::totals() const {
  LaneStats t;
  for (const auto& l : lanes) {
    t.episodes += l.episodes;
    t.successes += l.successes;
    t.reward_sum += l.reward_sum;
  }
  return t;
}

struct BatchEngine::Pool {
  explicit Pool(unsigned workers) : arena(static_cast<int>(workers)) {}
  tbb::task_arena arena;
};

BatchEngine::BatchEngine(const Environment& env, unsigned workers) : env_(env), workers_(workers == 0 ? 1 : workers) {
  if (workers_ > 1) pool_ = std::make_unique<Pool>(workers_);
}

BatchEngine::~BatchEngine() = default;

void BatchEngine::parallel_lanes(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) const {
  if (!pool_ || n < 2) {
    fn(0, n);
    return;
  }
  pool_->arena.execute([&] {
    tbb::parallel_for(
        tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) { fn(r.begin(), r.end()); },
        tbb::static_partitioner());
  });
}

void BatchEngine::finish_lane(BatchState& state, std::size_t i, const Transition& t, bool auto_reset,
                              BatchTimesteps& out) const {
  out.reward[i] = t.reward;
  out.kind[i] = t.kind;
  out.discount[i] = t.discount;
  out.similarity[i] = t.info.similarity;
  out.solved[i] = t.info.solved;
  out.applied[i] = t.info.applied;
  if (auto_reset && t.kind == StepKind::Last) {
    const PrngKey key = split_child(state.rng[i], 2);
    state.set_lane(i, arcenv::reset(key, env_.params(), env_.buffer()).first);
  }
  const ObsSource src{state.working[i], state.input[i],      state.target[i],
                      state.clipboard[i], state.task_index[i], state.pair_index[i]};
  augment_observation(src, env_.obs_spec(), env_.buffer(), env_.params().mode, env_.params().capacity,
                      std::span(out.observations).subspan(i * out.obs_size, out.obs_size));
}

void BatchEngine::reset(std::span<const PrngKey> keys, BatchState& state, BatchTimesteps& out) const {
  const std::size_t n = keys.size();
  state = BatchState(n);
  out.resize(n, env_.observation_size());
  parallel_lanes(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto [s, ts] = arcenv::reset(keys[i], env_.params(), env_.buffer());
      state.set_lane(i, s);
      Transition t{ts.reward, ts.kind, ts.discount, ts.info};
      finish_lane(state, i, t, false, out);
    }
  });
}

void BatchEngine::step(BatchState& state, std::span<const Action> actions, BatchTimesteps& out) const {
  const std::size_t n = state.size();
  if (actions.size() != n) throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(n) + " actions");
  if (out.size() != n || out.obs_size != env_.observation_size()) out.resize(n, env_.observation_size());
  const bool ar = env_.auto_reset_enabled();
  parallel_lanes(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Transition t = step_in_place(state.ref(i), actions[i], env_.params());
      finish_lane(state, i, t, ar, out);
    }
  });
}

void BatchEngine::step(BatchState& state, std::span<const std::int64_t> actions, BatchTimesteps& out) const {
  const std::size_t n = state.size();
  const auto arity = static_cast<std::size_t>(env_.action_space().arity());
  if (actions.size() != n * arity) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(n) + " x " + std::to_string(arity) +
                                              " action values, got " + std::to_string(actions.size()));
  }
  // Decode everything up front so a malformed action leaves the batch untouched.
  std::vector<Action> decoded(n);
  for (std::size_t i = 0; i < n; ++i) env_.action_space().decode_into(actions.subspan(i * arity, arity), decoded[i]);
  step(state, decoded, out);
}

std::pair<BatchState, BatchTimesteps> BatchEngine::batch_reset(std::span<const PrngKey> keys) const {
  std::pair<BatchState, BatchTimesteps> out;
  reset(keys, out.first, out.second);
  return out;
}

std::pair<BatchState, BatchTimesteps> BatchEngine::batch_step(const BatchState& state,
                                                               std::span<const Action> actions) const {
  std::pair<BatchState, BatchTimesteps> out{state, {}};
  step(out.first, actions, out.second);
  return out;
}

RolloutSummary BatchEngine::rollout(BatchState& state, BatchTimesteps& timesteps, const Policy& policy, int steps,
                                    bool auto_reset, const StepObserver& observer) const {
  const std::size_t n = state.size();
  const auto arity = static_cast<std::size_t>(env_.action_space().arity());
  if (timesteps.size() != n || timesteps.obs_size != env_.observation_size()) {
    throw Error(ErrorCode::ShapeMismatch, "timesteps do not match the batch; reset first");
  }
  RolloutSummary summary;
  summary.lanes.resize(n);
  std::vector<std::int64_t> actions(n * arity);
  std::vector<std::int64_t> lane_steps(n, 0);

  for (int s = 0; s < steps; ++s) {
    parallel_lanes(n, [&](std::size_t b, std::size_t e) {
      Action action;
      for (std::size_t i = b; i < e; ++i) {
        const auto [policy_key, carry] = split2(state.rng[i]);
        state.rng[i] = carry;
        const std::span<std::int64_t> tuple(actions.data() + i * arity, arity);
        policy(timesteps.observation(i), policy_key, tuple);
        env_.action_space().decode_into(tuple, action);
        const bool was_done = state.terminated[i].value || state.truncated[i].value;
        const Transition t = step_in_place(state.ref(i), action, env_.params());
        ++lane_steps[i];
        LaneStats& stats = summary.lanes[i];
        stats.reward_sum += t.reward;
        if (!was_done && t.kind == StepKind::Last) {
          ++stats.episodes;
          stats.successes += t.info.solved;
        }
        finish_lane(state, i, t, auto_reset, timesteps);
      }
    });
    if (observer) observer(s, actions, timesteps);
  }
  for (auto c : lane_steps) summary.total_steps += c;
  return summary;
}

}  // namespace arcenv
