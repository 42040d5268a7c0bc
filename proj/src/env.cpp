#include "arcenv/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arcenv/errors.hpp"

namespace arcenv {

OpSet::OpSet(std::span<const int> ops) {
  for (int op : ops) {
    if (op < 0 || op >= kNumOps) throw Error(ErrorCode::InvalidOp, "operation id " + std::to_string(op) + " outside 0..34");
    bits_.set(op);
  }
}

std::vector<int> OpSet::ids() const {
  std::vector<int> out;
  for (int i = 0; i < kNumOps; ++i) {
    if (bits_.test(i)) out.push_back(i);
  }
  return out;
}

void EnvParams::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (max_episode_steps < 1) fail("env.max_episode_steps: must be >= 1");
  if (allowed_ops.empty()) fail("env.allowed_ops: must not be empty");
  if (!allowed_ops.contains(OpId(OpId::kSubmit))) fail("env.allowed_ops: must contain submit (34)");
  if (!capacity.valid()) fail("env.capacity: must be within 1.." + std::to_string(kMaxDim));
  const RewardConfig& r = reward;
  for (double v : {r.similarity_weight, r.success_bonus, r.step_penalty, r.unsolved_submission_penalty}) {
    if (!std::isfinite(v)) fail("env.reward: values must be finite");
  }
  if (r.step_penalty < 0) fail("env.reward.step_penalty: must be >= 0");
  if (r.unsolved_submission_penalty < 0) fail("env.reward.unsolved_submission_penalty: must be >= 0");
}

double compute_reward(double prev_similarity, double new_similarity, bool submitted, bool solved,
                      const EnvParams& params) {
  const RewardConfig& r = params.reward;
  const double shaping = params.mode == Mode::Train ? r.similarity_weight * (new_similarity - prev_similarity) : 0.0;
  const double bonus = submitted && solved ? r.success_bonus : 0.0;
  const double unsolved = submitted && !solved ? r.unsolved_submission_penalty : 0.0;
  return shaping + bonus - r.step_penalty - unsolved;
}

EnvState initial_state(int task_index, int pair_index, PrngKey rng, const EnvParams& params, const TaskBuffer& buffer) {
  EnvState s;
  if (params.mode == Mode::Train) {
    s.input = buffer.demo_input(task_index, pair_index);
    s.target = buffer.demo_output(task_index, pair_index);
  } else {
    s.input = buffer.test_input(task_index, pair_index);
    s.target = buffer.test_output(task_index, pair_index);
  }
  s.working = s.input;
  s.last_similarity = similarity(s.working, s.target);
  s.task_index = task_index;
  s.pair_index = pair_index;
  s.rng = rng;
  return s;
}

std::pair<EnvState, Timestep> reset(PrngKey key, const EnvParams& params, const TaskBuffer& buffer) {
  const PrngKey task_key = split_child(key, 0);
  const PrngKey pair_key = split_child(key, 1);
  const PrngKey state_key = split_child(key, 2);
  const int task = sample_task(task_key, buffer).first;
  const int pair = params.mode == Mode::Train
                       ? static_cast<int>(uniform_index(pair_key, static_cast<std::uint32_t>(buffer.demo_count[task])))
                       : 0;
  EnvState s = initial_state(task, pair, state_key, params, buffer);
  Timestep ts;
  ts.observation = base_observation(s, params.capacity);
  ts.kind = StepKind::First;
  ts.info = {s.last_similarity, false, true};
  return {std::move(s), std::move(ts)};
}

Transition step_in_place(LaneRef lane, const Action& action, const EnvParams& params) {
  Transition t;
  if (lane.terminated || lane.truncated) {
    t.kind = StepKind::Last;
    t.discount = lane.terminated ? 0.0 : 1.0;
    t.info = {lane.last_similarity, false, false};
    return t;
  }

  bool submitted = false;
  bool applied = false;
  if (params.allowed_ops.contains(action.op)) {
    applied = apply_operation_in_place(action.op, action.selection, lane.working, lane.input, lane.clipboard, submitted);
  }
  ++lane.step_count;

  const double prev = lane.last_similarity;
  const double sim = similarity(lane.working, lane.target);
  const bool solved = submitted && sim == 1.0;
  lane.last_similarity = sim;
  lane.terminated = submitted;
  lane.truncated = !submitted && lane.step_count >= params.max_episode_steps;

  t.reward = compute_reward(prev, sim, submitted, solved, params);
  t.kind = lane.terminated || lane.truncated ? StepKind::Last : StepKind::Mid;
  t.discount = lane.terminated ? 0.0 : 1.0;
  t.info = {sim, solved, applied};
  return t;
}

std::pair<EnvState, Timestep> step(const EnvState& state, const Action& action, const EnvParams& params) {
  EnvState next = state;
  const Transition t = step_in_place(LaneRef::of(next), action, params);
  Timestep ts;
  ts.observation = base_observation(next, params.capacity);
  ts.reward = t.reward;
  ts.kind = t.kind;
  ts.discount = t.discount;
  ts.info = t.info;
  return {std::move(next), std::move(ts)};
}

void write_plane(const PaddedGrid& grid, Capacity capacity, std::span<std::uint8_t> plane) {
  std::fill(plane.begin(), plane.end(), kPaddingSentinel);
  const int h = std::min(grid.height(), capacity.rows);
  const int w = std::min(grid.width(), capacity.cols);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) plane[static_cast<std::size_t>(r) * capacity.cols + c] = grid.at(r, c);
  }
}

Observation base_observation(const EnvState& state, Capacity capacity) {
  Observation obs{1, capacity.rows, capacity.cols, std::vector<std::uint8_t>(capacity.cells())};
  write_plane(state.working, capacity, obs.data);
  return obs;
}

}  // namespace arcenv
