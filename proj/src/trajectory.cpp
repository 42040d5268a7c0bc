#include "arcenv/trajectory.hpp"

#include <algorithm>

#include <json.hpp>

#include "arcenv/errors.hpp"

namespace arcenv {

std::vector<PrngKey> lane_keys(std::uint64_t seed, std::size_t lanes) {
  return split(PrngKey::from_seed(seed), lanes);
}

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::First: return "first";
    case StepKind::Mid: return "mid";
    case StepKind::Last: return "last";
  }
  return "?";
}

StepRecord describe_action(const ActionSpace& space, std::span<const std::int64_t> action) {
  std::vector<std::int64_t> tuple(action.begin(), action.end());
  if (space.flattened()) tuple = space.unflatten(action[0]);
  const Action decoded = space.decode(action);
  StepRecord r;
  r.op = decoded.op.value();
  auto at = [&](std::size_t i) { return static_cast<int>(tuple[i]); };
  switch (space.param()) {
    case ActionParam::Point:
      r.selection = {at(0), at(1)};
      break;
    case ActionParam::BBox:
      r.selection = {std::min(at(0), at(2)), std::min(at(1), at(3)), std::max(at(0), at(2)), std::max(at(1), at(3))};
      break;
    case ActionParam::Mask: {
      const Capacity cap = space.capacity();
      int r0 = cap.rows, c0 = cap.cols, r1 = -1, c1 = -1;
      for (int row = 0; row < cap.rows; ++row) {
        for (int col = 0; col < cap.cols; ++col) {
          if (!decoded.selection.test(row, col)) continue;
          r0 = std::min(r0, row);
          c0 = std::min(c0, col);
          r1 = std::max(r1, row);
          c1 = std::max(c1, col);
        }
      }
      if (r1 >= 0) r.selection = {r0, c0, r1, c1};
      break;
    }
  }
  return r;
}

std::string to_jsonl(const StepRecord& r) {
  nlohmann::ordered_json j;
  j["lane"] = r.lane;
  j["step"] = r.step;
  j["op"] = r.op;
  j["selection"] = r.selection.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.selection);
  j["reward"] = r.reward;
  j["similarity"] = r.similarity;
  j["step_kind"] = to_string(r.kind);
  return j.dump();
}

std::string to_jsonl(const std::vector<StepRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_jsonl(r) + "\n";
  return out;
}

RolloutResult run_random_rollout(const Environment& env, const RolloutOptions& options) {
  if (options.steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 0");
  if (options.lanes == 0) throw Error(ErrorCode::InvalidArgument, "lanes must be >= 1");
  const BatchEngine engine(env, options.workers);
  BatchState state;
  BatchTimesteps ts;
  engine.reset(lane_keys(options.seed, options.lanes), state, ts);

  RolloutResult result;
  const auto arity = static_cast<std::size_t>(env.action_space().arity());
  result.records.reserve(options.lanes * static_cast<std::size_t>(options.steps));
  auto observer = [&](int step, std::span<const std::int64_t> actions, const BatchTimesteps& out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      StepRecord r = describe_action(env.action_space(), actions.subspan(i * arity, arity));
      r.lane = static_cast<int>(i);
      r.step = step;
      r.reward = out.reward[i];
      r.similarity = out.similarity[i];
      r.kind = out.kind[i];
      result.records.push_back(std::move(r));
    }
  };
  result.summary = engine.rollout(state, ts, random_policy(env.action_space()), options.steps,
                                  env.auto_reset_enabled(), observer);
  return result;
}

StepSnapshot replay_step(const Environment& env, const RolloutOptions& options, std::size_t lane, int step) {
  if (lane >= options.lanes) throw Error(ErrorCode::InvalidArgument, "lane out of range");
  if (step < 0 || step >= options.steps) throw Error(ErrorCode::InvalidArgument, "step out of range");
  const PrngKey key = lane_keys(options.seed, options.lanes)[lane];
  EnvState state = env.reset(key).first;
  std::vector<std::int64_t> tuple(static_cast<std::size_t>(env.action_space().arity()));
  for (int s = 0;; ++s) {
    const auto [policy_key, carry] = split2(state.rng);
    state.rng = carry;
    env.action_space().sample(policy_key, tuple);
    const Action action = env.action_space().decode(tuple);
    if (s == step) {
      // The terminal grid, before any auto-reset replaces it.
      EnvState after = state;
      const Transition t = step_in_place(LaneRef::of(after), action, env.params());
      return {std::move(state), action, std::move(after), t.reward};
    }
    state = env.step(state, action).first;
  }
}

}  // namespace arcenv
