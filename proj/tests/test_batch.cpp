#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "arcenv/batch.hpp"
#include "arcenv/errors.hpp"
#include "arcenv/trajectory.hpp"
#include "support.hpp"

namespace arcenv {
namespace {

using namespace testing_support;

std::shared_ptr<const TaskBuffer> random_buffer(std::uint64_t seed, int tasks) {
  std::mt19937_64 rng(seed);
  std::vector<RawTask> raw;
  for (int i = 0; i < tasks; ++i) raw.push_back(random_task(rng, "t" + std::to_string(i), 5, 5, 2));
  return std::make_shared<const TaskBuffer>(mini_buffer(raw));
}

Environment make_env(ActionParam param, ObsSpec obs, bool auto_reset, int max_steps = 30) {
  EnvParams p;
  p.capacity = Capacity::miniarc();
  p.max_episode_steps = max_steps;
  return Environment(random_buffer(7, 16), p, WrapperStack{ActionSpace(param, {}, Capacity::miniarc(), false), obs, auto_reset});
}

// Lane-at-a-time reference: the same key discipline as BatchEngine::rollout.
struct SequentialLane {
  std::vector<Timestep> timesteps;
  EnvState final_state;
};

SequentialLane run_sequential(const Environment& env, PrngKey key, int steps) {
  SequentialLane out;
  auto [s, ts] = env.reset(key);
  std::vector<std::int64_t> a(env.action_space().arity());
  for (int i = 0; i < steps; ++i) {
    const auto [policy_key, carry] = split2(s.rng);
    env.action_space().sample(policy_key, a);
    s.rng = carry;
    std::tie(s, ts) = env.step(s, a);
    out.timesteps.push_back(ts);
  }
  out.final_state = s;
  return out;
}

TEST(Batch, SixtyFourLanesEqualSequentialEpisodes) {
  const Environment env = make_env(ActionParam::Point, ObsSpec{true, true, true, 5}, true);
  constexpr std::size_t kLanes = 64;
  constexpr int kSteps = 120;
  const auto keys = lane_keys(3, kLanes);

  std::vector<SequentialLane> expected;
  for (const PrngKey& k : keys) expected.push_back(run_sequential(env, k, kSteps));

  for (unsigned workers : {1u, 4u}) {
    BatchEngine engine(env, workers);
    BatchState state;
    BatchTimesteps ts;
    engine.reset(keys, state, ts);
    engine.rollout(state, ts, random_policy(env.action_space()), kSteps, env.auto_reset_enabled(),
                   [&](int step, std::span<const std::int64_t>, const BatchTimesteps& t) {
                     for (std::size_t i = 0; i < kLanes; ++i) {
                       ASSERT_EQ(t.lane(i, env), expected[i].timesteps[step]) << "lane " << i << " step " << step;
                     }
                   });
    for (std::size_t i = 0; i < kLanes; ++i) EXPECT_EQ(state.lane(i), expected[i].final_state) << i;
  }
}

TEST(Batch, SingleLaneResetEqualsReset) {
  const Environment env = make_env(ActionParam::Mask, {}, false);
  BatchEngine engine(env);
  const PrngKey k = PrngKey::from_seed(11);
  const auto [state, ts] = engine.batch_reset(std::vector<PrngKey>{k});
  const auto [s, t] = env.reset(k);
  EXPECT_EQ(state.lane(0), s);
  EXPECT_EQ(ts.lane(0, env), t);
}

TEST(Batch, PermutedKeysPermuteLanes) {
  const Environment env = make_env(ActionParam::BBox, ObsSpec{true, false, false, 2}, false);
  BatchEngine engine(env, 2);
  auto keys = lane_keys(5, 32);
  auto perm = keys;
  std::mt19937_64 rng(1);
  std::vector<std::size_t> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size(); ++i) perm[i] = keys[order[i]];
  const auto [a, ta] = engine.batch_reset(keys);
  const auto [b, tb] = engine.batch_reset(perm);
  for (std::size_t i = 0; i < order.size(); ++i) {
    EXPECT_EQ(b.lane(i), a.lane(order[i]));
    EXPECT_EQ(tb.lane(i, env), ta.lane(order[i], env));
  }
}

TEST(Batch, WorkerCountDoesNotChangeState) {
  const Environment env = make_env(ActionParam::Point, ObsSpec{false, true, false, 5}, true);
  const auto keys = lane_keys(8, 200);
  std::vector<BatchState> finals;
  std::vector<RolloutSummary> summaries;
  for (unsigned w : {1u, 2u, 4u, 8u}) {
    BatchEngine engine(env, w);
    BatchState state;
    BatchTimesteps ts;
    engine.reset(keys, state, ts);
    summaries.push_back(engine.rollout(state, ts, random_policy(env.action_space()), 60, true));
    finals.push_back(state);
  }
  for (std::size_t i = 1; i < finals.size(); ++i) {
    EXPECT_EQ(finals[i], finals[0]);
    EXPECT_EQ(summaries[i], summaries[0]);
  }
}

TEST(Batch, TerminalLaneIsolated) {
  const Environment env = make_env(ActionParam::Point, {}, false);
  BatchEngine engine(env, 2);
  auto [state, ts] = engine.batch_reset(lane_keys(1, 8));
  std::vector<Action> submit(8, Action{OpId(34), {}});
  std::vector<Action> fill(8, Action{OpId(3), {}});
  // Finish lane 2 only.
  std::vector<Action> first = fill;
  first[2] = submit[2];
  engine.step(state, first, ts);
  ASSERT_TRUE(state.lane(2).terminated);
  const BatchState before = state;
  engine.step(state, fill, ts);
  EXPECT_EQ(state.lane(2), before.lane(2));
  EXPECT_EQ(ts.reward[2], 0.0);
  EXPECT_EQ(ts.kind[2], StepKind::Last);
  for (std::size_t i = 0; i < 8; ++i) {
    if (i != 2) EXPECT_EQ(state.step_count[i], 2);
  }
}

TEST(Batch, StepCounting) {
  const Environment env = make_env(ActionParam::Point, {}, true);
  BatchEngine engine(env, 2);
  BatchState state;
  BatchTimesteps ts;
  engine.reset(lane_keys(0, 1024), state, ts);
  const BatchState before = state;
  EXPECT_EQ(engine.rollout(state, ts, random_policy(env.action_space()), 0, true).total_steps, 0);
  EXPECT_EQ(state, before);
  EXPECT_EQ(engine.rollout(state, ts, random_policy(env.action_space()), 100, true).total_steps, 102400);
}

TEST(Batch, ResetTaskIndicesUniform) {
  const Environment env = make_env(ActionParam::Point, {}, false);
  BatchEngine engine(env);
  const auto [state, ts] = engine.batch_reset(lane_keys(21, 1024));
  std::vector<int> counts(16, 0);
  for (int t : state.task_index) ++counts[t];
  const double expected = 1024.0 / 16.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 37.70);  // 0.999 quantile, 15 degrees of freedom
}

TEST(Batch, ShapeErrors) {
  const Environment env = make_env(ActionParam::Point, {}, false);
  BatchEngine engine(env);
  auto [state, ts] = engine.batch_reset(lane_keys(0, 4));
  const BatchState before = state;
  std::vector<std::int64_t> wrong(4 * 3 - 1, 0);
  try {
    engine.step(state, wrong, ts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
  std::vector<std::int64_t> bad(4 * 3, 0);
  bad[5] = 99;
  EXPECT_THROW(engine.step(state, bad, ts), Error);
  EXPECT_EQ(state, before);
}

TEST(Prng, SiblingStreamsUncorrelated) {
  // Lag-one correlation between paired draws of adjacent sibling keys.
  const auto keys = split(PrngKey::from_seed(123), 1000001);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const double n = 1000000.0;
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    const double x = static_cast<double>(random_bits(keys[i]) >> 11) / 9007199254740992.0;
    const double y = static_cast<double>(random_bits(keys[i + 1]) >> 11) / 9007199254740992.0;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double r = (sxy - sx * sy / n) / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  EXPECT_LT(std::abs(r), 0.01);
}

}  // namespace
}  // namespace arcenv
