#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "arcenv/arcenv.h"
#include "arcenv/batch.hpp"
#include "arcenv/config.hpp"
#include "arcenv/trajectory.hpp"
#include "trajectory_fixtures.hpp"

namespace {

using namespace testing_support;

struct EnvDeleter {
  void operator()(arcenv_env* e) const { arcenv_env_free(e); }
};
struct BatchDeleter {
  void operator()(arcenv_batch* b) const { arcenv_batch_free(b); }
};
using EnvPtr = std::unique_ptr<arcenv_env, EnvDeleter>;
using BatchPtr = std::unique_ptr<arcenv_batch, BatchDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  arcenv_free_string(s);
  return out;
}

EnvPtr make_env(const std::vector<std::string>& overrides = {}) {
  std::vector<const char*> ptrs;
  for (const auto& o : overrides) ptrs.push_back(o.c_str());
  arcenv_env* env = nullptr;
  const arcenv_status st =
      arcenv_make_from_config(golden_config().c_str(), ptrs.data(), ptrs.size(), &env);
  EXPECT_EQ(st, ARCENV_OK) << arcenv_last_error();
  return EnvPtr(env);
}

EnvPtr golden_env() { return make_env(golden_overrides()); }

std::shared_ptr<const arcenv::Environment> native_golden_env() {
  return arcenv::make(arcenv::load_run_config(golden_config(), golden_overrides())).env;
}

TEST(CApi, StatusNames) {
  EXPECT_STREQ(arcenv_status_name(ARCENV_OK), "ok");
  EXPECT_STREQ(arcenv_status_name(ARCENV_E_SHAPE_MISMATCH), "shape-mismatch");
  EXPECT_STREQ(arcenv_status_name(ARCENV_E_NULL_HANDLE), "null-handle");
  EXPECT_STREQ(arcenv_status_name(ARCENV_E_INTERNAL), "internal");
  EXPECT_STREQ(arcenv_status_name(static_cast<arcenv_status>(99)), "unknown");
  for (int s = 1; s <= ARCENV_E_IO; ++s) {
    EXPECT_STRNE(arcenv_status_name(static_cast<arcenv_status>(s)), "unknown") << s;
  }
  EXPECT_STREQ(arcenv_version(), "0.1.0");
}

TEST(CApi, NullHandles) {
  arcenv_env_info info;
  EXPECT_EQ(arcenv_env_get_info(nullptr, &info), ARCENV_E_NULL_HANDLE);
  EXPECT_NE(std::string(arcenv_last_error()), "");
  EXPECT_EQ(arcenv_batch_reset(nullptr, 0), ARCENV_E_NULL_HANDLE);
  EXPECT_EQ(arcenv_batch_step(nullptr, nullptr, 0), ARCENV_E_NULL_HANDLE);
  arcenv_batch* b = nullptr;
  EXPECT_EQ(arcenv_batch_create(nullptr, 4, 1, &b), ARCENV_E_NULL_HANDLE);
  EXPECT_EQ(arcenv_rollout_jsonl(nullptr, 1, 1, 0, 1, nullptr, nullptr), ARCENV_E_NULL_HANDLE);
  arcenv_env_free(nullptr);
  arcenv_batch_free(nullptr);
}

TEST(CApi, ErrorCodesFromEngine) {
  arcenv_env* env = nullptr;
  EXPECT_EQ(arcenv_make("Nope", nullptr, 0, &env), ARCENV_E_UNKNOWN_IDENTIFIER);
  EXPECT_EQ(env, nullptr);
  EXPECT_NE(std::string(arcenv_last_error()).find("Nope"), std::string::npos);
  EXPECT_EQ(arcenv_make_from_config_text("env: {bogus: 1}\n", nullptr, nullptr, 0, &env), ARCENV_E_INVALID_CONFIG);
  EXPECT_NE(std::string(arcenv_last_error()).find("env.bogus"), std::string::npos);
  EXPECT_EQ(arcenv_make_from_config("/nonexistent/x.yaml", nullptr, 0, &env), ARCENV_E_INVALID_CONFIG);
  const char* bad_override[] = {"env.max_episode_steps=0"};
  EXPECT_EQ(arcenv_make_from_config(golden_config().c_str(), bad_override, 1, &env), ARCENV_E_INVALID_CONFIG);
  // Success clears the message.
  EnvPtr ok = make_env();
  arcenv_env_info info;
  EXPECT_EQ(arcenv_env_get_info(ok.get(), &info), ARCENV_OK);
  EXPECT_STREQ(arcenv_last_error(), "");
}

TEST(CApi, InfoAndDims) {
  EnvPtr env = make_env();
  arcenv_env_info info;
  ASSERT_EQ(arcenv_env_get_info(env.get(), &info), ARCENV_OK);
  EXPECT_EQ(info.num_tasks, 3);
  EXPECT_EQ(info.channels, 2);
  EXPECT_EQ(info.rows, 5);
  EXPECT_EQ(info.cols, 5);
  EXPECT_EQ(info.action_arity, 5);
  EXPECT_EQ(info.flattened, 0);
  EXPECT_EQ(info.seed, 7u);
  int64_t dims[8];
  size_t n = 0;
  ASSERT_EQ(arcenv_env_action_dims(env.get(), dims, 8, &n), ARCENV_OK);
  ASSERT_EQ(n, 5u);
  EXPECT_EQ(std::vector<int64_t>(dims, dims + 5), (std::vector<int64_t>{5, 5, 5, 5, 35}));

  const char* flat[] = {"wrappers=[{type: point_actions}, {type: flatten}]"};
  arcenv_env* f = nullptr;
  ASSERT_EQ(arcenv_make_from_config(golden_config().c_str(), flat, 1, &f), ARCENV_OK) << arcenv_last_error();
  EnvPtr fe(f);
  ASSERT_EQ(arcenv_env_action_dims(fe.get(), dims, 8, &n), ARCENV_OK);
  ASSERT_EQ(n, 1u);
  EXPECT_EQ(dims[0], 875);
}

TEST(CApi, ConfigYamlRoundTrips) {
  EnvPtr env = make_env();
  char* yaml = nullptr;
  ASSERT_EQ(arcenv_env_config_yaml(env.get(), &yaml), ARCENV_OK);
  const std::string text = take(yaml);
  arcenv_env* again = nullptr;
  ASSERT_EQ(arcenv_make_from_config_text(text.c_str(), nullptr, nullptr, 0, &again), ARCENV_OK) << arcenv_last_error();
  EnvPtr a(again);
  char* yaml2 = nullptr;
  ASSERT_EQ(arcenv_env_config_yaml(a.get(), &yaml2), ARCENV_OK);
  EXPECT_EQ(take(yaml2), text);
}

TEST(CApi, BatchViewShape) {
  EnvPtr env = make_env();
  arcenv_batch* raw = nullptr;
  ASSERT_EQ(arcenv_batch_create(env.get(), 64, 2, &raw), ARCENV_OK);
  BatchPtr batch(raw);
  arcenv_batch_view view;
  EXPECT_EQ(arcenv_batch_view_get(batch.get(), &view), ARCENV_E_INVALID_ARGUMENT);
  ASSERT_EQ(arcenv_batch_reset(batch.get(), 5), ARCENV_OK);
  ASSERT_EQ(arcenv_batch_view_get(batch.get(), &view), ARCENV_OK);
  EXPECT_EQ(view.lanes, 64u);
  EXPECT_EQ(view.channels, 2);
  EXPECT_EQ(view.rows, 5);
  EXPECT_EQ(view.cols, 5);
  for (size_t i = 0; i < 64; ++i) {
    EXPECT_EQ(view.step_kind[i], ARCENV_STEP_FIRST);
    EXPECT_EQ(view.reward[i], 0.0);
  }
  for (size_t i = 0; i < 64 * 2 * 25; ++i) EXPECT_LE(view.observations[i], 10);

  // The view aliases engine storage: stepping updates it in place.
  const double* reward = view.reward;
  std::vector<int64_t> actions(64 * 5);
  ASSERT_EQ(arcenv_batch_sample_actions(batch.get(), actions.data(), actions.size()), ARCENV_OK);
  ASSERT_EQ(arcenv_batch_step(batch.get(), actions.data(), actions.size()), ARCENV_OK);
  arcenv_batch_view after;
  ASSERT_EQ(arcenv_batch_view_get(batch.get(), &after), ARCENV_OK);
  EXPECT_EQ(after.reward, reward);
  for (size_t i = 0; i < 64; ++i) EXPECT_NE(after.step_kind[i], ARCENV_STEP_FIRST);
}

TEST(CApi, ShapeMismatch) {
  EnvPtr env = make_env();
  arcenv_batch* raw = nullptr;
  ASSERT_EQ(arcenv_batch_create(env.get(), 64, 1, &raw), ARCENV_OK);
  BatchPtr batch(raw);
  std::vector<int64_t> actions(64 * 5, 0);
  EXPECT_EQ(arcenv_batch_step(batch.get(), actions.data(), actions.size()), ARCENV_E_INVALID_ARGUMENT);
  ASSERT_EQ(arcenv_batch_reset(batch.get(), 0), ARCENV_OK);
  arcenv_lane_state before;
  ASSERT_EQ(arcenv_batch_lane_state(batch.get(), 3, &before), ARCENV_OK);
  EXPECT_EQ(arcenv_batch_step(batch.get(), actions.data(), actions.size() - 1), ARCENV_E_SHAPE_MISMATCH);
  EXPECT_NE(std::string(arcenv_last_error()), "");
  EXPECT_EQ(arcenv_batch_sample_actions(batch.get(), actions.data(), 63 * 5), ARCENV_E_SHAPE_MISMATCH);
  std::vector<uint64_t> keys(2 * 63);
  EXPECT_EQ(arcenv_batch_reset_keys(batch.get(), keys.data(), keys.size()), ARCENV_E_SHAPE_MISMATCH);
  EXPECT_EQ(arcenv_batch_reset_single(batch.get(), 0), ARCENV_E_SHAPE_MISMATCH);
  actions[7] = 99;
  EXPECT_NE(arcenv_batch_step(batch.get(), actions.data(), actions.size()), ARCENV_OK);
  arcenv_lane_state after;
  ASSERT_EQ(arcenv_batch_lane_state(batch.get(), 3, &after), ARCENV_OK);
  EXPECT_EQ(std::memcmp(&before, &after, sizeof(before)), 0);
  EXPECT_EQ(arcenv_batch_lane_state(batch.get(), 64, &after), ARCENV_E_INVALID_ARGUMENT);
  arcenv_batch* zero = nullptr;
  EXPECT_EQ(arcenv_batch_create(env.get(), 0, 1, &zero), ARCENV_E_INVALID_ARGUMENT);
}

TEST(CApi, SingleResetMatchesNativeReset) {
  EnvPtr env = golden_env();
  const auto native = native_golden_env();
  arcenv_batch* raw = nullptr;
  ASSERT_EQ(arcenv_batch_create(env.get(), 1, 1, &raw), ARCENV_OK);
  BatchPtr batch(raw);
  for (uint64_t seed : {0ull, 1ull, 99ull}) {
    ASSERT_EQ(arcenv_batch_reset_single(batch.get(), seed), ARCENV_OK);
    const auto [s, ts] = native->reset(arcenv::PrngKey::from_seed(seed));
    arcenv_lane_state ls;
    ASSERT_EQ(arcenv_batch_lane_state(batch.get(), 0, &ls), ARCENV_OK);
    EXPECT_EQ(ls.task_index, s.task_index);
    EXPECT_EQ(ls.pair_index, s.pair_index);
    EXPECT_EQ(ls.rng_hi, s.rng.hi);
    EXPECT_EQ(ls.rng_lo, s.rng.lo);
    arcenv_batch_view v;
    ASSERT_EQ(arcenv_batch_view_get(batch.get(), &v), ARCENV_OK);
    EXPECT_EQ(std::vector<uint8_t>(v.observations, v.observations + ts.observation.data.size()), ts.observation.data);
  }
}

// Bound stepping (sample + step through the C layer) against the native
// batch engine driving the same random policy.
TEST(CApi, BoundStepMatchesNative) {
  EnvPtr env = golden_env();
  const auto native = native_golden_env();
  constexpr size_t kLanes = 64;
  constexpr int kSteps = 60;
  const size_t arity = static_cast<size_t>(native->action_space().arity());
  const size_t obs = native->observation_size();
  for (uint64_t seed : kGoldenSeeds) {
    arcenv::BatchEngine engine(*native, 1);
    arcenv::BatchState state;
    arcenv::BatchTimesteps ts;
    engine.reset(arcenv::lane_keys(seed, kLanes), state, ts);
    std::vector<arcenv::BatchTimesteps> expected;
    std::vector<std::vector<int64_t>> expected_actions;
    engine.rollout(state, ts, arcenv::random_policy(native->action_space()), kSteps, true,
                   [&](int, std::span<const std::int64_t> a, const arcenv::BatchTimesteps& t) {
                     expected.push_back(t);
                     expected_actions.emplace_back(a.begin(), a.end());
                   });

    arcenv_batch* raw = nullptr;
    ASSERT_EQ(arcenv_batch_create(env.get(), kLanes, 3, &raw), ARCENV_OK);
    BatchPtr batch(raw);
    ASSERT_EQ(arcenv_batch_reset(batch.get(), seed), ARCENV_OK);
    std::vector<int64_t> actions(kLanes * arity);
    for (int step = 0; step < kSteps; ++step) {
      ASSERT_EQ(arcenv_batch_sample_actions(batch.get(), actions.data(), actions.size()), ARCENV_OK);
      ASSERT_EQ(actions, expected_actions[step]) << "seed " << seed << " step " << step;
      ASSERT_EQ(arcenv_batch_step(batch.get(), actions.data(), actions.size()), ARCENV_OK);
      arcenv_batch_view v;
      ASSERT_EQ(arcenv_batch_view_get(batch.get(), &v), ARCENV_OK);
      const auto& e = expected[step];
      for (size_t i = 0; i < kLanes; ++i) {
        ASSERT_EQ(v.reward[i], e.reward[i]);
        ASSERT_EQ(v.discount[i], e.discount[i]);
        ASSERT_EQ(v.similarity[i], e.similarity[i]);
        ASSERT_EQ(v.step_kind[i], static_cast<uint8_t>(e.kind[i]));
        ASSERT_EQ(v.solved[i], e.solved[i]);
        ASSERT_EQ(v.applied[i], e.applied[i]);
      }
      ASSERT_EQ(std::memcmp(v.observations, e.observations.data(), kLanes * obs), 0);
    }
    for (size_t i = 0; i < kLanes; ++i) {
      arcenv_lane_state ls;
      ASSERT_EQ(arcenv_batch_lane_state(batch.get(), i, &ls), ARCENV_OK);
      EXPECT_EQ(ls.rng_hi, state.rng[i].hi);
      EXPECT_EQ(ls.rng_lo, state.rng[i].lo);
      EXPECT_EQ(ls.step_count, state.step_count[i]);
    }
  }
}

// Set ARCENV_UPDATE_GOLDEN=1 to rewrite the trajectory files.
TEST(GoldenTrajectory, NativeMatchesFile) {
  const auto native = native_golden_env();
  const bool update = std::getenv("ARCENV_UPDATE_GOLDEN") != nullptr;
  for (uint64_t seed : kGoldenSeeds) {
    const auto r = arcenv::run_random_rollout(*native, {kGoldenLanes, kGoldenSteps, seed, 1});
    const std::string text = arcenv::to_jsonl(r.records);
    if (update) write_file(golden_trajectory(seed), text);
    ASSERT_TRUE(std::filesystem::exists(golden_trajectory(seed)));
    EXPECT_EQ(text, read_file(golden_trajectory(seed))) << seed;
  }
}

TEST(GoldenTrajectory, BoundMatchesFile) {
  EnvPtr env = golden_env();
  for (uint64_t seed : kGoldenSeeds) {
    for (unsigned workers : {1u, 4u}) {
      char* jsonl = nullptr;
      arcenv_rollout_summary summary;
      ASSERT_EQ(arcenv_rollout_jsonl(env.get(), kGoldenLanes, kGoldenSteps, seed, workers, &jsonl, &summary),
                ARCENV_OK);
      EXPECT_EQ(take(jsonl), read_file(golden_trajectory(seed))) << seed;
      EXPECT_EQ(summary.total_steps, static_cast<int64_t>(kGoldenLanes) * kGoldenSteps);
      EXPECT_GT(summary.episodes, 0);
    }
  }
}

TEST(CApi, BenchAndTable) {
  EnvPtr env = make_env();
  arcenv_bench_options opts;
  arcenv_bench_options_init(&opts);
  const int64_t sizes[] = {1, 2};
  opts.batch_sizes = sizes;
  opts.n_batch_sizes = 2;
  opts.steps_per_env = 5;
  opts.repeats = 3;
  opts.warmup_runs = 0;
  opts.workers = 1;
  char* csv = nullptr;
  ASSERT_EQ(arcenv_bench_run(env.get(), &opts, &csv), ARCENV_OK) << arcenv_last_error();
  const std::string text = take(csv);
  EXPECT_EQ(text.rfind("batch_size,steps_total,", 0), 0u);
  EXPECT_NE(text.find("\n1,5,"), std::string::npos);
  EXPECT_NE(text.find("\n2,10,"), std::string::npos);

  char* table = nullptr;
  ASSERT_EQ(arcenv_bench_table("batch_size,throughput_sps\n1,100\n", "batch_size,throughput_sps\n1,50\n", &table),
            ARCENV_OK);
  EXPECT_NE(take(table).find("2.0×"), std::string::npos);
  opts.json = 1;
  char* json = nullptr;
  ASSERT_EQ(arcenv_bench_run(env.get(), &opts, &json), ARCENV_OK);
  EXPECT_EQ(take(json).rfind("[", 0), 0u);

  const int64_t unsorted[] = {4, 2};
  opts.batch_sizes = unsorted;
  char* bad = nullptr;
  EXPECT_EQ(arcenv_bench_run(env.get(), &opts, &bad), ARCENV_E_INVALID_CONFIG);
}

TEST(CApi, RenderAndValidate) {
  EnvPtr env = make_env();
  char* out = nullptr;
  ASSERT_EQ(arcenv_render_task(env.get(), "recolor_b2", "complete_task", "ascii", 0, 0, &out), ARCENV_OK);
  EXPECT_EQ(take(out), read_file(golden_dir() / "complete_recolor.txt"));
  ASSERT_EQ(arcenv_render_task_file((data_dir() / "mini" / "flip_rows_a1.json").c_str(), "pair", "svg", 1, 16, &out),
            ARCENV_OK);
  EXPECT_EQ(take(out), read_file(golden_dir() / "pair_flip_demo2.svg"));
  EXPECT_EQ(arcenv_render_task(env.get(), "absent", "single", "svg", 0, 0, &out), ARCENV_E_UNKNOWN_IDENTIFIER);
  EXPECT_EQ(arcenv_render_task(env.get(), "recolor_b2", "single", "png", 0, 0, &out), ARCENV_E_INVALID_ARGUMENT);
  EXPECT_EQ(arcenv_render_task(env.get(), "recolor_b2", "pair", "svg", 9, 0, &out), ARCENV_E_INVALID_ARGUMENT);
  ASSERT_EQ(arcenv_render_rollout_step(env.get(), 2, 1, 1, 3, "ascii", 0, &out), ARCENV_OK);
  EXPECT_NE(take(out).find(" reward "), std::string::npos);

  char* report = nullptr;
  int tasks = 0;
  int errors = 0;
  ASSERT_EQ(arcenv_validate_dir((data_dir() / "bad").c_str(), nullptr, &report, &tasks, &errors), ARCENV_OK);
  EXPECT_EQ(tasks, 2);
  EXPECT_EQ(errors, 1);
  EXPECT_NE(take(report).find("ragged_c3.json"), std::string::npos);
  EXPECT_EQ(arcenv_validate_dir("/nonexistent", nullptr, nullptr, nullptr, nullptr), ARCENV_E_MISSING_DIRECTORY);
}

}  // namespace
