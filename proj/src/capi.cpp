#include "arcenv/arcenv.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "arcenv/batch.hpp"
#include "arcenv/bench.hpp"
#include "arcenv/config.hpp"
#include "arcenv/errors.hpp"
#include "arcenv/render.hpp"
#include "arcenv/trajectory.hpp"

namespace fs = std::filesystem;
using namespace arcenv;

struct arcenv_env {
  RunConfig config;
  std::shared_ptr<const Environment> env;
};

struct arcenv_batch {
  std::shared_ptr<const Environment> env;  // keeps the environment alive
  std::unique_ptr<BatchEngine> engine;
  std::size_t lanes = 0;
  BatchState state;
  BatchTimesteps timesteps;
  bool ready = false;
};

namespace {

thread_local std::string g_last_error;

static_assert(static_cast<int>(ErrorCode::Io) + 1 == ARCENV_E_IO);
static_assert(sizeof(StepKind) == 1);

arcenv_status fail(arcenv_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
arcenv_status guard(F&& fn) {
  g_last_error.clear();
  try {
    fn();
    return ARCENV_OK;
  } catch (const Error& e) {
    return fail(static_cast<arcenv_status>(static_cast<int>(e.code()) + 1), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ARCENV_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ARCENV_E_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

std::vector<std::string> override_list(const char* const* overrides, std::size_t n) {
  require(n == 0 || overrides != nullptr, "overrides is null");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    require(overrides[i] != nullptr, "override entry is null");
    out.emplace_back(overrides[i]);
  }
  return out;
}

arcenv_env* wrap(RunConfig config) {
  auto made = make(config);
  return new arcenv_env{std::move(config), std::move(made.env)};
}

RenderBackend parse_backend(const char* s) {
  const std::string b = s ? s : "svg";
  if (b == "svg") return RenderBackend::Svg;
  if (b == "ansi") return RenderBackend::Ansi;
  if (b == "ascii") return RenderBackend::Ascii;
  throw Error(ErrorCode::InvalidArgument, "unknown render backend '" + b + "'");
}

RenderMode parse_mode(const char* s) {
  const std::string m = s ? s : "complete_task";
  if (m == "single") return RenderMode::Single;
  if (m == "pair") return RenderMode::Pair;
  if (m == "complete_task") return RenderMode::CompleteTask;
  if (m == "rl_step") return RenderMode::RlStep;
  throw Error(ErrorCode::InvalidArgument, "unknown render mode '" + m + "'");
}

std::string render_raw_task(const RawTask& task, RenderMode mode, RenderSpec spec, int pair) {
  spec.mode = mode;
  if (mode == RenderMode::CompleteTask) return render_complete_task(task, spec);
  if (mode == RenderMode::RlStep) throw Error(ErrorCode::InvalidArgument, "rl_step renders a rollout step, not a task");
  if (pair < 0 || pair >= static_cast<int>(task.demo_pairs.size())) {
    throw Error(ErrorCode::InvalidArgument, "pair index out of range");
  }
  const RawPair& p = task.demo_pairs[static_cast<std::size_t>(pair)];
  if (mode == RenderMode::Single) return render_single(pad_into_buffer(p.input), spec);
  return render_pair(pad_into_buffer(p.input), pad_into_buffer(p.output), spec);
}

RawTask task_from_buffer(const TaskBuffer& b, int t) {
  RawTask task;
  task.id = b.task_ids[static_cast<std::size_t>(t)];
  for (int p = 0; p < b.demo_count[static_cast<std::size_t>(t)]; ++p) {
    task.demo_pairs.push_back({crop(b.demo_input(t, p)), crop(b.demo_output(t, p))});
  }
  for (int q = 0; q < b.test_count[static_cast<std::size_t>(t)]; ++q) {
    task.test_pairs.push_back({crop(b.test_input(t, q)), crop(b.test_output(t, q))});
  }
  return task;
}

RenderSpec spec_from(const arcenv_env* env, const char* backend, int cell_px) {
  RenderSpec spec;
  spec.backend = parse_backend(backend);
  if (env != nullptr) {
    spec.cell_px = env->config.render.cell_px;
    spec.palette = env->config.render.palette;
  }
  if (cell_px > 0) spec.cell_px = cell_px;
  return spec;
}

}  // namespace

extern "C" {

const char* arcenv_status_name(arcenv_status status) {
  switch (status) {
    case ARCENV_OK: return "ok";
    case ARCENV_E_NULL_HANDLE: return "null-handle";
    case ARCENV_E_INTERNAL: return "internal";
    default:
      if (status > 0 && status <= ARCENV_E_IO) return to_string(static_cast<ErrorCode>(status - 1));
      return "unknown";
  }
}

const char* arcenv_last_error(void) { return g_last_error.c_str(); }

void arcenv_free_string(char* s) { std::free(s); }

const char* arcenv_version(void) { return "0.1.0"; }

arcenv_status arcenv_make(const char* identifier, const char* data_root, int auto_download, arcenv_env** out) {
  if (out == nullptr || identifier == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "identifier and out are required");
  *out = nullptr;
  return guard([&] {
    MakeOptions options;
    if (data_root != nullptr) options.data_root = data_root;
    options.auto_download = auto_download != 0;
    *out = wrap(config_for_identifier(identifier, options));
  });
}

arcenv_status arcenv_make_from_config(const char* path, const char* const* overrides, size_t n_overrides,
                                      arcenv_env** out) {
  if (out == nullptr || path == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "path and out are required");
  *out = nullptr;
  return guard([&] { *out = wrap(load_run_config(path, override_list(overrides, n_overrides))); });
}

arcenv_status arcenv_make_from_config_text(const char* text, const char* base_dir, const char* const* overrides,
                                           size_t n_overrides, arcenv_env** out) {
  if (out == nullptr || text == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "text and out are required");
  *out = nullptr;
  return guard([&] {
    *out = wrap(parse_run_config(text, base_dir ? fs::path(base_dir) : fs::path(), override_list(overrides, n_overrides)));
  });
}

void arcenv_env_free(arcenv_env* env) { delete env; }

arcenv_status arcenv_env_config_yaml(const arcenv_env* env, char** out) {
  if (env == nullptr) return fail(ARCENV_E_NULL_HANDLE, "env is null");
  if (out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "out is null");
  return guard([&] { *out = dup_string(to_yaml(env->config)); });
}

arcenv_status arcenv_env_get_info(const arcenv_env* env, arcenv_env_info* out) {
  if (env == nullptr) return fail(ARCENV_E_NULL_HANDLE, "env is null");
  if (out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "out is null");
  return guard([&] {
    const Environment& e = *env->env;
    out->num_tasks = e.buffer().size();
    out->channels = e.channels();
    out->rows = e.params().capacity.rows;
    out->cols = e.params().capacity.cols;
    out->action_arity = e.action_space().arity();
    out->flattened = e.action_space().flattened() ? 1 : 0;
    out->auto_reset = e.auto_reset_enabled() ? 1 : 0;
    out->train_mode = e.params().mode == Mode::Train ? 1 : 0;
    out->max_episode_steps = e.params().max_episode_steps;
    out->seed = env->config.seed;
  });
}

arcenv_status arcenv_env_action_dims(const arcenv_env* env, int64_t* dims, size_t capacity, size_t* n_dims) {
  if (env == nullptr) return fail(ARCENV_E_NULL_HANDLE, "env is null");
  if (dims == nullptr && capacity > 0) return fail(ARCENV_E_INVALID_ARGUMENT, "dims is null");
  return guard([&] {
    const auto d = env->env->action_space().dims();
    if (n_dims != nullptr) *n_dims = d.size();
    std::copy_n(d.begin(), std::min(capacity, d.size()), dims);
  });
}

arcenv_status arcenv_batch_create(const arcenv_env* env, size_t lanes, unsigned workers, arcenv_batch** out) {
  if (env == nullptr) return fail(ARCENV_E_NULL_HANDLE, "env is null");
  if (out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "out is null");
  if (lanes == 0) return fail(ARCENV_E_INVALID_ARGUMENT, "lanes must be >= 1");
  *out = nullptr;
  return guard([&] {
    auto b = std::make_unique<arcenv_batch>();
    b->env = env->env;
    b->engine = std::make_unique<BatchEngine>(*b->env, workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                                                    : workers);
    b->lanes = lanes;
    *out = b.release();
  });
}

void arcenv_batch_free(arcenv_batch* batch) { delete batch; }

arcenv_status arcenv_batch_reset_keys(arcenv_batch* batch, const uint64_t* keys, size_t n_words) {
  if (batch == nullptr) return fail(ARCENV_E_NULL_HANDLE, "batch is null");
  if (keys == nullptr || n_words != 2 * batch->lanes) {
    return fail(ARCENV_E_SHAPE_MISMATCH, "expected " + std::to_string(2 * batch->lanes) + " key words");
  }
  return guard([&] {
    std::vector<PrngKey> k(batch->lanes);
    for (std::size_t i = 0; i < batch->lanes; ++i) k[i] = {keys[2 * i], keys[2 * i + 1]};
    batch->engine->reset(k, batch->state, batch->timesteps);
    batch->ready = true;
  });
}

arcenv_status arcenv_batch_reset(arcenv_batch* batch, uint64_t seed) {
  if (batch == nullptr) return fail(ARCENV_E_NULL_HANDLE, "batch is null");
  return guard([&] {
    batch->engine->reset(lane_keys(seed, batch->lanes), batch->state, batch->timesteps);
    batch->ready = true;
  });
}

arcenv_status arcenv_batch_reset_single(arcenv_batch* batch, uint64_t seed) {
  if (batch == nullptr) return fail(ARCENV_E_NULL_HANDLE, "batch is null");
  if (batch->lanes != 1) return fail(ARCENV_E_SHAPE_MISMATCH, "single reset needs a one-lane batch");
  return guard([&] {
    const PrngKey key = PrngKey::from_seed(seed);
    batch->engine->reset(std::span(&key, 1), batch->state, batch->timesteps);
    batch->ready = true;
  });
}

arcenv_status arcenv_batch_step(arcenv_batch* batch, const int64_t* actions, size_t n_values) {
  if (batch == nullptr) return fail(ARCENV_E_NULL_HANDLE, "batch is null");
  if (!batch->ready) return fail(ARCENV_E_INVALID_ARGUMENT, "batch must be reset before stepping");
  if (actions == nullptr && n_values > 0) return fail(ARCENV_E_INVALID_ARGUMENT, "actions is null");
  return guard([&] { batch->engine->step(batch->state, std::span(actions, n_values), batch->timesteps); });
}

arcenv_status arcenv_batch_sample_actions(arcenv_batch* batch, int64_t* actions, size_t n_values) {
  if (batch == nullptr) return fail(ARCENV_E_NULL_HANDLE, "batch is null");
  if (!batch->ready) return fail(ARCENV_E_INVALID_ARGUMENT, "batch must be reset before sampling");
  const ActionSpace& space = batch->env->action_space();
  const auto arity = static_cast<std::size_t>(space.arity());
  if (actions == nullptr || n_values != batch->lanes * arity) {
    return fail(ARCENV_E_SHAPE_MISMATCH, "expected " + std::to_string(batch->lanes * arity) + " action values");
  }
  return guard([&] {
    for (std::size_t i = 0; i < batch->lanes; ++i) {
      const auto [policy_key, carry] = split2(batch->state.rng[i]);
      batch->state.rng[i] = carry;
      space.sample(policy_key, std::span(actions + i * arity, arity));
    }
  });
}

arcenv_status arcenv_batch_view_get(const arcenv_batch* batch, arcenv_batch_view* out) {
  if (batch == nullptr) return fail(ARCENV_E_NULL_HANDLE, "batch is null");
  if (out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "out is null");
  if (!batch->ready) return fail(ARCENV_E_INVALID_ARGUMENT, "batch must be reset first");
  const BatchTimesteps& t = batch->timesteps;
  out->lanes = batch->lanes;
  out->channels = batch->env->channels();
  out->rows = batch->env->params().capacity.rows;
  out->cols = batch->env->params().capacity.cols;
  out->observations = t.observations.data();
  out->reward = t.reward.data();
  out->step_kind = reinterpret_cast<const uint8_t*>(t.kind.data());
  out->discount = t.discount.data();
  out->similarity = t.similarity.data();
  out->solved = t.solved.data();
  out->applied = t.applied.data();
  g_last_error.clear();
  return ARCENV_OK;
}

arcenv_status arcenv_batch_lane_state(const arcenv_batch* batch, size_t lane, arcenv_lane_state* out) {
  if (batch == nullptr) return fail(ARCENV_E_NULL_HANDLE, "batch is null");
  if (out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "out is null");
  if (!batch->ready || lane >= batch->lanes) return fail(ARCENV_E_INVALID_ARGUMENT, "lane out of range");
  const BatchState& s = batch->state;
  out->task_index = s.task_index[lane];
  out->pair_index = s.pair_index[lane];
  out->step_count = s.step_count[lane];
  out->terminated = s.terminated[lane].value ? 1 : 0;
  out->truncated = s.truncated[lane].value ? 1 : 0;
  out->working_height = s.working[lane].height();
  out->working_width = s.working[lane].width();
  out->rng_hi = s.rng[lane].hi;
  out->rng_lo = s.rng[lane].lo;
  g_last_error.clear();
  return ARCENV_OK;
}

arcenv_status arcenv_rollout_jsonl(const arcenv_env* env, size_t lanes, int steps, uint64_t seed, unsigned workers,
                                   char** jsonl, arcenv_rollout_summary* summary) {
  if (env == nullptr) return fail(ARCENV_E_NULL_HANDLE, "env is null");
  return guard([&] {
    const RolloutResult r = run_random_rollout(*env->env, {lanes, steps, seed, workers == 0 ? 1u : workers});
    if (jsonl != nullptr) *jsonl = dup_string(to_jsonl(r.records));
    if (summary != nullptr) {
      const LaneStats t = r.summary.totals();
      *summary = {r.summary.total_steps, t.episodes, t.successes, t.reward_sum};
    }
  });
}

void arcenv_bench_options_init(arcenv_bench_options* options) {
  if (options == nullptr) return;
  *options = arcenv_bench_options{nullptr, 0, 0, 0, -1, 0, 0, 0};
}

arcenv_status arcenv_bench_run(const arcenv_env* env, const arcenv_bench_options* options, char** out) {
  if (env == nullptr) return fail(ARCENV_E_NULL_HANDLE, "env is null");
  if (out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "out is null");
  return guard([&] {
    BenchConfig cfg = env->config.bench;
    bool json = false;
    if (options != nullptr) {
      if (options->batch_sizes != nullptr) {
        cfg.batch_sizes.assign(options->batch_sizes, options->batch_sizes + options->n_batch_sizes);
      }
      if (options->steps_per_env > 0) cfg.steps_per_env = options->steps_per_env;
      if (options->repeats > 0) cfg.repeats = options->repeats;
      if (options->warmup_runs >= 0) cfg.warmup_runs = options->warmup_runs;
      if (options->seed != 0) cfg.seed = options->seed;
      if (options->workers != 0) cfg.workers = options->workers;
      json = options->json != 0;
    }
    const auto records = run_sweep(cfg, *env->env);
    *out = dup_string(json ? emit_json(records) : emit_csv(records));
  });
}

arcenv_status arcenv_bench_table(const char* ours_csv, const char* baseline_csv, char** out) {
  if (ours_csv == nullptr || out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "ours_csv and out are required");
  return guard([&] {
    const auto ours = parse_csv(ours_csv, "batched");
    const auto baseline = baseline_csv ? parse_csv(baseline_csv, "baseline") : std::vector<BenchRecord>{};
    *out = dup_string(emit_speedup_table(ours, baseline));
  });
}

arcenv_status arcenv_render_task(const arcenv_env* env, const char* task_id, const char* mode, const char* backend,
                                 int pair, int cell_px, char** out) {
  if (env == nullptr) return fail(ARCENV_E_NULL_HANDLE, "env is null");
  if (task_id == nullptr || out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "task_id and out are required");
  return guard([&] {
    const TaskBuffer& b = env->env->buffer();
    const auto t = b.find(task_id);
    if (!t) throw Error(ErrorCode::UnknownIdentifier, std::string("task '") + task_id + "' is not loaded");
    *out = dup_string(render_raw_task(task_from_buffer(b, *t), parse_mode(mode), spec_from(env, backend, cell_px), pair));
  });
}

arcenv_status arcenv_render_task_file(const char* path, const char* mode, const char* backend, int pair, int cell_px,
                                      char** out) {
  if (path == nullptr || out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "path and out are required");
  return guard([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, std::string("cannot read ") + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const RawTask task = parse_task_json(ss.str(), fs::path(path).stem().string());
    *out = dup_string(render_raw_task(task, parse_mode(mode), spec_from(nullptr, backend, cell_px), pair));
  });
}

arcenv_status arcenv_render_rollout_step(const arcenv_env* env, size_t lanes, uint64_t seed, size_t lane, int step,
                                         const char* backend, int cell_px, char** out) {
  if (env == nullptr) return fail(ARCENV_E_NULL_HANDLE, "env is null");
  if (out == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "out is null");
  return guard([&] {
    const StepSnapshot snap = replay_step(*env->env, {lanes, step + 1, seed, 1}, lane, step);
    RenderSpec spec = spec_from(env, backend, cell_px);
    spec.mode = RenderMode::RlStep;
    *out = dup_string(render_rl_step(snap.before, snap.action, snap.after, snap.reward, spec));
  });
}

arcenv_status arcenv_validate_dir(const char* path, const char* parser, char** report, int* n_tasks, int* n_errors) {
  if (path == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "path is required");
  return guard([&] {
    const fs::path root = path;
    if (!fs::is_directory(root)) throw Error(ErrorCode::MissingDirectory, "not a directory: " + root.string());
    const auto p = make_parser(parser ? parser : "arc-json");
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file() && e.path().extension() == p->extension()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::string lines;
    int errors = 0;
    for (const auto& f : files) {
      try {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        (void)p->parse(ss.str(), f.stem().string());
      } catch (const std::exception& e) {
        ++errors;
        lines += f.string() + ": " + e.what() + "\n";
      }
    }
    if (files.empty()) lines = "no tasks found under " + root.string() + "\n";
    if (n_tasks) *n_tasks = static_cast<int>(files.size());
    if (n_errors) *n_errors = errors;
    if (report) *report = dup_string(lines);
  });
}

arcenv_status arcenv_fetch(const char* name, const char* dest, const char* table_path, int allow_unpinned,
                           char** dataset_dir) {
  if (name == nullptr || dest == nullptr) return fail(ARCENV_E_INVALID_ARGUMENT, "name and dest are required");
  return guard([&] {
    const auto table = table_path ? load_dataset_table(table_path) : default_dataset_table();
    const fs::path dir = fetch_dataset(name, dest, table, FetchOptions{allow_unpinned != 0});
    if (dataset_dir) *dataset_dir = dup_string(dir.string());
  });
}

}  // extern "C"
