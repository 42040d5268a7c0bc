// Command-line driver. Talks to the engine only through the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arcenv/arcenv.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct DomainError {
  std::string message;
};

// Owns a malloc'd string returned by the C interface.
struct CString {
  char* p = nullptr;
  ~CString() { arcenv_free_string(p); }
  std::string str() const { return p ? p : ""; }
};

void check(arcenv_status s) {
  if (s != ARCENV_OK) throw DomainError{std::string(arcenv_status_name(s)) + ": " + arcenv_last_error()};
}

struct EnvSource {
  std::string config;
  std::string id;
  std::vector<std::string> overrides;
  std::string data_root;
  bool auto_download = false;

  void add_options(CLI::App* cmd) {
    auto* cfg = cmd->add_option("--config", config, "YAML or JSON run config");
    auto* ident = cmd->add_option("--id", id, "environment identifier, e.g. Mini-<task id>");
    cfg->excludes(ident);
    cmd->add_option("--set", overrides, "config override key=value (repeatable)");
    cmd->add_option("--data-root", data_root, "directory holding datasets (default $ARCENV_DATA_ROOT or ./data)");
    cmd->add_flag("--auto-download", auto_download, "fetch the dataset when it is missing");
  }

  bool given() const { return !config.empty() || !id.empty(); }

  arcenv_env* open() const {
    arcenv_env* env = nullptr;
    if (!config.empty()) {
      std::vector<const char*> o;
      for (const auto& s : overrides) o.push_back(s.c_str());
      check(arcenv_make_from_config(config.c_str(), o.data(), o.size(), &env));
    } else if (!id.empty()) {
      if (!overrides.empty()) throw CLI::ValidationError("--set", "requires --config");
      check(arcenv_make(id.c_str(), data_root.empty() ? nullptr : data_root.c_str(), auto_download ? 1 : 0, &env));
    } else {
      throw CLI::RequiredError("--config or --id");
    }
    return env;
  }
};

struct EnvHandle {
  arcenv_env* p;
  ~EnvHandle() { arcenv_env_free(p); }
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError{"cannot write " + path};
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError{"cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched ARC grid-puzzle environment engine"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "parse every task file in a dataset directory");
  std::string validate_dir;
  std::string parser = "arc-json";
  validate->add_option("dir", validate_dir, "dataset directory")->required();
  validate->add_option("--parser", parser, "task parser name");

  // rollout
  auto* rollout = app.add_subcommand("rollout", "random-policy rollout written as JSON lines");
  EnvSource rollout_env;
  rollout_env.add_options(rollout);
  int steps = 100;
  std::size_t lanes = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned workers = 1;
  std::string policy = "random";
  std::string out_path;
  rollout->add_option("--steps", steps, "steps per lane")->check(CLI::NonNegativeNumber);
  rollout->add_option("--lanes", lanes, "parallel lanes")->check(CLI::PositiveNumber);
  rollout->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { seed = v, seed_given = true; },
                                              "PRNG seed (default: config seed)");
  rollout->add_option("--workers", workers, "worker threads");
  rollout->add_option("--policy", policy, "action policy")->check(CLI::IsMember({"random"}));
  rollout->add_option("--out", out_path, "trajectory file (default stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "throughput sweep over batch sizes");
  EnvSource bench_env;
  bench_env.add_options(bench);
  std::vector<std::int64_t> batch_sizes;
  bool full = false;
  int bench_steps = 0;
  int repeats = 0;
  int warmup = -1;
  unsigned bench_workers = 0;
  std::uint64_t bench_seed = 0;
  bool json = false;
  std::string baseline;
  std::string bench_out;
  bench->add_option("--batch-sizes", batch_sizes, "batch sizes, ascending")->delimiter(',');
  bench->add_flag("--full", full, "sweep 2^0 .. 2^20");
  bench->add_option("--steps", bench_steps, "steps per environment (default 100)");
  bench->add_option("--repeats", repeats, "timed repeats per batch size (>= 3)");
  bench->add_option("--warmup", warmup, "untimed warm-up runs");
  bench->add_option("--workers", bench_workers, "worker threads (default: all cores)");
  bench->add_option("--seed", bench_seed, "PRNG seed");
  bench->add_flag("--json", json, "emit JSON instead of CSV");
  bench->add_option("--baseline", baseline, "baseline CSV; prints the speedup table instead");
  bench->add_option("--out", bench_out, "output file (default stdout)");

  // render
  auto* render = app.add_subcommand("render", "render a task or a rollout step");
  EnvSource render_env;
  render_env.add_options(render);
  std::string task_id;
  std::string task_file;
  std::string mode = "complete_task";
  std::string backend = "svg";
  int pair = 0;
  int cell_px = 0;
  int step = -1;
  std::size_t lane = 0;
  std::size_t render_lanes = 1;
  std::uint64_t render_seed = 0;
  std::string render_out;
  render->add_option("--task", task_id, "task id from the environment's dataset");
  render->add_option("--task-file", task_file, "task JSON file");
  render->add_option("--mode", mode, "single | pair | complete_task | rl_step")
      ->check(CLI::IsMember({"single", "pair", "complete_task", "rl_step"}));
  render->add_option("--backend", backend, "svg | ansi | ascii")->check(CLI::IsMember({"svg", "ansi", "ascii"}));
  render->add_option("--pair", pair, "demo pair for single / pair modes");
  render->add_option("--cell-px", cell_px, "SVG cell size in pixels");
  render->add_option("--step", step, "rollout step to render (rl_step mode)");
  render->add_option("--lane", lane, "rollout lane (rl_step mode)");
  render->add_option("--lanes", render_lanes, "rollout lane count (rl_step mode)");
  render->add_option("--seed", render_seed, "rollout seed (rl_step mode)");
  render->add_option("--out", render_out, "output file (default stdout)");

  // fetch
  auto* fetch = app.add_subcommand("fetch", "download a dataset archive");
  std::string dataset;
  std::string dest = "data";
  std::string table;
  bool allow_unpinned = false;
  fetch->add_option("name", dataset, "dataset name (miniarc, arc-agi-1, arc-agi-2)")->required();
  fetch->add_option("--dest", dest, "destination directory");
  fetch->add_option("--table", table, "dataset table YAML");
  fetch->add_flag("--allow-unpinned", allow_unpinned, "accept archives without a recorded digest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*validate) {
      CString report;
      int n_tasks = 0;
      int n_errors = 0;
      check(arcenv_validate_dir(validate_dir.c_str(), parser.c_str(), &report.p, &n_tasks, &n_errors));
      std::cout << report.str();
      if (n_tasks == 0) return kExitDomain;
      std::cout << n_tasks << " files, " << n_errors << " errors\n";
      return n_errors == 0 ? kExitOk : kExitDomain;
    }

    if (*rollout) {
      EnvHandle env{rollout_env.open()};
      if (!seed_given) {
        arcenv_env_info info{};
        check(arcenv_env_get_info(env.p, &info));
        seed = info.seed;
      }
      CString jsonl;
      arcenv_rollout_summary summary{};
      check(arcenv_rollout_jsonl(env.p, lanes, steps, seed, workers, &jsonl.p, &summary));
      write_output(out_path, jsonl.str());
      std::fprintf(out_path.empty() ? stderr : stdout,
                   "{\"total_steps\":%lld,\"episodes\":%lld,\"successes\":%lld,\"reward_sum\":%.17g}\n",
                   static_cast<long long>(summary.total_steps), static_cast<long long>(summary.episodes),
                   static_cast<long long>(summary.successes), summary.reward_sum);
      return kExitOk;
    }

    if (*bench) {
      EnvHandle env{bench_env.open()};
      if (full) {
        batch_sizes.clear();
        for (int p = 0; p <= 20; ++p) batch_sizes.push_back(std::int64_t{1} << p);
      }
      arcenv_bench_options opts;
      arcenv_bench_options_init(&opts);
      if (!batch_sizes.empty()) {
        opts.batch_sizes = batch_sizes.data();
        opts.n_batch_sizes = batch_sizes.size();
      }
      opts.steps_per_env = bench_steps;
      opts.repeats = repeats;
      opts.warmup_runs = warmup;
      opts.seed = bench_seed;
      opts.workers = bench_workers;
      opts.json = (json && baseline.empty()) ? 1 : 0;
      CString result;
      check(arcenv_bench_run(env.p, &opts, &result.p));
      if (baseline.empty()) {
        write_output(bench_out, result.str());
      } else {
        const std::string base = read_text(baseline);
        CString tbl;
        check(arcenv_bench_table(result.p, base.c_str(), &tbl.p));
        write_output(bench_out, tbl.str());
      }
      return kExitOk;
    }

    if (*render) {
      CString out;
      if (mode == "rl_step") {
        if (step < 0) throw CLI::RequiredError("--step");
        EnvHandle env{render_env.open()};
        check(arcenv_render_rollout_step(env.p, render_lanes, render_seed, lane, step, backend.c_str(), cell_px,
                                         &out.p));
      } else if (!task_file.empty()) {
        check(arcenv_render_task_file(task_file.c_str(), mode.c_str(), backend.c_str(), pair, cell_px, &out.p));
      } else {
        if (task_id.empty()) throw CLI::RequiredError("--task or --task-file");
        EnvHandle env{render_env.open()};
        check(arcenv_render_task(env.p, task_id.c_str(), mode.c_str(), backend.c_str(), pair, cell_px, &out.p));
      }
      write_output(render_out, out.str());
      return kExitOk;
    }

    if (*fetch) {
      CString dir;
      check(arcenv_fetch(dataset.c_str(), dest.c_str(), table.empty() ? nullptr : table.c_str(), allow_unpinned ? 1 : 0,
                         &dir.p));
      std::cout << dir.str() << "\n";
      return kExitOk;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
