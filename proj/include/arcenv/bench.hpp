#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arcenv/batch.hpp"
#include "arcenv/environment.hpp"

namespace arcenv {

struct BenchConfig {
  std::vector<std::int64_t> batch_sizes = default_batch_sizes();
  int steps_per_env = 100;
  int repeats = 5;
  int warmup_runs = 1;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0: hardware concurrency
  /// Batches whose estimated footprint exceeds this are skipped. 0: 80% of
  /// physical memory.
  std::uint64_t memory_limit_bytes = 0;

  /// 2^0 .. 2^14.
  static std::vector<std::int64_t> default_batch_sizes();
  /// 2^0 .. 2^20.
  static std::vector<std::int64_t> full_batch_sizes();

  void validate() const;

  friend bool operator==(const BenchConfig&, const BenchConfig&) = default;
};

struct BenchRecord {
  std::int64_t batch_size = 0;
  std::int64_t steps_total = 0;
  double best_seconds = 0.0;
  double mean_seconds = 0.0;
  double stddev_seconds = 0.0;
  double throughput_sps = 0.0;  // steps_total / best_seconds
  double warmup_seconds = 0.0;
  std::string mode;
  std::optional<std::string> skipped_reason;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

/// Monotonic clock in seconds. Injectable so tests can check what is timed.
using BenchClock = std::function<double()>;
BenchClock steady_clock_seconds();

struct BenchHooks {
  BenchClock clock = steady_clock_seconds();
  /// Policy used for every rollout; defaults to uniform random over the env's
  /// action space.
  std::optional<Policy> policy;
};

/// For each batch size: reset lanes, one or more untimed warm-up rollouts,
/// then `repeats` timed rollouts from fresh resets. Only rollouts are timed.
std::vector<BenchRecord> run_sweep(const BenchConfig& config, const Environment& env, const BenchHooks& hooks = {});

/// Estimated bytes needed to run `lanes` lanes.
std::uint64_t estimate_batch_bytes(const Environment& env, std::int64_t lanes);

std::string emit_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_csv(std::string_view csv, const std::string& mode = "baseline");
std::string emit_json(const std::vector<BenchRecord>& records);

/// Plain-text table joined on batch size:
///   Batch Size | Ours SPS | Mode | Baseline SPS | Mode | Speedup
/// Rows with no baseline leave the baseline and speedup columns empty.
std::string emit_speedup_table(const std::vector<BenchRecord>& ours, const std::vector<BenchRecord>& baseline);

/// Speedup ours/baseline, if both are present and the baseline is non-zero.
std::optional<double> speedup(const BenchRecord& ours, const BenchRecord& baseline);

}  // namespace arcenv
