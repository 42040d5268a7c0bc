#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arcenv/batch.hpp"
#include "arcenv/environment.hpp"

namespace arcenv {

/// Lane keys for a seeded batch: the children of PrngKey::from_seed(seed).
std::vector<PrngKey> lane_keys(std::uint64_t seed, std::size_t lanes);

struct StepRecord {
  int lane = 0;
  int step = 0;
  int op = 0;
  /// [row, col] for point actions; [r0, c0, r1, c1] for box and mask actions.
  /// Empty for a mask with no bits set.
  std::vector<int> selection;
  double reward = 0.0;
  double similarity = 0.0;
  StepKind kind = StepKind::Mid;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

const char* to_string(StepKind k);

/// Describes one agent-facing action tuple as a record (reward, similarity and
/// kind left at defaults).
StepRecord describe_action(const ActionSpace& space, std::span<const std::int64_t> action);

/// One JSON object per line:
///   {"lane":0,"step":0,"op":3,"selection":[0,0,1,1],"reward":-0.02,"similarity":0.4,"step_kind":"mid"}
std::string to_jsonl(const StepRecord& r);

struct RolloutOptions {
  std::size_t lanes = 1;
  int steps = 100;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct RolloutResult {
  std::vector<StepRecord> records;  // step-major, lanes in order within a step
  RolloutSummary summary;
};

/// Seeded random-policy rollout. Auto-reset follows the environment's wrapper
/// stack. The records depend only on the seed, never on the worker count.
RolloutResult run_random_rollout(const Environment& env, const RolloutOptions& options);

std::string to_jsonl(const std::vector<StepRecord>& records);

struct StepSnapshot {
  EnvState before;
  Action action;
  EnvState after;
  double reward = 0.0;
};

/// Replays a seeded random-policy rollout up to (lane, step) and returns the
/// states around that step. `after` is the state the step produced, before
/// any auto-reset. Throws Error(InvalidArgument) when out of range.
StepSnapshot replay_step(const Environment& env, const RolloutOptions& options, std::size_t lane, int step);

}  // namespace arcenv
