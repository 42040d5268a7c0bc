#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>

#include "arcenv/env.hpp"
#include "arcenv/wrappers.hpp"

namespace arcenv {

struct WrapperStack {
  ActionSpace actions;
  ObsSpec observations;
  bool auto_reset = false;
};

/// The core environment with its wrapper stack applied: agent-facing actions
/// are decoded to (op, mask), observations carry the configured channels, and
/// finished episodes are optionally respliced. Holds configuration only; all
/// episode state lives in EnvState values.
class Environment {
 public:
  Environment(std::shared_ptr<const TaskBuffer> buffer, EnvParams params, WrapperStack wrappers);

  const EnvParams& params() const { return params_; }
  const TaskBuffer& buffer() const { return *buffer_; }
  std::shared_ptr<const TaskBuffer> shared_buffer() const { return buffer_; }
  const ActionSpace& action_space() const { return wrappers_.actions; }
  const ObsSpec& obs_spec() const { return wrappers_.observations; }
  bool auto_reset_enabled() const { return wrappers_.auto_reset; }

  int channels() const { return wrappers_.observations.channel_count(); }
  std::size_t observation_size() const {
    return static_cast<std::size_t>(channels()) * static_cast<std::size_t>(params_.capacity.cells());
  }

  std::pair<EnvState, Timestep> reset(PrngKey key) const;
  std::pair<EnvState, Timestep> step(const EnvState& state, std::span<const std::int64_t> action) const;
  std::pair<EnvState, Timestep> step(const EnvState& state, const Action& action) const;

  void observe(const EnvState& state, std::span<std::uint8_t> out) const;
  Observation observe(const EnvState& state) const;

  /// Key used to restart a finished lane. Distinct from the per-step policy
  /// and carry keys a rollout derives from the same state.
  static PrngKey auto_reset_key(const EnvState& state) { return split_child(state.rng, 2); }

 private:
  std::shared_ptr<const TaskBuffer> buffer_;
  EnvParams params_;
  WrapperStack wrappers_;
};

}  // namespace arcenv
