#include "arcenv/environment.hpp"

#include "arcenv/errors.hpp"

namespace arcenv {

Environment::Environment(std::shared_ptr<const TaskBuffer> buffer, EnvParams params, WrapperStack wrappers)
    : buffer_(std::move(buffer)), params_(std::move(params)), wrappers_(std::move(wrappers)) {
  if (!buffer_ || buffer_->size() == 0) throw Error(ErrorCode::EmptyBuffer, "environment needs a non-empty task buffer");
  params_.validate();
  if (!(buffer_->capacity == params_.capacity)) throw Error(ErrorCode::InvalidConfig, "env.capacity: differs from the task buffer capacity");
  if (!(wrappers_.actions.capacity() == params_.capacity)) throw Error(ErrorCode::InvalidConfig, "action space capacity differs from env.capacity");
  if (wrappers_.observations.contextual_pairs > buffer_->max_demo_pairs) {
    throw Error(ErrorCode::UnresolvableChannel, "contextual pairs exceed the buffer's demo pair capacity");
  }
  if (wrappers_.observations.contextual_pairs < 0) throw Error(ErrorCode::InvalidConfig, "contextual pairs must be >= 0");
}

void Environment::observe(const EnvState& state, std::span<std::uint8_t> out) const {
  augment_observation(state, wrappers_.observations, *buffer_, params_.mode, params_.capacity, out);
}

Observation Environment::observe(const EnvState& state) const {
  return augment_observation(state, wrappers_.observations, *buffer_, params_.mode, params_.capacity);
}

std::pair<EnvState, Timestep> Environment::reset(PrngKey key) const {
  auto [state, ts] = arcenv::reset(key, params_, *buffer_);
  ts.observation = observe(state);
  return {std::move(state), std::move(ts)};
}

std::pair<EnvState, Timestep> Environment::step(const EnvState& state, const Action& action) const {
  EnvState next = state;
  const Transition t = step_in_place(LaneRef::of(next), action, params_);
  Timestep ts{{}, t.reward, t.kind, t.discount, t.info};
  if (wrappers_.auto_reset && ts.last()) {
    next = arcenv::reset(auto_reset_key(next), params_, *buffer_).first;
  }
  ts.observation = observe(next);
  return {std::move(next), std::move(ts)};
}

std::pair<EnvState, Timestep> Environment::step(const EnvState& state, std::span<const std::int64_t> action) const {
  return step(state, wrappers_.actions.decode(action));
}

}  // namespace arcenv
