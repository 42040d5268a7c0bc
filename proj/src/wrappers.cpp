#include "arcenv/wrappers.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "arcenv/errors.hpp"

namespace arcenv {

namespace {

void check_coord(int r, int c) {
  if (r < 0 || c < 0 || r >= kMaxDim || c >= kMaxDim) {
    throw Error(ErrorCode::ShapeMismatch, "cell (" + std::to_string(r) + "," + std::to_string(c) + ") outside capacity");
  }
}

std::uint64_t uniform_below(PrngKey key, std::uint64_t n) {
  const unsigned __int128 product = static_cast<unsigned __int128>(random_bits(key)) * n;
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace

Action point_to_mask(const PointAction& a) {
  check_coord(a.row, a.col);
  return {a.op, SelectionMask::single(a.row, a.col)};
}

Action bbox_to_mask(const BBoxAction& a) {
  check_coord(a.r1, a.c1);
  check_coord(a.r2, a.c2);
  const BoundingBox box{std::min(a.r1, a.r2), std::min(a.c1, a.c2), std::max(a.r1, a.r2), std::max(a.c1, a.c2)};
  return {a.op, SelectionMask::rectangle(box)};
}

MixedRadix::MixedRadix(std::vector<std::int64_t> dims) : dims_(std::move(dims)) {
  for (auto d : dims_) {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "mixed-radix dimension must be >= 1");
    if (size_ > std::numeric_limits<std::int64_t>::max() / d) {
      size_ = -1;  // not representable; encode/decode unavailable
      return;
    }
    size_ *= d;
  }
}

std::int64_t MixedRadix::encode(std::span<const std::int64_t> tuple) const {
  if (size_ < 0) throw Error(ErrorCode::InvalidArgument, "space too large to flatten");
  if (tuple.size() != dims_.size()) throw Error(ErrorCode::ShapeMismatch, "tuple arity mismatch");
  std::int64_t flat = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (tuple[i] < 0 || tuple[i] >= dims_[i]) throw Error(ErrorCode::ShapeMismatch, "component " + std::to_string(i) + " out of range");
    flat = flat * dims_[i] + tuple[i];
  }
  return flat;
}

void MixedRadix::decode(std::int64_t flat, std::span<std::int64_t> tuple) const {
  if (size_ < 0) throw Error(ErrorCode::InvalidArgument, "space too large to flatten");
  if (flat < 0 || flat >= size_) throw Error(ErrorCode::ShapeMismatch, "flat index " + std::to_string(flat) + " out of range");
  if (tuple.size() != dims_.size()) throw Error(ErrorCode::ShapeMismatch, "tuple arity mismatch");
  for (std::size_t i = dims_.size(); i-- > 0;) {
    tuple[i] = flat % dims_[i];
    flat /= dims_[i];
  }
}

std::vector<std::int64_t> MixedRadix::decode(std::int64_t flat) const {
  std::vector<std::int64_t> t(dims_.size());
  decode(flat, t);
  return t;
}

OpSubset::OpSubset() {
  for (int i = 0; i < kNumOps; ++i) ops_.push_back(i);
}

OpSubset::OpSubset(std::vector<int> allowed) : ops_(std::move(allowed)) {
  if (ops_.empty()) throw Error(ErrorCode::InvalidConfig, "operation subset must not be empty");
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (ops_[i] < 0 || ops_[i] >= kNumOps) throw Error(ErrorCode::InvalidOp, "operation id " + std::to_string(ops_[i]) + " outside 0..34");
    if (std::find(ops_.begin(), ops_.begin() + static_cast<std::ptrdiff_t>(i), ops_[i]) != ops_.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw Error(ErrorCode::InvalidConfig, "operation " + std::to_string(ops_[i]) + " listed twice");
    }
  }
  if (index_of(OpId(OpId::kSubmit)) < 0) throw Error(ErrorCode::InvalidConfig, "operation subset must contain submit (34)");
}

int OpSubset::index_of(OpId op) const {
  auto it = std::find(ops_.begin(), ops_.end(), op.value());
  return it == ops_.end() ? -1 : static_cast<int>(it - ops_.begin());
}

const char* to_string(ActionParam p) {
  switch (p) {
    case ActionParam::Mask: return "mask";
    case ActionParam::Point: return "point";
    case ActionParam::BBox: return "bbox";
  }
  return "?";
}

namespace {

std::vector<std::int64_t> component_dims_for(ActionParam param, int nops, Capacity cap) {
  switch (param) {
    case ActionParam::Mask: {
      std::vector<std::int64_t> d(static_cast<std::size_t>(cap.cells()), 2);
      d.push_back(nops);
      return d;
    }
    case ActionParam::Point: return {cap.rows, cap.cols, nops};
    case ActionParam::BBox: return {cap.rows, cap.cols, cap.rows, cap.cols, nops};
  }
  return {};
}

}  // namespace

ActionSpace::ActionSpace(ActionParam param, OpSubset ops, Capacity capacity, bool flatten)
    : param_(param),
      ops_(std::move(ops)),
      capacity_(capacity),
      flatten_(flatten),
      dims_(component_dims_for(param, ops_.size(), capacity)),
      radix_(flatten ? dims_ : std::vector<std::int64_t>{1}) {
  if (!capacity.valid()) throw Error(ErrorCode::InvalidConfig, "action space capacity outside storage bound");
  if (flatten && radix_.size() < 0) throw Error(ErrorCode::InvalidConfig, std::string(to_string(param)) + " action space is too large to flatten");
}

std::vector<std::int64_t> ActionSpace::dims() const {
  if (flatten_) return {radix_.size()};
  return dims_;
}

void ActionSpace::decode_into(std::span<const std::int64_t> action, Action& out) const {
  std::int64_t buf[6];
  std::span<const std::int64_t> t = action;
  if (flatten_) {
    if (action.size() != 1) throw Error(ErrorCode::ShapeMismatch, "flattened action expects 1 value, got " + std::to_string(action.size()));
    radix_.decode(action[0], std::span<std::int64_t>(buf, dims_.size()));
    t = std::span<const std::int64_t>(buf, dims_.size());
  } else if (action.size() != dims_.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::string(to_string(param_)) + " action expects " + std::to_string(dims_.size()) +
                                              " values, got " + std::to_string(action.size()));
  } else {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < 0 || t[i] >= dims_[i]) throw Error(ErrorCode::ShapeMismatch, "action component " + std::to_string(i) + " out of range");
    }
  }
  out.op = ops_.op_at(static_cast<int>(t.back()));
  switch (param_) {
    case ActionParam::Mask:
      out.selection.clear();
      for (int r = 0; r < capacity_.rows; ++r) {
        for (int c = 0; c < capacity_.cols; ++c) {
          if (t[static_cast<std::size_t>(r) * capacity_.cols + c]) out.selection.set(r, c);
        }
      }
      break;
    case ActionParam::Point:
      out.selection.clear();
      out.selection.set(static_cast<int>(t[0]), static_cast<int>(t[1]));
      break;
    case ActionParam::BBox: {
      const auto r1 = static_cast<int>(t[0]), c1 = static_cast<int>(t[1]);
      const auto r2 = static_cast<int>(t[2]), c2 = static_cast<int>(t[3]);
      out.selection.clear();
      for (int r = std::min(r1, r2); r <= std::max(r1, r2); ++r) {
        for (int c = std::min(c1, c2); c <= std::max(c1, c2); ++c) out.selection.set(r, c);
      }
      break;
    }
  }
}

Action ActionSpace::decode(std::span<const std::int64_t> action) const {
  Action a;
  decode_into(action, a);
  return a;
}

void ActionSpace::sample(PrngKey key, std::span<std::int64_t> out) const {
  if (static_cast<int>(out.size()) != arity()) throw Error(ErrorCode::ShapeMismatch, "sample buffer arity mismatch");
  if (flatten_) {
    out[0] = static_cast<std::int64_t>(uniform_below(key, static_cast<std::uint64_t>(radix_.size())));
    return;
  }
  if (param_ == ActionParam::Mask) {
    const std::size_t cells = dims_.size() - 1;
    for (std::size_t base = 0; base < cells; base += 64) {
      const std::uint64_t bits = random_bits(split_child(key, 1 + base / 64));
      for (std::size_t i = base; i < std::min(cells, base + 64); ++i) out[i] = static_cast<std::int64_t>((bits >> (i - base)) & 1U);
    }
    out[cells] = static_cast<std::int64_t>(uniform_below(split_child(key, 0), static_cast<std::uint64_t>(dims_.back())));
    return;
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    out[i] = static_cast<std::int64_t>(uniform_below(split_child(key, i), static_cast<std::uint64_t>(dims_[i])));
  }
}

std::vector<Channel> ObsSpec::channels() const {
  std::vector<Channel> out{{ChannelSource::Working, 0}};
  if (answer) out.push_back({ChannelSource::Answer, 0});
  if (input) out.push_back({ChannelSource::Input, 0});
  if (clipboard) out.push_back({ChannelSource::Clipboard, 0});
  for (int k = 0; k < contextual_pairs; ++k) {
    out.push_back({ChannelSource::DemoInput, k});
    out.push_back({ChannelSource::DemoOutput, k});
  }
  return out;
}

int ObsSpec::channel_count() const { return 1 + answer + input + clipboard + 2 * contextual_pairs; }

void augment_observation(const ObsSource& state, const ObsSpec& spec, const TaskBuffer& buffer, Mode mode,
                         Capacity capacity, std::span<std::uint8_t> out) {
  const auto plane_size = static_cast<std::size_t>(capacity.cells());
  if (out.size() != plane_size * static_cast<std::size_t>(spec.channel_count())) {
    throw Error(ErrorCode::ShapeMismatch, "observation buffer size mismatch");
  }
  static const PaddedGrid kBlank;
  const int t = state.task_index;
  std::size_t offset = 0;
  for (const Channel& ch : spec.channels()) {
    const PaddedGrid* grid = &kBlank;
    switch (ch.source) {
      case ChannelSource::Working: grid = &state.working; break;
      case ChannelSource::Answer: grid = &state.target; break;
      case ChannelSource::Input: grid = &state.input; break;
      case ChannelSource::Clipboard:
        if (state.clipboard.present) grid = &state.clipboard.grid;
        break;
      case ChannelSource::DemoInput:
      case ChannelSource::DemoOutput: {
        if (t < 0 || t >= buffer.size()) throw Error(ErrorCode::UnresolvableChannel, "task index not in buffer");
        if (ch.pair >= buffer.max_demo_pairs) {
          throw Error(ErrorCode::UnresolvableChannel, "demo slot " + std::to_string(ch.pair) + " beyond buffer pair capacity");
        }
        const bool excluded = mode == Mode::Train && ch.pair == state.pair_index;
        if (ch.pair < buffer.demo_count[t] && !excluded) {
          grid = ch.source == ChannelSource::DemoInput ? &buffer.demo_input(t, ch.pair) : &buffer.demo_output(t, ch.pair);
        }
        break;
      }
    }
    write_plane(*grid, capacity, out.subspan(offset, plane_size));
    offset += plane_size;
  }
}

void augment_observation(const EnvState& state, const ObsSpec& spec, const TaskBuffer& buffer, Mode mode,
                         Capacity capacity, std::span<std::uint8_t> out) {
  augment_observation(ObsSource::of(state), spec, buffer, mode, capacity, out);
}

Observation augment_observation(const EnvState& state, const ObsSpec& spec, const TaskBuffer& buffer, Mode mode,
                                Capacity capacity) {
  Observation obs{spec.channel_count(), capacity.rows, capacity.cols,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(spec.channel_count()) * capacity.cells())};
  augment_observation(state, spec, buffer, mode, capacity, obs.data);
  return obs;
}

std::pair<EnvState, Timestep> auto_reset(EnvState state, Timestep timestep, PrngKey key, const EnvParams& params,
                                         const TaskBuffer& buffer) {
  if (!timestep.last()) return {std::move(state), std::move(timestep)};
  auto [fresh, first] = reset(key, params, buffer);
  timestep.observation = std::move(first.observation);
  return {std::move(fresh), std::move(timestep)};
}

}  // namespace arcenv
