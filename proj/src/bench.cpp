#include "arcenv/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <new>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "arcenv/batch.hpp"
#include "arcenv/errors.hpp"
#include "arcenv/trajectory.hpp"

namespace arcenv {

std::vector<std::int64_t> BenchConfig::default_batch_sizes() {
  std::vector<std::int64_t> out;
  for (int p = 0; p <= 14; ++p) out.push_back(std::int64_t{1} << p);
  return out;
}

std::vector<std::int64_t> BenchConfig::full_batch_sizes() {
  std::vector<std::int64_t> out;
  for (int p = 0; p <= 20; ++p) out.push_back(std::int64_t{1} << p);
  return out;
}

void BenchConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (batch_sizes.empty()) fail("bench.batch_sizes: must not be empty");
  if (!std::is_sorted(batch_sizes.begin(), batch_sizes.end())) fail("bench.batch_sizes: must be sorted ascending");
  if (batch_sizes.front() < 1) fail("bench.batch_sizes: must be >= 1");
  if (steps_per_env < 0) fail("bench.steps_per_env: must be >= 0");
  if (repeats < 3) fail("bench.repeats: must be >= 3");
  if (warmup_runs < 0) fail("bench.warmup_runs: must be >= 0");
}

BenchClock steady_clock_seconds() {
  return [] {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  };
}

std::uint64_t estimate_batch_bytes(const Environment& env, std::int64_t lanes) {
  const std::uint64_t per_lane = BatchState::lane_bytes() + env.observation_size() + 4 * sizeof(double) + 3 +
                                 static_cast<std::uint64_t>(env.action_space().arity()) * sizeof(std::int64_t) +
                                 sizeof(LaneStats) + sizeof(PrngKey) + sizeof(std::int64_t);
  return per_lane * static_cast<std::uint64_t>(lanes);
}

namespace {

std::uint64_t physical_memory() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page <= 0) return 0;
  return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
}

}  // namespace

std::vector<BenchRecord> run_sweep(const BenchConfig& config, const Environment& env, const BenchHooks& hooks) {
  config.validate();
  const unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t limit = config.memory_limit_bytes;
  if (limit == 0) limit = physical_memory() / 10 * 8;
  const Policy policy = hooks.policy ? *hooks.policy : random_policy(env.action_space());
  const BenchClock& clock = hooks.clock;
  const BatchEngine engine(env, workers);
  const std::string mode = fmt::format("batched-w{}", workers);

  std::vector<BenchRecord> records;
  for (const std::int64_t batch : config.batch_sizes) {
    BenchRecord rec;
    rec.batch_size = batch;
    rec.steps_total = batch * config.steps_per_env;
    rec.mode = mode;

    const std::uint64_t need = estimate_batch_bytes(env, batch);
    if (limit != 0 && need > limit) {
      rec.skipped_reason = fmt::format("estimated {} MiB exceeds memory limit {} MiB", need >> 20, limit >> 20);
      records.push_back(std::move(rec));
      continue;
    }

    try {
      const auto keys = lane_keys(config.seed, static_cast<std::size_t>(batch));
      BatchState state;
      BatchTimesteps ts;
      auto run = [&]() {
        engine.reset(keys, state, ts);
        const double t0 = clock();
        const RolloutSummary s = engine.rollout(state, ts, policy, config.steps_per_env, true);
        const double t1 = clock();
        if (s.total_steps != rec.steps_total) throw Error(ErrorCode::InvalidArgument, "step accounting mismatch");
        return t1 - t0;
      };
      for (int w = 0; w < config.warmup_runs; ++w) rec.warmup_seconds += run();
      std::vector<double> times;
      for (int r = 0; r < config.repeats; ++r) times.push_back(run());
      rec.best_seconds = *std::min_element(times.begin(), times.end());
      double sum = 0.0;
      for (double t : times) sum += t;
      rec.mean_seconds = sum / static_cast<double>(times.size());
      double var = 0.0;
      for (double t : times) var += (t - rec.mean_seconds) * (t - rec.mean_seconds);
      rec.stddev_seconds = std::sqrt(var / static_cast<double>(times.size()));
      rec.throughput_sps = rec.best_seconds > 0 ? static_cast<double>(rec.steps_total) / rec.best_seconds : 0.0;
    } catch (const std::bad_alloc&) {
      rec.skipped_reason = "out of memory";
      rec.best_seconds = rec.mean_seconds = rec.stddev_seconds = rec.throughput_sps = rec.warmup_seconds = 0.0;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

std::string with_commas(double v) {
  const auto n = static_cast<long long>(std::llround(v));
  std::string digits = std::to_string(n < 0 ? -n : n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return n < 0 ? "-" + out : out;
}

}  // namespace

std::string emit_csv(const std::vector<BenchRecord>& records) {
  std::string out = "batch_size,steps_total,best_seconds,mean_seconds,throughput_sps,warmup_seconds,skipped_reason\n";
  for (const auto& r : records) {
    if (r.skipped_reason) {
      out += fmt::format("{},{},,,,,{}\n", r.batch_size, r.steps_total, csv_quote(*r.skipped_reason));
    } else {
      out += fmt::format("{},{},{:.6f},{:.6f},{:.1f},{:.6f},\n", r.batch_size, r.steps_total, r.best_seconds,
                         r.mean_seconds, r.throughput_sps, r.warmup_seconds);
    }
  }
  return out;
}

std::vector<BenchRecord> parse_csv(std::string_view csv, const std::string& mode) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"batch_size", "throughput_sps"}) {
    if (!col.contains(required)) throw Error(ErrorCode::InvalidArgument, std::string("CSV missing column ") + required);
  }
  auto number = [](const std::string& s) { return s.empty() ? 0.0 : std::stod(s); };
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    auto get = [&](const char* name) -> std::string {
      auto it = col.find(name);
      return it != col.end() && it->second < f.size() ? f[it->second] : std::string{};
    };
    BenchRecord r;
    r.mode = col.contains("mode") ? get("mode") : mode;
    try {
      r.batch_size = std::stoll(get("batch_size"));
      r.steps_total = get("steps_total").empty() ? 0 : std::stoll(get("steps_total"));
      r.best_seconds = number(get("best_seconds"));
      r.mean_seconds = number(get("mean_seconds"));
      r.throughput_sps = number(get("throughput_sps"));
      r.warmup_seconds = number(get("warmup_seconds"));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "malformed CSV row: " + line);
    }
    if (const std::string reason = get("skipped_reason"); !reason.empty()) r.skipped_reason = reason;
    out.push_back(std::move(r));
  }
  return out;
}

std::string emit_json(const std::vector<BenchRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j{{"batch_size", r.batch_size}, {"steps_total", r.steps_total}};
    if (r.skipped_reason) {
      for (const char* k : {"best_seconds", "mean_seconds", "throughput_sps", "warmup_seconds"}) j[k] = nullptr;
      j["skipped_reason"] = *r.skipped_reason;
    } else {
      j["best_seconds"] = r.best_seconds;
      j["mean_seconds"] = r.mean_seconds;
      j["throughput_sps"] = r.throughput_sps;
      j["warmup_seconds"] = r.warmup_seconds;
      j["skipped_reason"] = nullptr;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::optional<double> speedup(const BenchRecord& ours, const BenchRecord& baseline) {
  if (ours.skipped_reason || baseline.skipped_reason || baseline.throughput_sps <= 0) return std::nullopt;
  return ours.throughput_sps / baseline.throughput_sps;
}

std::string emit_speedup_table(const std::vector<BenchRecord>& ours, const std::vector<BenchRecord>& baseline) {
  std::vector<std::array<std::string, 6>> rows;
  rows.push_back({"Batch Size", "Ours SPS", "Mode", "Baseline SPS", "Mode", "Speedup"});
  for (const auto& o : ours) {
    std::array<std::string, 6> row{with_commas(static_cast<double>(o.batch_size)),
                                   o.skipped_reason ? "" : with_commas(o.throughput_sps), o.mode, "", "", ""};
    auto it = std::find_if(baseline.begin(), baseline.end(), [&](const BenchRecord& b) { return b.batch_size == o.batch_size; });
    if (it != baseline.end()) {
      if (!it->skipped_reason) row[3] = with_commas(it->throughput_sps);
      row[4] = it->mode;
      if (auto s = speedup(o, *it)) row[5] = fmt::format("{:.1f}×", *s);
    }
    rows.push_back(std::move(row));
  }
  // Display width: count code points, not bytes.
  auto width = [](const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
  };
  std::array<std::size_t, 6> w{};
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < 6; ++i) w[i] = std::max(w[i], width(row[i]));
  }
  std::string out;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    std::string line;
    for (std::size_t i = 0; i < 6; ++i) {
      const std::string& cell = rows[ri][i];
      const std::string pad(w[i] - width(cell), ' ');
      const bool left = i == 2 || i == 4;
      line += left ? cell + pad : pad + cell;
      if (i + 1 < 6) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (ri == 0) {
      std::size_t total = 0;
      for (auto x : w) total += x;
      out += std::string(total + 10, '-') + "\n";
    }
  }
  return out;
}

}  // namespace arcenv
