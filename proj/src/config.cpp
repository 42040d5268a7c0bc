#include "arcenv/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "arcenv/errors.hpp"

namespace arcenv {

namespace fs = std::filesystem;

const char* to_string(WrapperKind k) {
  switch (k) {
    case WrapperKind::MaskActions: return "mask_actions";
    case WrapperKind::PointActions: return "point_actions";
    case WrapperKind::BBoxActions: return "bbox_actions";
    case WrapperKind::OpSubset: return "op_subset";
    case WrapperKind::Flatten: return "flatten";
    case WrapperKind::Answer: return "answer";
    case WrapperKind::Input: return "input";
    case WrapperKind::Clipboard: return "clipboard";
    case WrapperKind::Contextual: return "contextual";
    case WrapperKind::AutoReset: return "auto_reset";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::InvalidConfig, path + ": " + message);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return fmt::format("{}[{}]", path, i); }

bool is_action_kind(WrapperKind k) {
  return k == WrapperKind::MaskActions || k == WrapperKind::PointActions || k == WrapperKind::BBoxActions;
}

// ---- reading ----

void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) fail(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(join(path, key), "unknown key");
    }
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path, const char* what) {
  if (!node.IsScalar()) fail(path, std::string("expected ") + what);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(path, std::string("expected ") + what + ", got '" + node.Scalar() + "'");
  }
}

int read_int(const YAML::Node& n, const std::string& p) { return scalar<int>(n, p, "an integer"); }
double read_double(const YAML::Node& n, const std::string& p) { return scalar<double>(n, p, "a number"); }
bool read_bool(const YAML::Node& n, const std::string& p) { return scalar<bool>(n, p, "true or false"); }
std::string read_string(const YAML::Node& n, const std::string& p) { return scalar<std::string>(n, p, "a string"); }
std::uint64_t read_u64(const YAML::Node& n, const std::string& p) {
  return scalar<std::uint64_t>(n, p, "a non-negative integer");
}

template <typename F>
void each(const YAML::Node& node, const std::string& path, F&& fn) {
  if (!node.IsSequence()) fail(path, "expected a list");
  for (std::size_t i = 0; i < node.size(); ++i) fn(node[i], index_path(path, i));
}

Capacity read_capacity(const YAML::Node& n, const std::string& path) {
  if (n.IsScalar()) {
    const auto name = n.Scalar();
    if (name == "arc") return Capacity::arc();
    if (name == "miniarc") return Capacity::miniarc();
    fail(path, "expected arc, miniarc or {rows, cols}");
  }
  check_keys(n, path, {"rows", "cols"});
  Capacity c;
  if (n["rows"]) c.rows = read_int(n["rows"], join(path, "rows"));
  if (n["cols"]) c.cols = read_int(n["cols"], join(path, "cols"));
  if (!c.valid()) fail(path, fmt::format("rows and cols must be within 1..{}", kMaxDim));
  return c;
}

Rgb read_rgb(const YAML::Node& n, const std::string& path) {
  const auto s = read_string(n, path);
  if (s.size() != 7 || s[0] != '#' ||
      !std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; })) {
    fail(path, "expected a color like #1e93ff");
  }
  const auto v = std::stoul(s.substr(1), nullptr, 16);
  return Rgb{static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

void read_dataset(const YAML::Node& n, const std::string& path, const fs::path& base_dir, RunConfig& c) {
  check_keys(n, path,
             {"name", "root", "split", "subset", "task_ids", "parser", "lazy", "max_demo_pairs", "max_test_pairs"});
  DatasetSpec& d = c.dataset;
  if (n["name"]) d.name = read_string(n["name"], join(path, "name"));
  if (n["root"]) {
    fs::path root = read_string(n["root"], join(path, "root"));
    if (root.is_relative() && !base_dir.empty()) root = base_dir / root;
    d.root = root.lexically_normal();
  }
  if (n["split"]) {
    const auto s = read_string(n["split"], join(path, "split"));
    if (s == "train" || s == "training") {
      d.split = Split::Train;
    } else if (s == "evaluation" || s == "eval") {
      d.split = Split::Evaluation;
    } else {
      fail(join(path, "split"), "expected train or evaluation");
    }
  }
  if (n["subset"]) {
    if (n["subset"].IsNull()) {
      d.subset.reset();
    } else {
      d.subset = read_string(n["subset"], join(path, "subset"));
    }
  }
  if (n["task_ids"]) {
    d.task_ids.clear();
    each(n["task_ids"], join(path, "task_ids"), [&](const YAML::Node& x, const std::string& p) {
      d.task_ids.push_back(read_string(x, p));
    });
  }
  if (n["parser"]) d.parser = read_string(n["parser"], join(path, "parser"));
  if (n["lazy"]) d.lazy = read_bool(n["lazy"], join(path, "lazy"));
  if (n["max_demo_pairs"]) c.layout.max_demo_pairs = read_int(n["max_demo_pairs"], join(path, "max_demo_pairs"));
  if (n["max_test_pairs"]) c.layout.max_test_pairs = read_int(n["max_test_pairs"], join(path, "max_test_pairs"));
}

void read_env(const YAML::Node& n, const std::string& path, EnvParams& e) {
  check_keys(n, path, {"mode", "max_episode_steps", "capacity", "allowed_ops", "reward"});
  if (n["mode"]) {
    const auto m = read_string(n["mode"], join(path, "mode"));
    if (m == "train") {
      e.mode = Mode::Train;
    } else if (m == "eval") {
      e.mode = Mode::Eval;
    } else {
      fail(join(path, "mode"), "expected train or eval");
    }
  }
  if (n["max_episode_steps"]) e.max_episode_steps = read_int(n["max_episode_steps"], join(path, "max_episode_steps"));
  if (n["capacity"]) e.capacity = read_capacity(n["capacity"], join(path, "capacity"));
  if (const auto ops = n["allowed_ops"]) {
    const auto p = join(path, "allowed_ops");
    if (ops.IsScalar() && ops.Scalar() == "all") {
      e.allowed_ops = OpSet();
    } else {
      std::vector<int> ids;
      each(ops, p, [&](const YAML::Node& x, const std::string& xp) {
        const int id = read_int(x, xp);
        if (id < 0 || id >= kNumOps) fail(xp, "operation id outside 0..34");
        ids.push_back(id);
      });
      e.allowed_ops = OpSet(ids);
    }
  }
  if (const auto r = n["reward"]) {
    const auto p = join(path, "reward");
    check_keys(r, p, {"similarity_weight", "success_bonus", "step_penalty", "unsolved_submission_penalty"});
    RewardConfig& rc = e.reward;
    if (r["similarity_weight"]) rc.similarity_weight = read_double(r["similarity_weight"], join(p, "similarity_weight"));
    if (r["success_bonus"]) rc.success_bonus = read_double(r["success_bonus"], join(p, "success_bonus"));
    if (r["step_penalty"]) rc.step_penalty = read_double(r["step_penalty"], join(p, "step_penalty"));
    if (r["unsolved_submission_penalty"]) {
      rc.unsolved_submission_penalty =
          read_double(r["unsolved_submission_penalty"], join(p, "unsolved_submission_penalty"));
    }
  }
}

WrapperKind wrapper_kind(const std::string& name, const std::string& path) {
  for (int k = 0; k <= static_cast<int>(WrapperKind::AutoReset); ++k) {
    if (name == to_string(static_cast<WrapperKind>(k))) return static_cast<WrapperKind>(k);
  }
  fail(path, "unknown wrapper type '" + name + "'");
}

std::vector<WrapperConfig> read_wrappers(const YAML::Node& n, const std::string& path) {
  std::vector<WrapperConfig> out;
  each(n, path, [&](const YAML::Node& w, const std::string& wp) {
    WrapperConfig wc;
    if (w.IsScalar()) {
      wc.kind = wrapper_kind(w.Scalar(), wp);
    } else {
      check_keys(w, wp, {"type", "ops", "pairs"});
      if (!w["type"]) fail(join(wp, "type"), "required");
      wc.kind = wrapper_kind(read_string(w["type"], join(wp, "type")), join(wp, "type"));
      if (w["ops"]) {
        if (wc.kind != WrapperKind::OpSubset) fail(join(wp, "ops"), "only valid for op_subset");
        each(w["ops"], join(wp, "ops"), [&](const YAML::Node& x, const std::string& xp) {
          wc.ops.push_back(read_int(x, xp));
        });
      }
      if (w["pairs"]) {
        if (wc.kind != WrapperKind::Contextual) fail(join(wp, "pairs"), "only valid for contextual");
        wc.pairs = read_int(w["pairs"], join(wp, "pairs"));
      }
    }
    out.push_back(std::move(wc));
  });
  return out;
}

void read_bench(const YAML::Node& n, const std::string& path, BenchConfig& b) {
  check_keys(n, path,
             {"batch_sizes", "steps_per_env", "repeats", "warmup_runs", "seed", "workers", "memory_limit_bytes"});
  if (const auto s = n["batch_sizes"]) {
    const auto p = join(path, "batch_sizes");
    if (s.IsScalar() && s.Scalar() == "default") {
      b.batch_sizes = BenchConfig::default_batch_sizes();
    } else if (s.IsScalar() && s.Scalar() == "full") {
      b.batch_sizes = BenchConfig::full_batch_sizes();
    } else {
      b.batch_sizes.clear();
      each(s, p, [&](const YAML::Node& x, const std::string& xp) {
        b.batch_sizes.push_back(scalar<std::int64_t>(x, xp, "an integer"));
      });
    }
  }
  if (n["steps_per_env"]) b.steps_per_env = read_int(n["steps_per_env"], join(path, "steps_per_env"));
  if (n["repeats"]) b.repeats = read_int(n["repeats"], join(path, "repeats"));
  if (n["warmup_runs"]) b.warmup_runs = read_int(n["warmup_runs"], join(path, "warmup_runs"));
  if (n["seed"]) b.seed = read_u64(n["seed"], join(path, "seed"));
  if (n["workers"]) b.workers = scalar<unsigned>(n["workers"], join(path, "workers"), "a non-negative integer");
  if (n["memory_limit_bytes"]) b.memory_limit_bytes = read_u64(n["memory_limit_bytes"], join(path, "memory_limit_bytes"));
}

void read_render(const YAML::Node& n, const std::string& path, RenderConfig& r) {
  check_keys(n, path, {"cell_px", "palette"});
  if (n["cell_px"]) r.cell_px = read_int(n["cell_px"], join(path, "cell_px"));
  if (const auto p = n["palette"]) {
    const auto pp = join(path, "palette");
    if (!p.IsSequence() || p.size() != kNumColors) fail(pp, "expected a list of 10 colors");
    each(p, pp, [&](const YAML::Node& x, const std::string& xp) {
      r.palette.colors[std::stoul(xp.substr(xp.rfind('[') + 1))] = read_rgb(x, xp);
    });
  }
}

// ---- composition ----

YAML::Node merge(const YAML::Node& base, const YAML::Node& overlay) {
  if (!base.IsMap() || !overlay.IsMap()) return YAML::Clone(overlay);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : overlay) {
    const auto key = kv.first.as<std::string>();
    out[key] = out[key] ? merge(out[key], kv.second) : YAML::Clone(kv.second);
  }
  return out;
}

YAML::Node load_text(std::string_view text, const std::string& origin) {
  try {
    YAML::Node n = YAML::Load(std::string(text));
    if (n.IsNull()) return YAML::Node(YAML::NodeType::Map);
    return n;
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidConfig, origin + ": " + e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Resolves `include` entries depth first; the including document wins.
YAML::Node resolve_includes(YAML::Node node, const fs::path& base_dir, int depth) {
  if (depth > 16) throw Error(ErrorCode::InvalidConfig, "include: nesting deeper than 16 levels");
  if (!node.IsMap() || !node["include"]) return node;
  YAML::Node includes = node["include"];
  std::vector<std::string> files;
  if (includes.IsScalar()) {
    files.push_back(includes.Scalar());
  } else {
    each(includes, "include", [&](const YAML::Node& x, const std::string& p) { files.push_back(read_string(x, p)); });
  }
  node.remove("include");
  YAML::Node merged(YAML::NodeType::Map);
  for (const auto& f : files) {
    fs::path p = f;
    if (p.is_relative()) p = base_dir / p;
    YAML::Node child = resolve_includes(load_text(read_file(p), p.string()), p.parent_path(), depth + 1);
    // Dataset roots inside an included file are relative to that file.
    if (child["dataset"] && child["dataset"]["root"] && child["dataset"]["root"].IsScalar()) {
      fs::path root = child["dataset"]["root"].Scalar();
      if (root.is_relative()) child["dataset"]["root"] = (p.parent_path() / root).lexically_normal().string();
    }
    merged = merge(merged, child);
  }
  return merge(merged, node);
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::InvalidConfig, "override '" + assignment + "': expected key=value");
  }
  const std::string key = assignment.substr(0, eq);
  YAML::Node value = load_text(assignment.substr(eq + 1), "override " + key);
  if (value.IsMap() && value.size() == 0 && assignment.size() == eq + 1) value = YAML::Node();

  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);

  // yaml-cpp nodes are handles, so walking with copies still edits the tree.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node cur = chain.back();
    const std::string& part = parts[i];
    if (cur.IsSequence()) {
      const auto idx = std::stoul(part);
      if (idx >= cur.size()) throw Error(ErrorCode::InvalidConfig, key + ": index out of range");
      chain.push_back(cur[idx]);
    } else {
      if (!cur[part] || cur[part].IsNull()) cur[part] = YAML::Node(YAML::NodeType::Map);
      chain.push_back(cur[part]);
    }
  }
  YAML::Node last = chain.back();
  if (last.IsSequence()) {
    const auto idx = std::stoul(parts.back());
    if (idx >= last.size()) throw Error(ErrorCode::InvalidConfig, key + ": index out of range");
    last[idx] = value;
  } else {
    last[parts.back()] = value;
  }
}

RunConfig from_node(const YAML::Node& n, const fs::path& base_dir) {
  check_keys(n, "", {"seed", "dataset", "env", "wrappers", "bench", "render"});
  RunConfig c;
  if (n["seed"]) c.seed = read_u64(n["seed"], "seed");
  if (n["dataset"]) read_dataset(n["dataset"], "dataset", base_dir, c);
  if (n["env"]) read_env(n["env"], "env", c.env);
  if (n["wrappers"]) c.wrappers = read_wrappers(n["wrappers"], "wrappers");
  if (n["bench"]) read_bench(n["bench"], "bench", c.bench);
  if (n["render"]) read_render(n["render"], "render", c.render);
  c.layout.capacity = c.env.capacity;

  if (c.dataset.root.empty()) {
    const char* env_root = std::getenv("ARCENV_DATA_ROOT");
    if (env_root != nullptr && *env_root != '\0') {
      fs::path root = env_root;
      for (const auto& src : default_dataset_table()) {
        if (src.name == c.dataset.name) root /= src.directory;
      }
      c.dataset.root = root;
    }
  }
  c.validate();
  return c;
}

// ---- writing ----

std::string number(double v) { return fmt::format("{}", v); }

}  // namespace

void RunConfig::validate() const {
  if (dataset.root.empty()) fail("dataset.root", "required (or set ARCENV_DATA_ROOT)");
  if (dataset.parser.empty()) fail("dataset.parser", "must not be empty");
  if (layout.max_demo_pairs < 1) fail("dataset.max_demo_pairs", "must be >= 1");
  if (layout.max_test_pairs < 1) fail("dataset.max_test_pairs", "must be >= 1");
  env.validate();

  int action_wrappers = 0;
  std::set<WrapperKind> seen;
  for (std::size_t i = 0; i < wrappers.size(); ++i) {
    const WrapperConfig& w = wrappers[i];
    const std::string p = index_path("wrappers", i);
    if (is_action_kind(w.kind)) {
      ++action_wrappers;
    } else if (!seen.insert(w.kind).second) {
      fail(p, std::string("duplicate ") + to_string(w.kind) + " wrapper");
    }
    if (w.kind == WrapperKind::OpSubset) {
      try {
        OpSubset subset(w.ops);
      } catch (const Error& e) {
        fail(join(p, "ops"), e.what());
      }
      for (int op : w.ops) {
        if (!env.allowed_ops.contains(OpId(op))) fail(join(p, "ops"), fmt::format("op {} is not in env.allowed_ops", op));
      }
    }
    if (w.kind == WrapperKind::Contextual && (w.pairs < 1 || w.pairs > layout.max_demo_pairs)) {
      fail(join(p, "pairs"), fmt::format("must be within 1..dataset.max_demo_pairs ({})", layout.max_demo_pairs));
    }
  }
  if (action_wrappers != 1) {
    fail("wrappers", fmt::format("expected exactly one action parameterization, found {}", action_wrappers));
  }

  try {
    bench.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  if (render.cell_px < 1) fail("render.cell_px", "must be >= 1");
  render.palette.validate();
  (void)wrapper_stack();  // surfaces action spaces too large to flatten
}

WrapperStack RunConfig::wrapper_stack() const {
  ActionParam param = ActionParam::Mask;
  std::vector<int> ops = env.allowed_ops.ids();
  bool flatten = false;
  WrapperStack stack;
  for (const auto& w : wrappers) {
    switch (w.kind) {
      case WrapperKind::MaskActions: param = ActionParam::Mask; break;
      case WrapperKind::PointActions: param = ActionParam::Point; break;
      case WrapperKind::BBoxActions: param = ActionParam::BBox; break;
      case WrapperKind::OpSubset: ops = w.ops; break;
      case WrapperKind::Flatten: flatten = true; break;
      case WrapperKind::Answer: stack.observations.answer = true; break;
      case WrapperKind::Input: stack.observations.input = true; break;
      case WrapperKind::Clipboard: stack.observations.clipboard = true; break;
      case WrapperKind::Contextual: stack.observations.contextual_pairs = w.pairs; break;
      case WrapperKind::AutoReset: stack.auto_reset = true; break;
    }
  }
  try {
    stack.actions = ActionSpace(param, OpSubset(ops), env.capacity, flatten);
  } catch (const Error& e) {
    fail("wrappers", e.what());
  }
  return stack;
}

EnvParams RunConfig::effective_params() const {
  EnvParams p = env;
  for (const auto& w : wrappers) {
    if (w.kind == WrapperKind::OpSubset) p.allowed_ops = OpSet(w.ops);
  }
  return p;
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir, const std::vector<std::string>& overrides) {
  YAML::Node node = resolve_includes(load_text(text, "config"), base_dir, 0);
  if (!node.IsMap()) fail("<root>", "expected a mapping");
  for (const auto& o : overrides) apply_override(node, o);
  return from_node(node, base_dir);
}

RunConfig load_run_config(const fs::path& path, const std::vector<std::string>& overrides) {
  return parse_run_config(read_file(path), path.parent_path(), overrides);
}

std::string to_yaml(const RunConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;

  out << YAML::Key << "dataset" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.dataset.name;
  out << YAML::Key << "root" << YAML::Value << c.dataset.root.string();
  out << YAML::Key << "split" << YAML::Value << (c.dataset.split == Split::Train ? "train" : "evaluation");
  out << YAML::Key << "subset" << YAML::Value;
  if (c.dataset.subset) {
    out << *c.dataset.subset;
  } else {
    out << YAML::Null;
  }
  out << YAML::Key << "task_ids" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& id : c.dataset.task_ids) out << id;
  out << YAML::EndSeq;
  out << YAML::Key << "parser" << YAML::Value << c.dataset.parser;
  out << YAML::Key << "lazy" << YAML::Value << c.dataset.lazy;
  out << YAML::Key << "max_demo_pairs" << YAML::Value << c.layout.max_demo_pairs;
  out << YAML::Key << "max_test_pairs" << YAML::Value << c.layout.max_test_pairs;
  out << YAML::EndMap;

  out << YAML::Key << "env" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << (c.env.mode == Mode::Train ? "train" : "eval");
  out << YAML::Key << "max_episode_steps" << YAML::Value << c.env.max_episode_steps;
  out << YAML::Key << "capacity" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "rows" << YAML::Value << c.env.capacity.rows;
  out << YAML::Key << "cols" << YAML::Value << c.env.capacity.cols;
  out << YAML::EndMap;
  out << YAML::Key << "allowed_ops" << YAML::Value;
  if (c.env.allowed_ops == OpSet()) {
    out << "all";
  } else {
    out << YAML::Flow << c.env.allowed_ops.ids();
  }
  out << YAML::Key << "reward" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "similarity_weight" << YAML::Value << number(c.env.reward.similarity_weight);
  out << YAML::Key << "success_bonus" << YAML::Value << number(c.env.reward.success_bonus);
  out << YAML::Key << "step_penalty" << YAML::Value << number(c.env.reward.step_penalty);
  out << YAML::Key << "unsolved_submission_penalty" << YAML::Value << number(c.env.reward.unsolved_submission_penalty);
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "wrappers" << YAML::Value << YAML::BeginSeq;
  for (const auto& w : c.wrappers) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "type" << YAML::Value << to_string(w.kind);
    if (w.kind == WrapperKind::OpSubset) out << YAML::Key << "ops" << YAML::Value << YAML::Flow << w.ops;
    if (w.kind == WrapperKind::Contextual) out << YAML::Key << "pairs" << YAML::Value << w.pairs;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "bench" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "batch_sizes" << YAML::Value << YAML::Flow << c.bench.batch_sizes;
  out << YAML::Key << "steps_per_env" << YAML::Value << c.bench.steps_per_env;
  out << YAML::Key << "repeats" << YAML::Value << c.bench.repeats;
  out << YAML::Key << "warmup_runs" << YAML::Value << c.bench.warmup_runs;
  out << YAML::Key << "seed" << YAML::Value << c.bench.seed;
  out << YAML::Key << "workers" << YAML::Value << c.bench.workers;
  out << YAML::Key << "memory_limit_bytes" << YAML::Value << c.bench.memory_limit_bytes;
  out << YAML::EndMap;

  out << YAML::Key << "render" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "cell_px" << YAML::Value << c.render.cell_px;
  out << YAML::Key << "palette" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& col : c.render.palette.colors) out << col.hex();
  out << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ParsedIdentifier parse_identifier(std::string_view identifier) {
  struct Alias {
    const char* key;
    const char* dataset;
  };
  static constexpr Alias kAliases[] = {{"Mini", "miniarc"},     {"miniarc", "miniarc"},     {"AGI1", "arc-agi-1"},
                                       {"arc-agi-1", "arc-agi-1"}, {"AGI2", "arc-agi-2"}, {"arc-agi-2", "arc-agi-2"}};
  for (const auto& a : kAliases) {
    if (identifier == a.key) return {a.dataset, ""};
  }
  // Longest alias first so "arc-agi-1-<id>" is not read as an "arc" prefix.
  std::string_view best;
  const char* dataset = nullptr;
  for (const auto& a : kAliases) {
    const std::string_view key = a.key;
    if (identifier.size() > key.size() + 1 && identifier.substr(0, key.size()) == key &&
        identifier[key.size()] == '-' && key.size() > best.size()) {
      best = key;
      dataset = a.dataset;
    }
  }
  if (dataset == nullptr) {
    throw Error(ErrorCode::UnknownIdentifier,
                "unknown identifier '" + std::string(identifier) + "'; expected Mini, AGI1 or AGI2 optionally followed by -<task id>");
  }
  return {dataset, std::string(identifier.substr(best.size() + 1))};
}

fs::path default_data_root() {
  const char* env_root = std::getenv("ARCENV_DATA_ROOT");
  return env_root != nullptr && *env_root != '\0' ? fs::path(env_root) : fs::path("data");
}

RunConfig config_for_identifier(std::string_view identifier, const MakeOptions& options) {
  const ParsedIdentifier id = parse_identifier(identifier);
  auto src = std::find_if(options.table.begin(), options.table.end(),
                          [&](const DatasetSource& s) { return s.name == id.dataset; });
  if (src == options.table.end()) {
    throw Error(ErrorCode::UnknownIdentifier, "dataset '" + id.dataset + "' is not in the dataset table");
  }
  const fs::path data_root = options.data_root.empty() ? default_data_root() : options.data_root;
  fs::path root = data_root / src->directory;
  if (!fs::is_directory(root) && options.auto_download) {
    root = fetch_dataset(src->name, data_root, options.table, FetchOptions{options.allow_unpinned});
  }

  RunConfig c;
  c.dataset.name = id.dataset;
  c.dataset.root = root;
  if (!id.task_id.empty()) c.dataset.task_ids = {id.task_id};
  if (id.dataset == "miniarc") c.env.capacity = Capacity::miniarc();
  c.layout.capacity = c.env.capacity;
  c.validate();
  return c;
}

Made make(const RunConfig& config) {
  config.validate();
  const DatasetIndex index = DatasetIndex::scan(config.dataset);
  BufferLayout layout = config.layout;
  layout.capacity = config.env.capacity;
  auto buffer = std::make_shared<const TaskBuffer>(config.dataset.lazy ? build_task_buffer(index, layout)
                                                                         : build_task_buffer(index.load_all(), layout));
  const EnvParams params = config.effective_params();
  auto env = std::make_shared<const Environment>(std::move(buffer), params, config.wrapper_stack());
  return {std::move(env), params};
}

Made make(std::string_view identifier, const MakeOptions& options) {
  return make(config_for_identifier(identifier, options));
}

}  // namespace arcenv
