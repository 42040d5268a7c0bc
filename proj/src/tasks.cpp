#include "arcenv/tasks.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "arcenv/errors.hpp"

namespace arcenv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RawGrid parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::MalformedJson, where + ": expected non-empty array of rows");
  RawGrid out;
  out.reserve(j.size());
  std::size_t width = 0;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.empty()) throw Error(ErrorCode::MalformedJson, where + ": row " + std::to_string(r) + " is not a non-empty array");
    if (r == 0) width = row.size();
    if (row.size() != width) throw Error(ErrorCode::RaggedMatrix, where + ": row " + std::to_string(r) + " has " + std::to_string(row.size()) + " cells, expected " + std::to_string(width));
    std::vector<int> cells;
    cells.reserve(width);
    for (const json& v : row) {
      if (!v.is_number_integer()) throw Error(ErrorCode::MalformedJson, where + ": non-integer cell");
      const auto x = v.get<long long>();
      if (x < 0 || x >= kNumColors) throw Error(ErrorCode::ValueOutOfRange, where + ": color " + std::to_string(x) + " outside 0..9");
      cells.push_back(static_cast<int>(x));
    }
    out.push_back(std::move(cells));
  }
  if (static_cast<int>(out.size()) > kMaxDim || static_cast<int>(width) > kMaxDim) {
    throw Error(ErrorCode::DimensionOutOfRange, where + ": " + std::to_string(out.size()) + "x" + std::to_string(width) + " exceeds capacity");
  }
  return out;
}

std::vector<RawPair> parse_pairs(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) throw Error(ErrorCode::MissingKeys, std::string("missing \"") + key + "\" array");
  std::vector<RawPair> pairs;
  const json& arr = doc[key];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& p = arr[i];
    const std::string where = std::string(key) + "[" + std::to_string(i) + "]";
    if (!p.is_object() || !p.contains("input") || !p.contains("output")) {
      throw Error(ErrorCode::MissingKeys, where + ": missing \"input\"/\"output\"");
    }
    pairs.push_back({parse_matrix(p["input"], where + ".input"), parse_matrix(p["output"], where + ".output")});
  }
  if (pairs.empty()) throw Error(ErrorCode::MissingKeys, std::string("\"") + key + "\" has no pairs");
  return pairs;
}

json matrix_json(const RawGrid& g) {
  json rows = json::array();
  for (const auto& row : g) rows.push_back(row);
  return rows;
}

class ArcJsonParser final : public TaskParser {
 public:
  RawTask parse(std::string_view bytes, const std::string& id) const override { return parse_task_json(bytes, id); }
};

struct ParserRegistry {
  std::mutex mu;
  std::map<std::string, std::function<std::unique_ptr<TaskParser>()>> factories{
      {"arc-json", [] { return std::make_unique<ArcJsonParser>(); }}};
};

ParserRegistry& registry() {
  static ParserRegistry r;
  return r;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void register_parser(const std::string& name, std::function<std::unique_ptr<TaskParser>()> factory) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.factories[name] = std::move(factory);
}

std::unique_ptr<TaskParser> make_parser(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  auto it = r.factories.find(name);
  if (it == r.factories.end()) throw Error(ErrorCode::UnknownParser, "no parser registered as \"" + name + "\"");
  return it->second();
}

RawTask parse_task_json(std::string_view bytes, const std::string& id) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedJson, "top level is not an object");
  RawTask task;
  task.id = id;
  task.demo_pairs = parse_pairs(doc, "train");
  task.test_pairs = parse_pairs(doc, "test");
  return task;
}

std::string serialize_task_json(const RawTask& task) {
  json doc = json::object();
  for (const char* key : {"train", "test"}) {
    json arr = json::array();
    const auto& pairs = std::string_view(key) == "train" ? task.demo_pairs : task.test_pairs;
    for (const auto& p : pairs) arr.push_back({{"input", matrix_json(p.input)}, {"output", matrix_json(p.output)}});
    doc[key] = std::move(arr);
  }
  return doc.dump();
}

fs::path split_directory(const DatasetSpec& spec) {
  const fs::path sub = spec.root / (spec.split == Split::Train ? "training" : "evaluation");
  if (fs::is_directory(sub)) return sub;
  return spec.root;
}

std::vector<std::string> read_subset_file(const fs::path& path) {
  YAML::Node node;
  try {
    node = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  if (!node.IsSequence()) throw Error(ErrorCode::InvalidConfig, path.string() + ": subset file must be a list of task ids");
  std::vector<std::string> ids;
  for (const auto& n : node) ids.push_back(n.as<std::string>());
  return ids;
}

DatasetIndex DatasetIndex::scan(const DatasetSpec& spec) {
  const fs::path dir = split_directory(spec);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::MissingDirectory, "dataset directory not found: " + dir.string());

  DatasetIndex index;
  index.parser_ = make_parser(spec.parser);
  const std::string ext = index.parser_->extension();
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ext) continue;
    index.entries_.push_back({e.path().stem().string(), e.path()});
  }
  std::sort(index.entries_.begin(), index.entries_.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; });

  std::vector<std::string> wanted = spec.task_ids;
  if (spec.subset) {
    fs::path file;
    for (const char* suffix : {".yaml", ".yml", ".json"}) {
      const fs::path candidate = spec.root / "subsets" / (*spec.subset + suffix);
      if (fs::is_regular_file(candidate)) {
        file = candidate;
        break;
      }
    }
    if (file.empty()) throw Error(ErrorCode::UnresolvedSubsetId, "subset \"" + *spec.subset + "\" not found under " + (spec.root / "subsets").string());
    auto ids = read_subset_file(file);
    wanted.insert(wanted.end(), ids.begin(), ids.end());
  }
  if (spec.subset || !spec.task_ids.empty()) {
    const std::set<std::string> keep(wanted.begin(), wanted.end());
    for (const auto& id : keep) {
      const bool found = std::any_of(index.entries_.begin(), index.entries_.end(), [&](const Entry& e) { return e.id == id; });
      if (!found) throw Error(ErrorCode::UnresolvedSubsetId, "task id \"" + id + "\" not found in " + dir.string());
    }
    std::erase_if(index.entries_, [&](const Entry& e) { return !keep.contains(e.id); });
  }
  return index;
}

RawTask DatasetIndex::load(std::size_t i) const {
  const Entry& e = entries_.at(i);
  try {
    return parser_->parse(read_file(e.path), e.id);
  } catch (const Error& err) {
    throw Error(err.code(), e.path.string() + ": " + err.what());
  }
}

std::vector<RawTask> DatasetIndex::load_all() const {
  std::vector<RawTask> out;
  out.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) out.push_back(load(i));
  return out;
}

std::vector<RawTask> load_dataset(const DatasetSpec& spec) { return DatasetIndex::scan(spec).load_all(); }

std::optional<int> TaskBuffer::find(std::string_view id) const {
  auto it = std::find(task_ids.begin(), task_ids.end(), id);
  if (it == task_ids.end()) return std::nullopt;
  return static_cast<int>(it - task_ids.begin());
}

namespace {

void init_buffer(TaskBuffer& buf, const BufferLayout& layout, std::size_t n) {
  if (!layout.capacity.valid()) throw Error(ErrorCode::InvalidArgument, "capacity exceeds compiled storage bound");
  if (layout.max_demo_pairs < 1 || layout.max_test_pairs < 1) throw Error(ErrorCode::InvalidArgument, "pair capacity must be >= 1");
  buf.capacity = layout.capacity;
  buf.max_demo_pairs = layout.max_demo_pairs;
  buf.max_test_pairs = layout.max_test_pairs;
  buf.demo_inputs.reserve(n * layout.max_demo_pairs);
  buf.demo_outputs.reserve(n * layout.max_demo_pairs);
  buf.test_inputs.reserve(n * layout.max_test_pairs);
  buf.test_outputs.reserve(n * layout.max_test_pairs);
}

void append_task(TaskBuffer& buf, const RawTask& task) {
  const int nd = static_cast<int>(task.demo_pairs.size());
  const int nt = static_cast<int>(task.test_pairs.size());
  if (nd < 1 || nt < 1) throw Error(ErrorCode::MissingKeys, task.id + ": needs at least one demo and one test pair");
  if (nd > buf.max_demo_pairs || nt > buf.max_test_pairs) {
    throw Error(ErrorCode::TooManyPairs, task.id + ": " + std::to_string(nd) + " demo / " + std::to_string(nt) + " test pairs exceed capacity " +
                                             std::to_string(buf.max_demo_pairs) + " / " + std::to_string(buf.max_test_pairs));
  }
  auto push = [&](std::vector<PaddedGrid>& in, std::vector<PaddedGrid>& out, const std::vector<RawPair>& pairs, int cap) {
    for (int i = 0; i < cap; ++i) {
      if (i < static_cast<int>(pairs.size())) {
        try {
          in.push_back(pad_into_buffer(pairs[i].input, buf.capacity));
          out.push_back(pad_into_buffer(pairs[i].output, buf.capacity));
        } catch (const Error& e) {
          throw Error(e.code(), task.id + ": " + e.what());
        }
      } else {
        in.emplace_back();
        out.emplace_back();
      }
    }
  };
  push(buf.demo_inputs, buf.demo_outputs, task.demo_pairs, buf.max_demo_pairs);
  push(buf.test_inputs, buf.test_outputs, task.test_pairs, buf.max_test_pairs);
  buf.demo_count.push_back(nd);
  buf.test_count.push_back(nt);
  buf.task_ids.push_back(task.id);
}

}  // namespace

TaskBuffer build_task_buffer(std::span<const RawTask> tasks, const BufferLayout& layout) {
  if (tasks.empty()) throw Error(ErrorCode::EmptyBuffer, "no tasks to load");
  TaskBuffer buf;
  init_buffer(buf, layout, tasks.size());
  for (const auto& t : tasks) append_task(buf, t);
  return buf;
}

TaskBuffer build_task_buffer(const DatasetIndex& index, const BufferLayout& layout) {
  if (index.size() == 0) throw Error(ErrorCode::EmptyBuffer, "no tasks to load");
  TaskBuffer buf;
  init_buffer(buf, layout, index.size());
  for (std::size_t i = 0; i < index.size(); ++i) append_task(buf, index.load(i));
  return buf;
}

std::pair<int, PrngKey> sample_task(PrngKey key, const TaskBuffer& buffer) {
  if (buffer.size() == 0) throw Error(ErrorCode::EmptyBuffer, "cannot sample from an empty buffer");
  auto [draw, next] = split2(key);
  return {static_cast<int>(uniform_index(draw, static_cast<std::uint32_t>(buffer.size()))), next};
}

}  // namespace arcenv
