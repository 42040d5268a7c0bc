#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arcenv/grid.hpp"
#include "arcenv/prng.hpp"

namespace arcenv {

struct RawPair {
  RawGrid input;
  RawGrid output;

  friend bool operator==(const RawPair&, const RawPair&) = default;
};

struct RawTask {
  std::string id;
  std::vector<RawPair> demo_pairs;
  std::vector<RawPair> test_pairs;

  friend bool operator==(const RawTask&, const RawTask&) = default;
};

/// Extension point for dataset formats. A parser turns the bytes of one task
/// file into a RawTask; the id comes from the file name.
class TaskParser {
 public:
  virtual ~TaskParser() = default;
  virtual RawTask parse(std::string_view bytes, const std::string& id) const = 0;
  /// File extension (with dot) this parser recognizes when scanning a directory.
  virtual std::string extension() const { return ".json"; }
};

void register_parser(const std::string& name, std::function<std::unique_ptr<TaskParser>()> factory);
std::unique_ptr<TaskParser> make_parser(const std::string& name);

/// ARC task JSON: {"train": [{"input": [[..]], "output": [[..]]}, ..], "test": [..]}.
/// Validates against the full storage capacity; build_task_buffer applies the
/// profile capacity.
RawTask parse_task_json(std::string_view bytes, const std::string& id = {});
std::string serialize_task_json(const RawTask& task);

enum class Split { Train, Evaluation };

struct DatasetSpec {
  std::string name = "custom";
  Split split = Split::Train;
  /// Named subset: a YAML/JSON list of task ids at <root>/subsets/<name>.{yaml,yml,json}.
  std::optional<std::string> subset;
  /// Inline subset; takes part in filtering together with `subset`.
  std::vector<std::string> task_ids;
  std::filesystem::path root;
  std::string parser = "arc-json";
  bool lazy = false;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

/// Directory holding a split's task files: <root>/training or
/// <root>/evaluation when present, otherwise <root> itself.
std::filesystem::path split_directory(const DatasetSpec& spec);

/// Task ids from a subset file.
std::vector<std::string> read_subset_file(const std::filesystem::path& path);

/// Sorted, filtered list of task files. Grid bodies are parsed only by load().
class DatasetIndex {
 public:
  struct Entry {
    std::string id;
    std::filesystem::path path;
  };

  static DatasetIndex scan(const DatasetSpec& spec);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Parses one task; parse errors carry the file path.
  RawTask load(std::size_t i) const;
  std::vector<RawTask> load_all() const;

 private:
  std::vector<Entry> entries_;
  std::shared_ptr<const TaskParser> parser_;
};

/// Eagerly parsed tasks sorted by id with the subset filter applied.
std::vector<RawTask> load_dataset(const DatasetSpec& spec);

/// All tasks padded and stacked into fixed-shape arrays. Slot (t, p) of the
/// demo arrays lives at t * max_demo_pairs + p; slots beyond a task's count
/// hold the canonical empty grid.
class TaskBuffer {
 public:
  static constexpr int kDefaultMaxDemoPairs = 5;
  static constexpr int kDefaultMaxTestPairs = 2;

  int size() const { return static_cast<int>(task_ids.size()); }

  const PaddedGrid& demo_input(int t, int p) const { return demo_inputs[t * max_demo_pairs + p]; }
  const PaddedGrid& demo_output(int t, int p) const { return demo_outputs[t * max_demo_pairs + p]; }
  const PaddedGrid& test_input(int t, int q) const { return test_inputs[t * max_test_pairs + q]; }
  const PaddedGrid& test_output(int t, int q) const { return test_outputs[t * max_test_pairs + q]; }

  /// Index of a task id, if present.
  std::optional<int> find(std::string_view id) const;

  Capacity capacity;
  int max_demo_pairs = kDefaultMaxDemoPairs;
  int max_test_pairs = kDefaultMaxTestPairs;
  std::vector<PaddedGrid> demo_inputs;
  std::vector<PaddedGrid> demo_outputs;
  std::vector<PaddedGrid> test_inputs;
  std::vector<PaddedGrid> test_outputs;
  std::vector<int> demo_count;
  std::vector<int> test_count;
  std::vector<std::string> task_ids;

  friend bool operator==(const TaskBuffer&, const TaskBuffer&) = default;
};

struct BufferLayout {
  Capacity capacity;
  int max_demo_pairs = TaskBuffer::kDefaultMaxDemoPairs;
  int max_test_pairs = TaskBuffer::kDefaultMaxTestPairs;

  friend bool operator==(const BufferLayout&, const BufferLayout&) = default;
};

TaskBuffer build_task_buffer(std::span<const RawTask> tasks, const BufferLayout& layout = {});

/// Builds from an index, parsing one file at a time.
TaskBuffer build_task_buffer(const DatasetIndex& index, const BufferLayout& layout = {});

/// Uniform task index plus the advanced key.
std::pair<int, PrngKey> sample_task(PrngKey key, const TaskBuffer& buffer);

// Dataset download.

struct DatasetSource {
  std::string name;
  std::string url;        // tar.gz archive; file:// URLs are accepted
  std::string sha256;     // hex digest of the archive; empty means not pinned
  std::string directory;  // directory name under the destination
  std::string strip_prefix;  // leading archive path removed during extraction

  friend bool operator==(const DatasetSource&, const DatasetSource&) = default;
};

/// Built-in name -> source table, overridable with load_dataset_table.
std::vector<DatasetSource> default_dataset_table();
std::vector<DatasetSource> load_dataset_table(const std::filesystem::path& path);
std::vector<DatasetSource> parse_dataset_table(std::string_view yaml);

struct FetchOptions {
  bool allow_unpinned = false;
};

/// Downloads and unpacks a dataset into destination/<directory>. Returns the
/// dataset directory. Does nothing (and touches no network) when a completed
/// download is already present.
std::filesystem::path fetch_dataset(const std::string& name, const std::filesystem::path& destination,
                                    const std::vector<DatasetSource>& table, const FetchOptions& options = {});

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Extracts a gzip-compressed ustar archive into dest.
void extract_tar_gz(std::string_view archive, const std::filesystem::path& dest,
                    const std::string& strip_prefix = {});

}  // namespace arcenv
