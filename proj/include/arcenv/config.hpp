#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "arcenv/bench.hpp"
#include "arcenv/environment.hpp"
#include "arcenv/render.hpp"
#include "arcenv/tasks.hpp"

namespace arcenv {

enum class WrapperKind {
  MaskActions,
  PointActions,
  BBoxActions,
  OpSubset,
  Flatten,
  Answer,
  Input,
  Clipboard,
  Contextual,
  AutoReset,
};

const char* to_string(WrapperKind k);

struct WrapperConfig {
  WrapperKind kind = WrapperKind::MaskActions;
  std::vector<int> ops;  // OpSubset
  int pairs = ObsSpec::kDefaultContextualPairs;  // Contextual

  friend bool operator==(const WrapperConfig&, const WrapperConfig&) = default;
};

struct RenderConfig {
  int cell_px = 20;
  Palette palette = Palette::arc();

  friend bool operator==(const RenderConfig&, const RenderConfig&) = default;
};

/// Everything needed to build an environment and drive the CLI.
struct RunConfig {
  DatasetSpec dataset;
  EnvParams env;
  BufferLayout layout;
  std::vector<WrapperConfig> wrappers{WrapperConfig{}};
  BenchConfig bench;
  RenderConfig render;
  std::uint64_t seed = 0;

  /// Throws Error(InvalidConfig) naming the offending field.
  void validate() const;

  /// Effective wrapper stack and params after composing the wrapper list.
  WrapperStack wrapper_stack() const;
  EnvParams effective_params() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses YAML (or JSON) text. `base_dir` resolves relative `include` entries
/// and dataset roots. Unknown keys and bad values raise Error(InvalidConfig)
/// with the field path.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {},
                           const std::vector<std::string>& overrides = {});

/// Loads a config file; `overrides` are "dotted.key=value" assignments applied
/// after includes are merged.
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Serializes every field, so parse_run_config(to_yaml(c)) == c.
std::string to_yaml(const RunConfig& config);

/// Identifier grammar: <dataset>[-<task id>] where <dataset> is one of
///   Mini | miniarc        MiniARC (5x5 capacity)
///   AGI1 | arc-agi-1      ARC-AGI-1
///   AGI2 | arc-agi-2      ARC-AGI-2
/// A task id selects a one-task subset.
struct ParsedIdentifier {
  std::string dataset;  // canonical name from the dataset table
  std::string task_id;  // empty: whole dataset
};

ParsedIdentifier parse_identifier(std::string_view identifier);

struct MakeOptions {
  /// Parent of the dataset directories. Empty: $ARCENV_DATA_ROOT, else "data".
  std::filesystem::path data_root;
  bool auto_download = false;
  bool allow_unpinned = false;
  std::vector<DatasetSource> table = default_dataset_table();
};

/// $ARCENV_DATA_ROOT, else "data".
std::filesystem::path default_data_root();

/// RunConfig for an identifier with default environment settings.
RunConfig config_for_identifier(std::string_view identifier, const MakeOptions& options = {});

struct Made {
  std::shared_ptr<const Environment> env;
  EnvParams params;
};

/// Loads the dataset, builds the buffer and composes the wrappers in order.
Made make(const RunConfig& config);
Made make(std::string_view identifier, const MakeOptions& options = {});

}  // namespace arcenv
