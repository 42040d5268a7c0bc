#pragma once

#include <stdexcept>
#include <string>

namespace arcenv {

enum class ErrorCode {
  InvalidArgument,
  DimensionOutOfRange,
  ValueOutOfRange,
  InvalidOp,
  MalformedJson,
  MissingKeys,
  RaggedMatrix,
  TooManyPairs,
  MissingDirectory,
  UnresolvedSubsetId,
  EmptyBuffer,
  UnknownIdentifier,
  InvalidConfig,
  UnknownParser,
  UnresolvableChannel,
  ShapeMismatch,
  UnknownDataset,
  Network,
  DigestMismatch,
  Io,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; the code carries the category so the
// C layer can map it to a status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace arcenv
