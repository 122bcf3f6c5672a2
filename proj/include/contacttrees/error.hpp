#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contacttrees {

enum class ErrorKind {
  MalformedInput,
  SchemaViolation,
  DanglingReference,
  DuplicateId,
  InvalidProfile,
  UnknownPreset,
  IncompatibleKind,
  MissingAttribute,
  UnmappedValue,
  InvalidMapping,
  InvalidParams,
  UnknownTie,
  UnknownEgo,
  BandOutOfRange,
  DegeneratePolyline,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-readable error class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace contacttrees
