#pragma once

#include <stdexcept>
#include <string>

namespace payctl {

enum class ErrorKind {
  DimensionMismatch,
  NonFiniteEntry,
  DuplicateActionLabel,
  UnknownKind,
  InvalidParams,
  UnknownLabel,
  UnknownAction,
  IndexOutOfRange,
  PlayerOutOfRange,
  InvalidProbability,
  InconsistentStrategy,
  NoConvergence,
  MissingRoundCap,
  UnsupportedSchedule,
  TrivialTarget,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type; kind() is stable,
// what() carries the human-readable context.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace payctl
