#include "payctl/error.hpp"

namespace payctl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::DuplicateActionLabel: return "DuplicateActionLabel";
    case ErrorKind::UnknownKind: return "UnknownKind";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::UnknownAction: return "UnknownAction";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::PlayerOutOfRange: return "PlayerOutOfRange";
    case ErrorKind::InvalidProbability: return "InvalidProbability";
    case ErrorKind::InconsistentStrategy: return "InconsistentStrategy";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MissingRoundCap: return "MissingRoundCap";
    case ErrorKind::UnsupportedSchedule: return "UnsupportedSchedule";
    case ErrorKind::TrivialTarget: return "TrivialTarget";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace payctl
