#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hunt {

enum class ErrorCode {
  InvalidArgument,
  EmptyDataset,
  ArityMismatch,
  MalformedRow,
  UnknownLabel,
  NonBinaryHypothesis,
  BudgetExhausted,
  TargetNotSensible,
  HorizonExceeded,
  AlreadyClassified,
  EmptyObservation,
  SchemaMismatch,
  TargetUnreachable,
  DegenerateGeometry,
  Infeasible,
  SamplingExhausted,
  UnknownScenario,
  UnknownSession,
  SessionLive,
  SessionEnded,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NonBinaryHypothesis: return "NonBinaryHypothesis";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::TargetNotSensible: return "TargetNotSensible";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::AlreadyClassified: return "AlreadyClassified";
    case ErrorCode::EmptyObservation: return "EmptyObservation";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::SamplingExhausted: return "SamplingExhausted";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::SessionLive: return "SessionLive";
    case ErrorCode::SessionEnded: return "SessionEnded";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is reported as a HuntError
/// carrying a machine-readable code.
class HuntError : public std::runtime_error {
 public:
  HuntError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw HuntError(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace hunt
