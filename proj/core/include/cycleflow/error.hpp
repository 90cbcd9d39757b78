#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cycleflow {

enum class ErrorCode {
  MalformedFile,
  EmptyRide,
  NonMonotonicTime,
  InvalidSpec,
  InvalidConfig,
  TooShort,
  NoMovement,
  InvalidParams,
  DegenerateData,
  NoConvergence,
  TooFewRides,
  DegenerateSplit,
  EmptyClass,
  TruncationExhausted,
  UnknownApproach,
  ConfigError,
  EmptyInput,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::EmptyRide: return "EmptyRide";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NoMovement: return "NoMovement";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TooFewRides: return "TooFewRides";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::TruncationExhausted: return "TruncationExhausted";
    case ErrorCode::UnknownApproach: return "UnknownApproach";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every typed failure in the library is reported through this exception.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cycleflow
