#pragma once

#include <stdexcept>
#include <string>

namespace catline {

enum class ErrorCode {
  invalid_dimension,
  invalid_argument,
  truncation_inadequate,
  degenerate_state,
  impossible_outcome,
  layout_mismatch,
  representation,
  schedule_validation,
  integration_failure,
  extraction_failure,
  calibration_failure,
  config,
  io,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_dimension: return "invalid_dimension";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::truncation_inadequate: return "truncation_inadequate";
    case ErrorCode::degenerate_state: return "degenerate_state";
    case ErrorCode::impossible_outcome: return "impossible_outcome";
    case ErrorCode::layout_mismatch: return "layout_mismatch";
    case ErrorCode::representation: return "representation";
    case ErrorCode::schedule_validation: return "schedule_validation";
    case ErrorCode::integration_failure: return "integration_failure";
    case ErrorCode::extraction_failure: return "extraction_failure";
    case ErrorCode::calibration_failure: return "calibration_failure";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace catline
