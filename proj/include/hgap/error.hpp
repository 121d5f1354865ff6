#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hgap {

enum class ErrorCode {
  NotAdmissible,
  DimensionMismatch,
  NonpositiveScale,
  IndexOutOfRange,
  MissingDerivative,
  DomainError,
  ConvergenceFailure,
  DegenerateDenominator,
  StepBudgetExceeded,
  InvalidStructure,
  InsufficientSamples,
  AllPathsExited,
  NoStableWindow,
  InsufficientDefinedRates,
  UnknownRunId,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Validation errors are caused by bad input; everything else is a failure of
// the numerical procedure itself. The CLI maps the two classes to distinct
// exit codes.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hgap
