#include "hgap/error.hpp"

namespace hgap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonpositiveScale: return "NonpositiveScale";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::StepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorCode::InvalidStructure: return "InvalidStructure";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::AllPathsExited: return "AllPathsExited";
    case ErrorCode::NoStableWindow: return "NoStableWindow";
    case ErrorCode::InsufficientDefinedRates: return "InsufficientDefinedRates";
    case ErrorCode::UnknownRunId: return "UnknownRunId";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotAdmissible:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonpositiveScale:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::MissingDerivative:
    case ErrorCode::DomainError:
    case ErrorCode::InvalidStructure:
    case ErrorCode::UnknownRunId:
    case ErrorCode::InvalidArgument:
    case ErrorCode::IoError:
    case ErrorCode::StepBudgetExceeded:
    case ErrorCode::InsufficientSamples:
      return true;
    default:
      return false;
  }
}

}  // namespace hgap
