#include "evfleet/error.hpp"

namespace evfleet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::NegativeParameter: return "NegativeParameter";
    case ErrorCode::AssumptionViolation: return "AssumptionViolation";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::BlockSpansDayBoundary: return "BlockSpansDayBoundary";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::ConfigInfeasible: return "ConfigInfeasible";
    case ErrorCode::ModelTooLarge: return "ModelTooLarge";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::SolverNotFound: return "SolverNotFound";
    case ErrorCode::SolverCrashed: return "SolverCrashed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::P1Infeasible: return "P1Infeasible";
    case ErrorCode::IncumbentRejected: return "IncumbentRejected";
    case ErrorCode::InconclusiveDueToTimeLimit: return "InconclusiveDueToTimeLimit";
    case ErrorCode::GuardExceeded: return "GuardExceeded";
    case ErrorCode::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

bool is_environment_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SolverNotFound:
    case ErrorCode::SolverCrashed:
    case ErrorCode::ParseError:
    case ErrorCode::IncumbentRejected:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, std::string where, const std::string& detail)
    : std::runtime_error(where + ": " + std::string(to_string(code)) + ": " + detail),
      code_(code),
      where_(std::move(where)) {}

}  // namespace evfleet
