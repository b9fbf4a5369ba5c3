#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evfleet {

enum class ErrorCode {
  InvalidArgument,
  InvalidMatrix,
  NegativeParameter,
  AssumptionViolation,
  SchemaError,
  MissingFile,
  MalformedRow,
  DanglingReference,
  BlockSpansDayBoundary,
  EmptySelection,
  ConfigInfeasible,
  ModelTooLarge,
  MissingValue,
  SolverNotFound,
  SolverCrashed,
  ParseError,
  P1Infeasible,
  IncumbentRejected,
  InconclusiveDueToTimeLimit,
  GuardExceeded,
  EmptyInput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for failures of the solver or its environment rather than of the input data.
bool is_environment_error(ErrorCode code) noexcept;

/// Base exception. `where` is "module.operation" so messages point at the raising site.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string where, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ErrorCode code_;
  std::string where_;
};

}  // namespace evfleet
