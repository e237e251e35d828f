#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stochcal {

/// Machine-readable failure categories. Every library error carries one of
/// these plus the name of the module that raised it.
enum class ErrorCode {
  NonPositiveLevel,
  InvalidParam,
  DomainError,
  DegenerateSeries,
  InsufficientData,
  SingularRegression,
  StationarityViolated,
  OptimizerFailed,
  NonStationaryEstimate,
  IntensityTooLarge,
  QuadratureFailure,
  OutOfSupport,
  TooFewExceedances,
  InvalidProbability,
  ShapeTooHeavy,
  ParseError,
  NonMonotoneDates,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Process exit status used by the CLI for a given code (always >= 10).
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

  /// "<module>.<Code>", e.g. "meanrev.NonStationaryEstimate".
  std::string qualified_name() const;

 private:
  ErrorCode code_;
  std::string module_;
};

[[noreturn]] void fail(ErrorCode code, std::string module, const std::string& message);

}  // namespace stochcal
