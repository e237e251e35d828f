#include "stochcal/errors.hpp"

#include <utility>

namespace stochcal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveLevel: return "NonPositiveLevel";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SingularRegression: return "SingularRegression";
    case ErrorCode::StationarityViolated: return "StationarityViolated";
    case ErrorCode::OptimizerFailed: return "OptimizerFailed";
    case ErrorCode::NonStationaryEstimate: return "NonStationaryEstimate";
    case ErrorCode::IntensityTooLarge: return "IntensityTooLarge";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::TooFewExceedances: return "TooFewExceedances";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::ShapeTooHeavy: return "ShapeTooHeavy";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotoneDates: return "NonMonotoneDates";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_status(ErrorCode code) { return 10 + static_cast<int>(code); }

Error::Error(ErrorCode code, std::string module, const std::string& message)
    : std::runtime_error(module + "." + std::string(to_string(code)) + ": " + message),
      code_(code),
      module_(std::move(module)) {}

std::string Error::qualified_name() const {
  return module_ + "." + std::string(to_string(code_));
}

void fail(ErrorCode code, std::string module, const std::string& message) {
  throw Error(code, std::move(module), message);
}

}  // namespace stochcal
