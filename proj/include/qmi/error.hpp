#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmi {

enum class ErrorCode {
  invalid_argument,
  not_square,
  dims_mismatch,
  not_hermitian,
  negative_eigenvalue,
  trace_mismatch,
  eigensolver_failure,
  invalid_subsystem,
  dimension_mismatch,
  bound_inapplicable,
  degenerate_case,
  out_of_regime,
  subadditivity_violation,
  isometry_violation,
  schema_error,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::not_square: return "NotSquare";
    case ErrorCode::dims_mismatch: return "DimsMismatch";
    case ErrorCode::not_hermitian: return "NotHermitian";
    case ErrorCode::negative_eigenvalue: return "NegativeEigenvalue";
    case ErrorCode::trace_mismatch: return "TraceMismatch";
    case ErrorCode::eigensolver_failure: return "EigensolverFailure";
    case ErrorCode::invalid_subsystem: return "InvalidSubsystem";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::bound_inapplicable: return "BoundInapplicable";
    case ErrorCode::degenerate_case: return "DegenerateCase";
    case ErrorCode::out_of_regime: return "OutOfRegime";
    case ErrorCode::subadditivity_violation: return "SubadditivityViolation";
    case ErrorCode::isometry_violation: return "IsometryViolation";
    case ErrorCode::schema_error: return "SchemaError";
    case ErrorCode::io_error: return "IOError";
  }
  return "Unknown";
}

/// Base exception for everything the toolkit reports. The code is the stable
/// part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

/// Raised by the bound evaluators outside 0 <= epsilon <= 1. Carries the
/// a-priori fallback bound so callers can still report something meaningful.
class BoundInapplicable : public Error {
 public:
  BoundInapplicable(double epsilon, double fallback)
      : Error(ErrorCode::bound_inapplicable,
              "epsilon = " + std::to_string(epsilon) + " outside [0,1]; trivial fallback " +
                  std::to_string(fallback)),
        epsilon_(epsilon),
        fallback_(fallback) {}

  double epsilon() const noexcept { return epsilon_; }
  double fallback() const noexcept { return fallback_; }

 private:
  double epsilon_;
  double fallback_;
};

}  // namespace qmi
