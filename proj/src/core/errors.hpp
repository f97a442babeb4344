#pragma once

#include <stdexcept>
#include <string>

namespace rigidflow {

// Failure classes named by what went wrong. The coarse category decides the
// process exit code (config 2, numerical 3, invariant 4).
enum class ErrorCode {
  ConfigInvalid,
  GridMismatch,
  QuadratureNotConverged,
  CflViolation,
  CollisionMargin,
  PoissonDiverged,
  InadmissibleTestField,
  MarginsOverlap,
  NodeEscapedDomain,
  NewtonStalled,
  SingularJacobian,
  DominationViolated,
  InvariantViolated,
  IoFailure,
};

const char* error_code_name(ErrorCode code);

enum class ErrorCategory { Config = 2, Numerical = 3, Invariant = 4 };

ErrorCategory error_category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorCategory category() const { return error_category(code_); }

 private:
  ErrorCode code_;
};

}  // namespace rigidflow
