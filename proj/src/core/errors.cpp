#include "errors.hpp"

namespace rigidflow {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::CollisionMargin: return "CollisionMargin";
    case ErrorCode::PoissonDiverged: return "PoissonDiverged";
    case ErrorCode::InadmissibleTestField: return "InadmissibleTestField";
    case ErrorCode::MarginsOverlap: return "MarginsOverlap";
    case ErrorCode::NodeEscapedDomain: return "NodeEscapedDomain";
    case ErrorCode::NewtonStalled: return "NewtonStalled";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::DominationViolated: return "DominationViolated";
    case ErrorCode::InvariantViolated: return "InvariantViolated";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::GridMismatch:
    case ErrorCode::IoFailure:
      return ErrorCategory::Config;
    case ErrorCode::QuadratureNotConverged:
    case ErrorCode::CflViolation:
    case ErrorCode::CollisionMargin:
    case ErrorCode::PoissonDiverged:
    case ErrorCode::NodeEscapedDomain:
    case ErrorCode::NewtonStalled:
    case ErrorCode::SingularJacobian:
      return ErrorCategory::Numerical;
    case ErrorCode::InadmissibleTestField:
    case ErrorCode::MarginsOverlap:
    case ErrorCode::DominationViolated:
    case ErrorCode::InvariantViolated:
      return ErrorCategory::Invariant;
  }
  return ErrorCategory::Numerical;
}

}  // namespace rigidflow
