#include "preyswitch/error.hpp"

namespace preyswitch {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::DegenerateTau: return "DegenerateTau";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::TangencyDenominator: return "TangencyDenominator";
    case ErrorKind::PoleError: return "PoleError";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::ChatteringGuard: return "ChatteringGuard";
    case ErrorKind::NoReturn: return "NoReturn";
    case ErrorKind::TangencyAmbiguity: return "TangencyAmbiguity";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::MultipleRoots: return "MultipleRoots";
    case ErrorKind::SameSign: return "SameSign";
    case ErrorKind::Lemma2Violation: return "Lemma2Violation";
    case ErrorKind::VerificationFailure: return "VerificationFailure";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::IdentityInfeasible: return "IdentityInfeasible";
    case ErrorKind::InequalityViolated: return "InequalityViolated";
    case ErrorKind::OrbitEscaped: return "OrbitEscaped";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace preyswitch
