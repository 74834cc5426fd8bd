#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace preyswitch {

/// Failure categories. The CLI prints the kind name on stderr, so the
/// enumerator spelling is part of the external interface.
enum class ErrorKind {
  ConstraintViolation,
  DegenerateTau,
  DomainError,
  TangencyDenominator,
  PoleError,
  StepFailure,
  BlowUp,
  ChatteringGuard,
  NoReturn,
  TangencyAmbiguity,
  NoBracket,
  MultipleRoots,
  SameSign,
  Lemma2Violation,
  VerificationFailure,
  PreconditionViolation,
  IdentityInfeasible,
  InequalityViolated,
  OrbitEscaped,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace preyswitch
