#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbundle {

enum class ErrorCode {
  UnsupportedDegree,
  DivisionByZero,
  ContextMismatch,
  NoEmbedding,
  ParseError,
  UnknownVariable,
  TooManyVariables,
  NotDivisible,
  UnluckySpecializationExhausted,
  DegreeMismatch,
  AllZero,
  NotFlat,
  NotGenericallySmooth,
  PositiveDimensional,
  ExtensionBound,
  NotSquarefree,
  CommonComponent,
  BezoutMismatch,
  NotOnCurve,
  FiberNotDegenerate,
  UnreducedParametrization,
  NotSingularHere,
  FactorizationMismatch,
  NotAbsolutelyIrreducible,
  NotAComponent,
  ZeroEquation,
  EliminationFailed,
  InvalidInput,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Every failure raised by the library. The code is what callers branch on;
/// the message carries the offending object in printed form.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace cbundle
