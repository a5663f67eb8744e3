#include "randopt/errors.hpp"

namespace randopt {

const char* to_string(EvalError::Kind kind) noexcept {
  switch (kind) {
    case EvalError::Kind::DomainViolation:
      return "DomainViolation";
    case EvalError::Kind::DivByZero:
      return "DivByZero";
  }
  return "?";
}

const char* to_string(HypothesisViolation::Kind kind) noexcept {
  switch (kind) {
    case HypothesisViolation::Kind::NonMeasurableF:
      return "NonMeasurableF";
    case HypothesisViolation::Kind::NonMeasurableEta:
      return "NonMeasurableEta";
    case HypothesisViolation::Kind::NonMeasurableSet:
      return "NonMeasurableSet";
  }
  return "?";
}

const char* to_string(NoSolution::Kind kind) noexcept {
  switch (kind) {
    case NoSolution::Kind::NoDeterministicSolution:
      return "NoDeterministicSolution";
    case NoSolution::Kind::NoStationaryPoints:
      return "NoStationaryPoints";
    case NoSolution::Kind::NoPDStationaryPoint:
      return "NoPDStationaryPoint";
    case NoSolution::Kind::VerificationFailed:
      return "VerificationFailed";
  }
  return "?";
}

}  // namespace randopt
