#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "randopt/verdict.hpp"

namespace randopt {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input validation ----------------------------------------------------------

class WeightSumError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

class DomainMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class IncompatibleRepresentation : public Error {
 public:
  using Error::Error;
};

/// Expression text could not be parsed. `offset` is a byte offset into the
/// source; `expected` lists the tokens that would have been accepted there.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
      : Error(what), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class EvalError : public Error {
 public:
  enum class Kind { DomainViolation, DivByZero };

  EvalError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Numerical search ------------------------------------------------------------

/// The Hessian never became positive definite on a shrinking ball around x.
class NoRadiusFound : public Error {
 public:
  using Error::Error;
};

class NotStationary : public Error {
 public:
  using Error::Error;
};

class EmptyFeasible : public Error {
 public:
  EmptyFeasible(std::size_t scenario, const std::string& what) : Error(what), scenario_(scenario) {}
  std::size_t scenario() const noexcept { return scenario_; }

 private:
  std::size_t scenario_;
};

class EmptySet : public Error {
 public:
  EmptySet(std::size_t scenario, const std::string& what) : Error(what), scenario_(scenario) {}
  std::size_t scenario() const noexcept { return scenario_; }

 private:
  std::size_t scenario_;
};

// Theorem hypotheses ------------------------------------------------------------

/// Raised when a solver refuses to run because a measurability hypothesis
/// of the existence result it realizes does not hold.
class HypothesisViolation : public Error {
 public:
  enum class Kind { NonMeasurableF, NonMeasurableEta, NonMeasurableSet };

  HypothesisViolation(Kind kind, std::optional<Witness> witness, const std::string& what)
      : Error(what), kind_(kind), witness_(std::move(witness)) {}
  Kind kind() const noexcept { return kind_; }
  const std::optional<Witness>& witness() const noexcept { return witness_; }

 private:
  Kind kind_;
  std::optional<Witness> witness_;
};

/// The problem is well posed but has no solution of the requested kind.
class NoSolution : public Error {
 public:
  enum class Kind { NoDeterministicSolution, NoStationaryPoints, NoPDStationaryPoint, VerificationFailed };

  NoSolution(Kind kind, std::vector<std::size_t> scenarios, const std::string& what)
      : Error(what), kind_(kind), scenarios_(std::move(scenarios)) {}

  Kind kind() const noexcept { return kind_; }
  /// Scenario indices (atom members or representatives) that lack a solution.
  const std::vector<std::size_t>& scenarios() const noexcept { return scenarios_; }

 private:
  Kind kind_;
  std::vector<std::size_t> scenarios_;
};

const char* to_string(EvalError::Kind kind) noexcept;
const char* to_string(HypothesisViolation::Kind kind) noexcept;
const char* to_string(NoSolution::Kind kind) noexcept;

}  // namespace randopt
