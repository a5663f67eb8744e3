#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "randopt/verdict.hpp"

namespace randopt {

using ScenarioId = std::int64_t;

/// A finite probability space (Omega, F, P). F is the sigma-algebra
/// generated by a partition of Omega into atoms; an event is a union of atoms.
///
/// Scenarios are addressed by their position in `scenarios()` throughout the
/// library; identifiers are only used at the I/O boundary.
class ProbSpace {
 public:
  /// Validates and builds a space. Atoms are stored sorted by their smallest
  /// scenario id, members of each atom sorted by id.
  /// Throws WeightSumError or PartitionError.
  static std::shared_ptr<const ProbSpace> make(std::vector<ScenarioId> ids, std::vector<double> weights,
                                               const std::vector<std::vector<ScenarioId>>& atoms);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<ScenarioId>& scenarios() const noexcept { return ids_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Atoms as lists of scenario indices.
  const std::vector<std::vector<std::size_t>>& atoms() const noexcept { return atoms_; }
  std::size_t atom_of(std::size_t scenario) const { return atom_of_.at(scenario); }

  ScenarioId id(std::size_t scenario) const { return ids_.at(scenario); }
  /// Index of a scenario id; nullopt if unknown.
  std::optional<std::size_t> index_of(ScenarioId id) const;

  /// True iff every atom is a singleton (F is the power set).
  bool is_powerset() const noexcept { return atoms_.size() == ids_.size(); }

  friend bool operator==(const ProbSpace& a, const ProbSpace& b) {
    return a.ids_ == b.ids_ && a.weights_ == b.weights_ && a.atoms_ == b.atoms_;
  }

 private:
  ProbSpace() = default;

  std::vector<ScenarioId> ids_;
  std::vector<double> weights_;
  std::vector<std::vector<std::size_t>> atoms_;
  std::vector<std::size_t> atom_of_;
};

using SpacePtr = std::shared_ptr<const ProbSpace>;

bool same_space(const SpacePtr& a, const SpacePtr& b);

/// An R^n-valued mapping on the scenarios of a space (n = 1 for real-valued
/// random variables).
struct RandomVariableRn {
  SpacePtr space;
  std::vector<Point> values;  // indexed by scenario

  /// Throws DomainMismatch unless there is one value per scenario, all of the
  /// same nonzero dimension.
  void validate() const;
  std::size_t dimension() const { return values.empty() ? 0 : values.front().size(); }
};

/// xi is F-measurable iff it is constant (within `tol` in the max norm) on
/// every atom. Throws DomainMismatch if xi lives on another space.
Verdict is_measurable_rv(const ProbSpace& space, const RandomVariableRn& xi, double tol = 0.0);

}  // namespace randopt
