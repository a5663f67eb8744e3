#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "randopt/optimize.hpp"
#include "randopt/probspace.hpp"
#include "randopt/random_function.hpp"

namespace randopt {

/// xi(omega) attains the optimal value eta(omega) over the feasible set.
struct GlobalCert {
  double value = 0.0;
  std::optional<LocalMinCertificate> local;  // set on the convex RLOP path
};

/// Only the first/second-order necessary conditions were checked.
struct NecessaryOnly {};

using Certificate = std::variant<GlobalCert, LocalMinCertificate, NecessaryOnly>;

/// A candidate solution xi: scenario -> R^n with its measurability verdict.
/// A deterministic solution that is also measurable is a random solution.
struct Selection {
  SpacePtr space;
  std::vector<Point> points;  // indexed by scenario
  Verdict measurable;
  std::vector<Certificate> certificates;  // indexed by scenario
  /// Set by canonical_select when the input set map was not measurable.
  bool non_measurable_input = false;
  std::optional<Witness> input_witness;

  RandomVariableRn as_random_variable() const { return {space, points}; }
};

/// Lexicographically smallest point of every M(omega). M must be given as
/// point clouds. Throws EmptySet; a non-measurable M is flagged, not rejected.
Selection canonical_select(const RandomSet& m);

struct SolveOptions {
  int grid = 101;               // grid points per dimension
  double eq_tol = 1e-9;         // |f - eta| tolerance for the random equation
  bool polish = false;
  NewtonOptions newton{};
  VerifyOptions verify{};
  std::optional<std::vector<Point>> probes;  // overrides the default probe grid
};

/// Solves f(omega, x) = eta(omega) for x in `region`, one representative
/// scenario per atom, picking the lexicographically smallest root and
/// broadcasting it over the atom. Throws HypothesisViolation if eta or f is not
/// measurable, NoSolution(NoDeterministicSolution) if some atom has no root.
Selection solve_random_equation(const RandomFunction& rf, const RandomVariableRn& eta, const Box& region,
                                const SolveOptions& opts = {});

struct RopResult {
  Selection selection;
  OptimalValue optimal;
};

/// Global random optimization over a measurable compact random set C:
/// eta = optimal value, then xi from the random equation f = eta restricted
/// to C(omega).
RopResult solve_rop(const RandomFunction& rf, const RandomSet& c, const SolveOptions& opts = {});

struct RlopAtomReport {
  std::size_t atom = 0;
  std::size_t representative = 0;
  std::vector<StationaryPoint> stationary;
  StationaryDiagnostics diagnostics;
};

struct RlopResult {
  Selection selection;
  bool convex = false;  // Hessian PSD at every probe point of the region
  std::vector<RlopAtomReport> atoms;
};

/// Local random optimization: per atom, stationary points -> PD filter ->
/// lexicographic selection -> local-min certificate. Throws
/// NoSolution(NoStationaryPoints | NoPDStationaryPoint | VerificationFailed)
/// or HypothesisViolation(NonMeasurableF).
RlopResult solve_rlop(const RandomFunction& rf, const Box& region, const SolveOptions& opts = {});

struct NecessaryCheck {
  bool grad_ok = false;
  bool psd_ok = false;
  double grad_norm = 0.0;
  Definiteness classification = Definiteness::Indefinite;
};

struct NecessaryReport {
  std::vector<NecessaryCheck> scenarios;
  Verdict measurable;

  bool all_ok() const;
};

/// grad_ok iff ||g(omega, xi(omega))||_inf <= 1e-8; psd_ok iff the Hessian
/// classifies as PD or PSD_degenerate. Also reports whether xi is measurable.
NecessaryReport check_necessary_conditions(const RandomFunction& rf, const RandomVariableRn& xi);

}  // namespace randopt
