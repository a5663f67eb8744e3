#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "randopt/linalg.hpp"
#include "randopt/random_function.hpp"

namespace randopt {

enum class Definiteness { PD, PSD_degenerate, Indefinite, ND, NSD_degenerate };

const char* to_string(Definiteness d) noexcept;

/// Delta_k = det of the top-left k-by-k block, k = 1..n.
/// Throws NotSymmetric if H is not symmetric within 1e-9.
std::vector<double> leading_principal_minors(const Matrix& h);

inline constexpr double kDefaultDefinitenessTol = 1e-10;

/// PD is decided by Sylvester's criterion: Delta_k > tol_rel * (1 + ||H||_inf)^k
/// for every k (ND likewise on -H). The remaining classes come from Jacobi
/// eigenvalues against tau_e = tol_rel * (1 + ||H||_inf). A matrix whose
/// spectrum lies entirely in [-tau_e, tau_e] is reported PSD_degenerate.
Definiteness classify_definiteness(const Matrix& h, double tol_rel = kDefaultDefinitenessTol);

/// Just the Sylvester test used by classify_definiteness.
bool sylvester_positive_definite(const Matrix& h, double tol_rel = kDefaultDefinitenessTol);

struct StationaryPoint {
  std::size_t omega = 0;
  Point x;
  double grad_norm = 0.0;  // max norm of g(omega, x)
  std::vector<double> minors;
  Definiteness classification = Definiteness::Indefinite;
  int newton_iters = 0;
};

struct NewtonOptions {
  int grid = 9;                     // starts per dimension
  double tolerance = 1e-10;         // convergence: ||g||_inf <= tolerance
  int max_iterations = 100;
  double dedup_radius = 1e-6;
  double definiteness_tol = kDefaultDefinitenessTol;
};

struct StationaryDiagnostics {
  int starts = 0;
  int singular_starts = 0;   // singular Hessian before convergence
  int failed_starts = 0;     // no convergence / evaluation failure
  int outside_region = 0;
};

struct StationaryResult {
  std::vector<StationaryPoint> points;  // sorted lexicographically
  StationaryDiagnostics diagnostics;
};

/// Multistart damped Newton on g(omega, .) = 0 from an m-per-dimension grid.
StationaryResult find_stationary_points(const RandomFunction& rf, std::size_t omega, const Box& region,
                                        const NewtonOptions& opts = {});

struct LocalMinCertificate {
  std::size_t omega = 0;
  Point x;
  double delta = 0.0;  // radius on which the Hessian was found PD
  int samples_checked = 0;
  double min_margin = 0.0;  // min over samples of f(x + d) - f(x)
};

struct LocalMinFailure {
  std::size_t omega = 0;
  Point x;
  Point direction;  // witness d with f(x + d) < f(x) - 1e-12
  double margin = 0.0;
};

struct VerifyOptions {
  double initial_radius = 1.0;
  int max_halvings = 40;
  std::uint64_t seed = 0;
  double definiteness_tol = kDefaultDefinitenessTol;
};

/// Certifies local minimality of a stationary point: finds a radius on which
/// the Hessian is PD at 8n sample points, then checks 200n sampled
/// displacements against f(x + d) >= f(x) - 1e-12.
///
/// A descent witness inside a ball that passed the (sampled) PD test shows
/// the test was fooled; the search then continues with half the radius. If no
/// radius is certified, the first such witness is returned as LocalMinFailure;
/// failing that, the displacement samples run at the initial radius and yield
/// a witness or NoRadiusFound. Throws NotStationary if ||g(x)||_inf > 1e-8.
std::variant<LocalMinCertificate, LocalMinFailure> verify_local_min(const RandomFunction& rf, std::size_t omega,
                                                                    std::span<const double> x,
                                                                    const VerifyOptions& opts = {});

/// Points of an m-per-dimension grid over `box`, lexicographic order with the
/// first coordinate most significant. Endpoints are hit exactly.
std::vector<Point> grid_points(const Box& box, int m);

struct GlobalMin {
  Point x;
  double value = 0.0;
  Point grid_x;             // unpolished grid argmin (the oracle answer)
  double grid_value = 0.0;
  int excluded = 0;         // grid points where f could not be evaluated
  bool polished = false;   // polishing moved x to a strictly better value
};

/// Exhaustive minimization over a Box grid or a PointCloud. Ties go to the
/// lexicographically smallest point. With `polish`, a projected Newton/gradient
/// descent refines the grid argmin inside the box.
GlobalMin global_min_compact(const RandomFunction& rf, std::size_t omega, const SetDescription& set, int m,
                             bool polish = false);

/// Descent from x towards a local minimizer inside `box` (Newton steps when
/// the Hessian is PD, gradient steps otherwise, Armijo backtracking on f,
/// projection onto the box).
Point polish_minimum(const RandomFunction& rf, std::size_t omega, Point x, const Box& box,
                     int max_iterations = 200, double tolerance = 1e-10);

struct OptimalValue {
  RandomVariableRn eta;
  Verdict verdict;
  std::vector<GlobalMin> per_scenario;
};

/// eta(omega) = min over C(omega) of f(omega, .), per scenario, plus the
/// measurability verdict of eta (tol 1e-9). Throws EmptyFeasible.
OptimalValue optimal_value(const RandomFunction& rf, const RandomSet& c, int m, bool polish = false);

}  // namespace randopt
