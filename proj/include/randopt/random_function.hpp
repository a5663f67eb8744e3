#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "randopt/expr.hpp"
#include "randopt/linalg.hpp"
#include "randopt/probspace.hpp"

namespace randopt {

/// f(omega, x) given by one expression over x1..xn and per-scenario
/// parameter vectors p(omega). Gradient and Hessian expressions are derived
/// symbolically once, at construction.
class RandomFunction {
 public:
  /// Throws DomainMismatch if `params` does not give one k-vector per scenario.
  RandomFunction(SpacePtr space, Expression body, std::vector<Point> params);

  const SpacePtr& space() const noexcept { return space_; }
  const Expression& body() const noexcept { return body_; }
  int dimension() const noexcept { return body_.num_vars(); }
  const std::vector<Point>& params() const noexcept { return params_; }
  const Point& params(std::size_t scenario) const { return params_.at(scenario); }

  const Expression& gradient_expr(int i) const { return gradient_.at(i); }
  /// d/dx_j (d/dx_i f), before symmetrization.
  const Expression& hessian_expr(int i, int j) const { return hessian_.at(i * dimension() + j); }

  /// Returns a function with body a*f + b (same space and parameters).
  RandomFunction affine(double a, double b) const;

 private:
  SpacePtr space_;
  Expression body_;
  std::vector<Point> params_;
  std::vector<Expression> gradient_;
  std::vector<Expression> hessian_;
};

double eval_f(const RandomFunction& rf, std::size_t omega, std::span<const double> x);
std::vector<double> gradient(const RandomFunction& rf, std::size_t omega, std::span<const double> x);
/// Symmetrized by averaging the (i,j) and (j,i) symbolic entries.
Matrix hessian(const RandomFunction& rf, std::size_t omega, std::span<const double> x);
/// The symbolic Hessian entries as derived, without symmetrization.
Matrix hessian_unsymmetrized(const RandomFunction& rf, std::size_t omega, std::span<const double> x);

struct FdReport {
  double max_gradient_abs = 0.0;
  double max_gradient_rel = 0.0;
  double max_hessian_abs = 0.0;
  double max_hessian_rel = 0.0;
  bool pass = true;
};

/// Entry-wise agreement used by fd_check: relative error <= 1e-6, or absolute
/// error <= 1e-8 near zero.
bool fd_entry_ok(double symbolic, double numeric);

/// Compares the symbolic gradient with central differences of f, and the
/// symbolic Hessian with central differences of the gradient, step h.
FdReport fd_check(const RandomFunction& rf, std::size_t omega, std::span<const double> x, double h = 1e-5);

/// Compact axis-aligned box, lower <= upper componentwise.
struct Box {
  Point lower;
  Point upper;

  std::size_t dimension() const { return lower.size(); }
  bool contains(std::span<const double> x, double slack = 0.0) const;
  Point center() const;
  /// Throws DimensionError/IncompatibleRepresentation on malformed boxes.
  void validate() const;
  friend bool operator==(const Box&, const Box&) = default;
};

struct PointCloud {
  std::vector<Point> points;
};

/// One equation e(x, p) = 0 of a level set, with its parameter vector bound.
struct Constraint {
  Expression expr;
  Point params;
};

/// {x in bounds : every constraint vanishes}.
struct LevelSet {
  std::vector<Constraint> constraints;
  Box bounds;
};

/// Result of an intersection with no common points.
struct EmptySetDesc {};

using SetDescription = std::variant<Box, PointCloud, LevelSet, EmptySetDesc>;

/// Set-valued map omega -> C(omega) in R^n.
struct RandomSet {
  SpacePtr space;
  int dimension = 0;
  std::vector<SetDescription> sets;  // indexed by scenario

  /// Same description for every scenario.
  static RandomSet constant(SpacePtr space, int dimension, const SetDescription& set);
  /// Throws DomainMismatch / IncompatibleRepresentation on malformed data.
  void validate() const;
  bool empty_at(std::size_t omega) const { return std::holds_alternative<EmptySetDesc>(sets.at(omega)); }
};

/// Tolerance used when testing whether a point lies on a level set.
inline constexpr double kLevelSetTol = 1e-9;

bool set_contains(const SetDescription& set, std::span<const double> x);
/// A box enclosing the set (nullopt for the empty set).
std::optional<Box> bounding_box(const SetDescription& set);

/// Finite-scale graph measurability: C is measurable iff its description is
/// the same (within tol) on every scenario of each atom. Boxes compare
/// corner-wise, point sets by Hausdorff distance, level sets structurally
/// after substituting parameters.
Verdict is_measurable_setmap(const ProbSpace& space, const RandomSet& c, double tol = 0.0);

/// Per-scenario intersection. Box&Box -> Box, PointCloud&any -> filtered
/// PointCloud, LevelSet&LevelSet -> merged constraints, LevelSet&Box -> LevelSet
/// with tightened bounds. Empty results are recorded as EmptySetDesc.
RandomSet intersect_setmaps(std::span<const RandomSet> maps);

/// Pairs (scenario, point) of the probe grid that lie in C(scenario).
using GraphSample = std::vector<std::pair<std::size_t, Point>>;
GraphSample sample_graph(const RandomSet& c, std::span<const Point> probes);

/// Corners and center of `box` plus `extra` Halton points inside it.
std::vector<Point> default_probe_grid(const Box& box, int extra = 32);

/// f is jointly measurable (at finite scale) iff for every probe x,
/// f(., x) is exactly constant on every atom.
Verdict check_joint_measurability(const RandomFunction& rf, std::span<const Point> probes);

}  // namespace randopt
