#include "randopt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "detail/grid.hpp"
#include "detail/parallel.hpp"
#include "detail/sampling.hpp"
#include "randopt/errors.hpp"

namespace randopt {

const char* to_string(Definiteness d) noexcept {
  switch (d) {
    case Definiteness::PD:
      return "PD";
    case Definiteness::PSD_degenerate:
      return "PSD_degenerate";
    case Definiteness::Indefinite:
      return "indefinite";
    case Definiteness::ND:
      return "ND";
    case Definiteness::NSD_degenerate:
      return "NSD_degenerate";
  }
  return "?";
}

namespace {

void require_symmetric(const Matrix& h) {
  if (h.size() == 0) throw NotSymmetric("empty matrix");
  if (!(h.max_asymmetry() <= 1e-9)) throw NotSymmetric("matrix is not symmetric within 1e-9");
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool lex_less(const Point& a, const Point& b) { return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()); }

// Sylvester on sign * H.
bool sylvester_definite(const std::vector<double>& minors, double scale, double tol_rel, double sign) {
  double threshold = tol_rel;
  double s = 1.0;
  for (double delta : minors) {
    threshold *= scale;
    s *= sign;
    if (!(s * delta > threshold)) return false;
  }
  return true;
}

}  // namespace

std::vector<double> leading_principal_minors(const Matrix& h) {
  require_symmetric(h);
  std::vector<double> minors(h.size());
  for (std::size_t k = 1; k <= h.size(); ++k) minors[k - 1] = determinant(h.leading(k));
  return minors;
}

bool sylvester_positive_definite(const Matrix& h, double tol_rel) {
  const auto minors = leading_principal_minors(h);
  return sylvester_definite(minors, 1.0 + h.norm_inf(), tol_rel, 1.0);
}

Definiteness classify_definiteness(const Matrix& h, double tol_rel) {
  const auto minors = leading_principal_minors(h);
  const double scale = 1.0 + h.norm_inf();
  if (sylvester_definite(minors, scale, tol_rel, 1.0)) return Definiteness::PD;
  if (sylvester_definite(minors, scale, tol_rel, -1.0)) return Definiteness::ND;

  const auto eig = symmetric_eigenvalues(h);
  const double tau = tol_rel * scale;
  const double lo = eig.front();
  const double hi = eig.back();
  if (lo < -tau && hi > tau) return Definiteness::Indefinite;
  if (lo >= -tau) return Definiteness::PSD_degenerate;
  return Definiteness::NSD_degenerate;
}

// ---------------------------------------------------------------------------
// Stationary points

namespace {

struct NewtonRun {
  enum class Status { Converged, Singular, Failed } status = Status::Failed;
  Point x;
  double grad_norm = 0.0;
  int iters = 0;
};

NewtonRun newton_from(const RandomFunction& rf, std::size_t omega, Point x, const NewtonOptions& opts) {
  NewtonRun run;
  try {
    auto g = gradient(rf, omega, x);
    double gn = max_norm(g);
    while (gn > opts.tolerance) {
      if (run.iters >= opts.max_iterations) {
        run.status = NewtonRun::Status::Failed;
        return run;
      }
      std::vector<double> rhs(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -g[i];
      auto step = solve(hessian(rf, omega, x), rhs);
      if (!step) {
        run.status = NewtonRun::Status::Singular;
        return run;
      }
      bool accepted = false;
      double t = 1.0;
      for (int halving = 0; halving < 30 && !accepted; ++halving, t *= 0.5) {
        Point trial = x;
        for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += t * (*step)[i];
        try {
          auto gt = gradient(rf, omega, trial);
          const double gtn = max_norm(gt);
          if (gtn < gn) {
            x = std::move(trial);
            g = std::move(gt);
            gn = gtn;
            accepted = true;
          }
        } catch (const EvalError&) {
        }
      }
      if (!accepted) {
        run.status = NewtonRun::Status::Failed;
        return run;
      }
      ++run.iters;
    }

    // Keep taking full Newton steps while they still shrink the gradient, so
    // slowly converging (degenerate) roots end up far below the tolerance.
    while (run.iters < opts.max_iterations && gn > 0.0) {
      std::vector<double> rhs(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -g[i];
      auto step = solve(hessian(rf, omega, x), rhs);
      if (!step) break;
      Point trial = x;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += (*step)[i];
      auto gt = gradient(rf, omega, trial);
      const double gtn = max_norm(gt);
      if (!(gtn < gn)) break;
      x = std::move(trial);
      g = std::move(gt);
      gn = gtn;
      ++run.iters;
    }
    run.status = NewtonRun::Status::Converged;
    run.x = std::move(x);
    run.grad_norm = gn;
  } catch (const EvalError&) {
    run.status = NewtonRun::Status::Failed;
  }
  return run;
}

}  // namespace

std::vector<Point> grid_points(const Box& box, int m) {
  box.validate();
  std::vector<Point> pts;
  detail::for_each_grid_point(box, m, [&](const Point& x) { pts.push_back(x); });
  return pts;
}

StationaryResult find_stationary_points(const RandomFunction& rf, std::size_t omega, const Box& region,
                                        const NewtonOptions& opts) {
  region.validate();
  if (static_cast<int>(region.dimension()) != rf.dimension()) {
    throw DimensionError("search region dimension does not match the function");
  }
  const auto starts = grid_points(region, opts.grid);
  std::vector<NewtonRun> runs(starts.size());
  detail::parallel_for(starts.size(), [&](std::size_t i) { runs[i] = newton_from(rf, omega, starts[i], opts); });

  StationaryResult result;
  result.diagnostics.starts = static_cast<int>(starts.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < region.dimension(); ++i) scale = std::max(scale, region.upper[i] - region.lower[i]);
  const double slack = 1e-12 * (1.0 + scale);

  std::vector<NewtonRun> converged;
  for (auto& run : runs) {
    switch (run.status) {
      case NewtonRun::Status::Singular:
        ++result.diagnostics.singular_starts;
        break;
      case NewtonRun::Status::Failed:
        ++result.diagnostics.failed_starts;
        break;
      case NewtonRun::Status::Converged:
        if (region.contains(run.x, slack)) {
          converged.push_back(std::move(run));
        } else {
          ++result.diagnostics.outside_region;
        }
        break;
    }
  }
  std::stable_sort(converged.begin(), converged.end(), [](const NewtonRun& a, const NewtonRun& b) {
    if (a.x != b.x) return lex_less(a.x, b.x);
    return a.grad_norm < b.grad_norm;
  });

  std::vector<NewtonRun> kept;
  for (auto& run : converged) {
    auto near = std::find_if(kept.begin(), kept.end(), [&](const NewtonRun& k) {
      double d = 0.0;
      for (std::size_t i = 0; i < k.x.size(); ++i) d = std::max(d, std::abs(k.x[i] - run.x[i]));
      return d <= opts.dedup_radius;
    });
    if (near == kept.end()) {
      kept.push_back(std::move(run));
    } else if (run.grad_norm < near->grad_norm) {
      *near = std::move(run);
    }
  }
  std::sort(kept.begin(), kept.end(), [](const NewtonRun& a, const NewtonRun& b) { return lex_less(a.x, b.x); });

  for (auto& run : kept) {
    StationaryPoint sp;
    sp.omega = omega;
    sp.x = std::move(run.x);
    sp.grad_norm = run.grad_norm;
    sp.newton_iters = run.iters;
    const Matrix h = hessian(rf, omega, sp.x);
    sp.minors = leading_principal_minors(h);
    sp.classification = classify_definiteness(h, opts.definiteness_tol);
    result.points.push_back(std::move(sp));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Local minimality

namespace {

bool hessian_pd_at(const RandomFunction& rf, std::size_t omega, const Point& x, double tol) {
  try {
    return sylvester_positive_definite(hessian(rf, omega, x), tol);
  } catch (const EvalError&) {
    return false;
  }
}

bool ball_is_pd(const RandomFunction& rf, std::size_t omega, std::span<const double> center, double radius,
                detail::Sampler& rng, double tol) {
  const std::size_t n = center.size();
  const Point c(center.begin(), center.end());
  if (!hessian_pd_at(rf, omega, c, tol)) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (double s : {-1.0, 1.0}) {
      Point p = c;
      p[i] += s * radius;
      if (!hessian_pd_at(rf, omega, p, tol)) return false;
    }
  }
  for (std::size_t k = 0; k + 1 < 6 * n; ++k) {
    const auto d = rng.direction(n);
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
    Point p = c;
    for (std::size_t i = 0; i < n; ++i) p[i] += r * d[i];
    if (!hessian_pd_at(rf, omega, p, tol)) return false;
  }
  return true;
}

}  // namespace

std::variant<LocalMinCertificate, LocalMinFailure> verify_local_min(const RandomFunction& rf, std::size_t omega,
                                                                    std::span<const double> x,
                                                                    const VerifyOptions& opts) {
  const std::size_t n = x.size();
  if (static_cast<int>(n) != rf.dimension()) throw DimensionError("point dimension does not match the function");
  const double gn = max_norm(gradient(rf, omega, x));
  if (!(gn <= 1e-8)) throw NotStationary("gradient max norm " + std::to_string(gn) + " exceeds 1e-8");

  const Point base(x.begin(), x.end());
  const double fx = eval_f(rf, omega, base);
  const int samples = static_cast<int>(200 * n);
  detail::Sampler ball_rng(opts.seed, 2 * omega);
  detail::Sampler rng(opts.seed, 2 * omega + 1);

  // Displacement samples at radii delta, delta/2, ..., delta/1024. Returns a
  // descent witness, or the smallest margin seen.
  auto sample_ball = [&](double delta) -> std::variant<double, LocalMinFailure> {
    double min_margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
      const auto dir = rng.direction(n);
      const double r = std::ldexp(delta, -(s % 11));
      Point d(n);
      Point y = base;
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = r * dir[i];
        y[i] += d[i];
      }
      double margin;
      try {
        margin = eval_f(rf, omega, y) - fx;
      } catch (const EvalError&) {
        margin = -std::numeric_limits<double>::infinity();
      }
      if (margin < -1e-12) return LocalMinFailure{omega, base, std::move(d), margin};
      min_margin = std::min(min_margin, margin);
    }
    return min_margin;
  };

  // The PD test on a ball is sampled. A descent witness inside a ball that
  // passed it proves the ball is not PD after all (on a PD ball the Taylor
  // argument rules descent out), so the search keeps halving.
  std::optional<LocalMinFailure> witness;
  double delta = opts.initial_radius;
  for (int h = 0; h <= opts.max_halvings; ++h, delta *= 0.5) {
    if (!ball_is_pd(rf, omega, x, delta, ball_rng, opts.definiteness_tol)) continue;
    auto result = sample_ball(delta);
    if (const double* margin = std::get_if<double>(&result)) {
      return LocalMinCertificate{omega, base, delta, samples, *margin};
    }
    if (!witness) witness = std::get<LocalMinFailure>(std::move(result));
  }
  if (witness) return *witness;

  auto result = sample_ball(opts.initial_radius);
  if (auto* failure = std::get_if<LocalMinFailure>(&result)) return std::move(*failure);
  throw NoRadiusFound("Hessian is not positive definite on any ball of radius >= " +
                      std::to_string(std::ldexp(opts.initial_radius, -opts.max_halvings)));
}

// ---------------------------------------------------------------------------
// Global minimization on compact sets

Point polish_minimum(const RandomFunction& rf, std::size_t omega, Point x, const Box& box, int max_iterations,
                     double tolerance) {
  auto project = [&](Point& p) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], box.lower[i], box.upper[i]);
  };
  project(x);
  double fx = eval_f(rf, omega, x);
  for (int it = 0; it < max_iterations; ++it) {
    const auto g = gradient(rf, omega, x);
    if (max_norm(g) <= tolerance) break;

    std::vector<double> step(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) step[i] = -g[i];
    const Matrix h = hessian(rf, omega, x);
    if (sylvester_positive_definite(h)) {
      if (auto s = solve(h, step)) step = std::move(*s);
    }

    bool accepted = false;
    double t = 1.0;
    Point trial;
    double ft = 0.0;
    for (int k = 0; k < 60 && !accepted; ++k, t *= 0.5) {
      trial = x;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += t * step[i];
      project(trial);
      double predicted = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) predicted += g[i] * (trial[i] - x[i]);
      try {
        ft = eval_f(rf, omega, trial);
      } catch (const EvalError&) {
        continue;
      }
      accepted = predicted < 0.0 && ft <= fx + 1e-4 * predicted;
    }
    if (!accepted || trial == x) break;
    x = std::move(trial);
    fx = ft;
  }
  return x;
}

GlobalMin global_min_compact(const RandomFunction& rf, std::size_t omega, const SetDescription& set, int m,
                             bool polish) {
  GlobalMin best;
  bool have = false;
  auto consider = [&](const Point& x) {
    double v;
    try {
      v = eval_f(rf, omega, x);
    } catch (const EvalError&) {
      ++best.excluded;
      return;
    }
    if (!have || v < best.grid_value || (v == best.grid_value && lex_less(x, best.grid_x))) {
      best.grid_x = x;
      best.grid_value = v;
      have = true;
    }
  };

  if (const auto* box = std::get_if<Box>(&set)) {
    box->validate();
    if (static_cast<int>(box->dimension()) != rf.dimension()) throw DimensionError("box dimension mismatch");
    detail::for_each_grid_point(*box, m, consider);
  } else if (const auto* cloud = std::get_if<PointCloud>(&set)) {
    if (cloud->points.empty()) throw EmptyFeasible(omega, "feasible point cloud is empty");
    for (const auto& p : cloud->points) consider(p);
  } else if (std::holds_alternative<EmptySetDesc>(set)) {
    throw EmptyFeasible(omega, "feasible set is empty");
  } else {
    throw IncompatibleRepresentation("global minimization needs a box or a point cloud");
  }
  if (!have) throw EvalError(EvalError::Kind::DomainViolation, "f is undefined at every candidate point");

  best.x = best.grid_x;
  best.value = best.grid_value;
  if (polish) {
    if (const auto* box = std::get_if<Box>(&set)) {
      try {
        Point p = polish_minimum(rf, omega, best.grid_x, *box);
        const double v = eval_f(rf, omega, p);
        if (v < best.value) {
          best.x = std::move(p);
          best.value = v;
          best.polished = true;
        }
      } catch (const EvalError&) {
      }
    }
  }
  return best;
}

OptimalValue optimal_value(const RandomFunction& rf, const RandomSet& c, int m, bool polish) {
  c.validate();
  if (!same_space(rf.space(), c.space)) throw DomainMismatch("function and feasible set live on different spaces");
  if (c.dimension != rf.dimension()) throw DimensionError("feasible set dimension does not match the function");
  for (std::size_t s = 0; s < c.sets.size(); ++s) {
    if (c.empty_at(s)) throw EmptyFeasible(s, "feasible set is empty for scenario " + std::to_string(rf.space()->id(s)));
  }

  OptimalValue out;
  out.per_scenario.resize(c.sets.size());
  detail::parallel_for(c.sets.size(),
                       [&](std::size_t s) { out.per_scenario[s] = global_min_compact(rf, s, c.sets[s], m, polish); });
  out.eta.space = rf.space();
  for (const auto& g : out.per_scenario) out.eta.values.push_back({g.value});
  out.verdict = is_measurable_rv(*rf.space(), out.eta, 1e-9);
  return out;
}

}  // namespace randopt
