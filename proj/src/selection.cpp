#include "randopt/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "detail/grid.hpp"
#include "detail/parallel.hpp"
#include "randopt/errors.hpp"

namespace randopt {

namespace {

bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string describe(const ProbSpace& space, const Witness& w) {
  std::string s = "scenarios " + std::to_string(space.id(w.first)) + " and " + std::to_string(space.id(w.second)) +
                  " of atom " + std::to_string(w.atom);
  if (!w.detail.empty()) s += ": " + w.detail;
  return s;
}

std::vector<std::size_t> atom_ids(const ProbSpace& space, std::size_t atom) {
  return space.atoms().at(atom);
}

void require_jointly_measurable(const RandomFunction& rf, std::span<const Point> probes) {
  Verdict v = check_joint_measurability(rf, probes);
  if (!v.measurable) {
    const std::string why = describe(*rf.space(), *v.witness);
    throw HypothesisViolation(HypothesisViolation::Kind::NonMeasurableF, v.witness,
                              "f is not jointly measurable (" + why +
                                  "); a measurable random solution is only guaranteed for measurable random functions");
  }
}

struct Candidate {
  Point x;
  double residual;
};

/// Roots of r(x) = f(omega, x) - target inside `box`: exact grid hits, bisection
/// along grid edges with a sign change, and minimum-norm Newton from grid-local
/// minima of |r| (tangential roots). Candidates closer than half a grid step
/// are merged into the one with the smallest residual.
std::vector<Point> roots_in_box(const RandomFunction& rf, std::size_t omega, double target, const Box& box, int m,
                                double tol, const std::vector<Point>& extra) {
  const auto axes = detail::grid_axes(box, m);
  const std::size_t n = axes.size();
  std::vector<std::size_t> dims(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    dims[i] = axes[i].size();
    total *= dims[i];
  }
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n - 1; i > 0; --i) stride[i - 1] = stride[i] * dims[i];

  auto point_at = [&](std::size_t flat) {
    Point x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = axes[i][(flat / stride[i]) % dims[i]];
    return x;
  };
  auto residual = [&](const Point& x) {
    try {
      return eval_f(rf, omega, x) - target;
    } catch (const EvalError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::vector<double> r(total);
  for (std::size_t k = 0; k < total; ++k) r[k] = residual(point_at(k));

  std::vector<Candidate> cands;
  for (const auto& x : extra) {
    const double rx = residual(x);
    if (std::abs(rx) <= tol) cands.push_back({x, std::abs(rx)});
  }

  for (std::size_t k = 0; k < total; ++k) {
    if (std::abs(r[k]) <= tol) cands.push_back({point_at(k), std::abs(r[k])});
  }

  // sign changes along grid edges
  for (std::size_t k = 0; k < total; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((k / stride[i]) % dims[i] + 1 >= dims[i]) continue;
      const std::size_t nb = k + stride[i];
      if (!(std::abs(r[k]) > tol && std::abs(r[nb]) > tol) || !(r[k] * r[nb] < 0.0)) continue;
      Point a = point_at(k);
      Point b = point_at(nb);
      double ra = r[k];
      for (int it = 0; it < 200; ++it) {
        Point mid = a;
        mid[i] = 0.5 * (a[i] + b[i]);
        if (mid[i] == a[i] || mid[i] == b[i]) break;
        const double rm = residual(mid);
        if (std::isnan(rm)) break;
        if (std::abs(rm) <= tol) {
          cands.push_back({mid, std::abs(rm)});
          break;
        }
        if ((rm < 0.0) == (ra < 0.0)) {
          a = mid;
          ra = rm;
        } else {
          b = mid;
        }
      }
    }
  }

  // tangential roots: local minima of |r| that are not hits
  for (std::size_t k = 0; k < total; ++k) {
    const double rk = std::abs(r[k]);
    if (!(rk > tol)) continue;
    bool local_min = true;
    for (std::size_t i = 0; i < n && local_min; ++i) {
      const std::size_t pos = (k / stride[i]) % dims[i];
      if (pos > 0 && !(std::abs(r[k - stride[i]]) > rk)) local_min = std::isnan(r[k - stride[i]]);
      if (pos + 1 < dims[i] && !(std::abs(r[k + stride[i]]) > rk)) local_min = local_min && std::isnan(r[k + stride[i]]);
    }
    if (!local_min) continue;
    Point x = point_at(k);
    double rx = r[k];
    try {
      for (int it = 0; it < 200 && std::abs(rx) > 0.0; ++it) {
        const auto g = gradient(rf, omega, x);
        double gg = 0.0;
        for (double v : g) gg += v * v;
        if (gg == 0.0) break;
        bool improved = false;
        for (double t = 1.0; t > 1e-10 && !improved; t *= 0.5) {
          Point trial = x;
          for (std::size_t i = 0; i < n; ++i) trial[i] -= t * rx * g[i] / gg;
          const double rt = residual(trial);
          if (std::abs(rt) < std::abs(rx)) {
            x = std::move(trial);
            rx = rt;
            improved = true;
          }
        }
        if (!improved) break;
      }
    } catch (const EvalError&) {
      continue;
    }
    if (std::abs(rx) <= tol && box.contains(x)) cands.push_back({x, std::abs(rx)});
  }

  double spacing = std::numeric_limits<double>::infinity();
  for (const auto& axis : axes) {
    if (axis.size() > 1) spacing = std::min(spacing, axis[1] - axis[0]);
  }
  const double radius = std::isfinite(spacing) ? 0.5 * spacing : 0.0;

  std::vector<Point> roots;
  for (const auto& c : cands) {
    const bool dominated = std::any_of(cands.begin(), cands.end(), [&](const Candidate& o) {
      if (!(o.residual < c.residual)) return false;
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(o.x[i] - c.x[i]));
      return d < radius;
    });
    if (!dominated) roots.push_back(c.x);
  }
  std::sort(roots.begin(), roots.end(), lex_less);
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

/// Roots of f(omega, .) = target within one feasible-set description.
std::vector<Point> roots_in_set(const RandomFunction& rf, std::size_t omega, double target, const SetDescription& set,
                                int m, double tol, const std::vector<Point>& extra) {
  if (const auto* box = std::get_if<Box>(&set)) return roots_in_box(rf, omega, target, *box, m, tol, extra);
  if (const auto* cloud = std::get_if<PointCloud>(&set)) {
    std::vector<Point> roots;
    for (const auto& p : cloud->points) {
      try {
        if (std::abs(eval_f(rf, omega, p) - target) <= tol) roots.push_back(p);
      } catch (const EvalError&) {
      }
    }
    std::sort(roots.begin(), roots.end(), lex_less);
    return roots;
  }
  if (std::holds_alternative<EmptySetDesc>(set)) throw EmptyFeasible(omega, "feasible set is empty");
  throw IncompatibleRepresentation("random equations are solved over boxes or point clouds");
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what) {
  if (!same_space(a, b)) throw DomainMismatch(std::string(what) + " lives on a different probability space");
}

}  // namespace

bool NecessaryReport::all_ok() const {
  return std::all_of(scenarios.begin(), scenarios.end(), [](const NecessaryCheck& c) { return c.grad_ok && c.psd_ok; });
}

Selection canonical_select(const RandomSet& m) {
  m.validate();
  Selection sel;
  sel.space = m.space;
  for (std::size_t s = 0; s < m.sets.size(); ++s) {
    if (m.empty_at(s)) throw EmptySet(s, "M is empty for scenario " + std::to_string(m.space->id(s)));
    const auto* cloud = std::get_if<PointCloud>(&m.sets[s]);
    if (!cloud) throw IncompatibleRepresentation("canonical selection needs finite point sets");
    sel.points.push_back(*std::min_element(cloud->points.begin(), cloud->points.end(), lex_less));
  }
  Verdict input = is_measurable_setmap(*m.space, m);
  sel.non_measurable_input = !input.measurable;
  sel.input_witness = input.witness;
  sel.measurable = is_measurable_rv(*m.space, sel.as_random_variable());
  sel.certificates.assign(sel.points.size(), NecessaryOnly{});
  return sel;
}

Selection solve_random_equation(const RandomFunction& rf, const RandomVariableRn& eta, const Box& region,
                                const SolveOptions& opts) {
  eta.validate();
  require_same_space(rf.space(), eta.space, "eta");
  if (eta.dimension() != 1) throw DimensionError("eta must be real valued");
  region.validate();
  if (static_cast<int>(region.dimension()) != rf.dimension()) throw DimensionError("region dimension mismatch");

  const ProbSpace& space = *rf.space();
  Verdict ev = is_measurable_rv(space, eta, 1e-9);
  if (!ev.measurable) {
    throw HypothesisViolation(HypothesisViolation::Kind::NonMeasurableEta, ev.witness,
                              "eta is not a random variable (" + describe(space, *ev.witness) + ")");
  }
  const auto probes = opts.probes ? *opts.probes : default_probe_grid(region);
  require_jointly_measurable(rf, probes);

  const auto& atoms = space.atoms();
  std::vector<std::vector<Point>> roots(atoms.size());
  detail::parallel_for(atoms.size(), [&](std::size_t a) {
    const std::size_t rep = atoms[a].front();
    roots[a] = roots_in_box(rf, rep, eta.values[rep][0], region, opts.grid, opts.eq_tol, {});
  });

  std::vector<std::size_t> missing;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (roots[a].empty()) missing.insert(missing.end(), atoms[a].begin(), atoms[a].end());
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    throw NoSolution(NoSolution::Kind::NoDeterministicSolution, missing,
                     "f(omega, x) = eta(omega) has no solution in the region for " + std::to_string(missing.size()) +
                         " scenario(s)");
  }

  Selection sel;
  sel.space = rf.space();
  sel.points.resize(space.size());
  sel.certificates.resize(space.size());
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    for (std::size_t s : atoms[a]) {
      sel.points[s] = roots[a].front();
      sel.certificates[s] = GlobalCert{eta.values[s][0], std::nullopt};
    }
  }
  sel.measurable = is_measurable_rv(space, sel.as_random_variable());
  return sel;
}

RopResult solve_rop(const RandomFunction& rf, const RandomSet& c, const SolveOptions& opts) {
  c.validate();
  require_same_space(rf.space(), c.space, "feasible set");
  if (c.dimension != rf.dimension()) throw DimensionError("feasible set dimension mismatch");
  const ProbSpace& space = *rf.space();

  Verdict cv = is_measurable_setmap(space, c);
  if (!cv.measurable) {
    throw HypothesisViolation(HypothesisViolation::Kind::NonMeasurableSet, cv.witness,
                              "feasible set map is not measurable (" + describe(space, *cv.witness) + ")");
  }
  for (std::size_t s = 0; s < c.sets.size(); ++s) {
    if (c.empty_at(s)) throw EmptyFeasible(s, "feasible set is empty for scenario " + std::to_string(space.id(s)));
  }

  std::vector<Point> probes;
  if (opts.probes) {
    probes = *opts.probes;
  } else {
    std::optional<Box> hull;
    for (const auto& set : c.sets) {
      auto b = bounding_box(set);
      if (!hull) {
        hull = b;
        continue;
      }
      for (std::size_t i = 0; i < hull->lower.size(); ++i) {
        hull->lower[i] = std::min(hull->lower[i], b->lower[i]);
        hull->upper[i] = std::max(hull->upper[i], b->upper[i]);
      }
    }
    probes = default_probe_grid(*hull);
    for (const auto& set : c.sets) {
      if (const auto* cloud = std::get_if<PointCloud>(&set)) {
        probes.insert(probes.end(), cloud->points.begin(), cloud->points.end());
      }
    }
  }
  require_jointly_measurable(rf, probes);

  RopResult out;
  out.optimal = optimal_value(rf, c, opts.grid, opts.polish);
  if (!out.optimal.verdict.measurable) {
    throw HypothesisViolation(HypothesisViolation::Kind::NonMeasurableEta, out.optimal.verdict.witness,
                              "optimal value is not measurable (" + describe(space, *out.optimal.verdict.witness) +
                                  "); f passed the sampled joint-measurability check but is not measurable");
  }

  const auto& atoms = space.atoms();
  std::vector<std::vector<Point>> roots(atoms.size());
  detail::parallel_for(atoms.size(), [&](std::size_t a) {
    const std::size_t rep = atoms[a].front();
    const auto& best = out.optimal.per_scenario[rep];
    roots[a] = roots_in_set(rf, rep, best.value, c.sets[rep], opts.grid, opts.eq_tol, {best.x});
  });

  Selection& sel = out.selection;
  sel.space = rf.space();
  sel.points.resize(space.size());
  sel.certificates.resize(space.size());
  std::vector<std::size_t> failed;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    // the argmin itself is always a root, so this is nonempty
    const Point& xi = roots[a].front();
    for (std::size_t s : atoms[a]) {
      const double eta = out.optimal.eta.values[s][0];
      sel.points[s] = xi;
      sel.certificates[s] = GlobalCert{eta, std::nullopt};
      if (!set_contains(c.sets[s], xi) || !(std::abs(eval_f(rf, s, xi) - eta) <= opts.eq_tol)) failed.push_back(s);
    }
  }
  if (!failed.empty()) {
    throw NoSolution(NoSolution::Kind::VerificationFailed, failed,
                     "selected point does not attain the optimal value on every scenario of its atom");
  }
  sel.measurable = is_measurable_rv(space, sel.as_random_variable());
  return out;
}

RlopResult solve_rlop(const RandomFunction& rf, const Box& region, const SolveOptions& opts) {
  region.validate();
  if (static_cast<int>(region.dimension()) != rf.dimension()) throw DimensionError("region dimension mismatch");
  const ProbSpace& space = *rf.space();

  const auto probes = opts.probes ? *opts.probes : default_probe_grid(region);
  require_jointly_measurable(rf, probes);

  RlopResult out;
  out.convex = true;
  for (const auto& x : probes) {
    if (!region.contains(x)) continue;
    for (std::size_t s = 0; s < space.size() && out.convex; ++s) {
      try {
        const auto cls = classify_definiteness(hessian(rf, s, x), opts.newton.definiteness_tol);
        out.convex = cls == Definiteness::PD || cls == Definiteness::PSD_degenerate;
      } catch (const EvalError&) {
        out.convex = false;
      }
    }
    if (!out.convex) break;
  }

  const auto& atoms = space.atoms();
  Selection& sel = out.selection;
  sel.space = rf.space();
  sel.points.resize(space.size());
  sel.certificates.resize(space.size());

  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const std::size_t rep = atoms[a].front();
    auto found = find_stationary_points(rf, rep, region, opts.newton);
    RlopAtomReport report{a, rep, found.points, found.diagnostics};
    out.atoms.push_back(report);

    if (found.points.empty()) {
      throw NoSolution(NoSolution::Kind::NoStationaryPoints, atom_ids(space, a),
                       "no stationary point in the region for atom " + std::to_string(a));
    }
    auto pd = std::find_if(found.points.begin(), found.points.end(),
                           [](const StationaryPoint& p) { return p.classification == Definiteness::PD; });
    if (pd == found.points.end()) {
      throw NoSolution(NoSolution::Kind::NoPDStationaryPoint, atom_ids(space, a),
                       "atom " + std::to_string(a) + " has stationary points but none with a positive definite Hessian");
    }
    const Point xi = pd->x;

    Certificate cert;
    try {
      auto verified = verify_local_min(rf, rep, xi, opts.verify);
      if (auto* fail = std::get_if<LocalMinFailure>(&verified)) {
        throw NoSolution(NoSolution::Kind::VerificationFailed, atom_ids(space, a),
                         "descent direction found at the selected point (margin " + std::to_string(fail->margin) +
                             ")");
      }
      cert = std::get<LocalMinCertificate>(verified);
    } catch (const NoRadiusFound& e) {
      throw NoSolution(NoSolution::Kind::VerificationFailed, atom_ids(space, a), e.what());
    }

    if (out.convex) {
      const auto grid_min = global_min_compact(rf, rep, region, opts.grid);
      const double fx = eval_f(rf, rep, xi);
      if (fx <= grid_min.grid_value + 1e-9 * (1.0 + std::abs(grid_min.grid_value))) {
        cert = GlobalCert{fx, std::get<LocalMinCertificate>(cert)};
      }
    }
    for (std::size_t s : atoms[a]) {
      sel.points[s] = xi;
      sel.certificates[s] = cert;
    }
  }
  sel.measurable = is_measurable_rv(space, sel.as_random_variable());
  return out;
}

NecessaryReport check_necessary_conditions(const RandomFunction& rf, const RandomVariableRn& xi) {
  xi.validate();
  require_same_space(rf.space(), xi.space, "candidate");
  if (static_cast<int>(xi.dimension()) != rf.dimension()) throw DimensionError("candidate dimension mismatch");

  NecessaryReport report;
  for (std::size_t s = 0; s < xi.values.size(); ++s) {
    NecessaryCheck c;
    c.grad_norm = max_norm(gradient(rf, s, xi.values[s]));
    c.grad_ok = c.grad_norm <= 1e-8;
    c.classification = classify_definiteness(hessian(rf, s, xi.values[s]));
    c.psd_ok = c.classification == Definiteness::PD || c.classification == Definiteness::PSD_degenerate;
    report.scenarios.push_back(c);
  }
  report.measurable = is_measurable_rv(*rf.space(), xi);
  return report;
}

}  // namespace randopt
