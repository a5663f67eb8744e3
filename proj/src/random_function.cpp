#include "randopt/random_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "randopt/errors.hpp"

namespace randopt {

RandomFunction::RandomFunction(SpacePtr space, Expression body, std::vector<Point> params)
    : space_(std::move(space)), body_(std::move(body)), params_(std::move(params)) {
  if (!space_) throw DomainMismatch("random function has no probability space");
  if (params_.empty() && body_.num_params() == 0) params_.assign(space_->size(), Point{});
  if (params_.size() != space_->size()) {
    throw DomainMismatch("random function has parameters for " + std::to_string(params_.size()) + " of " +
                         std::to_string(space_->size()) + " scenarios");
  }
  for (const auto& p : params_) {
    if (static_cast<int>(p.size()) != body_.num_params()) {
      throw DomainMismatch("parameter vector has " + std::to_string(p.size()) + " entries, expression uses " +
                           std::to_string(body_.num_params()));
    }
  }
  const int n = body_.num_vars();
  gradient_.reserve(n);
  for (int i = 0; i < n; ++i) gradient_.push_back(differentiate(body_, i));
  hessian_.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hessian_.push_back(differentiate(gradient_[i], j));
}

RandomFunction RandomFunction::affine(double a, double b) const {
  Expression scaled(build::add(build::mul(build::number(a), body_.root()), build::number(b)), body_.num_vars(),
                    body_.num_params());
  return RandomFunction(space_, std::move(scaled), params_);
}

double eval_f(const RandomFunction& rf, std::size_t omega, std::span<const double> x) {
  return eval(rf.body(), x, rf.params(omega));
}

std::vector<double> gradient(const RandomFunction& rf, std::size_t omega, std::span<const double> x) {
  const int n = rf.dimension();
  const Point& p = rf.params(omega);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = eval(rf.gradient_expr(i), x, p);
  return g;
}

Matrix hessian_unsymmetrized(const RandomFunction& rf, std::size_t omega, std::span<const double> x) {
  const int n = rf.dimension();
  const Point& p = rf.params(omega);
  Matrix h(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = eval(rf.hessian_expr(i, j), x, p);
  return h;
}

Matrix hessian(const RandomFunction& rf, std::size_t omega, std::span<const double> x) {
  Matrix h = hessian_unsymmetrized(rf, omega, x);
  const std::size_t n = h.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (h(i, j) + h(j, i));
      h(i, j) = avg;
      h(j, i) = avg;
    }
  }
  return h;
}

bool fd_entry_ok(double symbolic, double numeric) {
  const double diff = std::abs(symbolic - numeric);
  return diff <= 1e-8 || diff <= 1e-6 * std::max(std::abs(symbolic), std::abs(numeric));
}

namespace {
double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}
}  // namespace

FdReport fd_check(const RandomFunction& rf, std::size_t omega, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const int n = rf.dimension();
  FdReport report;

  const auto g = gradient(rf, omega, x);
  const Matrix hess = hessian(rf, omega, x);
  Point xp(x.begin(), x.end());
  Point xm(x.begin(), x.end());
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fd = (eval_f(rf, omega, xp) - eval_f(rf, omega, xm)) / (2.0 * h);
    report.max_gradient_abs = std::max(report.max_gradient_abs, std::abs(fd - g[i]));
    report.max_gradient_rel = std::max(report.max_gradient_rel, relative(g[i], fd));
    report.pass = report.pass && fd_entry_ok(g[i], fd);

    const auto gp = gradient(rf, omega, xp);
    const auto gm = gradient(rf, omega, xm);
    for (int r = 0; r < n; ++r) {
      const double fdh = (gp[r] - gm[r]) / (2.0 * h);
      report.max_hessian_abs = std::max(report.max_hessian_abs, std::abs(fdh - hess(r, i)));
      report.max_hessian_rel = std::max(report.max_hessian_rel, relative(hess(r, i), fdh));
      report.pass = report.pass && fd_entry_ok(hess(r, i), fdh);
    }
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sets

bool Box::contains(std::span<const double> x, double slack) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] - slack && x[i] <= upper[i] + slack)) return false;
  }
  return true;
}

Point Box::center() const {
  Point c(lower.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
  return c;
}

void Box::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    throw DimensionError("box corners must be nonempty and of equal length");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i]) {
      throw IncompatibleRepresentation("box needs finite corners with lower <= upper");
    }
  }
}

RandomSet RandomSet::constant(SpacePtr space, int dimension, const SetDescription& set) {
  RandomSet c;
  c.dimension = dimension;
  c.sets.assign(space->size(), set);
  c.space = std::move(space);
  return c;
}

namespace {

struct DescriptionValidator {
  int n;

  void operator()(const Box& b) const {
    b.validate();
    if (static_cast<int>(b.dimension()) != n) throw DimensionError("box dimension does not match the set");
  }
  void operator()(const PointCloud& c) const {
    if (c.points.empty()) throw IncompatibleRepresentation("point cloud must be nonempty");
    for (const auto& p : c.points) {
      if (static_cast<int>(p.size()) != n) throw DimensionError("point dimension does not match the set");
    }
  }
  void operator()(const LevelSet& l) const {
    (*this)(l.bounds);
    for (const auto& c : l.constraints) {
      if (c.expr.num_vars() != n) throw DimensionError("level-set constraint has wrong dimension");
      if (static_cast<int>(c.params.size()) != c.expr.num_params()) {
        throw DimensionError("level-set constraint has wrong parameter count");
      }
    }
  }
  void operator()(const EmptySetDesc&) const {}
};

}  // namespace

void RandomSet::validate() const {
  if (!space) throw DomainMismatch("random set has no probability space");
  if (sets.size() != space->size()) throw DomainMismatch("random set must describe every scenario");
  if (dimension < 1) throw DimensionError("random set dimension must be >= 1");
  for (const auto& s : sets) std::visit(DescriptionValidator{dimension}, s);
}

bool set_contains(const SetDescription& set, std::span<const double> x) {
  struct Visitor {
    std::span<const double> x;
    bool operator()(const Box& b) const { return b.contains(x); }
    bool operator()(const PointCloud& c) const {
      return std::any_of(c.points.begin(), c.points.end(),
                         [&](const Point& p) { return std::equal(p.begin(), p.end(), x.begin(), x.end()); });
    }
    bool operator()(const LevelSet& l) const {
      if (!l.bounds.contains(x)) return false;
      for (const auto& c : l.constraints) {
        try {
          if (!(std::abs(eval(c.expr, x, c.params)) <= kLevelSetTol)) return false;
        } catch (const EvalError&) {
          return false;
        }
      }
      return true;
    }
    bool operator()(const EmptySetDesc&) const { return false; }
  };
  return std::visit(Visitor{x}, set);
}

std::optional<Box> bounding_box(const SetDescription& set) {
  struct Visitor {
    std::optional<Box> operator()(const Box& b) const { return b; }
    std::optional<Box> operator()(const PointCloud& c) const {
      Box b{c.points.front(), c.points.front()};
      for (const auto& p : c.points) {
        for (std::size_t i = 0; i < p.size(); ++i) {
          b.lower[i] = std::min(b.lower[i], p[i]);
          b.upper[i] = std::max(b.upper[i], p[i]);
        }
      }
      return b;
    }
    std::optional<Box> operator()(const LevelSet& l) const { return l.bounds; }
    std::optional<Box> operator()(const EmptySetDesc&) const { return std::nullopt; }
  };
  return std::visit(Visitor{}, set);
}

namespace {

double max_abs_diff(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

bool boxes_close(const Box& a, const Box& b, double tol) {
  return a.dimension() == b.dimension() && max_abs_diff(a.lower, b.lower) <= tol &&
         max_abs_diff(a.upper, b.upper) <= tol;
}

double euclidean(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  auto directed = [](const PointCloud& from, const PointCloud& to) {
    double worst = 0.0;
    for (const auto& p : from.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to.points) best = std::min(best, euclidean(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

bool same_description(const SetDescription& a, const SetDescription& b, double tol) {
  if (a.index() != b.index()) return false;
  if (const auto* ba = std::get_if<Box>(&a)) return boxes_close(*ba, std::get<Box>(b), tol);
  if (const auto* pa = std::get_if<PointCloud>(&a)) return hausdorff(*pa, std::get<PointCloud>(b)) <= tol;
  if (const auto* la = std::get_if<LevelSet>(&a)) {
    const auto& lb = std::get<LevelSet>(b);
    if (!boxes_close(la->bounds, lb.bounds, tol) || la->constraints.size() != lb.constraints.size()) return false;
    for (std::size_t i = 0; i < la->constraints.size(); ++i) {
      const auto& ca = la->constraints[i];
      const auto& cb = lb.constraints[i];
      if (!structurally_equal(substitute_params(ca.expr, ca.params), substitute_params(cb.expr, cb.params), tol)) {
        return false;
      }
    }
    return true;
  }
  return true;  // both empty
}

std::optional<Box> intersect_boxes(const Box& a, const Box& b) {
  Box r{a.lower, a.upper};
  for (std::size_t i = 0; i < r.lower.size(); ++i) {
    r.lower[i] = std::max(a.lower[i], b.lower[i]);
    r.upper[i] = std::min(a.upper[i], b.upper[i]);
    if (r.lower[i] > r.upper[i]) return std::nullopt;
  }
  return r;
}

SetDescription filter_cloud(const PointCloud& cloud, const SetDescription& other) {
  PointCloud kept;
  for (const auto& p : cloud.points)
    if (set_contains(other, p)) kept.points.push_back(p);
  if (kept.points.empty()) return EmptySetDesc{};
  return kept;
}

SetDescription intersect_pair(const SetDescription& a, const SetDescription& b) {
  if (std::holds_alternative<EmptySetDesc>(a) || std::holds_alternative<EmptySetDesc>(b)) return EmptySetDesc{};
  if (const auto* ca = std::get_if<PointCloud>(&a)) return filter_cloud(*ca, b);
  if (const auto* cb = std::get_if<PointCloud>(&b)) return filter_cloud(*cb, a);

  const auto* ba = std::get_if<Box>(&a);
  const auto* bb = std::get_if<Box>(&b);
  if (ba && bb) {
    if (auto r = intersect_boxes(*ba, *bb)) return *r;
    return EmptySetDesc{};
  }
  const auto* la = std::get_if<LevelSet>(&a);
  const auto* lb = std::get_if<LevelSet>(&b);
  if (la && lb) {
    auto bounds = intersect_boxes(la->bounds, lb->bounds);
    if (!bounds) return EmptySetDesc{};
    LevelSet merged{la->constraints, *bounds};
    merged.constraints.insert(merged.constraints.end(), lb->constraints.begin(), lb->constraints.end());
    return merged;
  }
  const LevelSet* level = la ? la : lb;
  const Box* box = ba ? ba : bb;
  if (level && box) {
    auto bounds = intersect_boxes(level->bounds, *box);
    if (!bounds) return EmptySetDesc{};
    return LevelSet{level->constraints, *bounds};
  }
  throw IncompatibleRepresentation("unsupported combination of set descriptions");
}

}  // namespace

Verdict is_measurable_setmap(const ProbSpace& space, const RandomSet& c, double tol) {
  c.validate();
  if (!(*c.space == space)) throw DomainMismatch("random set is defined on a different space");
  const auto& atoms = space.atoms();
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const auto& members = atoms[a];
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        if (!same_description(c.sets[members[i]], c.sets[members[j]], tol)) {
          return Verdict::no({a, members[i], members[j], std::nullopt, "set descriptions differ within atom"});
        }
      }
    }
  }
  return Verdict::yes();
}

RandomSet intersect_setmaps(std::span<const RandomSet> maps) {
  if (maps.empty()) throw IncompatibleRepresentation("nothing to intersect");
  for (const auto& m : maps) {
    m.validate();
    if (!same_space(m.space, maps.front().space)) throw DomainMismatch("random sets live on different spaces");
    if (m.dimension != maps.front().dimension) throw IncompatibleRepresentation("random sets differ in dimension");
  }
  RandomSet result = maps.front();
  for (std::size_t k = 1; k < maps.size(); ++k) {
    for (std::size_t s = 0; s < result.sets.size(); ++s) {
      result.sets[s] = intersect_pair(result.sets[s], maps[k].sets[s]);
    }
  }
  return result;
}

GraphSample sample_graph(const RandomSet& c, std::span<const Point> probes) {
  GraphSample out;
  for (std::size_t s = 0; s < c.sets.size(); ++s) {
    for (const auto& x : probes) {
      if (set_contains(c.sets[s], x)) out.emplace_back(s, x);
    }
  }
  return out;
}

namespace {

double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

std::vector<Point> default_probe_grid(const Box& box, int extra) {
  box.validate();
  const std::size_t n = box.dimension();
  if (n > std::size(kPrimes)) throw DimensionError("probe grid supports at most 16 dimensions");
  std::vector<Point> probes;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Point corner(n);
    for (std::size_t i = 0; i < n; ++i) corner[i] = (mask >> i) & 1 ? box.upper[i] : box.lower[i];
    probes.push_back(std::move(corner));
  }
  probes.push_back(box.center());
  for (int k = 1; k <= extra; ++k) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = box.lower[i] + radical_inverse(static_cast<unsigned>(k), kPrimes[i]) * (box.upper[i] - box.lower[i]);
    }
    probes.push_back(std::move(p));
  }
  return probes;
}

Verdict check_joint_measurability(const RandomFunction& rf, std::span<const Point> probes) {
  if (probes.empty()) throw std::invalid_argument("probe grid must be nonempty");
  const auto& atoms = rf.space()->atoms();
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const auto& members = atoms[a];
    if (members.size() < 2) continue;
    const std::size_t rep = members.front();
    for (const auto& x : probes) {
      const double v0 = eval_f(rf, rep, x);
      for (std::size_t m = 1; m < members.size(); ++m) {
        const std::size_t s = members[m];
        if (rf.params(s) == rf.params(rep)) continue;  // same tree, same inputs
        const double v = eval_f(rf, s, x);
        if (v != v0) {
          std::ostringstream os;
          os.precision(17);
          os << "f differs within atom: " << v0 << " vs " << v;
          return Verdict::no({a, rep, s, x, os.str()});
        }
      }
    }
  }
  return Verdict::yes();
}

}  // namespace randopt
