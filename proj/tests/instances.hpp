#pragma once
// Deterministic random problem instances shared by the property tests and
// the acceptance suite.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "randopt/probspace.hpp"
#include "randopt/random_function.hpp"

namespace instances {

using randopt::Point;

/// Platform-independent uniform reals on top of the standardized engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [lo, hi].
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[engine_() % i]);
  }

 private:
  std::mt19937_64 engine_;
};

/// A space with `scenarios` scenarios split into `atoms` atoms, at least one
/// of which has two or more members. Ids are 100, 101, ... in a shuffled order.
inline randopt::SpacePtr random_space(Rng& rng, int scenarios, int atoms) {
  std::vector<randopt::ScenarioId> ids(scenarios);
  std::iota(ids.begin(), ids.end(), 100);
  rng.shuffle(ids);
  std::vector<double> w(scenarios);
  double total = 0.0;
  for (auto& x : w) total += (x = rng.uniform(0.1, 1.0));
  for (auto& x : w) x /= total;

  // cut points: atom sizes >= 1, sum = scenarios, first atom of size >= 2
  std::vector<int> sizes(atoms, 1);
  sizes[0] = 2;
  for (int extra = scenarios - atoms - 1; extra > 0; --extra) ++sizes[rng.integer(0, atoms - 1)];
  rng.shuffle(sizes);
  std::vector<std::vector<randopt::ScenarioId>> parts;
  std::size_t at = 0;
  for (int s : sizes) {
    parts.emplace_back(ids.begin() + at, ids.begin() + at + s);
    at += s;
  }
  return randopt::ProbSpace::make(ids, w, parts);
}

/// Polynomial with parameter coefficients: sum_j p_j * monomial_j, total
/// degree <= 4 per monomial.
inline std::string random_polynomial(Rng& rng, int n, int terms) {
  std::string text;
  for (int t = 0; t < terms; ++t) {
    if (t) text += " + ";
    text += "p" + std::to_string(t + 1);
    int budget = rng.integer(t == 0 ? 1 : 0, 4);
    for (int i = 0; i < n && budget > 0; ++i) {
      const int e = i == n - 1 ? budget : rng.integer(0, budget);
      budget -= e;
      if (e == 0) continue;
      text += "*x" + std::to_string(i + 1);
      if (e > 1) text += "^" + std::to_string(e);
    }
  }
  return text;
}

struct Instance {
  randopt::SpacePtr space;
  std::string expression;
  std::vector<Point> params;
  randopt::Box box;
  bool params_measurable = true;

  randopt::RandomFunction function() const {
    return {space, randopt::parse(expression, static_cast<int>(box.dimension()), static_cast<int>(params[0].size())),
            params};
  }
  randopt::RandomSet feasible() const {
    return randopt::RandomSet::constant(space, static_cast<int>(box.dimension()), box);
  }
};

/// n <= 3, 4-8 scenarios, 2-4 atoms, polynomial of degree <= 4 with
/// parameters constant on atoms (measurable) or perturbed within one atom.
inline Instance random_instance(Rng& rng, bool measurable) {
  Instance inst;
  const int n = rng.integer(1, 3);
  const int scenarios = rng.integer(4, 8);
  const int atoms = rng.integer(2, std::min(4, scenarios - 1));
  inst.space = random_space(rng, scenarios, atoms);
  const int terms = rng.integer(2, 5);
  inst.expression = random_polynomial(rng, n, terms);

  inst.params.assign(scenarios, Point(terms));
  for (const auto& atom : inst.space->atoms()) {
    Point p(terms);
    for (auto& v : p) v = rng.uniform(-2.0, 2.0);
    for (std::size_t s : atom) inst.params[s] = p;
  }
  if (!measurable) {
    // perturb one coefficient of one scenario inside an atom with >= 2 members
    for (const auto& atom : inst.space->atoms()) {
      if (atom.size() < 2) continue;
      const std::size_t s = atom[static_cast<std::size_t>(rng.integer(1, static_cast<int>(atom.size()) - 1))];
      inst.params[s][static_cast<std::size_t>(rng.integer(0, terms - 1))] += rng.uniform(0.5, 1.5);
      break;
    }
    inst.params_measurable = false;
  }
  inst.box.lower.resize(n);
  inst.box.upper.resize(n);
  for (int i = 0; i < n; ++i) {
    inst.box.lower[i] = rng.uniform(-2.0, -0.5);
    inst.box.upper[i] = rng.uniform(0.5, 2.0);
  }
  return inst;
}

/// Like random_instance, with a coercive term sum_i (3*x_i^4 + 2*x_i^2) added
/// so that an interior local minimum is likely.
inline Instance random_instance_with_minimum(Rng& rng, bool measurable) {
  Instance inst = random_instance(rng, measurable);
  for (std::size_t i = 1; i <= inst.box.dimension(); ++i) {
    const std::string x = "x" + std::to_string(i);
    inst.expression += " + 3*" + x + "^4 + 2*" + x + "^2";
  }
  return inst;
}

/// Grid density used for an n-dimensional instance so that a grid search
/// stays cheap.
inline int grid_for(std::size_t n) { return n == 1 ? 201 : n == 2 ? 41 : 17; }

}  // namespace instances
