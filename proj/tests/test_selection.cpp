#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "instances.hpp"
#include "oracles.hpp"
#include "randopt/errors.hpp"
#include "randopt/selection.hpp"

using namespace randopt;

namespace {

SpacePtr three_two() { return ProbSpace::make({1, 2, 3}, {0.25, 0.25, 0.5}, {{1, 2}, {3}}); }

RandomFunction rf(const SpacePtr& s, const std::string& text, int n, std::vector<Point> params = {}) {
  const int k = params.empty() ? 0 : static_cast<int>(params[0].size());
  if (params.empty()) params.assign(s->size(), Point{});
  return {s, parse(text, n, k), params};
}

Box box1(double lo, double hi) { return {{lo}, {hi}}; }

RandomVariableRn constant_rv(const SpacePtr& s, Point v) { return {s, std::vector<Point>(s->size(), v)}; }

template <typename E>
E thrown(const std::function<void()>& f) {
  try {
    f();
  } catch (const E& e) {
    return e;
  }
  throw std::runtime_error("expected exception not thrown");
}

}  // namespace

// canonical_select ---------------------------------------------------------------

TEST(CanonicalSelect, PicksLexicographicallySmallest) {
  auto s = three_two();
  Selection sel = canonical_select(RandomSet::constant(s, 1, PointCloud{{{1}, {-1}}}));
  for (const auto& p : sel.points) EXPECT_EQ(p, Point{-1.0});
  EXPECT_TRUE(sel.measurable.measurable);
  EXPECT_FALSE(sel.non_measurable_input);
}

TEST(CanonicalSelect, Singleton) {
  auto s = three_two();
  Selection sel = canonical_select(RandomSet::constant(s, 2, PointCloud{{{0, 0}}}));
  for (const auto& p : sel.points) EXPECT_EQ(p, (Point{0, 0}));
}

TEST(CanonicalSelect, TiesGoToLaterCoordinates) {
  auto s = three_two();
  Selection sel = canonical_select(RandomSet::constant(s, 2, PointCloud{{{0, 3}, {1, -5}, {0, 2}}}));
  EXPECT_EQ(sel.points[0], (Point{0, 2}));
}

TEST(CanonicalSelect, FlagsNonMeasurableInput) {
  auto s = three_two();
  RandomSet m{s, 1, {PointCloud{{{1}}}, PointCloud{{{-1}}}, PointCloud{{{0}}}}};
  Selection sel = canonical_select(m);
  EXPECT_TRUE(sel.non_measurable_input);
  ASSERT_TRUE(sel.input_witness.has_value());
  EXPECT_EQ(sel.input_witness->atom, 0u);
  EXPECT_FALSE(sel.measurable.measurable);
  EXPECT_EQ(sel.points[0], Point{1.0});
  EXPECT_EQ(sel.points[1], Point{-1.0});
}

TEST(CanonicalSelect, Errors) {
  auto s = three_two();
  RandomSet empty{s, 1, {PointCloud{{{1}}}, PointCloud{{{1}}}, EmptySetDesc{}}};
  EXPECT_EQ(thrown<EmptySet>([&] { canonical_select(empty); }).scenario(), 2u);
  EXPECT_THROW(canonical_select(RandomSet::constant(s, 1, box1(0, 1))), IncompatibleRepresentation);
}

// solve_random_equation -----------------------------------------------------------

TEST(RandomEquation, ParabolaPicksNegativeRoot) {
  auto s = three_two();
  Selection sel = solve_random_equation(rf(s, "x1^2", 1), constant_rv(s, {4}), box1(-5, 5));
  for (const auto& p : sel.points) EXPECT_NEAR(p[0], -2.0, 1e-9);
  EXPECT_TRUE(sel.measurable.measurable);
  for (const auto& c : sel.certificates) EXPECT_EQ(std::get<GlobalCert>(c).value, 4.0);
}

TEST(RandomEquation, QuarticAtMinusOne) {
  auto s = three_two();
  Selection sel = solve_random_equation(rf(s, "x1^4 - 2*x1^2", 1), constant_rv(s, {-1}), box1(-2, 2));
  for (const auto& p : sel.points) EXPECT_NEAR(p[0], -1.0, 1e-4);  // double root: |f + 1| <= 1e-9 only
  auto f = rf(s, "x1^4 - 2*x1^2", 1);
  for (std::size_t w = 0; w < 3; ++w) EXPECT_LE(std::abs(eval_f(f, w, sel.points[w]) + 1), 1e-9);
}

TEST(RandomEquation, NoSolution) {
  auto s = three_two();
  auto e = thrown<NoSolution>([&] { solve_random_equation(rf(s, "x1^2", 1), constant_rv(s, {-1}), box1(-5, 5)); });
  EXPECT_EQ(e.kind(), NoSolution::Kind::NoDeterministicSolution);
  EXPECT_EQ(e.scenarios(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(RandomEquation, PerAtomTargets) {
  auto s = three_two();
  RandomVariableRn eta{s, {{1}, {1}, {9}}};
  Selection sel = solve_random_equation(rf(s, "x1^2", 1), eta, box1(0, 5));
  EXPECT_NEAR(sel.points[0][0], 1.0, 1e-9);
  EXPECT_NEAR(sel.points[2][0], 3.0, 1e-9);
  EXPECT_EQ(sel.points[0], sel.points[1]);
}

TEST(RandomEquation, Refusals) {
  auto s = three_two();
  auto e1 = thrown<HypothesisViolation>(
      [&] { solve_random_equation(rf(s, "x1^2", 1), RandomVariableRn{s, {{1}, {4}, {9}}}, box1(-5, 5)); });
  EXPECT_EQ(e1.kind(), HypothesisViolation::Kind::NonMeasurableEta);
  auto e2 = thrown<HypothesisViolation>(
      [&] { solve_random_equation(rf(s, "x1^2 - p1", 1, {{0}, {1}, {0}}), constant_rv(s, {1}), box1(-5, 5)); });
  EXPECT_EQ(e2.kind(), HypothesisViolation::Kind::NonMeasurableF);
  ASSERT_TRUE(e2.witness().has_value());
  EXPECT_TRUE(e2.witness()->probe.has_value());
}

// solve_rop ----------------------------------------------------------------------

TEST(SolveRop, Quartic) {
  auto s = three_two();
  auto f = rf(s, "x1^4 - 2*x1^2", 1);
  SolveOptions o;
  o.grid = 401;
  RopResult r = solve_rop(f, RandomSet::constant(s, 1, box1(-2, 2)), o);
  for (std::size_t w = 0; w < 3; ++w) {
    EXPECT_EQ(r.selection.points[w], Point{-1.0});
    EXPECT_EQ(r.optimal.eta.values[w], Point{-1.0});
    EXPECT_EQ(std::get<GlobalCert>(r.selection.certificates[w]).value, -1.0);
  }
  EXPECT_TRUE(r.selection.measurable.measurable);
}

TEST(SolveRop, VertexFeasible) {
  auto s = three_two();
  RopResult r = solve_rop(rf(s, "(x1 - p1)^2", 1, {{3}, {3}, {3}}), RandomSet::constant(s, 1, box1(0, 5)));
  for (std::size_t w = 0; w < 3; ++w) {
    EXPECT_EQ(r.selection.points[w], Point{3.0});
    EXPECT_EQ(r.optimal.eta.values[w], Point{0.0});
  }
}

TEST(SolveRop, PointCloud) {
  auto s = three_two();
  RopResult r = solve_rop(rf(s, "x1^2", 1), RandomSet::constant(s, 1, PointCloud{{{1}, {2}}}));
  for (std::size_t w = 0; w < 3; ++w) {
    EXPECT_EQ(r.selection.points[w], Point{1.0});
    EXPECT_EQ(r.optimal.eta.values[w], Point{1.0});
  }
}

TEST(SolveRop, Refusals) {
  auto s = three_two();
  auto flip = rf(s, "(x1 - p1)^2", 1, {{1}, {2}, {0}});
  auto e = thrown<HypothesisViolation>([&] { solve_rop(flip, RandomSet::constant(s, 1, box1(-5, 5))); });
  EXPECT_EQ(e.kind(), HypothesisViolation::Kind::NonMeasurableF);

  RandomSet differ{s, 1, {box1(0, 1), box1(0, 2), box1(0, 1)}};
  auto e2 = thrown<HypothesisViolation>([&] { solve_rop(rf(s, "x1", 1), differ); });
  EXPECT_EQ(e2.kind(), HypothesisViolation::Kind::NonMeasurableSet);

  RandomSet empty{s, 1, {box1(0, 1), box1(0, 1), EmptySetDesc{}}};
  EXPECT_EQ(thrown<EmptyFeasible>([&] { solve_rop(rf(s, "x1", 1), empty); }).scenario(), 2u);
}

TEST(SolveRop, PerScenarioSetsConstantOnAtoms) {
  auto s = three_two();
  RandomSet c{s, 1, {box1(1, 2), box1(1, 2), box1(-3, -2)}};
  RopResult r = solve_rop(rf(s, "x1^2", 1), c);
  EXPECT_EQ(r.selection.points[0], Point{1.0});
  EXPECT_EQ(r.selection.points[2], Point{-2.0});
  EXPECT_TRUE(r.selection.measurable.measurable);
}

// solve_rlop -----------------------------------------------------------------------

TEST(SolveRlop, Quartic) {
  auto s = three_two();
  RlopResult r = solve_rlop(rf(s, "x1^4 - 2*x1^2", 1), box1(-2, 2));
  EXPECT_FALSE(r.convex);
  ASSERT_EQ(r.atoms.size(), 2u);
  EXPECT_EQ(r.atoms[0].stationary.size(), 3u);
  for (std::size_t w = 0; w < 3; ++w) {
    EXPECT_NEAR(r.selection.points[w][0], -1.0, 1e-12);
    const auto& c = std::get<LocalMinCertificate>(r.selection.certificates[w]);
    EXPECT_GE(c.delta, 0.25);
    EXPECT_GE(c.min_margin, -1e-12);
  }
  EXPECT_TRUE(r.selection.measurable.measurable);
}

TEST(SolveRlop, ConvexFastPath) {
  auto s = three_two();
  RlopResult r = solve_rlop(rf(s, "x1^2 + x2^2", 2), Box{{-1, -1}, {1, 1}});
  EXPECT_TRUE(r.convex);
  for (std::size_t w = 0; w < 3; ++w) {
    EXPECT_EQ(r.selection.points[w], (Point{0, 0}));
    const auto& g = std::get<GlobalCert>(r.selection.certificates[w]);
    EXPECT_EQ(g.value, 0.0);
    ASSERT_TRUE(g.local.has_value());
    EXPECT_EQ(g.local->delta, 1.0);
  }
}

TEST(SolveRlop, InflectionHasNoPdPoint) {
  auto s = three_two();
  auto e = thrown<NoSolution>([&] { solve_rlop(rf(s, "x1^3", 1), box1(-1, 1)); });
  EXPECT_EQ(e.kind(), NoSolution::Kind::NoPDStationaryPoint);
  EXPECT_EQ(e.scenarios(), (std::vector<std::size_t>{0, 1}));  // first atom reported
}

TEST(SolveRlop, NoStationaryPoints) {
  auto s = three_two();
  auto e = thrown<NoSolution>([&] { solve_rlop(rf(s, "x1^2 + x1", 1), box1(1, 2)); });
  EXPECT_EQ(e.kind(), NoSolution::Kind::NoStationaryPoints);
}

TEST(SolveRlop, RefusesNonMeasurableF) {
  auto s = three_two();
  auto e = thrown<HypothesisViolation>([&] { solve_rlop(rf(s, "(x1 - p1)^2", 1, {{1}, {2}, {0}}), box1(-3, 3)); });
  EXPECT_EQ(e.kind(), HypothesisViolation::Kind::NonMeasurableF);
}

// necessary conditions ---------------------------------------------------------------

TEST(Necessary, Examples) {
  auto s = three_two();
  auto f = rf(s, "x1^4 - 2*x1^2", 1);
  NecessaryReport one = check_necessary_conditions(f, constant_rv(s, {1}));
  EXPECT_TRUE(one.all_ok());
  for (const auto& c : one.scenarios) EXPECT_EQ(c.classification, Definiteness::PD);
  EXPECT_TRUE(one.measurable.measurable);

  NecessaryReport zero = check_necessary_conditions(f, constant_rv(s, {0}));
  for (const auto& c : zero.scenarios) {
    EXPECT_TRUE(c.grad_ok);
    EXPECT_FALSE(c.psd_ok);
    EXPECT_EQ(c.classification, Definiteness::ND);
  }
  EXPECT_FALSE(zero.all_ok());
}

TEST(Necessary, FlippingAssignmentIsNotARandomVariable) {
  auto s = three_two();
  auto f = rf(s, "x1^4 - 2*x1^2", 1);
  NecessaryReport r = check_necessary_conditions(f, RandomVariableRn{s, {{1}, {-1}, {1}}});
  for (const auto& c : r.scenarios) {
    EXPECT_TRUE(c.grad_ok);
    EXPECT_TRUE(c.psd_ok);
    EXPECT_EQ(c.grad_norm, 0.0);
  }
  ASSERT_FALSE(r.measurable.measurable);
  EXPECT_EQ(r.measurable.witness->first, 0u);
  EXPECT_EQ(r.measurable.witness->second, 1u);
  EXPECT_TRUE(r.all_ok());  // all_ok covers the necessary conditions only
}

// properties --------------------------------------------------------------------------

TEST(SelectionProperty, RlopSolutionsPassNecessaryConditions) {
  instances::Rng rng(61);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    instances::Instance inst = instances::random_instance_with_minimum(rng, true);
    RandomFunction f = inst.function();
    SolveOptions o;
    o.newton.grid = 5;
    o.grid = instances::grid_for(inst.box.dimension());
    try {
      RlopResult r = solve_rlop(f, inst.box, o);
      ++solved;
      EXPECT_TRUE(r.selection.measurable.measurable);
      EXPECT_TRUE(is_measurable_rv(*inst.space, r.selection.as_random_variable(), 0.0).measurable);
      NecessaryReport n = check_necessary_conditions(f, r.selection.as_random_variable());
      EXPECT_TRUE(n.all_ok()) << inst.expression;
    } catch (const NoSolution&) {
    }
  }
  EXPECT_GT(solved, 50);
}

TEST(SelectionProperty, RopMatchesGridOracle) {
  instances::Rng rng(62);
  for (int trial = 0; trial < 40; ++trial) {
    instances::Instance inst = instances::random_instance(rng, true);
    RandomFunction f = inst.function();
    SolveOptions o;
    o.grid = instances::grid_for(inst.box.dimension());
    RopResult r = solve_rop(f, inst.feasible(), o);
    EXPECT_TRUE(is_measurable_rv(*inst.space, r.selection.as_random_variable(), 0.0).measurable);
    for (std::size_t w = 0; w < inst.space->size(); ++w) {
      auto ref = oracle::grid_min([&](const Point& x) { return eval_f(f, w, x); }, inst.box.lower, inst.box.upper, o.grid);
      EXPECT_NEAR(eval_f(f, w, r.selection.points[w]), ref.value, 1e-9) << inst.expression;
    }
  }
}

TEST(SelectionProperty, RefiningAtomsKeepsSelections) {
  instances::Rng rng(63);
  for (int trial = 0; trial < 30; ++trial) {
    instances::Instance inst = instances::random_instance(rng, true);
    SolveOptions o;
    o.grid = instances::grid_for(inst.box.dimension());
    RopResult coarse = solve_rop(inst.function(), inst.feasible(), o);

    // the powerset refines every partition; parameters stay as they were
    std::vector<std::vector<ScenarioId>> singletons;
    for (ScenarioId id : inst.space->scenarios()) singletons.push_back({id});
    instances::Instance fine = inst;
    fine.space = ProbSpace::make(inst.space->scenarios(), inst.space->weights(), singletons);
    RopResult refined = solve_rop(fine.function(), fine.feasible(), o);
    EXPECT_EQ(coarse.selection.points, refined.selection.points) << inst.expression;
  }
}
