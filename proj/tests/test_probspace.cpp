#include <gtest/gtest.h>

#include "instances.hpp"
#include "oracles.hpp"
#include "randopt/errors.hpp"
#include "randopt/probspace.hpp"

using namespace randopt;

namespace {

SpacePtr three_two() { return ProbSpace::make({1, 2, 3}, {0.25, 0.25, 0.5}, {{1, 2}, {3}}); }

RandomVariableRn scalar(const SpacePtr& s, std::vector<double> v) {
  RandomVariableRn xi{s, {}};
  for (double x : v) xi.values.push_back({x});
  return xi;
}

}  // namespace

TEST(MakeSpace, TwoAtoms) {
  auto s = three_two();
  EXPECT_EQ(s->size(), 3u);
  ASSERT_EQ(s->atoms().size(), 2u);
  EXPECT_EQ(s->atoms()[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s->atoms()[1], (std::vector<std::size_t>{2}));
  EXPECT_EQ(s->atom_of(2), 1u);
  EXPECT_FALSE(s->is_powerset());
}

TEST(MakeSpace, Singleton) {
  auto s = ProbSpace::make({1}, {1.0}, {{1}});
  EXPECT_EQ(s->size(), 1u);
  EXPECT_TRUE(s->is_powerset());
}

TEST(MakeSpace, WeightSumError) {
  EXPECT_THROW(ProbSpace::make({1, 2}, {0.6, 0.6}, {{1}, {2}}), WeightSumError);
  EXPECT_THROW(ProbSpace::make({1, 2}, {1.5, -0.5}, {{1}, {2}}), WeightSumError);
  EXPECT_THROW(ProbSpace::make({1, 2}, {1.0}, {{1}, {2}}), WeightSumError);
}

TEST(MakeSpace, WeightToleranceIs1e12) {
  EXPECT_NO_THROW(ProbSpace::make({1, 2}, {0.5, 0.5 + 5e-13}, {{1}, {2}}));
  EXPECT_THROW(ProbSpace::make({1, 2}, {0.5, 0.5 + 5e-12}, {{1}, {2}}), WeightSumError);
}

TEST(MakeSpace, PartitionErrors) {
  EXPECT_THROW(ProbSpace::make({1, 2}, {0.5, 0.5}, {{1}}), PartitionError);             // 2 missing
  EXPECT_THROW(ProbSpace::make({1, 2}, {0.5, 0.5}, {{1, 2}, {2}}), PartitionError);     // overlap
  EXPECT_THROW(ProbSpace::make({1, 2}, {0.5, 0.5}, {{1, 2, 3}}), PartitionError);       // unknown
  EXPECT_THROW(ProbSpace::make({1, 1}, {0.5, 0.5}, {{1}}), PartitionError);             // duplicate id
  EXPECT_THROW(ProbSpace::make({1, 2}, {0.5, 0.5}, {{1, 2}, {}}), PartitionError);      // empty atom
  EXPECT_THROW(ProbSpace::make({}, {}, {}), PartitionError);
}

TEST(MakeSpace, CanonicalAtomOrder) {
  auto s = ProbSpace::make({5, 3, 9, 1}, {0.25, 0.25, 0.25, 0.25}, {{9, 3}, {5, 1}});
  // atoms sorted by smallest id: {1,5} first, then {3,9}; members sorted by id
  ASSERT_EQ(s->atoms().size(), 2u);
  EXPECT_EQ(s->id(s->atoms()[0][0]), 1);
  EXPECT_EQ(s->id(s->atoms()[0][1]), 5);
  EXPECT_EQ(s->id(s->atoms()[1][0]), 3);
  EXPECT_EQ(s->id(s->atoms()[1][1]), 9);
  EXPECT_EQ(s->index_of(9), std::optional<std::size_t>(2));
  EXPECT_FALSE(s->index_of(7).has_value());
}

TEST(MakeSpace, ZeroWeightScenarioIsLegal) {
  auto s = ProbSpace::make({1, 2}, {1.0, 0.0}, {{1, 2}});
  // measurability is demanded on zero-weight scenarios too
  EXPECT_FALSE(is_measurable_rv(*s, scalar(s, {1, 2})).measurable);
}

TEST(IsMeasurableRv, ConstantOnAtoms) {
  auto s = three_two();
  EXPECT_TRUE(is_measurable_rv(*s, scalar(s, {5, 5, 7})).measurable);
}

TEST(IsMeasurableRv, DiffersWithinAtomGivesWitness) {
  auto s = three_two();
  Verdict v = is_measurable_rv(*s, scalar(s, {5, 6, 7}));
  ASSERT_FALSE(v.measurable);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->atom, 0u);
  EXPECT_EQ(s->id(v.witness->first), 1);
  EXPECT_EQ(s->id(v.witness->second), 2);
}

TEST(IsMeasurableRv, PowersetMakesEverythingMeasurable) {
  auto s = ProbSpace::make({1, 2, 3}, {0.25, 0.25, 0.5}, {{1}, {2}, {3}});
  EXPECT_TRUE(is_measurable_rv(*s, scalar(s, {1, -4, 1e300})).measurable);
}

TEST(IsMeasurableRv, Tolerance) {
  auto s = three_two();
  EXPECT_FALSE(is_measurable_rv(*s, scalar(s, {1, 1 + 1e-10, 0})).measurable);
  EXPECT_TRUE(is_measurable_rv(*s, scalar(s, {1, 1 + 1e-10, 0}), 1e-9).measurable);
}

TEST(IsMeasurableRv, VectorValuedComparesEveryComponent) {
  auto s = three_two();
  RandomVariableRn xi{s, {{1, 2}, {1, 3}, {0, 0}}};
  Verdict v = is_measurable_rv(*s, xi);
  ASSERT_FALSE(v.measurable);
  EXPECT_EQ(v.witness->atom, 0u);
}

TEST(IsMeasurableRv, NanIsNeverEqual) {
  auto s = three_two();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(is_measurable_rv(*s, scalar(s, {nan, nan, 0})).measurable);
}

TEST(IsMeasurableRv, DomainMismatch) {
  auto s = three_two();
  auto same = three_two();  // equal spaces are interchangeable
  EXPECT_TRUE(is_measurable_rv(*s, scalar(same, {1, 1, 1})).measurable);
  auto other = ProbSpace::make({1, 2, 3}, {0.25, 0.25, 0.5}, {{1}, {2, 3}});
  EXPECT_THROW(is_measurable_rv(*s, scalar(other, {1, 1, 1})), DomainMismatch);
  EXPECT_THROW(is_measurable_rv(*s, scalar(s, {1, 1})), DomainMismatch);
}

// Properties ------------------------------------------------------------------

TEST(ProbSpaceProperty, ConstancyAgreesWithPreimageOracle) {
  instances::Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = rng.integer(3, 9);
    auto s = instances::random_space(rng, m, rng.integer(2, m - 1));
    std::vector<Point> values(m);
    // few distinct values so that both outcomes occur
    for (auto& v : values) v = {static_cast<double>(rng.integer(0, 2))};
    if (trial % 2 == 0) {
      for (const auto& atom : s->atoms())
        for (std::size_t i : atom) values[i] = values[atom[0]];
    }
    EXPECT_EQ(is_measurable_rv(*s, {s, values}).measurable, oracle::measurable_by_preimages(*s, values))
        << "trial " << trial;
  }
}

TEST(ProbSpaceProperty, RefinementNeverBreaksMeasurability) {
  instances::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = rng.integer(3, 9);
    auto coarse = instances::random_space(rng, m, 2);
    std::vector<Point> values(m);
    for (const auto& atom : coarse->atoms()) {
      const double v = rng.uniform(-1, 1);
      for (std::size_t i : atom) values[i] = {v};
    }
    ASSERT_TRUE(is_measurable_rv(*coarse, {coarse, values}).measurable);
    // split every atom of the coarse space in two (where possible)
    std::vector<std::vector<ScenarioId>> fine;
    for (const auto& atom : coarse->atoms()) {
      std::vector<ScenarioId> a, b;
      for (std::size_t k = 0; k < atom.size(); ++k) (k % 2 ? b : a).push_back(coarse->id(atom[k]));
      fine.push_back(a);
      if (!b.empty()) fine.push_back(b);
    }
    auto refined = ProbSpace::make(coarse->scenarios(), coarse->weights(), fine);
    EXPECT_TRUE(is_measurable_rv(*refined, {refined, values}).measurable);
  }
}
