#include <gtest/gtest.h>

#include <random>

#include "hasa/model.hpp"
#include "support/random_models.hpp"
#include "support/small_models.hpp"

using namespace hasa;

TEST(Model, IdentityModelValidates) {
  const HasaMdp m = fixtures::identity_model(3, 2, 0.9);
  EXPECT_TRUE(validate_model(m).ok()) << validate_model(m).to_string();
}

TEST(Model, ZeroMassUncertaintyBecomesConfidentSelfEvent) {
  ModelSpec spec = fixtures::identity_spec(2, 2, 0.5);
  spec.uncertainty_events.clear();
  const HasaMdp m(spec);
  for (StateIndex s = 0; s < 2; ++s) {
    const auto events = m.uncertainty().events_for(s);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].best_guess, s);
    EXPECT_TRUE(events[0].is_confident());
    EXPECT_DOUBLE_EQ(events[0].weight, 1.0);
  }
  EXPECT_TRUE(validate_model(m).ok());
}

TEST(Model, EventWeightsAreNormalizedPerTrueState) {
  ModelSpec spec = fixtures::identity_spec(2, 2, 0.5);
  spec.uncertainty_events = {{0, 0, {1}, 2.0}, {0, 0, {0}, 6.0}, {1, 1, {1}, 0.5}};
  const HasaMdp m(spec);
  const auto e0 = m.uncertainty().events_for(0);
  ASSERT_EQ(e0.size(), 2u);
  EXPECT_DOUBLE_EQ(e0[0].weight, 0.25);
  EXPECT_DOUBLE_EQ(e0[1].weight, 0.75);
  EXPECT_DOUBLE_EQ(m.uncertainty().events_for(1)[0].weight, 1.0);
}

TEST(Model, ShortTransitionRowIsReportedWithStateAndAction) {
  ModelSpec spec = fixtures::identity_spec(2, 2, 0.5);
  // state 1, action a1: 0.9 total
  spec.transition[(1 * 3 + 1) * 2 + 0] = 0.9;
  const auto report = validate_model(HasaMdp(spec));
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].field, "transition");
  EXPECT_EQ(report.violations[0].index, "(s1, a1)");
  EXPECT_NEAR(report.violations[0].residual, 0.1, 1e-12);
}

TEST(Model, ClassificationWithinToleranceIsAccepted) {
  ModelSpec spec = fixtures::identity_spec(2, 2, 0.5);
  spec.classification[0] = 1.0000000001;
  EXPECT_TRUE(validate_model(HasaMdp(spec)).ok());
  spec.classification[0] = 1.00001;
  EXPECT_FALSE(validate_model(HasaMdp(spec)).ok());
}

TEST(Model, DiscountOfOneIsAViolation) {
  ModelSpec spec = fixtures::identity_spec(2, 2, 0.5);
  spec.discount = 1.0;
  const auto report = validate_model(HasaMdp(spec));
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations[0].field, "discount");
}

TEST(Model, WrongTableShapeThrows) {
  ModelSpec spec = fixtures::identity_spec(2, 2, 0.5);
  spec.reward.pop_back();
  EXPECT_THROW(HasaMdp{spec}, ConfigError);
  spec = fixtures::identity_spec(2, 2, 0.5);
  spec.uncertainty_events.push_back({0, 5, {0}, 1.0});
  EXPECT_THROW(HasaMdp{spec}, ConfigError);
}

TEST(Model, NameLookup) {
  const HasaMdp m = fixtures::identity_model(3, 2, 0.5);
  EXPECT_EQ(m.state_index("s2"), 2u);
  EXPECT_EQ(m.action_index("a1"), 1u);
  EXPECT_THROW(m.state_index("nope"), ConfigError);
}

TEST(Model, ToSpecRebuildsAnEqualModel) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const HasaMdp m = fixtures::random_model(rng);
    const HasaMdp copy(m.to_spec());
    EXPECT_EQ(copy.to_spec().transition, m.to_spec().transition);
    EXPECT_EQ(copy.uncertainty(), m.uncertainty());
  }
}

TEST(Model, RandomModelsValidate) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const HasaMdp m = fixtures::random_model(rng);
    EXPECT_TRUE(validate_model(m).ok()) << validate_model(m).to_string();
  }
}

TEST(PartialPolicy, TracksDecidedCount) {
  PartialPolicy p(3);
  EXPECT_EQ(p.num_decided(), 0u);
  p.assign(1, 0);
  p.assign(1, 1);
  EXPECT_EQ(p.num_decided(), 1u);
  EXPECT_THROW(p.to_deterministic(), std::logic_error);
  p.assign(0, 0);
  p.assign(2, 1);
  EXPECT_TRUE(p.is_total());
  EXPECT_EQ(p.to_deterministic(), DeterministicPolicy({0, 1, 1}));
  p.clear(2);
  p.clear(2);
  EXPECT_EQ(p.num_decided(), 2u);
  EXPECT_FALSE(p.decided(2));
}

TEST(PartialPolicy, FromTotalPolicy) {
  const PartialPolicy p(DeterministicPolicy({1, 0}));
  EXPECT_TRUE(p.is_total());
  EXPECT_EQ(p[0], 1u);
}
