#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hasa/aliasing.hpp"
#include "hasa/bnb.hpp"
#include "hasa/domains.hpp"
#include "hasa/oracle.hpp"
#include "hasa/valuation.hpp"
#include "support/random_models.hpp"
#include "support/small_models.hpp"

using namespace hasa;

TEST(Enumerate, SingleStateTwoActions) {
  ModelSpec spec = fixtures::identity_spec(1, 2, 0.5);
  spec.reward = {1.0, 3.0, 0.0};
  const EnumerationResult r = enumerate_optimal(HasaMdp(spec));
  EXPECT_EQ(r.evaluated, 2u);
  EXPECT_EQ(r.policy, DeterministicPolicy({1}));
  EXPECT_NEAR(r.value, 6.0, 1e-12);
}

TEST(Enumerate, SmallGridAgreesWithBnb) {
  GridworldConfig g;
  g.width = 2;
  g.height = 2;
  const HasaMdp m = make_gridworld(g);
  const EnumerationResult r = enumerate_optimal(m);
  EXPECT_EQ(r.evaluated, 256u);
  EXPECT_NEAR(r.value, branch_and_bound(m).value, 1e-9);
}

TEST(Enumerate, CapIsEnforced) {
  const HasaMdp m = make_gridworld({});
  try {
    enumerate_optimal(m);
    FAIL();
  } catch (const EnumerationLimitError& e) {
    EXPECT_DOUBLE_EQ(e.space(), std::pow(4.0, 25.0));
  }
  EXPECT_THROW(enumerate_optimal(fixtures::identity_model(3, 3, 0.5), 26.0), EnumerationLimitError);
  EXPECT_EQ(enumerate_optimal(fixtures::identity_model(3, 3, 0.5), 27.0).evaluated, 27u);
}

TEST(Enumerate, TiesGoToTheLexicographicallySmallest) {
  ModelSpec spec = fixtures::identity_spec(2, 3, 0.5);
  spec.reward.assign(spec.reward.size(), 1.0);
  const EnumerationResult r = enumerate_optimal(HasaMdp(spec));
  EXPECT_EQ(r.policy, DeterministicPolicy({0, 0}));
}

TEST(Simulate, ZeroRewardsGiveZero) {
  ModelSpec spec = fixtures::identity_spec(3, 2, 0.9);
  spec.reward.assign(spec.reward.size(), 0.0);
  const SimEstimate e = simulate_policy(HasaMdp(spec), DeterministicPolicy({0, 1, 0}), 500, 0, 1);
  EXPECT_EQ(e.mean, 0.0);
  EXPECT_EQ(e.standard_error, 0.0);
  EXPECT_EQ(e.episodes, 500u);
}

TEST(Simulate, DefaultHorizonMakesTheTailNegligible) {
  const HasaMdp m = fixtures::identity_model(2, 2, 0.9);
  const std::size_t h = default_horizon(m);
  EXPECT_LE(std::pow(0.9, static_cast<double>(h)), 1e-6);
  EXPECT_GT(std::pow(0.9, static_cast<double>(h - 1)), 1e-6);
  EXPECT_NEAR(truncation_bias_bound(m, h), std::pow(0.9, static_cast<double>(h)) * 1.0 / 0.1, 1e-15);
}

TEST(Simulate, MatchesExactValueWithinThreeStandardErrors) {
  std::mt19937_64 rng(113);
  for (int i = 0; i < 6; ++i) {
    const HasaMdp m = fixtures::random_model(rng);
    const DeterministicPolicy p = fixtures::random_total(m, rng);
    const SimEstimate e = simulate_policy(m, p, 20000, 0, static_cast<std::uint64_t>(i));
    EXPECT_NEAR(e.mean, policy_value(m, p), 3.0 * e.standard_error + truncation_bias_bound(m, e.horizon)) << i;
  }
}

TEST(Simulate, SameSeedSameEstimate) {
  const HasaMdp m = make_warehouse({});
  const DeterministicPolicy p = DeterministicPolicy::uniform(6, 5);
  const SimEstimate a = simulate_policy(m, p, 200, 0, 77);
  const SimEstimate b = simulate_policy(m, p, 200, 0, 77);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.seed, 77u);
}

TEST(Sampler, DelaysAtTheInducedRate) {
  const HasaMdp m(fixtures::two_state_aliased_spec());
  ExecutionSampler sampler(m, DeterministicPolicy({0, 1}));
  std::mt19937_64 rng(3);
  int waits = 0, first = 0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    const ActionIndex a = sampler.sample_action(0, rng);
    if (a == m.non_policy_index()) ++waits;
    if (a == 0) ++first;
  }
  EXPECT_NEAR(waits / static_cast<double>(kDraws), 0.4, 0.005);
  EXPECT_NEAR(first / static_cast<double>(kDraws), 0.54, 0.005);
}

TEST(Sampler, FrequenciesFitTheInducedPolicy) {
  std::mt19937_64 rng(127);
  fixtures::RandomModelOptions opt;
  opt.max_alternates = 3;
  constexpr int kDraws = 100000;
  for (int i = 0; i < 8; ++i) {
    const HasaMdp m = fixtures::random_model(rng, opt);
    const DeterministicPolicy p = fixtures::random_total(m, rng);
    const StochasticPolicy expected = induce_stochastic(m, p);
    ExecutionSampler sampler(m, p);
    for (StateIndex s = 0; s < m.num_states(); ++s) {
      std::vector<int> counts(m.num_action_slots(), 0);
      for (int d = 0; d < kDraws; ++d) ++counts[sampler.sample_action(s, rng)];
      double chi2 = 0.0;
      int cells = 0;
      for (ActionIndex a = 0; a < m.num_action_slots(); ++a) {
        const double e = expected(s, a) * kDraws;
        if (expected(s, a) <= 1e-12) {
          EXPECT_EQ(counts[a], 0);
          continue;
        }
        chi2 += (counts[a] - e) * (counts[a] - e) / e;
        ++cells;
      }
      if (cells < 2) continue;
      // Upper 1e-4 tail of chi-square via the Wilson-Hilferty approximation.
      const double df = cells - 1;
      const double h = 2.0 / (9.0 * df);
      const double critical = df * std::pow(1.0 - h + 3.719 * std::sqrt(h), 3.0);
      EXPECT_LT(chi2, critical) << "model " << i << " state " << s;
    }
  }
}

TEST(AlignedPolicies, StraightLinesBeatACheckerboard) {
  GridworldConfig g;
  g.width = 4;
  g.height = 4;
  g.slip = 0.0;
  const HasaMdp m = make_gridworld(g);
  const ActionIndex down = m.action_index("down"), right = m.action_index("right");
  std::vector<ActionIndex> aligned(16), checkered(16);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      aligned[r * 4 + c] = c == 3 ? down : right;
      ActionIndex a = (r + c) % 2 == 0 ? right : down;
      if (r == 3) a = right;
      if (c == 3) a = down;
      checkered[r * 4 + c] = a;
    }
  }
  const double exact_aligned = policy_value(m, DeterministicPolicy(aligned));
  const double exact_checkered = policy_value(m, DeterministicPolicy(checkered));
  EXPECT_GT(exact_aligned, exact_checkered);

  const SimEstimate sim_aligned = simulate_policy(m, DeterministicPolicy(aligned), 10000, 0, 5);
  const SimEstimate sim_checkered = simulate_policy(m, DeterministicPolicy(checkered), 10000, 0, 6);
  EXPECT_GT(sim_aligned.mean, sim_checkered.mean);
  EXPECT_NEAR(sim_aligned.mean, exact_aligned, 3.0 * sim_aligned.standard_error + truncation_bias_bound(m, sim_aligned.horizon));
  EXPECT_NEAR(sim_checkered.mean, exact_checkered,
              3.0 * sim_checkered.standard_error + truncation_bias_bound(m, sim_checkered.horizon));
}
