#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hasa/bnb.hpp"
#include "hasa/domains.hpp"
#include "hasa/oracle.hpp"
#include "hasa/valuation.hpp"
#include "support/random_models.hpp"
#include "support/small_models.hpp"

using namespace hasa;

TEST(OrderStates, UnreachableInitialStatesGoLast) {
  ModelSpec spec = fixtures::identity_spec(3, 2, 0.5);
  spec.reward.assign(spec.reward.size(), 1.0);
  spec.initial_dist = {0.0, 0.5, 0.5};
  const auto order = order_states(HasaMdp(spec));
  EXPECT_EQ(order.back(), 0u);
}

TEST(OrderStates, IdentityClassificationSortsByBestReward) {
  ModelSpec spec = fixtures::identity_spec(4, 2, 0.5);
  spec.reward = {0.0, 1.0, -0.1, 3.0, 0.5, -0.1, 2.0, 0.0, -0.1, -1.0, -2.0, -0.1};
  EXPECT_EQ(order_states(HasaMdp(spec)), (std::vector<StateIndex>{1, 2, 0, 3}));
}

TEST(OrderStates, TiesBreakByIndex) {
  EXPECT_EQ(order_states(HasaMdp(fixtures::identity_spec(3, 1, 0.5))).front(), 0u);
}

TEST(OrderStates, GridCellsNearTheGoalComeBeforeTheFarCorner) {
  const HasaMdp m = make_gridworld({});
  const auto order = order_states(m);
  auto rank = [&](const std::string& name) {
    return std::find(order.begin(), order.end(), m.state_index(name)) - order.begin();
  };
  EXPECT_LT(rank("r4c3"), rank("r0c0"));
  EXPECT_LT(rank("r3c4"), rank("r0c0"));
}

TEST(Bnb, SingleStateOpensEveryActionAndPicksTheBest) {
  ModelSpec spec = fixtures::identity_spec(1, 3, 0.5);
  spec.reward = {0.5, 2.0, 1.0, -0.1};
  BnbConfig config;
  config.sapi_restarts = 0;
  const BnbResult r = branch_and_bound(HasaMdp(spec), config);
  EXPECT_EQ(r.policy, DeterministicPolicy({1}));
  EXPECT_LE(r.nodes_opened, 3u);
  EXPECT_TRUE(r.complete);
}

TEST(Bnb, SmallGridMatchesExhaustiveSearch) {
  GridworldConfig g;
  g.width = 3;
  g.height = 2;
  const HasaMdp m = make_gridworld(g);
  const EnumerationResult best = enumerate_optimal(m);
  EXPECT_EQ(best.evaluated, 4096u);
  const BnbResult r = branch_and_bound(m);
  EXPECT_NEAR(r.value, best.value, 1e-6);
  EXPECT_NEAR(policy_value(m, r.policy), r.value, 1e-12);
}

class BnbVariants : public ::testing::TestWithParam<std::tuple<SearchOrder, Relaxation, DelayLowerBound>> {};

TEST_P(BnbVariants, RandomModelsMatchEnumeration) {
  const auto [order, relaxation, mode] = GetParam();
  std::mt19937_64 rng(97);
  fixtures::RandomModelOptions opt;
  opt.max_states = 5;
  opt.max_actions = 3;
  for (int i = 0; i < 25; ++i) {
    const HasaMdp m = fixtures::random_model(rng, opt);
    BnbConfig config;
    config.order = order;
    config.relaxation = relaxation;
    config.delay_bound = mode;
    config.sapi_restarts = static_cast<std::size_t>(i % 3);
    config.seed = static_cast<std::uint64_t>(i);
    const BnbResult r = branch_and_bound(m, config);
    EXPECT_TRUE(r.complete);
    EXPECT_NEAR(r.value, enumerate_optimal(m).value, 1e-9) << "model " << i;
    EXPECT_GE(r.value, r.initial_incumbent);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Configs, BnbVariants,
    ::testing::Values(std::make_tuple(SearchOrder::kBestFirst, Relaxation::kCoupledDelay, DelayLowerBound::kAnticipated),
                      std::make_tuple(SearchOrder::kDepthFirst, Relaxation::kCoupledDelay, DelayLowerBound::kAnticipated),
                      std::make_tuple(SearchOrder::kBestFirst, Relaxation::kFixedMixture, DelayLowerBound::kDecidedEvents),
                      std::make_tuple(SearchOrder::kDepthFirst, Relaxation::kDelayInterval, DelayLowerBound::kDecidedEvents)));

TEST(Bnb, WithoutBoundsEveryNodeOpens) {
  const HasaMdp m = fixtures::identity_model(3, 2, 0.6);
  BnbConfig config;
  config.use_bounds = false;
  config.sapi_restarts = 0;
  const BnbResult r = branch_and_bound(m, config);
  EXPECT_EQ(r.nodes_opened, 2u + 4u + 8u);
  EXPECT_NEAR(r.value, enumerate_optimal(m).value, 1e-12);
}

TEST(Bnb, NodeLimitMarksTheResultIncomplete) {
  const HasaMdp m = make_gridworld({});
  BnbConfig config;
  config.node_limit = 5;
  config.sapi_restarts = 1;
  const BnbResult r = branch_and_bound(m, config);
  EXPECT_FALSE(r.complete);
  EXPECT_EQ(r.nodes_opened, 5u);
  EXPECT_EQ(r.value, r.initial_incumbent);
}

TEST(Bnb, GivenIncumbentSkipsSapi) {
  const HasaMdp m = fixtures::identity_model(3, 2, 0.6);
  const EnumerationResult best = enumerate_optimal(m);
  BnbConfig config;
  config.incumbent = best.policy;
  int leaves = 0;
  config.on_node = [&](const NodeEvent& e) {
    if (e.is_leaf) ++leaves;
    EXPECT_GE(e.incumbent, best.value - 1e-12);
  };
  const BnbResult r = branch_and_bound(m, config);
  EXPECT_DOUBLE_EQ(r.initial_incumbent, best.value);
  EXPECT_EQ(r.policy, best.policy);
}

TEST(Bnb, NodeCallbackSeesEveryOpenedNode) {
  GridworldConfig g;
  g.width = 2;
  g.height = 2;
  const HasaMdp m = make_gridworld(g);
  std::size_t seen = 0;
  BnbConfig config;
  config.on_node = [&](const NodeEvent& e) {
    ++seen;
    EXPECT_EQ(e.node.partial.num_decided(), e.node.depth);
  };
  const BnbResult r = branch_and_bound(m, config);
  EXPECT_EQ(seen, r.nodes_opened);
}

TEST(NodeBound, AdmissibleAlongABranch) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 40; ++i) {
    const HasaMdp m = fixtures::random_model(rng);
    const DeterministicPolicy total = fixtures::random_total(m, rng);
    PartialPolicy partial(m.num_states());
    for (StateIndex s : order_states(m)) {
      partial.assign(s, total[s]);
      double best = -std::numeric_limits<double>::infinity();
      fixtures::for_each_completion(m, partial, [&](const DeterministicPolicy& p) { best = std::max(best, policy_value(m, p)); });
      EXPECT_GE(node_upper_bound(m, partial), best - 1e-8);
    }
  }
}
