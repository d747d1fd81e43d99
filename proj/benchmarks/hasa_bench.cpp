#include <benchmark/benchmark.h>

#include <random>

#include "hasa/aliasing.hpp"
#include "hasa/bnb.hpp"
#include "hasa/domains.hpp"
#include "hasa/sapi.hpp"
#include "hasa/valuation.hpp"

using namespace hasa;

namespace {

HasaMdp grid(std::size_t side) {
  GridworldConfig g;
  g.width = side;
  g.height = side;
  return make_gridworld(g);
}

DeterministicPolicy random_policy(const HasaMdp& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<ActionIndex> pick(0, m.num_actions() - 1);
  std::vector<ActionIndex> actions(m.num_states());
  for (auto& a : actions) a = pick(rng);
  return DeterministicPolicy(std::move(actions));
}

// Every other state in the branching order is decided.
PartialPolicy half_decided(const HasaMdp& m) {
  const DeterministicPolicy p = random_policy(m, 1);
  PartialPolicy partial(m.num_states());
  const auto order = order_states(m);
  for (std::size_t i = 0; i < order.size(); i += 2) partial.assign(order[i], p[order[i]]);
  return partial;
}

void BM_InduceStochastic(benchmark::State& state) {
  const HasaMdp m = grid(static_cast<std::size_t>(state.range(0)));
  const DeterministicPolicy p = random_policy(m, 0);
  for (auto _ : state) benchmark::DoNotOptimize(induce_stochastic(m, p));
}
BENCHMARK(BM_InduceStochastic)->Arg(3)->Arg(5)->Arg(8);

void BM_PolicyValue(benchmark::State& state) {
  const HasaMdp m = grid(static_cast<std::size_t>(state.range(0)));
  const DeterministicPolicy p = random_policy(m, 0);
  for (auto _ : state) benchmark::DoNotOptimize(policy_value(m, p));
}
BENCHMARK(BM_PolicyValue)->Arg(3)->Arg(5)->Arg(8);

void BM_NodeBound(benchmark::State& state) {
  const HasaMdp m = grid(5);
  const PartialPolicy partial = half_decided(m);
  const auto relaxation = static_cast<Relaxation>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(relaxed_upper_bound(m, partial, relaxation, DelayLowerBound::kAnticipated));
  }
}
BENCHMARK(BM_NodeBound)
    ->Arg(static_cast<int>(Relaxation::kFixedMixture))
    ->Arg(static_cast<int>(Relaxation::kDelayInterval))
    ->Arg(static_cast<int>(Relaxation::kCoupledDelay));

void BM_SapiRun(benchmark::State& state) {
  const HasaMdp m = grid(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sapi_run(m, seed++));
}
BENCHMARK(BM_SapiRun)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_BranchAndBound(benchmark::State& state) {
  const HasaMdp m = grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const BnbResult r = branch_and_bound(m);
    state.counters["nodes"] = static_cast<double>(r.nodes_opened);
  }
}
BENCHMARK(BM_BranchAndBound)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
