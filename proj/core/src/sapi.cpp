#include "hasa/sapi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "hasa/valuation.hpp"

namespace hasa {

namespace {

constexpr std::uint64_t kOrderSeedSalt = 0x9e3779b97f4a7c15ULL;

struct Candidate {
  StateIndex state = 0;
  ActionIndex action = 0;
  double value = 0.0;
  bool found = false;
};

// Best strictly-improving single change over `states`; lowest (state, action) wins ties.
Candidate best_change(const HasaMdp& model, DeterministicPolicy& policy, double current, double threshold,
                      std::span<const StateIndex> states) {
  Candidate best;
  best.value = current;
  for (StateIndex s : states) {
    const ActionIndex original = policy[s];
    for (ActionIndex a = 0; a < model.num_actions(); ++a) {
      if (a == original) continue;
      policy.set(s, a);
      const double v = policy_value(model, policy);
      if (v > current + threshold && (!best.found || v > best.value)) {
        best = {s, a, v, true};
      }
    }
    policy.set(s, original);
  }
  return best;
}

}  // namespace

DeterministicPolicy random_policy(const HasaMdp& model, std::mt19937_64& rng) {
  std::uniform_int_distribution<ActionIndex> pick(0, model.num_actions() - 1);
  std::vector<ActionIndex> actions(model.num_states());
  for (auto& a : actions) a = pick(rng);
  return DeterministicPolicy(std::move(actions));
}

SapiResult sapi_run(const HasaMdp& model, DeterministicPolicy initial, const SapiConfig& config,
                    std::uint64_t order_seed) {
  if (initial.size() != model.num_states()) throw std::invalid_argument("initial policy has the wrong size");
  SapiResult result;
  result.policy = std::move(initial);
  result.value = policy_value(model, result.policy);
  result.trace.push_back(result.value);

  std::vector<StateIndex> all(model.num_states());
  std::iota(all.begin(), all.end(), StateIndex{0});

  if (config.mode == SapiMode::kGlobalBest) {
    for (;;) {
      const Candidate c = best_change(model, result.policy, result.value, config.improvement_threshold, all);
      if (!c.found) break;
      result.policy.set(c.state, c.action);
      result.value = c.value;
      result.trace.push_back(c.value);
    }
  } else {
    std::mt19937_64 rng(order_seed);
    bool improved = true;
    while (improved) {
      improved = false;
      std::shuffle(all.begin(), all.end(), rng);
      for (StateIndex s : all) {
        const Candidate c = best_change(model, result.policy, result.value, config.improvement_threshold,
                                        std::span<const StateIndex>(&s, 1));
        if (!c.found) continue;
        result.policy.set(c.state, c.action);
        result.value = c.value;
        result.trace.push_back(c.value);
        improved = true;
      }
    }
  }
  result.steps = result.trace.size() - 1;
  return result;
}

SapiResult sapi_run(const HasaMdp& model, std::uint64_t seed, const SapiConfig& config) {
  std::mt19937_64 rng(seed);
  return sapi_run(model, random_policy(model, rng), config, seed ^ kOrderSeedSalt);
}

SapiRestartsResult sapi_restarts(const HasaMdp& model, std::size_t n_restarts, std::uint64_t seed,
                                 const SapiConfig& config) {
  if (n_restarts == 0) throw std::invalid_argument("sapi_restarts needs at least one restart");

  // log |A|^|S| decides whether distinct starts are possible.
  const double log_space = static_cast<double>(model.num_states()) * std::log(static_cast<double>(model.num_actions()));
  std::mt19937_64 rng(seed);
  std::set<DeterministicPolicy> drawn;
  SapiRestartsResult out;
  out.runs.reserve(n_restarts);
  for (std::size_t i = 0; i < n_restarts; ++i) {
    DeterministicPolicy start = random_policy(model, rng);
    const bool room = log_space > std::log(static_cast<double>(drawn.size()) + 0.5);
    while (room && drawn.contains(start)) start = random_policy(model, rng);
    drawn.insert(start);

    SapiResult run = sapi_run(model, std::move(start), config, (seed ^ kOrderSeedSalt) + i);
    run.restart_index = i;
    out.runs.push_back(std::move(run));
  }
  auto best = std::max_element(out.runs.begin(), out.runs.end(),
                               [](const SapiResult& a, const SapiResult& b) { return a.value < b.value; });
  out.best = *best;
  return out;
}

}  // namespace hasa
