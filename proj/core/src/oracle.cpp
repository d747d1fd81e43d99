#include "hasa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hasa/aliasing.hpp"
#include "hasa/valuation.hpp"

namespace hasa {

namespace {

std::string limit_message(double space, double cap) {
  std::ostringstream os;
  os << "policy space |A|^|S| = " << space << " exceeds the enumeration cap " << cap;
  return os.str();
}

double max_abs_reward(const HasaMdp& model) {
  double rmax = 0.0;
  for (StateIndex s = 0; s < model.num_states(); ++s) {
    for (ActionIndex a = 0; a < model.num_action_slots(); ++a) rmax = std::max(rmax, std::abs(model.reward(s, a)));
  }
  return rmax;
}

}  // namespace

EnumerationLimitError::EnumerationLimitError(double space, double cap)
    : Error(limit_message(space, cap)), space_(space) {}

EnumerationResult enumerate_optimal(const HasaMdp& model, double cap) {
  const std::size_t n = model.num_states();
  const std::size_t k = model.num_actions();
  const double space = std::pow(static_cast<double>(k), static_cast<double>(n));
  if (space > cap) throw EnumerationLimitError(space, cap);

  // Odometer over policies with state 0 most significant: lexicographic order.
  std::vector<ActionIndex> digits(n, 0);
  EnumerationResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (;;) {
    DeterministicPolicy policy(digits);
    const double v = policy_value(model, policy);
    ++best.evaluated;
    if (v > best.value) {
      best.value = v;
      best.policy = std::move(policy);
    }
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < k) break;
      digits[pos] = 0;
      if (pos == 0) return best;
    }
    if (n == 0) return best;
  }
}

ExecutionSampler::ExecutionSampler(const HasaMdp& model, const DeterministicPolicy& policy)
    : model_(model), policy_(policy), initial_(model.initial_dist().begin(), model.initial_dist().end()) {
  const std::size_t n = model.num_states();
  for (StateIndex s = 0; s < n; ++s) {
    const auto events = model.uncertainty().events_for(s);
    std::vector<double> weights;
    std::vector<bool> conflicts;
    for (const auto& e : events) {
      weights.push_back(e.weight);
      conflicts.push_back(event_conflicts(e, policy));
    }
    events_.emplace_back(weights.begin(), weights.end());
    event_conflicts_.push_back(std::move(conflicts));
    const auto row = model.classification_row(s);
    guesses_.emplace_back(row.begin(), row.end());
    for (ActionIndex a = 0; a < model.num_action_slots(); ++a) {
      const auto t = model.transition_row(s, a);
      transitions_.emplace_back(t.begin(), t.end());
    }
  }
}

ActionIndex ExecutionSampler::sample_action(StateIndex s, std::mt19937_64& rng) {
  const std::size_t event = events_[s](rng);
  if (event_conflicts_[s][event]) {
    std::bernoulli_distribution delay(model_.patience(s));
    if (delay(rng)) return model_.non_policy_index();
  }
  return policy_[guesses_[s](rng)];
}

StateIndex ExecutionSampler::sample_next(StateIndex s, ActionIndex a, std::mt19937_64& rng) {
  return transitions_[s * model_.num_action_slots() + a](rng);
}

std::size_t default_horizon(const HasaMdp& model) {
  const double gamma = model.discount();
  if (gamma <= 0.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log(1e-6) / std::log(gamma)));
}

double truncation_bias_bound(const HasaMdp& model, std::size_t horizon) {
  const double gamma = model.discount();
  return std::pow(gamma, static_cast<double>(horizon)) * max_abs_reward(model) / (1.0 - gamma);
}

SimEstimate simulate_policy(const HasaMdp& model, const DeterministicPolicy& policy, std::size_t episodes,
                            std::size_t horizon, std::uint64_t seed) {
  if (episodes == 0) throw std::invalid_argument("simulate_policy needs at least one episode");
  if (horizon == 0) horizon = default_horizon(model);
  ExecutionSampler sampler(model, policy);
  std::mt19937_64 rng(seed);
  const double gamma = model.discount();

  // Welford accumulation of the per-episode returns.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    StateIndex s = sampler.sample_initial(rng);
    double ret = 0.0;
    double discount = 1.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const ActionIndex a = sampler.sample_action(s, rng);
      ret += discount * model.reward(s, a);
      discount *= gamma;
      s = sampler.sample_next(s, a, rng);
    }
    const double delta = ret - mean;
    mean += delta / static_cast<double>(ep + 1);
    m2 += delta * (ret - mean);
  }
  SimEstimate out;
  out.mean = mean;
  out.episodes = episodes;
  out.horizon = horizon;
  out.seed = seed;
  out.standard_error = episodes > 1 ? std::sqrt(m2 / static_cast<double>(episodes - 1) / static_cast<double>(episodes)) : 0.0;
  return out;
}

}  // namespace hasa
