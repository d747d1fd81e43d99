#include "hasa/aliasing.hpp"

#include <algorithm>

namespace hasa {

bool event_conflicts(const UncertaintyEvent& event, const DeterministicPolicy& policy) {
  const ActionIndex best = policy[event.best_guess];
  return std::any_of(event.alternates.begin(), event.alternates.end(),
                     [&](StateIndex alt) { return policy[alt] != best; });
}

double delay_probability(const HasaMdp& model, const DeterministicPolicy& policy, StateIndex state) {
  const double psi = model.patience(state);
  if (psi == 0.0) return 0.0;
  double conflicting = 0.0;
  for (const auto& event : model.uncertainty().events_for(state)) {
    if (event_conflicts(event, policy)) conflicting += event.weight;
  }
  return psi * conflicting;
}

StochasticPolicy induce_stochastic(const HasaMdp& model, const DeterministicPolicy& policy) {
  const std::size_t n = model.num_states();
  StochasticPolicy out(n, model.num_action_slots());
  for (StateIndex s = 0; s < n; ++s) {
    const double delay = delay_probability(model, policy, s);
    out(s, model.non_policy_index()) = delay;
    const double act = 1.0 - delay;
    for (StateIndex guess = 0; guess < n; ++guess) {
      out(s, policy[guess]) += act * model.classification(s, guess);
    }
  }
  return out;
}

namespace {

// Smallest non-policy mass that every completion must incur in one true state.
// Events with a single undecided member u conflict unless u receives the action
// shared by the decided members; u pays at least the cheapest such choice.
double anticipated_conflicts(const HasaMdp& model, const PartialPolicy& partial, StateIndex s,
                             std::vector<double>& agree, std::vector<double>& total, std::vector<StateIndex>& touched) {
  const std::size_t num_actions = model.num_actions();
  double certain = 0.0;
  touched.clear();
  for (const auto& event : model.uncertainty().events_for(s)) {
    if (event.is_confident()) continue;
    ActionIndex shared = PartialPolicy::kUndecided;
    bool split = false;
    std::size_t undecided = 0;
    StateIndex open = 0;
    auto visit = [&](StateIndex member) {
      if (!partial.decided(member)) {
        ++undecided;
        open = member;
        return;
      }
      if (shared == PartialPolicy::kUndecided) {
        shared = partial[member];
      } else if (partial[member] != shared) {
        split = true;
      }
    };
    visit(event.best_guess);
    for (StateIndex alt : event.alternates) visit(alt);

    // Two decided members already disagree: either the best guess is decided and
    // differs from some alternate, or it will differ from at least one of them.
    if (split) {
      certain += event.weight;
    } else if (undecided == 1 && shared != PartialPolicy::kUndecided) {
      if (total[open] == 0.0) touched.push_back(open);
      total[open] += event.weight;
      agree[open * num_actions + shared] += event.weight;
    }
  }
  for (StateIndex u : touched) {
    const auto first = agree.begin() + static_cast<std::ptrdiff_t>(u * num_actions);
    certain += total[u] - *std::max_element(first, first + static_cast<std::ptrdiff_t>(num_actions));
    std::fill(first, first + static_cast<std::ptrdiff_t>(num_actions), 0.0);
    total[u] = 0.0;
  }
  return certain;
}

}  // namespace

FixedProbabilityBounds fixed_probability_bounds(const HasaMdp& model, const PartialPolicy& partial,
                                                DelayLowerBound mode) {
  const std::size_t n = model.num_states();
  const std::size_t num_actions = model.num_actions();
  FixedProbabilityBounds b;
  b.num_actions = num_actions;
  b.non_policy_lower.assign(n, 0.0);
  b.max_delay.assign(n, 0.0);
  b.action_lower.assign(n * num_actions, 0.0);
  b.residual.assign(n, 0.0);
  b.decided_mass.assign(n * num_actions, 0.0);

  std::vector<double> agree;
  std::vector<double> total;
  std::vector<StateIndex> touched;
  if (mode == DelayLowerBound::kAnticipated) {
    agree.assign(n * num_actions, 0.0);
    total.assign(n, 0.0);
  }

  for (StateIndex s = 0; s < n; ++s) {
    const double psi = model.patience(s);
    double certain = 0.0;
    double possible = 0.0;
    for (const auto& event : model.uncertainty().events_for(s)) {
      if (event.is_confident()) continue;
      const bool all_decided =
          partial.decided(event.best_guess) &&
          std::all_of(event.alternates.begin(), event.alternates.end(), [&](StateIndex alt) { return partial.decided(alt); });
      if (!all_decided) {
        possible += event.weight;
        continue;
      }
      const ActionIndex best = partial[event.best_guess];
      const bool conflict = std::any_of(event.alternates.begin(), event.alternates.end(),
                                        [&](StateIndex alt) { return partial[alt] != best; });
      if (conflict) {
        certain += event.weight;
        possible += event.weight;
      }
    }
    if (mode == DelayLowerBound::kAnticipated) {
      certain = std::min(possible, anticipated_conflicts(model, partial, s, agree, total, touched));
    }
    b.non_policy_lower[s] = psi * certain;
    b.max_delay[s] = psi * possible;

    const double act = 1.0 - b.max_delay[s];
    double fixed = b.non_policy_lower[s];
    for (StateIndex guess = 0; guess < n; ++guess) {
      if (!partial.decided(guess)) continue;
      b.decided_mass[s * num_actions + partial[guess]] += model.classification(s, guess);
      const double p = act * model.classification(s, guess);
      b.action_lower[s * num_actions + partial[guess]] += p;
      fixed += p;
    }
    b.residual[s] = std::max(0.0, 1.0 - fixed);
  }
  return b;
}

}  // namespace hasa
