#pragma once

#include <vector>

#include "hasa/model.hpp"

namespace hasa {

/// True when some alternate of `event` is prescribed a different action than its best guess.
bool event_conflicts(const UncertaintyEvent& event, const DeterministicPolicy& policy);

/// Probability of the non-policy action in `state`: patience times the mass of conflicting events.
double delay_probability(const HasaMdp& model, const DeterministicPolicy& policy, StateIndex state);

/// The stochastic policy a state-aliased human executes when handed `policy`.
StochasticPolicy induce_stochastic(const HasaMdp& model, const DeterministicPolicy& policy);

/**
 * Lower bounds on executed action probabilities that hold for every
 * completion of a partial policy.
 *
 * The non-policy lower bound counts only events whose conflict is already
 * certain; max_delay counts every event that is not provably conflict-free.
 * Policy-action lower bounds use the classification mass of decided states,
 * scaled by one minus max_delay.
 */
struct FixedProbabilityBounds {
  std::size_t num_actions = 0;
  std::vector<double> non_policy_lower;
  std::vector<double> max_delay;
  std::vector<double> action_lower;  // [s * num_actions + a]
  std::vector<double> residual;
  /// Classification mass of decided guesses per prescribed action, before delay scaling.
  std::vector<double> decided_mass;  // [s * num_actions + a]

  double action(StateIndex s, ActionIndex a) const { return action_lower[s * num_actions + a]; }
};

enum class DelayLowerBound {
  /// Only events whose members are all decided and already conflict.
  kDecidedEvents,
  /// Additionally charges every undecided state the smallest conflict mass it can
  /// incur against decided states, over all actions it could still receive.
  kAnticipated,
};

FixedProbabilityBounds fixed_probability_bounds(const HasaMdp& model, const PartialPolicy& partial,
                                                DelayLowerBound mode = DelayLowerBound::kDecidedEvents);

}  // namespace hasa
