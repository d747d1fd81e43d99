#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "hasa/aliasing.hpp"
#include "hasa/model.hpp"

namespace hasa {

/// One value per state.
using ValueVector = std::vector<double>;

class NumericError : public Error {
 public:
  using Error::Error;
};

/// Largest tolerated ||(I - gamma P) v - r||_inf from the linear solve.
inline constexpr double kMrpResidualTolerance = 1e-8;

/// Exact value of the Markov reward process induced by a stochastic policy.
ValueVector mrp_value(const HasaMdp& model, const StochasticPolicy& stochastic);

/// Per-state values of the policy as executed by the aliased human.
ValueVector policy_state_values(const HasaMdp& model, const DeterministicPolicy& policy);

/// Initial-distribution-weighted value of the executed policy.
double policy_value(const HasaMdp& model, const DeterministicPolicy& policy);

/**
 * Partially-controlled MDP: every state carries a fixed mixture of lower-bound
 * action probabilities and a residual mass that is freely assigned to one
 * candidate action. Candidates are the policy actions followed by the
 * non-policy action, so any completion's executed distribution is a convex
 * combination of candidate behaviours.
 */
struct PcMdp {
  std::size_t num_states = 0;
  std::size_t num_candidates = 0;
  double discount = 0.0;
  std::vector<double> residual;
  FixedProbabilityBounds bounds;
  std::vector<double> transition;  // [(s * num_candidates + c) * num_states + s']
  std::vector<double> reward;      // [s * num_candidates + c]

  double effective_transition(StateIndex s, std::size_t c, StateIndex next) const {
    return transition[(s * num_candidates + c) * num_states + next];
  }
  double effective_reward(StateIndex s, std::size_t c) const { return reward[s * num_candidates + c]; }
};

enum class Relaxation {
  /// Fixed lower-bound mixture plus one free candidate per policy action and the non-policy action.
  kFixedMixture,
  /// Delay ranges over [non_policy_lower, max_delay]; the acting share keeps the decided
  /// classification mass. Candidates are (delay endpoint, free action) pairs.
  kDelayInterval,
  /// Per-state backup over completions of the undecided guesses, keeping each guess's
  /// action tied to the delay it causes against decided states. Not expressible as a
  /// PcMdp; see coupled_upper_bound().
  kCoupledDelay,
};

PcMdp build_pc_mdp(const HasaMdp& model, const PartialPolicy& partial,
                   DelayLowerBound mode = DelayLowerBound::kDecidedEvents,
                   Relaxation relaxation = Relaxation::kFixedMixture);
PcMdp build_pc_mdp(const HasaMdp& model, FixedProbabilityBounds bounds,
                   Relaxation relaxation = Relaxation::kFixedMixture);

struct UpperBound {
  ValueVector upper;
  std::size_t iterations = 0;
  double final_delta = 0.0;  // sup-norm change of the last sweep
  bool stopped_early = false;
};

/// Ends value iteration as soon as the `weights`-weighted value is known to lie on one
/// side of `threshold`, for callers that only compare the bound against it. The
/// returned vector is still a valid upper bound, though looser than a converged one.
struct EarlyStop {
  std::span<const double> weights;
  double threshold = -std::numeric_limits<double>::infinity();

  /// Whether the a-posteriori bound of iterate `v` (last change `delta`) is at or below the threshold.
  bool below(const ValueVector& v, double delta, double gamma) const { return weighted(v, -delta * gamma / (1.0 - gamma)) <= 0.0; }
  /// Whether the fixed point is certainly above the threshold.
  bool above(const ValueVector& v, double delta, double gamma) const { return weighted(v, delta * gamma / (1.0 - gamma)) > 0.0; }
  bool decided(const ValueVector& v, double delta, double gamma) const { return below(v, delta, gamma) || above(v, delta, gamma); }

 private:
  double weighted(const ValueVector& v, double shift) const {
    double total = 0.0;
    for (std::size_t s = 0; s < v.size(); ++s) total += weights[s] * (v[s] - shift);
    return total - threshold;
  }
};

inline constexpr std::size_t kDefaultViIterations = 1000;
inline constexpr double kDefaultViEpsilon = 1e-10;

/**
 * Value iteration from v_0 = 0, stopping after `max_iters` sweeps or when the
 * sup-norm change drops to `epsilon_target`. Returns v_k + delta * gamma / (1 - gamma),
 * which dominates the optimal PC-MDP value in every state.
 */
UpperBound vi_upper_bound(const PcMdp& pc, std::size_t max_iters = kDefaultViIterations,
                          double epsilon_target = kDefaultViEpsilon, const EarlyStop* early_stop = nullptr);

/**
 * Value iteration on the coupled relaxation. For every true state the backup
 * maximizes over the convex hull of (delay, acting advantage) pairs reachable by
 * completing the undecided guesses, with ambiguous events free to conflict or not.
 * Dominates the value of every completion of `partial`.
 */
UpperBound coupled_upper_bound(const HasaMdp& model, const PartialPolicy& partial,
                               std::size_t max_iters = kDefaultViIterations, double epsilon_target = kDefaultViEpsilon,
                               const EarlyStop* early_stop = nullptr);

/// Per-state upper bound for `partial` under the chosen relaxation.
UpperBound relaxed_upper_bound(const HasaMdp& model, const PartialPolicy& partial, Relaxation relaxation,
                               DelayLowerBound mode, std::size_t max_iters = kDefaultViIterations,
                               double epsilon_target = kDefaultViEpsilon, const EarlyStop* early_stop = nullptr);

/// Sweeps needed for an epsilon-accurate value: ceil(log(2 Rmax / (eps (1 - gamma))) / log(1 / gamma)).
std::size_t vi_iterations_for_error(double max_abs_reward, double epsilon, double discount);

}  // namespace hasa
