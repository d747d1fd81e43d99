#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hasa/model.hpp"

namespace hasa {

inline constexpr double kDefaultEnumerationCap = 1e6;

class EnumerationLimitError : public Error {
 public:
  EnumerationLimitError(double space, double cap);
  double space() const { return space_; }

 private:
  double space_;
};

struct EnumerationResult {
  DeterministicPolicy policy;
  double value = 0.0;
  std::size_t evaluated = 0;
};

/// Evaluates every deterministic policy; ties resolve to the lexicographically smallest.
EnumerationResult enumerate_optimal(const HasaMdp& model, double cap = kDefaultEnumerationCap);

/// Samples the action a state-aliased human executes: draw a mental event; if it
/// conflicts, delay with probability psi; otherwise act on a classification guess.
/// Holds a reference to `model`, which must outlive the sampler.
class ExecutionSampler {
 public:
  ExecutionSampler(const HasaMdp& model, const DeterministicPolicy& policy);

  ActionIndex sample_action(StateIndex s, std::mt19937_64& rng);
  StateIndex sample_next(StateIndex s, ActionIndex a, std::mt19937_64& rng);
  StateIndex sample_initial(std::mt19937_64& rng) { return initial_(rng); }

 private:
  const HasaMdp& model_;
  DeterministicPolicy policy_;
  std::discrete_distribution<StateIndex> initial_;
  std::vector<std::discrete_distribution<std::size_t>> events_;
  std::vector<std::vector<bool>> event_conflicts_;
  std::vector<std::discrete_distribution<StateIndex>> guesses_;
  std::vector<std::discrete_distribution<StateIndex>> transitions_;
};

struct SimEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t episodes = 0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
};

/// Smallest horizon with gamma^H <= 1e-6, so the truncated tail is below 1e-6 of Rmax / (1 - gamma).
std::size_t default_horizon(const HasaMdp& model);

/// Upper bound on |value - truncated value|: gamma^H * Rmax / (1 - gamma).
double truncation_bias_bound(const HasaMdp& model, std::size_t horizon);

/// Monte Carlo discounted return from the initial distribution; `horizon` 0 picks default_horizon().
SimEstimate simulate_policy(const HasaMdp& model, const DeterministicPolicy& policy, std::size_t episodes,
                            std::size_t horizon, std::uint64_t seed);

}  // namespace hasa
