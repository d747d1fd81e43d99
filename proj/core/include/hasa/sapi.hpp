#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hasa/model.hpp"

namespace hasa {

enum class SapiMode {
  /// Evaluate every single-state substitution and take the best one.
  kGlobalBest,
  /// Visit states in a seeded random order and take the best action for that state alone.
  kPerStateGreedy,
};

struct SapiConfig {
  SapiMode mode = SapiMode::kGlobalBest;
  /// A change is accepted only if it improves the value by more than this.
  double improvement_threshold = 1e-12;
};

inline constexpr std::size_t kDefaultSapiRestarts = 10;

struct SapiResult {
  DeterministicPolicy policy;
  double value = 0.0;
  /// Value of the initial policy followed by the value after every accepted change.
  std::vector<double> trace;
  std::size_t steps = 0;
  std::size_t restart_index = 0;
};

struct SapiRestartsResult {
  SapiResult best;
  std::vector<SapiResult> runs;
};

/// Draws one action per state uniformly.
DeterministicPolicy random_policy(const HasaMdp& model, std::mt19937_64& rng);

SapiResult sapi_run(const HasaMdp& model, DeterministicPolicy initial, const SapiConfig& config = {},
                    std::uint64_t order_seed = 0);
/// Starts from random_policy() drawn from a generator seeded with `seed`.
SapiResult sapi_run(const HasaMdp& model, std::uint64_t seed, const SapiConfig& config = {});

/// `n_restarts` runs from distinct seeded initial policies (distinct whenever the
/// policy space allows it); the best run wins, earliest restart on ties.
SapiRestartsResult sapi_restarts(const HasaMdp& model, std::size_t n_restarts, std::uint64_t seed,
                                 const SapiConfig& config = {});

}  // namespace hasa
