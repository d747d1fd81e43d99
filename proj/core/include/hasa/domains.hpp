#pragma once

#include <cstdint>
#include <vector>

#include "hasa/model.hpp"

namespace hasa {

struct GridworldConfig {
  std::size_t width = 5;
  std::size_t height = 5;
  /// Exponent of the inverse-L1 confusion weights; larger means less aliasing.
  double m = 5.0;
  double discount = 0.7;
  /// Per-(state, action) reward noise, uniform in [-rnr/2, rnr/2].
  double rnr = 0.0;
  double slip = 0.05;
  double goal_reward = 100.0;
  double non_policy_reward = -0.1;
  double psi = 1.0;
  std::uint64_t seed = 0;
};

/// Cells are named "r<row>c<col>" in row-major order; the goal is the bottom-right cell.
/// Actions are up, down, left, right; the non-policy action is "wait".
HasaMdp make_gridworld(const GridworldConfig& config);

/// Inverse-L1-distance classification for the grid, row-major [true * n + guess].
std::vector<double> gridworld_classification(std::size_t width, std::size_t height, double m);

/**
 * Uncertainty events built from a classification table: every unordered pair of
 * distinct states weighted by the mean of their classification probabilities,
 * normalized per true state. The more likely guess of the pair is the best guess.
 */
std::vector<UncertaintyEvent> pairwise_uncertainty(std::size_t num_states, const std::vector<double>& classification);

struct WarehouseConfig {
  double rnr = 0.0;
  double discount = 0.7;
  double slip = 0.05;
  /// Probability of each fresh order type, in state order.
  std::vector<double> order_distribution = std::vector<double>(6, 1.0 / 6.0);
  double psi = 1.0;
  double non_policy_reward = -0.1;
  /// Reward for packing only part of an order (undersized box), before noise.
  double partial_reward = 0.5;
  std::uint64_t seed = 0;
};

/// States and actions are small, small_wrap, medium, medium_wrap, large, large_wrap
/// (actions carry a "pack_" prefix); the non-policy action is "wait".
HasaMdp make_warehouse(const WarehouseConfig& config);

/// The worker's confusion table, [true * 6 + guess], in state order.
std::vector<double> warehouse_classification();

}  // namespace hasa
