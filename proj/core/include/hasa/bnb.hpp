#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "hasa/model.hpp"
#include "hasa/sapi.hpp"
#include "hasa/valuation.hpp"

namespace hasa {

/// States sorted by descending p_i(s) * sum_{s'} p_c(s | s') * max_a r(s', a); ties by index.
std::vector<StateIndex> order_states(const HasaMdp& model);

enum class SearchOrder { kBestFirst, kDepthFirst };

struct BnbNode {
  PartialPolicy partial;
  std::size_t depth = 0;
  double upper_bound = 0.0;
};

/// Reported once for every opened node, after its bound (or exact leaf value) is known.
struct NodeEvent {
  const BnbNode& node;
  double incumbent;
  bool is_leaf;
};

struct BnbConfig {
  std::size_t vi_max_iters = kDefaultViIterations;
  double epsilon_target = kDefaultViEpsilon;
  double prune_tolerance = 1e-12;
  SearchOrder order = SearchOrder::kBestFirst;
  /// Restarts of the SAPI run that seeds the incumbent; 0 starts from -infinity.
  std::size_t sapi_restarts = kDefaultSapiRestarts;
  std::uint64_t seed = 0;
  /// A known policy to start from instead of running SAPI.
  std::optional<DeterministicPolicy> incumbent;
  DelayLowerBound delay_bound = DelayLowerBound::kAnticipated;
  Relaxation relaxation = Relaxation::kCoupledDelay;
  /// With bounds disabled every node is expanded (exhaustive tree walk).
  bool use_bounds = true;
  /// Stop after this many opened nodes (0 = unlimited); the result is then marked incomplete.
  std::size_t node_limit = 0;
  std::function<void(const NodeEvent&)> on_node;
};

struct BnbResult {
  DeterministicPolicy policy;
  double value = -std::numeric_limits<double>::infinity();
  double initial_incumbent = -std::numeric_limits<double>::infinity();
  std::size_t nodes_opened = 0;
  double wall_seconds = 0.0;
  bool complete = true;
};

/// Initial-distribution-weighted PC-MDP value-iteration bound for a partial policy.
double node_upper_bound(const HasaMdp& model, const PartialPolicy& partial, std::size_t vi_max_iters = kDefaultViIterations,
                        double epsilon_target = kDefaultViEpsilon,
                        DelayLowerBound mode = DelayLowerBound::kAnticipated,
                        Relaxation relaxation = Relaxation::kCoupledDelay);

BnbResult branch_and_bound(const HasaMdp& model, const BnbConfig& config = {});

}  // namespace hasa
