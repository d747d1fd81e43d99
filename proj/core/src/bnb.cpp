#include "hasa/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <queue>

namespace hasa {

namespace {

struct SearchNode {
  BnbNode node;
  ValueVector state_upper;
  std::uint64_t sequence = 0;
};

struct BestFirstLess {
  bool operator()(const SearchNode& a, const SearchNode& b) const {
    if (a.node.upper_bound != b.node.upper_bound) return a.node.upper_bound < b.node.upper_bound;
    if (a.node.depth != b.node.depth) return a.node.depth < b.node.depth;
    return a.sequence > b.sequence;
  }
};

double weighted(const HasaMdp& model, const ValueVector& v) {
  double total = 0.0;
  for (StateIndex s = 0; s < model.num_states(); ++s) total += model.initial(s) * v[s];
  return total;
}

// Policy actions ordered by the one-step PC-MDP value of fixing them in `state`.
std::vector<ActionIndex> branch_order(const HasaMdp& model, const PartialPolicy& partial, StateIndex state,
                                      const ValueVector& state_upper, DelayLowerBound mode, Relaxation relaxation) {
  std::vector<ActionIndex> actions(model.num_actions());
  std::iota(actions.begin(), actions.end(), ActionIndex{0});
  if (state_upper.empty()) return actions;

  std::vector<double> score(model.num_actions());
  for (ActionIndex a = 0; a < model.num_actions(); ++a) {
    PartialPolicy fixed = partial;
    fixed.assign(state, a);
    const PcMdp pc = build_pc_mdp(model, fixed, mode, relaxation == Relaxation::kCoupledDelay ? Relaxation::kDelayInterval : relaxation);
    // The best candidate behaviour in the branching state under the parent's bound.
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < pc.num_candidates; ++c) {
      double q = 0.0;
      for (StateIndex t = 0; t < pc.num_states; ++t) q += pc.effective_transition(state, c, t) * state_upper[t];
      best = std::max(best, pc.effective_reward(state, c) + pc.discount * q);
    }
    score[a] = best;
  }
  std::stable_sort(actions.begin(), actions.end(), [&](ActionIndex x, ActionIndex y) { return score[x] > score[y]; });
  return actions;
}

}  // namespace

std::vector<StateIndex> order_states(const HasaMdp& model) {
  const std::size_t n = model.num_states();
  std::vector<double> max_reward(n);
  for (StateIndex s = 0; s < n; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (ActionIndex a = 0; a < model.num_actions(); ++a) best = std::max(best, model.reward(s, a));
    max_reward[s] = best;
  }
  std::vector<double> score(n);
  for (StateIndex s = 0; s < n; ++s) {
    double confusion = 0.0;
    for (StateIndex other = 0; other < n; ++other) confusion += model.classification(other, s) * max_reward[other];
    score[s] = model.initial(s) * confusion;
  }
  std::vector<StateIndex> order(n);
  std::iota(order.begin(), order.end(), StateIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](StateIndex a, StateIndex b) { return score[a] > score[b]; });
  return order;
}

double node_upper_bound(const HasaMdp& model, const PartialPolicy& partial, std::size_t vi_max_iters,
                        double epsilon_target, DelayLowerBound mode, Relaxation relaxation) {
  return weighted(model, relaxed_upper_bound(model, partial, relaxation, mode, vi_max_iters, epsilon_target).upper);
}

BnbResult branch_and_bound(const HasaMdp& model, const BnbConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = model.num_states();
  const std::vector<StateIndex> order = order_states(model);

  BnbResult result;
  if (config.incumbent) {
    result.policy = *config.incumbent;
    result.value = policy_value(model, result.policy);
  } else if (config.sapi_restarts > 0) {
    SapiRestartsResult seed_run = sapi_restarts(model, config.sapi_restarts, config.seed);
    result.policy = seed_run.best.policy;
    result.value = seed_run.best.value;
  }
  result.initial_incumbent = result.value;

  auto bound_of = [&](const PartialPolicy& partial, ValueVector& state_upper) {
    if (!config.use_bounds) return std::numeric_limits<double>::infinity();
    // Value iteration only runs until the node is known to be pruned or kept.
    const EarlyStop stop{model.initial_dist(), result.value + config.prune_tolerance};
    state_upper = relaxed_upper_bound(model, partial, config.relaxation, config.delay_bound, config.vi_max_iters,
                                      config.epsilon_target, &stop)
                      .upper;
    return weighted(model, state_upper);
  };
  auto promising = [&](double bound) { return bound > result.value + config.prune_tolerance; };

  std::priority_queue<SearchNode, std::vector<SearchNode>, BestFirstLess> frontier_best;
  std::vector<SearchNode> frontier_depth;
  auto push = [&](SearchNode node) {
    if (config.order == SearchOrder::kBestFirst) {
      frontier_best.push(std::move(node));
    } else {
      frontier_depth.push_back(std::move(node));
    }
  };
  auto empty = [&] { return config.order == SearchOrder::kBestFirst ? frontier_best.empty() : frontier_depth.empty(); };
  auto pop = [&] {
    SearchNode node;
    if (config.order == SearchOrder::kBestFirst) {
      node = frontier_best.top();
      frontier_best.pop();
    } else {
      node = std::move(frontier_depth.back());
      frontier_depth.pop_back();
    }
    return node;
  };

  std::uint64_t sequence = 0;
  {
    // The root relaxation only orders the first branching; it is not an assignment node.
    SearchNode root;
    root.node.partial = PartialPolicy(n);
    root.node.upper_bound = std::numeric_limits<double>::infinity();
    if (config.use_bounds) {
      root.state_upper =
          relaxed_upper_bound(model, root.node.partial, config.relaxation, config.delay_bound, config.vi_max_iters, config.epsilon_target).upper;
    }
    root.sequence = sequence++;
    push(std::move(root));
  }

  while (!empty()) {
    SearchNode current = pop();
    if (!promising(current.node.upper_bound)) {
      if (config.order == SearchOrder::kBestFirst) break;
      continue;
    }
    const StateIndex branch_state = order[current.node.depth];
    std::vector<ActionIndex> actions = branch_order(model, current.node.partial, branch_state, current.state_upper, config.delay_bound, config.relaxation);

    std::vector<SearchNode> children;
    for (ActionIndex a : actions) {
      if (config.node_limit != 0 && result.nodes_opened >= config.node_limit) {
        result.complete = false;
        break;
      }
      SearchNode child;
      child.node.partial = current.node.partial;
      child.node.partial.assign(branch_state, a);
      child.node.depth = current.node.depth + 1;
      child.sequence = sequence++;
      ++result.nodes_opened;

      if (child.node.depth == n) {
        const DeterministicPolicy policy = child.node.partial.to_deterministic();
        const double value = policy_value(model, policy);
        child.node.upper_bound = value;
        if (value > result.value) {
          result.value = value;
          result.policy = policy;
        }
        if (config.on_node) config.on_node(NodeEvent{child.node, result.value, true});
        continue;
      }
      child.node.upper_bound = bound_of(child.node.partial, child.state_upper);
      if (config.on_node) config.on_node(NodeEvent{child.node, result.value, false});
      if (promising(child.node.upper_bound)) children.push_back(std::move(child));
    }
    // Depth-first pops from the back, so push the preferred child last.
    if (config.order == SearchOrder::kDepthFirst) std::reverse(children.begin(), children.end());
    for (auto& child : children) push(std::move(child));
    if (!result.complete) break;
  }

  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace hasa
