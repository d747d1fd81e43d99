#include "hasa/domains.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <string>

namespace hasa {

namespace {

void check_config(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

void check_common(double discount, double slip, double psi) {
  check_config(discount >= 0.0 && discount < 1.0, "discount must lie in [0, 1)");
  check_config(slip >= 0.0 && slip <= 1.0, "slip must lie in [0, 1]");
  check_config(psi >= 0.0 && psi <= 1.0, "psi must lie in [0, 1]");
}

enum GridAction : ActionIndex { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
constexpr std::size_t kGridActions = 4;

}  // namespace

std::vector<double> gridworld_classification(std::size_t width, std::size_t height, double m) {
  const std::size_t n = width * height;
  std::vector<double> table(n * n);
  for (StateIndex t = 0; t < n; ++t) {
    const long tr = static_cast<long>(t / width);
    const long tc = static_cast<long>(t % width);
    double total = 0.0;
    for (StateIndex g = 0; g < n; ++g) {
      const long l1 = std::labs(tr - static_cast<long>(g / width)) + std::labs(tc - static_cast<long>(g % width));
      const double w = 1.0 / std::pow(static_cast<double>(l1 + (g == t ? 1 : 0)), m);
      table[t * n + g] = w;
      total += w;
    }
    for (StateIndex g = 0; g < n; ++g) table[t * n + g] /= total;
  }
  return table;
}

std::vector<UncertaintyEvent> pairwise_uncertainty(std::size_t num_states, const std::vector<double>& classification) {
  std::vector<UncertaintyEvent> events;
  for (StateIndex t = 0; t < num_states; ++t) {
    const double* p = classification.data() + t * num_states;
    const std::size_t first = events.size();
    double total = 0.0;
    for (StateIndex i = 0; i < num_states; ++i) {
      for (StateIndex j = i + 1; j < num_states; ++j) {
        const double w = 0.5 * (p[i] + p[j]);
        if (w <= 0.0) continue;
        const StateIndex best = p[i] >= p[j] ? i : j;
        const StateIndex alt = best == i ? j : i;
        events.push_back(UncertaintyEvent{t, best, {alt}, w});
        total += w;
      }
    }
    for (std::size_t k = first; k < events.size(); ++k) events[k].weight /= total;
  }
  return events;
}

HasaMdp make_gridworld(const GridworldConfig& config) {
  check_config(config.width >= 1 && config.height >= 1, "grid width and height must be at least 1");
  check_config(config.m >= 1.0, "m must be at least 1");
  check_config(config.rnr >= 0.0, "rnr must be non-negative");
  check_common(config.discount, config.slip, config.psi);

  const std::size_t w = config.width;
  const std::size_t n = w * config.height;
  const StateIndex goal = n - 1;
  constexpr std::size_t slots = kGridActions + 1;

  ModelSpec spec;
  for (StateIndex s = 0; s < n; ++s) spec.states.push_back("r" + std::to_string(s / w) + "c" + std::to_string(s % w));
  spec.actions = {"up", "down", "left", "right"};
  spec.non_policy_action = "wait";
  spec.discount = config.discount;

  auto move = [&](StateIndex s, ActionIndex a) -> StateIndex {
    const std::size_t r = s / w;
    const std::size_t c = s % w;
    switch (a) {
      case kUp: return r > 0 ? s - w : s;
      case kDown: return r + 1 < config.height ? s + w : s;
      case kLeft: return c > 0 ? s - 1 : s;
      default: return c + 1 < w ? s + 1 : s;
    }
  };

  spec.transition.assign(n * slots * n, 0.0);
  spec.reward.assign(n * slots, 0.0);
  auto t_at = [&](StateIndex s, ActionIndex a, StateIndex next) -> double& {
    return spec.transition[(s * slots + a) * n + next];
  };

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> noise(-config.rnr / 2.0, config.rnr / 2.0);
  for (StateIndex s = 0; s < n; ++s) {
    if (s == goal) {
      for (ActionIndex a = 0; a < slots; ++a) t_at(s, a, s) = 1.0;
      continue;
    }
    for (ActionIndex a = 0; a < kGridActions; ++a) {
      t_at(s, a, move(s, a)) += 1.0 - config.slip;
      for (ActionIndex b = 0; b < kGridActions; ++b) t_at(s, a, move(s, b)) += config.slip / kGridActions;
      // Entering the goal pays the goal reward; the expectation is folded into r(s, a).
      double r = config.goal_reward * t_at(s, a, goal);
      if (config.rnr > 0.0) r += noise(rng);
      spec.reward[s * slots + a] = r;
    }
    t_at(s, kGridActions, s) = 1.0;
    spec.reward[s * slots + kGridActions] = config.non_policy_reward;
  }

  spec.initial_dist.assign(n, 1.0 / static_cast<double>(n));
  spec.classification = gridworld_classification(w, config.height, config.m);
  spec.uncertainty_events = pairwise_uncertainty(n, spec.classification);
  spec.patience.assign(n, config.psi);
  return HasaMdp(std::move(spec));
}

std::vector<double> warehouse_classification() {
  // Percent chance of guessing a size (per wrap variant) given the true size; small, medium, large.
  constexpr std::array<std::array<double, 3>, 3> kBySize = {{
      {32.68, 16.34, 0.98},
      {12.50, 25.00, 12.50},
      {0.98, 16.34, 32.68},
  }};
  constexpr std::size_t n = 6;
  std::vector<double> table(n * n);
  for (StateIndex t = 0; t < n; ++t) {
    double total = 0.0;
    for (StateIndex g = 0; g < n; ++g) {
      table[t * n + g] = kBySize[t / 2][g / 2] / 100.0;
      total += table[t * n + g];
    }
    table[t * n + t] += 1.0 - total;
  }
  return table;
}

HasaMdp make_warehouse(const WarehouseConfig& config) {
  constexpr std::size_t n = 6;
  constexpr std::size_t slots = n + 1;
  check_config(config.rnr >= 0.0, "rnr must be non-negative");
  check_common(config.discount, config.slip, config.psi);
  check_config(config.order_distribution.size() == n, "order distribution needs 6 entries");
  double order_total = 0.0;
  for (double p : config.order_distribution) {
    check_config(p >= 0.0, "order probabilities must be non-negative");
    order_total += p;
  }
  check_config(std::abs(order_total - 1.0) <= kProbabilityTolerance, "order distribution must sum to 1");

  ModelSpec spec;
  spec.states = {"small", "small_wrap", "medium", "medium_wrap", "large", "large_wrap"};
  for (const auto& s : spec.states) spec.actions.push_back("pack_" + s);
  spec.non_policy_action = "wait";
  spec.discount = config.discount;

  // Intended outcome of each (order, packing) pair before slip.
  std::vector<double> direct(n * n * n, 0.0);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> reduction(0.0, config.rnr);
  spec.reward.assign(n * slots, 0.0);
  for (StateIndex s = 0; s < n; ++s) {
    const std::size_t size = s / 2;
    const bool wrap = (s % 2) == 1;
    for (ActionIndex a = 0; a < n; ++a) {
      const std::size_t box = a / 2;
      double* out = direct.data() + (s * n + a) * n;
      double reward;
      if (box >= size) {
        for (StateIndex next = 0; next < n; ++next) out[next] = config.order_distribution[next];
        reward = 1.0;
      } else {
        const StateIndex residual = (size - 1) * 2;
        if (wrap) {
          out[residual] = 0.5;
          out[residual + 1] = 0.5;
        } else {
          out[residual] = 1.0;
        }
        reward = config.partial_reward;
      }
      if (a != s && config.rnr > 0.0) reward -= reduction(rng);
      spec.reward[s * slots + a] = reward;
    }
    spec.reward[s * slots + n] = config.non_policy_reward;
  }

  spec.transition.assign(n * slots * n, 0.0);
  for (StateIndex s = 0; s < n; ++s) {
    for (ActionIndex a = 0; a < n; ++a) {
      double* out = spec.transition.data() + (s * slots + a) * n;
      for (StateIndex next = 0; next < n; ++next) {
        double slipped = 0.0;
        for (ActionIndex b = 0; b < n; ++b) slipped += direct[(s * n + b) * n + next];
        out[next] = (1.0 - config.slip) * direct[(s * n + a) * n + next] + config.slip * slipped / n;
      }
    }
    spec.transition[(s * slots + n) * n + s] = 1.0;
  }

  spec.initial_dist = config.order_distribution;
  spec.classification = warehouse_classification();
  spec.uncertainty_events = pairwise_uncertainty(n, spec.classification);
  spec.patience.assign(n, config.psi);
  return HasaMdp(std::move(spec));
}

}  // namespace hasa
