#include "hasa/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace hasa {

ValueVector mrp_value(const HasaMdp& model, const StochasticPolicy& stochastic) {
  const auto n = static_cast<Eigen::Index>(model.num_states());
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rewards = Eigen::VectorXd::Zero(n);
  const double gamma = model.discount();

  for (Eigen::Index s = 0; s < n; ++s) {
    const auto si = static_cast<StateIndex>(s);
    for (ActionIndex a = 0; a < model.num_action_slots(); ++a) {
      const double p = stochastic(si, a);
      if (p == 0.0) continue;
      rewards(s) += p * model.reward(si, a);
      const auto row = model.transition_row(si, a);
      for (Eigen::Index t = 0; t < n; ++t) system(s, t) -= gamma * p * row[static_cast<std::size_t>(t)];
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd v = lu.solve(rewards);
  double residual = (system * v - rewards).lpNorm<Eigen::Infinity>();
  for (int refine = 0; refine < 3 && residual > kMrpResidualTolerance; ++refine) {
    v += lu.solve(rewards - system * v);
    residual = (system * v - rewards).lpNorm<Eigen::Infinity>();
  }
  if (!(residual <= kMrpResidualTolerance) || !v.allFinite()) {
    throw NumericError("Markov reward process solve failed (residual " + std::to_string(residual) + ")");
  }
  return ValueVector(v.data(), v.data() + n);
}

ValueVector policy_state_values(const HasaMdp& model, const DeterministicPolicy& policy) {
  return mrp_value(model, induce_stochastic(model, policy));
}

double policy_value(const HasaMdp& model, const DeterministicPolicy& policy) {
  const ValueVector v = policy_state_values(model, policy);
  double total = 0.0;
  for (StateIndex s = 0; s < model.num_states(); ++s) total += model.initial(s) * v[s];
  return total;
}

PcMdp build_pc_mdp(const HasaMdp& model, const PartialPolicy& partial, DelayLowerBound mode,
                   Relaxation relaxation) {
  return build_pc_mdp(model, fixed_probability_bounds(model, partial, mode), relaxation);
}

namespace {

PcMdp build_interval_pc_mdp(const HasaMdp& model, FixedProbabilityBounds bounds) {
  const std::size_t n = model.num_states();
  const std::size_t num_actions = model.num_actions();
  const ActionIndex np = model.non_policy_index();

  PcMdp pc;
  pc.num_states = n;
  pc.num_candidates = 2 * num_actions;
  pc.discount = model.discount();
  pc.residual = bounds.residual;
  pc.transition.assign(n * pc.num_candidates * n, 0.0);
  pc.reward.assign(n * pc.num_candidates, 0.0);

  std::vector<double> acting_row(n);
  for (StateIndex s = 0; s < n; ++s) {
    std::fill(acting_row.begin(), acting_row.end(), 0.0);
    double acting_reward = 0.0;
    double decided = 0.0;
    for (ActionIndex b = 0; b < num_actions; ++b) {
      const double w = bounds.decided_mass[s * num_actions + b];
      if (w == 0.0) continue;
      decided += w;
      acting_reward += w * model.reward(s, b);
      const auto row = model.transition_row(s, b);
      for (StateIndex t = 0; t < n; ++t) acting_row[t] += w * row[t];
    }
    const double free = std::max(0.0, 1.0 - decided);
    const auto np_row = model.transition_row(s, np);
    const double delays[2] = {bounds.non_policy_lower[s], bounds.max_delay[s]};
    for (std::size_t end = 0; end < 2; ++end) {
      const double d = delays[end];
      for (ActionIndex c = 0; c < num_actions; ++c) {
        const std::size_t cand = end * num_actions + c;
        const auto row = model.transition_row(s, c);
        double* out = pc.transition.data() + (s * pc.num_candidates + cand) * n;
        for (StateIndex t = 0; t < n; ++t) out[t] = d * np_row[t] + (1.0 - d) * (acting_row[t] + free * row[t]);
        pc.reward[s * pc.num_candidates + cand] =
            d * model.reward(s, np) + (1.0 - d) * (acting_reward + free * model.reward(s, c));
      }
    }
  }
  pc.bounds = std::move(bounds);
  return pc;
}

}  // namespace

PcMdp build_pc_mdp(const HasaMdp& model, FixedProbabilityBounds bounds, Relaxation relaxation) {
  if (relaxation == Relaxation::kCoupledDelay) throw std::invalid_argument("the coupled relaxation has no PcMdp form");
  if (relaxation == Relaxation::kDelayInterval) return build_interval_pc_mdp(model, std::move(bounds));
  const std::size_t n = model.num_states();
  const std::size_t num_actions = model.num_actions();
  const ActionIndex np = model.non_policy_index();

  PcMdp pc;
  pc.num_states = n;
  pc.num_candidates = model.num_action_slots();
  pc.discount = model.discount();
  pc.residual = bounds.residual;
  pc.transition.assign(n * pc.num_candidates * n, 0.0);
  pc.reward.assign(n * pc.num_candidates, 0.0);

  std::vector<double> fixed_row(n);
  for (StateIndex s = 0; s < n; ++s) {
    std::fill(fixed_row.begin(), fixed_row.end(), 0.0);
    double fixed_reward = 0.0;
    auto accumulate = [&](ActionIndex b, double weight) {
      if (weight == 0.0) return;
      fixed_reward += weight * model.reward(s, b);
      const auto row = model.transition_row(s, b);
      for (StateIndex t = 0; t < n; ++t) fixed_row[t] += weight * row[t];
    };
    for (ActionIndex b = 0; b < num_actions; ++b) accumulate(b, bounds.action(s, b));
    accumulate(np, bounds.non_policy_lower[s]);

    const double residual = bounds.residual[s];
    for (std::size_t c = 0; c < pc.num_candidates; ++c) {
      const auto row = model.transition_row(s, c);
      double* out = pc.transition.data() + (s * pc.num_candidates + c) * n;
      for (StateIndex t = 0; t < n; ++t) out[t] = fixed_row[t] + residual * row[t];
      pc.reward[s * pc.num_candidates + c] = fixed_reward + residual * model.reward(s, c);
    }
  }
  pc.bounds = std::move(bounds);
  return pc;
}

UpperBound vi_upper_bound(const PcMdp& pc, std::size_t max_iters, double epsilon_target, const EarlyStop* early_stop) {
  if (max_iters == 0) throw std::invalid_argument("vi_upper_bound needs at least one iteration");
  const std::size_t n = pc.num_states;
  const std::size_t cands = pc.num_candidates;
  const double gamma = pc.discount;

  ValueVector prev(n, 0.0);
  ValueVector next(n, 0.0);
  UpperBound out;
  double delta = 0.0;
  std::size_t k = 0;
  while (k < max_iters) {
    ++k;
    delta = 0.0;
    for (StateIndex s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < cands; ++c) {
        const double* row = pc.transition.data() + (s * cands + c) * n;
        double q = 0.0;
        for (StateIndex t = 0; t < n; ++t) q += row[t] * prev[t];
        best = std::max(best, pc.reward[s * cands + c] + gamma * q);
      }
      next[s] = best;
      delta = std::max(delta, std::abs(best - prev[s]));
    }
    std::swap(prev, next);
    if (delta <= epsilon_target) break;
    if (early_stop && early_stop->decided(prev, delta, gamma)) {
      out.stopped_early = true;
      break;
    }
  }
  const double correction = gamma < 1.0 ? delta * gamma / (1.0 - gamma) : std::numeric_limits<double>::infinity();
  out.upper.resize(n);
  for (StateIndex s = 0; s < n; ++s) out.upper[s] = prev[s] + correction;
  out.iterations = k;
  out.final_delta = delta;
  return out;
}

UpperBound relaxed_upper_bound(const HasaMdp& model, const PartialPolicy& partial, Relaxation relaxation,
                               DelayLowerBound mode, std::size_t max_iters, double epsilon_target,
                               const EarlyStop* early_stop) {
  if (relaxation == Relaxation::kCoupledDelay) {
    return coupled_upper_bound(model, partial, max_iters, epsilon_target, early_stop);
  }
  return vi_upper_bound(build_pc_mdp(model, partial, mode, relaxation), max_iters, epsilon_target, early_stop);
}

std::size_t vi_iterations_for_error(double max_abs_reward, double epsilon, double discount) {
  if (!(epsilon > 0.0) || !(discount > 0.0 && discount < 1.0)) {
    throw std::invalid_argument("vi_iterations_for_error needs epsilon > 0 and discount in (0, 1)");
  }
  if (max_abs_reward <= 0.0) return 1;
  const double num = std::log(2.0 * max_abs_reward / (epsilon * (1.0 - discount)));
  return static_cast<std::size_t>(std::max(1.0, std::ceil(num / std::log(1.0 / discount))));
}

}  // namespace hasa
