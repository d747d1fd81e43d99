#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hasa {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

/// Absolute tolerance for every probability comparison in the library.
inline constexpr double kProbabilityTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A malformed configuration or argument supplied to a constructor/generator.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/**
 * One mental event of the human in a given true state: the state they believe
 * they are in (best guess) together with the set of states they are still
 * entertaining. An alternate set equal to {best_guess} encodes confidence.
 */
struct UncertaintyEvent {
  StateIndex true_state = 0;
  StateIndex best_guess = 0;
  std::vector<StateIndex> alternates;
  double weight = 0.0;

  bool is_confident() const {
    return alternates.size() == 1 && alternates.front() == best_guess;
  }

  friend bool operator==(const UncertaintyEvent&, const UncertaintyEvent&) = default;
};

/**
 * Per-true-state distribution over uncertainty events.
 *
 * Events are grouped by true state. Construction normalizes the weights of
 * each true state to sum to one; a true state whose events carry no mass is
 * given a single confident self-event of weight one.
 */
class UncertaintyModel {
 public:
  UncertaintyModel() = default;
  UncertaintyModel(std::size_t num_states, std::vector<UncertaintyEvent> events);

  std::size_t num_states() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const UncertaintyEvent> events() const { return events_; }
  std::span<const UncertaintyEvent> events_for(StateIndex true_state) const;

  friend bool operator==(const UncertaintyModel&, const UncertaintyModel&) = default;

 private:
  std::vector<UncertaintyEvent> events_;
  std::vector<std::size_t> offsets_;
};

/// Plain data used to build a HasaMdp. Tables are dense and row-major.
struct ModelSpec {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::string non_policy_action = "non_policy";
  // transition[(s * (|A|+1) + a) * |S| + s']; slot a = |A| is the non-policy action.
  std::vector<double> transition;
  // reward[s * (|A|+1) + a]
  std::vector<double> reward;
  double discount = 0.0;
  std::vector<double> initial_dist;
  // classification[true * |S| + guess]
  std::vector<double> classification;
  std::vector<UncertaintyEvent> uncertainty_events;
  std::vector<double> patience;
};

/**
 * A Human-Agent State-Aliased MDP. Immutable after construction.
 *
 * Shapes are checked at construction (a wrong table size throws ConfigError);
 * numerical invariants are reported by validate_model() instead, so that a
 * document with e.g. a bad row sum can still be loaded and diagnosed.
 */
class HasaMdp {
 public:
  explicit HasaMdp(ModelSpec spec);

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_actions() const { return actions_.size(); }
  /// Index of the non-policy action in the transition/reward tables.
  ActionIndex non_policy_index() const { return actions_.size(); }
  /// Number of action slots in the tables (policy actions + non-policy).
  std::size_t num_action_slots() const { return actions_.size() + 1; }

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& actions() const { return actions_; }
  const std::string& non_policy_action() const { return non_policy_action_; }

  double transition(StateIndex s, ActionIndex a, StateIndex next) const {
    return transition_[(s * num_action_slots() + a) * num_states() + next];
  }
  std::span<const double> transition_row(StateIndex s, ActionIndex a) const {
    return {transition_.data() + (s * num_action_slots() + a) * num_states(), num_states()};
  }
  double reward(StateIndex s, ActionIndex a) const { return reward_[s * num_action_slots() + a]; }
  double discount() const { return discount_; }
  double initial(StateIndex s) const { return initial_[s]; }
  std::span<const double> initial_dist() const { return initial_; }
  /// p_c(guess | true_state).
  double classification(StateIndex true_state, StateIndex guess) const {
    return classification_[true_state * num_states() + guess];
  }
  std::span<const double> classification_row(StateIndex true_state) const {
    return {classification_.data() + true_state * num_states(), num_states()};
  }
  const UncertaintyModel& uncertainty() const { return uncertainty_; }
  double patience(StateIndex s) const { return patience_[s]; }

  StateIndex state_index(const std::string& name) const;
  ActionIndex action_index(const std::string& name) const;

  /// Reconstructs the plain data (uncertainty weights as normalized).
  ModelSpec to_spec() const;

 private:
  std::vector<std::string> states_;
  std::vector<std::string> actions_;
  std::string non_policy_action_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double discount_;
  std::vector<double> initial_;
  std::vector<double> classification_;
  UncertaintyModel uncertainty_;
  std::vector<double> patience_;
};

/// A total state -> policy action map. The non-policy action is never assignable.
class DeterministicPolicy {
 public:
  DeterministicPolicy() = default;
  explicit DeterministicPolicy(std::vector<ActionIndex> actions) : actions_(std::move(actions)) {}
  static DeterministicPolicy uniform(std::size_t num_states, ActionIndex action) {
    return DeterministicPolicy(std::vector<ActionIndex>(num_states, action));
  }

  std::size_t size() const { return actions_.size(); }
  ActionIndex operator[](StateIndex s) const { return actions_[s]; }
  void set(StateIndex s, ActionIndex a) { actions_[s] = a; }
  const std::vector<ActionIndex>& actions() const { return actions_; }

  friend bool operator==(const DeterministicPolicy&, const DeterministicPolicy&) = default;
  friend auto operator<=>(const DeterministicPolicy&, const DeterministicPolicy&) = default;

 private:
  std::vector<ActionIndex> actions_;
};

/// Policy actions for a subset of states; the node type of branch-and-bound.
class PartialPolicy {
 public:
  static constexpr ActionIndex kUndecided = std::numeric_limits<ActionIndex>::max();

  PartialPolicy() = default;
  explicit PartialPolicy(std::size_t num_states) : actions_(num_states, kUndecided) {}
  explicit PartialPolicy(const DeterministicPolicy& total) : actions_(total.actions()), num_decided_(total.size()) {}

  std::size_t size() const { return actions_.size(); }
  bool decided(StateIndex s) const { return actions_[s] != kUndecided; }
  ActionIndex operator[](StateIndex s) const { return actions_[s]; }
  std::size_t num_decided() const { return num_decided_; }
  bool is_total() const { return num_decided_ == actions_.size(); }

  void assign(StateIndex s, ActionIndex a);
  void clear(StateIndex s);
  /// Throws std::logic_error unless total.
  DeterministicPolicy to_deterministic() const;

  friend bool operator==(const PartialPolicy&, const PartialPolicy&) = default;

 private:
  std::vector<ActionIndex> actions_;
  std::size_t num_decided_ = 0;
};

/// Per-state distribution over the policy actions plus the non-policy action (last column).
class StochasticPolicy {
 public:
  StochasticPolicy(std::size_t num_states, std::size_t num_action_slots)
      : num_slots_(num_action_slots), prob_(num_states * num_action_slots, 0.0) {}

  std::size_t num_states() const { return num_slots_ == 0 ? 0 : prob_.size() / num_slots_; }
  std::size_t num_action_slots() const { return num_slots_; }
  double operator()(StateIndex s, ActionIndex a) const { return prob_[s * num_slots_ + a]; }
  double& operator()(StateIndex s, ActionIndex a) { return prob_[s * num_slots_ + a]; }
  std::span<const double> row(StateIndex s) const { return {prob_.data() + s * num_slots_, num_slots_}; }

 private:
  std::size_t num_slots_;
  std::vector<double> prob_;
};

struct Violation {
  std::string field;
  std::string index;
  double residual = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_model(const HasaMdp& model);

}  // namespace hasa
