#include "hasa/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace hasa {

namespace {

void require_size(const char* field, std::size_t got, std::size_t want) {
  if (got != want) {
    std::ostringstream os;
    os << "model field '" << field << "' has " << got << " entries, expected " << want;
    throw ConfigError(os.str());
  }
}

std::string join_index(std::initializer_list<std::string> parts) {
  std::string out = "(";
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += ", ";
    out += p;
    first = false;
  }
  return out + ")";
}

}  // namespace

UncertaintyModel::UncertaintyModel(std::size_t num_states, std::vector<UncertaintyEvent> events) {
  for (const auto& e : events) {
    if (e.true_state >= num_states || e.best_guess >= num_states) {
      throw ConfigError("uncertainty event references a state index out of range");
    }
    for (StateIndex alt : e.alternates) {
      if (alt >= num_states) throw ConfigError("uncertainty event alternate out of range");
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const UncertaintyEvent& a, const UncertaintyEvent& b) { return a.true_state < b.true_state; });

  offsets_.assign(num_states + 1, 0);
  std::vector<UncertaintyEvent> normalized;
  normalized.reserve(events.size());
  auto it = events.begin();
  for (StateIndex s = 0; s < num_states; ++s) {
    auto end = std::find_if(it, events.end(), [s](const UncertaintyEvent& e) { return e.true_state != s; });
    double total = 0.0;
    for (auto e = it; e != end; ++e) total += e->weight;
    if (total > 0.0) {
      // Weights that already sum to one are kept verbatim so that rebuilding from to_spec() is exact.
      const double scale = std::abs(total - 1.0) <= 1e-12 ? 1.0 : total;
      for (auto e = it; e != end; ++e) {
        UncertaintyEvent copy = *e;
        copy.weight /= scale;
        normalized.push_back(std::move(copy));
      }
    } else {
      normalized.push_back(UncertaintyEvent{s, s, {s}, 1.0});
    }
    offsets_[s + 1] = normalized.size();
    it = end;
  }
  events_ = std::move(normalized);
}

std::span<const UncertaintyEvent> UncertaintyModel::events_for(StateIndex true_state) const {
  return std::span<const UncertaintyEvent>(events_).subspan(offsets_[true_state],
                                                             offsets_[true_state + 1] - offsets_[true_state]);
}

HasaMdp::HasaMdp(ModelSpec spec)
    : states_(std::move(spec.states)),
      actions_(std::move(spec.actions)),
      non_policy_action_(std::move(spec.non_policy_action)),
      transition_(std::move(spec.transition)),
      reward_(std::move(spec.reward)),
      discount_(spec.discount),
      initial_(std::move(spec.initial_dist)),
      classification_(std::move(spec.classification)),
      patience_(std::move(spec.patience)) {
  if (states_.empty()) throw ConfigError("model needs at least one state");
  if (actions_.empty()) throw ConfigError("model needs at least one policy action");
  const std::size_t n = states_.size();
  const std::size_t slots = actions_.size() + 1;
  require_size("transition", transition_.size(), n * slots * n);
  require_size("reward", reward_.size(), n * slots);
  require_size("initial_dist", initial_.size(), n);
  require_size("classification", classification_.size(), n * n);
  require_size("patience", patience_.size(), n);

  std::unordered_set<std::string> seen(states_.begin(), states_.end());
  if (seen.size() != n) throw ConfigError("duplicate state identifier");
  seen = std::unordered_set<std::string>(actions_.begin(), actions_.end());
  if (seen.size() != actions_.size()) throw ConfigError("duplicate action identifier");
  if (seen.contains(non_policy_action_)) {
    throw ConfigError("non-policy action '" + non_policy_action_ + "' collides with a policy action");
  }

  uncertainty_ = UncertaintyModel(n, std::move(spec.uncertainty_events));
}

StateIndex HasaMdp::state_index(const std::string& name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) throw ConfigError("unknown state '" + name + "'");
  return static_cast<StateIndex>(it - states_.begin());
}

ActionIndex HasaMdp::action_index(const std::string& name) const {
  if (name == non_policy_action_) return non_policy_index();
  auto it = std::find(actions_.begin(), actions_.end(), name);
  if (it == actions_.end()) throw ConfigError("unknown action '" + name + "'");
  return static_cast<ActionIndex>(it - actions_.begin());
}

ModelSpec HasaMdp::to_spec() const {
  ModelSpec spec;
  spec.states = states_;
  spec.actions = actions_;
  spec.non_policy_action = non_policy_action_;
  spec.transition = transition_;
  spec.reward = reward_;
  spec.discount = discount_;
  spec.initial_dist = initial_;
  spec.classification = classification_;
  spec.uncertainty_events.assign(uncertainty_.events().begin(), uncertainty_.events().end());
  spec.patience = patience_;
  return spec;
}

void PartialPolicy::assign(StateIndex s, ActionIndex a) {
  if (a == kUndecided) throw std::invalid_argument("cannot assign the undecided marker");
  if (!decided(s)) ++num_decided_;
  actions_[s] = a;
}

void PartialPolicy::clear(StateIndex s) {
  if (decided(s)) --num_decided_;
  actions_[s] = kUndecided;
}

DeterministicPolicy PartialPolicy::to_deterministic() const {
  if (!is_total()) throw std::logic_error("partial policy is not total");
  return DeterministicPolicy(actions_);
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.field << ' ' << v.index << ": " << v.message << " (residual " << v.residual << ")\n";
  }
  return os.str();
}

ValidationReport validate_model(const HasaMdp& model) {
  ValidationReport report;
  auto add = [&](std::string field, std::string index, double residual, std::string message) {
    report.violations.push_back({std::move(field), std::move(index), residual, std::move(message)});
  };
  auto check_unit = [&](const char* field, const std::string& index, double v) {
    if (!(v >= -kProbabilityTolerance && v <= 1.0 + kProbabilityTolerance)) {
      add(field, index, v < 0.0 ? -v : v - 1.0, "entry outside [0, 1]");
    }
  };
  auto check_sum = [&](const char* field, const std::string& index, double sum) {
    const double residual = std::abs(sum - 1.0);
    if (!(residual <= kProbabilityTolerance)) add(field, index, residual, "row does not sum to 1");
  };

  const std::size_t n = model.num_states();
  const auto& states = model.states();
  for (StateIndex s = 0; s < n; ++s) {
    for (ActionIndex a = 0; a < model.num_action_slots(); ++a) {
      const std::string action_name = a == model.non_policy_index() ? model.non_policy_action() : model.actions()[a];
      const std::string index = join_index({states[s], action_name});
      double sum = 0.0;
      for (StateIndex t = 0; t < n; ++t) {
        const double p = model.transition(s, a, t);
        check_unit("transition", join_index({states[s], action_name, states[t]}), p);
        sum += p;
      }
      check_sum("transition", index, sum);
      if (!std::isfinite(model.reward(s, a))) add("reward", index, 0.0, "non-finite reward");
    }
  }

  double init_sum = 0.0;
  for (StateIndex s = 0; s < n; ++s) {
    check_unit("initial_dist", join_index({states[s]}), model.initial(s));
    init_sum += model.initial(s);
  }
  check_sum("initial_dist", "()", init_sum);

  for (StateIndex t = 0; t < n; ++t) {
    double sum = 0.0;
    for (StateIndex g = 0; g < n; ++g) {
      check_unit("classification", join_index({states[t], states[g]}), model.classification(t, g));
      sum += model.classification(t, g);
    }
    check_sum("classification", join_index({states[t]}), sum);
  }

  if (!(model.discount() >= 0.0 && model.discount() < 1.0)) {
    add("discount", "()", model.discount() < 0.0 ? -model.discount() : model.discount() - 1.0,
        "discount must lie in [0, 1)");
  }

  for (StateIndex s = 0; s < n; ++s) check_unit("patience", join_index({states[s]}), model.patience(s));

  for (StateIndex t = 0; t < n; ++t) {
    double sum = 0.0;
    std::size_t k = 0;
    for (const auto& e : model.uncertainty().events_for(t)) {
      const std::string index = join_index({states[t], std::to_string(k++)});
      check_unit("uncertainty_events", index, e.weight);
      sum += e.weight;
      if (e.alternates.empty()) add("uncertainty_events", index, 0.0, "empty alternate set");
      if (!e.is_confident() &&
          std::find(e.alternates.begin(), e.alternates.end(), e.best_guess) != e.alternates.end()) {
        add("uncertainty_events", index, 0.0, "best guess listed among its own alternates");
      }
    }
    check_sum("uncertainty_events", join_index({states[t]}), sum);
  }
  return report;
}

}  // namespace hasa
