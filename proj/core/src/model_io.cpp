#include "hasa/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hasa {

using nlohmann::json;

namespace {

std::string child_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string index_path(const std::string& parent, std::size_t i) { return parent + "[" + std::to_string(i) + "]"; }

const json& field(const json& obj, const std::string& key, const std::string& parent = "") {
  if (!obj.is_object()) throw ParseError(parent, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(child_path(parent, key), "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path, std::size_t expected_size) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  if (expected_size != static_cast<std::size_t>(-1) && j.size() != expected_size) {
    throw ParseError(path, "expected " + std::to_string(expected_size) + " entries, found " + std::to_string(j.size()));
  }
  return j;
}

constexpr std::size_t kAnySize = static_cast<std::size_t>(-1);

std::vector<std::string> string_list(const json& j, const std::string& path) {
  std::vector<std::string> out;
  const auto& arr = as_array(j, path, kAnySize);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_string(arr[i], index_path(path, i)));
  return out;
}

std::vector<double> number_list(const json& j, const std::string& path, std::size_t n) {
  std::vector<double> out;
  const auto& arr = as_array(j, path, n);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_number(arr[i], index_path(path, i)));
  return out;
}

std::size_t lookup(const std::vector<std::string>& names, const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ParseError(path, "unknown state '" + name + "'");
}

json parse_json(std::string_view document) {
  try {
    return json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::string serialize_model(const HasaMdp& model) {
  const std::size_t n = model.num_states();
  const std::size_t slots = model.num_action_slots();
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["states"] = model.states();
  doc["actions"] = model.actions();
  doc["non_policy_action"] = model.non_policy_action();
  json transition = json::array();
  json reward = json::array();
  for (StateIndex s = 0; s < n; ++s) {
    json per_action = json::array();
    json rewards = json::array();
    for (ActionIndex a = 0; a < slots; ++a) {
      auto row = model.transition_row(s, a);
      per_action.push_back(std::vector<double>(row.begin(), row.end()));
      rewards.push_back(model.reward(s, a));
    }
    transition.push_back(std::move(per_action));
    reward.push_back(std::move(rewards));
  }
  doc["transition"] = std::move(transition);
  doc["reward"] = std::move(reward);
  doc["discount"] = model.discount();
  doc["initial_dist"] = std::vector<double>(model.initial_dist().begin(), model.initial_dist().end());
  json classification = json::array();
  for (StateIndex t = 0; t < n; ++t) {
    auto row = model.classification_row(t);
    classification.push_back(std::vector<double>(row.begin(), row.end()));
  }
  doc["classification"] = std::move(classification);
  json events = json::array();
  for (const auto& e : model.uncertainty().events()) {
    json alts = json::array();
    for (StateIndex alt : e.alternates) alts.push_back(model.states()[alt]);
    events.push_back({{"true", model.states()[e.true_state]},
                      {"best", model.states()[e.best_guess]},
                      {"alternates", std::move(alts)},
                      {"weight", e.weight}});
  }
  doc["uncertainty_events"] = std::move(events);
  std::vector<double> patience(n);
  for (StateIndex s = 0; s < n; ++s) patience[s] = model.patience(s);
  doc["patience"] = patience;
  return doc.dump(1) + "\n";
}

HasaMdp parse_model(std::string_view document) {
  const json doc = parse_json(document);
  if (!doc.is_object()) throw ParseError("", "document root must be an object");

  const json& version = field(doc, "schema_version");
  if (!version.is_number_integer()) throw ParseError("schema_version", "expected an integer");
  if (version.get<int>() != kSchemaVersion) {
    throw VersionError("unsupported schema_version " + std::to_string(version.get<int>()) + " (expected " +
                       std::to_string(kSchemaVersion) + ")");
  }

  ModelSpec spec;
  spec.states = string_list(field(doc, "states"), "states");
  spec.actions = string_list(field(doc, "actions"), "actions");
  spec.non_policy_action = as_string(field(doc, "non_policy_action"), "non_policy_action");
  const std::size_t n = spec.states.size();
  const std::size_t slots = spec.actions.size() + 1;
  if (n == 0) throw ParseError("states", "at least one state is required");
  if (spec.actions.empty()) throw ParseError("actions", "at least one action is required");

  const auto& transition = as_array(field(doc, "transition"), "transition", n);
  spec.transition.reserve(n * slots * n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::string sp = index_path("transition", s);
    const auto& per_action = as_array(transition[s], sp, slots);
    for (std::size_t a = 0; a < slots; ++a) {
      auto row = number_list(per_action[a], index_path(sp, a), n);
      spec.transition.insert(spec.transition.end(), row.begin(), row.end());
    }
  }
  const auto& reward = as_array(field(doc, "reward"), "reward", n);
  for (std::size_t s = 0; s < n; ++s) {
    auto row = number_list(reward[s], index_path("reward", s), slots);
    spec.reward.insert(spec.reward.end(), row.begin(), row.end());
  }
  spec.discount = as_number(field(doc, "discount"), "discount");
  spec.initial_dist = number_list(field(doc, "initial_dist"), "initial_dist", n);
  const auto& classification = as_array(field(doc, "classification"), "classification", n);
  for (std::size_t t = 0; t < n; ++t) {
    auto row = number_list(classification[t], index_path("classification", t), n);
    spec.classification.insert(spec.classification.end(), row.begin(), row.end());
  }
  const auto& events = as_array(field(doc, "uncertainty_events"), "uncertainty_events", kAnySize);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string ep = index_path("uncertainty_events", i);
    UncertaintyEvent e;
    e.true_state = lookup(spec.states, as_string(field(events[i], "true", ep), child_path(ep, "true")), child_path(ep, "true"));
    e.best_guess = lookup(spec.states, as_string(field(events[i], "best", ep), child_path(ep, "best")), child_path(ep, "best"));
    const std::string ap = child_path(ep, "alternates");
    for (const auto& name : string_list(field(events[i], "alternates", ep), ap)) {
      e.alternates.push_back(lookup(spec.states, name, ap));
    }
    e.weight = as_number(field(events[i], "weight", ep), child_path(ep, "weight"));
    spec.uncertainty_events.push_back(std::move(e));
  }
  spec.patience = number_list(field(doc, "patience"), "patience", n);

  try {
    return HasaMdp(std::move(spec));
  } catch (const ConfigError& e) {
    throw ParseError("", e.what());
  }
}

HasaMdp load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model document '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

void save_model(const HasaMdp& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model document '" + path.string() + "'");
  out << serialize_model(model);
}

std::string policy_to_json(const HasaMdp& model, const DeterministicPolicy& policy) {
  json doc = json::object();
  for (StateIndex s = 0; s < policy.size(); ++s) doc[model.states()[s]] = model.actions()[policy[s]];
  return doc.dump();
}

DeterministicPolicy policy_from_json(const HasaMdp& model, std::string_view document) {
  json doc = parse_json(document);
  if (!doc.is_object()) throw ParseError("", "policy document must map state to action");
  // Solver reports nest the map under "policy".
  if (doc.contains("policy") && doc["policy"].is_object()) doc = json(doc["policy"]);
  std::vector<ActionIndex> actions(model.num_states());
  for (StateIndex s = 0; s < model.num_states(); ++s) {
    const std::string& name = model.states()[s];
    const std::string action = as_string(field(doc, name), name);
    const ActionIndex a = model.action_index(action);
    if (a == model.non_policy_index()) throw ParseError(name, "the non-policy action cannot be assigned");
    actions[s] = a;
  }
  return DeterministicPolicy(std::move(actions));
}

}  // namespace hasa
