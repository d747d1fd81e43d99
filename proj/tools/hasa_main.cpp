#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hasa/bnb.hpp"
#include "hasa/calibration.hpp"
#include "hasa/domains.hpp"
#include "hasa/experiment.hpp"
#include "hasa/model_io.hpp"
#include "hasa/oracle.hpp"
#include "hasa/sapi.hpp"
#include "hasa/valuation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hasa;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

HasaMdp load_valid(const std::string& path) {
  HasaMdp model = [&] {
    try {
      return load_model(path);
    } catch (const ParseError& e) {
      throw InvalidModel(path + ": " + e.what());
    } catch (const VersionError& e) {
      throw InvalidModel(path + ": " + e.what());
    } catch (const ConfigError& e) {
      throw InvalidModel(path + ": " + e.what());
    }
  }();
  const ValidationReport report = validate_model(model);
  if (!report.ok()) throw InvalidModel(path + ": invalid model\n" + report.to_string());
  return model;
}

DeterministicPolicy load_policy(const HasaMdp& model, const std::string& path) {
  try {
    return policy_from_json(model, read_file(path));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

json policy_json(const HasaMdp& model, const DeterministicPolicy& policy) { return json::parse(policy_to_json(model, policy)); }

std::string policy_lines(const HasaMdp& model, const DeterministicPolicy& policy) {
  std::string out;
  for (StateIndex s = 0; s < policy.size(); ++s) out += "  " + model.states()[s] + " -> " + model.actions()[policy[s]] + "\n";
  return out;
}

// The text report goes to stdout; --out receives the JSON document.
void emit(const std::string& report, const json& doc, const std::string& out) {
  std::cout << report;
  if (!out.empty()) write_output(out, doc.dump(2) + "\n");
}

struct GridOptions {
  std::size_t width = 5;
  std::size_t height = 5;
  double m = 5.0;
  double goal_reward = 100.0;
};

struct DomainOptions {
  std::string domain = "grid";
  GridOptions grid;
  double gamma = 0.7;
  double rnr = 0.0;
  double slip = 0.05;
  double psi = 1.0;
  std::uint64_t seed = 0;

  GridworldConfig grid_config() const {
    GridworldConfig g;
    g.width = grid.width;
    g.height = grid.height;
    g.m = grid.m;
    g.goal_reward = grid.goal_reward;
    g.discount = gamma;
    g.rnr = rnr;
    g.slip = slip;
    g.psi = psi;
    g.seed = seed;
    return g;
  }

  WarehouseConfig warehouse_config() const {
    WarehouseConfig w;
    w.discount = gamma;
    w.rnr = rnr;
    w.slip = slip;
    w.psi = psi;
    w.seed = seed;
    return w;
  }
};

void add_domain_flags(CLI::App* cmd, DomainOptions& d) {
  cmd->add_option("--w", d.grid.width, "Grid width")->capture_default_str();
  cmd->add_option("--h", d.grid.height, "Grid height")->capture_default_str();
  cmd->add_option("--m", d.grid.m, "Grid confusion exponent")->capture_default_str();
  cmd->add_option("--goal-reward", d.grid.goal_reward, "Grid goal reward")->capture_default_str();
  cmd->add_option("--gamma", d.gamma, "Discount factor")->capture_default_str();
  cmd->add_option("--rnr", d.rnr, "Reward noise range")->capture_default_str();
  cmd->add_option("--slip", d.slip, "Slip probability")->capture_default_str();
  cmd->add_option("--psi", d.psi, "Patience")->capture_default_str();
  cmd->add_option("--seed", d.seed, "Reward noise seed")->capture_default_str();
}

HasaMdp make_domain(const DomainOptions& d) {
  try {
    return d.domain == "grid" ? make_gridworld(d.grid_config()) : make_warehouse(d.warehouse_config());
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policies for human agents that mistake one state for another"};
  // "--h" is the grid height, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  std::string model_path, policy_path, out;
  std::uint64_t seed = 0;
  std::size_t restarts = kDefaultSapiRestarts;
  std::size_t vi_iters = kDefaultViIterations;

  // gen-domain
  DomainOptions domain;
  auto* gen = app.add_subcommand("gen-domain", "Write a gridworld or warehouse model document");
  gen->add_option("domain", domain.domain, "grid or warehouse")->required()->check(CLI::IsMember({"grid", "warehouse"}));
  add_domain_flags(gen, domain);
  gen->add_option("--out", out, "Output path (stdout when omitted)");
  gen->callback([&] { write_output(out, serialize_model(make_domain(domain)) + "\n"); });

  // validate
  auto* validate = app.add_subcommand("validate", "Check a model document");
  validate->add_option("--model", model_path, "Model document")->required();
  validate->callback([&] {
    load_valid(model_path);
    std::cout << "ok\n";
  });

  // solve-sapi
  std::string sapi_mode = "global";
  auto* solve_sapi = app.add_subcommand("solve-sapi", "Hill climbing with random restarts");
  solve_sapi->add_option("--model", model_path, "Model document")->required();
  solve_sapi->add_option("--restarts", restarts, "Number of restarts")->capture_default_str()->check(CLI::PositiveNumber);
  solve_sapi->add_option("--seed", seed, "Seed")->capture_default_str();
  solve_sapi->add_option("--mode", sapi_mode, "global (best single change) or greedy (per-state sweeps)")
      ->capture_default_str()
      ->check(CLI::IsMember({"global", "greedy"}));
  solve_sapi->add_option("--out", out, "JSON result path");
  solve_sapi->callback([&] {
    const HasaMdp model = load_valid(model_path);
    SapiConfig config;
    config.mode = sapi_mode == "global" ? SapiMode::kGlobalBest : SapiMode::kPerStateGreedy;
    const SapiRestartsResult r = sapi_restarts(model, restarts, seed, config);
    std::ostringstream report;
    report << "value: " << format_real(r.best.value) << "\n";
    report << "best restart: " << r.best.restart_index << " of " << r.runs.size() << "\n";
    report << "steps: " << r.best.steps << "\n";
    report << "trace:";
    for (double v : r.best.trace) report << ' ' << format_real(v);
    report << "\npolicy:\n" << policy_lines(model, r.best.policy);
    json runs = json::array();
    for (const auto& run : r.runs) runs.push_back({{"restart", run.restart_index}, {"value", run.value}, {"steps", run.steps}});
    emit(report.str(),
         {{"value", r.best.value}, {"policy", policy_json(model, r.best.policy)}, {"trace", r.best.trace}, {"runs", runs}}, out);
  });

  // solve-bnb
  std::string order = "best";
  std::size_t node_limit = 0;
  auto* solve_bnb = app.add_subcommand("solve-bnb", "Exact branch-and-bound");
  solve_bnb->add_option("--model", model_path, "Model document")->required();
  solve_bnb->add_option("--restarts", restarts, "SAPI restarts for the initial incumbent")->capture_default_str();
  solve_bnb->add_option("--seed", seed, "Seed")->capture_default_str();
  solve_bnb->add_option("--vi-iters", vi_iters, "Value-iteration sweeps per bound")->capture_default_str()->check(CLI::PositiveNumber);
  solve_bnb->add_option("--order", order, "best or depth")->capture_default_str()->check(CLI::IsMember({"best", "depth"}));
  solve_bnb->add_option("--node-limit", node_limit, "Stop after this many nodes (0 = no limit)")->capture_default_str();
  solve_bnb->add_option("--out", out, "JSON result path");
  solve_bnb->callback([&] {
    const HasaMdp model = load_valid(model_path);
    BnbConfig config;
    config.sapi_restarts = restarts;
    config.seed = seed;
    config.vi_max_iters = vi_iters;
    config.order = order == "best" ? SearchOrder::kBestFirst : SearchOrder::kDepthFirst;
    config.node_limit = node_limit;
    const BnbResult r = branch_and_bound(model, config);
    std::ostringstream report;
    report << "value: " << format_real(r.value) << "\n";
    report << "initial incumbent: " << format_real(r.initial_incumbent) << "\n";
    report << "nodes opened: " << r.nodes_opened << "\n";
    report << "complete: " << (r.complete ? "yes" : "no") << "\n";
    report << "policy:\n" << policy_lines(model, r.policy);
    emit(report.str(),
         {{"value", r.value},
          {"policy", policy_json(model, r.policy)},
          {"nodes_opened", r.nodes_opened},
          {"complete", r.complete},
          {"initial_incumbent", r.initial_incumbent}},
         out);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Exact value of a policy");
  eval->add_option("--model", model_path, "Model document")->required();
  eval->add_option("--policy", policy_path, "Policy document (state -> action)")->required();
  eval->add_option("--out", out, "JSON result path");
  eval->callback([&] {
    const HasaMdp model = load_valid(model_path);
    const DeterministicPolicy policy = load_policy(model, policy_path);
    const ValueVector v = policy_state_values(model, policy);
    const double value = policy_value(model, policy);
    std::ostringstream report;
    report << "value: " << format_real(value) << "\nstate values:\n";
    json per_state = json::object();
    for (StateIndex s = 0; s < model.num_states(); ++s) {
      report << "  " << model.states()[s] << ": " << format_real(v[s]) << "\n";
      per_state[model.states()[s]] = v[s];
    }
    emit(report.str(), {{"value", value}, {"state_values", per_state}}, out);
  });

  // simulate
  std::size_t episodes = 10000, horizon = 0;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a policy's value");
  simulate->add_option("--model", model_path, "Model document")->required();
  simulate->add_option("--policy", policy_path, "Policy document")->required();
  simulate->add_option("--episodes", episodes, "Episodes")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--horizon", horizon, "Steps per episode (0 = automatic)")->capture_default_str();
  simulate->add_option("--seed", seed, "Seed")->capture_default_str();
  simulate->add_option("--out", out, "JSON result path");
  simulate->callback([&] {
    const HasaMdp model = load_valid(model_path);
    const DeterministicPolicy policy = load_policy(model, policy_path);
    const SimEstimate e = simulate_policy(model, policy, episodes, horizon, seed);
    const double exact = policy_value(model, policy);
    std::ostringstream report;
    report << "mean: " << format_real(e.mean) << "\nstandard error: " << format_real(e.standard_error)
           << "\nepisodes: " << e.episodes << "\nhorizon: " << e.horizon << "\nexact value: " << format_real(exact) << "\n";
    emit(report.str(),
         {{"mean", e.mean}, {"standard_error", e.standard_error}, {"episodes", e.episodes}, {"horizon", e.horizon},
          {"seed", e.seed}, {"exact_value", exact}},
         out);
  });

  // enumerate
  double cap = kDefaultEnumerationCap;
  auto* enumerate = app.add_subcommand("enumerate", "Brute-force optimum over all policies");
  enumerate->add_option("--model", model_path, "Model document")->required();
  enumerate->add_option("--cap", cap, "Largest policy space to search")->capture_default_str();
  enumerate->add_option("--out", out, "JSON result path");
  enumerate->callback([&] {
    const HasaMdp model = load_valid(model_path);
    EnumerationResult r;
    try {
      r = enumerate_optimal(model, cap);
    } catch (const EnumerationLimitError& e) {
      throw UsageError(e.what());
    }
    std::ostringstream report;
    report << "value: " << format_real(r.value) << "\npolicies evaluated: " << r.evaluated << "\npolicy:\n"
           << policy_lines(model, r.policy);
    emit(report.str(), {{"value", r.value}, {"policy", policy_json(model, r.policy)}, {"evaluated", r.evaluated}}, out);
  });

  // calibrate
  std::string guesses_path, retries_path;
  bool smoothing = false;
  auto* calibrate = app.add_subcommand("calibrate", "Estimate p_c, p_u and psi from guess and retry records");
  calibrate->add_option("--guesses", guesses_path, "Guess records: true,best,alt1;alt2")->required();
  calibrate->add_option("--retries", retries_path, "Retry records: true,retry_count");
  calibrate->add_option("--model", model_path, "Model whose human parameters are replaced; states come from it");
  calibrate->add_flag("--smoothing", smoothing, "Add-one smoothing of the classification table");
  calibrate->add_option("--out", out, "Output path (stdout when omitted)");
  calibrate->callback([&] {
    const std::string guess_text = read_file(guesses_path);
    const std::string retry_text = retries_path.empty() ? std::string() : read_file(retries_path);
    std::optional<HasaMdp> base;
    if (!model_path.empty()) base = load_valid(model_path);
    const std::vector<std::string> states = base ? base->states() : infer_states(guess_text, retry_text);

    const auto guesses = parse_guess_records(guess_text, states);
    const auto classification = estimate_classification(states, guesses, smoothing);
    const UncertaintyModel uncertainty = estimate_uncertainty(states, guesses);
    std::optional<PsiEstimate> psi;
    if (!retries_path.empty()) psi = estimate_psi(states.size(), parse_retry_records(retry_text, states));

    if (base) {
      ModelSpec spec = base->to_spec();
      spec.classification = classification;
      spec.uncertainty_events.assign(uncertainty.events().begin(), uncertainty.events().end());
      if (psi) {
        for (StateIndex s = 0; s < states.size(); ++s) spec.patience[s] = psi->per_state[s].value_or(psi->pooled);
      }
      write_output(out, serialize_model(HasaMdp(std::move(spec))) + "\n");
      return;
    }
    json doc;
    doc["states"] = states;
    json table = json::array();
    for (StateIndex t = 0; t < states.size(); ++t) {
      table.push_back(std::vector<double>(classification.begin() + static_cast<std::ptrdiff_t>(t * states.size()),
                                          classification.begin() + static_cast<std::ptrdiff_t>((t + 1) * states.size())));
    }
    doc["classification"] = table;
    json events = json::array();
    for (const auto& e : uncertainty.events()) {
      json alts = json::array();
      for (StateIndex a : e.alternates) alts.push_back(states[a]);
      events.push_back({{"true", states[e.true_state]}, {"best", states[e.best_guess]}, {"alternates", alts}, {"weight", e.weight}});
    }
    doc["uncertainty_events"] = events;
    if (psi) {
      json per_state = json::object();
      for (StateIndex s = 0; s < states.size(); ++s) {
        if (psi->per_state[s]) per_state[states[s]] = *psi->per_state[s];
      }
      doc["psi"] = {{"pooled", psi->pooled}, {"per_state", per_state}};
    }
    write_output(out, doc.dump(2) + "\n");
  });

  // experiment
  DomainOptions exp_domain;
  std::string sweep = "gamma", values_text, out_dir = ".";
  std::size_t runs = 30;
  bool no_bnb = false, no_timing = false;
  auto* experiment = app.add_subcommand("experiment", "Sweep discount or reward noise and write CSV tables");
  experiment->add_option("domain", exp_domain.domain, "grid or warehouse")->required()->check(CLI::IsMember({"grid", "warehouse"}));
  add_domain_flags(experiment, exp_domain);
  experiment->add_option("--sweep", sweep, "gamma or rnr")->capture_default_str()->check(CLI::IsMember({"gamma", "rnr"}));
  experiment->add_option("--values", values_text, "Comma-separated sweep values")->required();
  experiment->add_option("--runs", runs, "SAPI runs per setting")->capture_default_str()->check(CLI::PositiveNumber);
  experiment->add_option("--vi-iters", vi_iters, "Value-iteration sweeps per bound")->capture_default_str()->check(CLI::PositiveNumber);
  experiment->add_flag("--no-bnb", no_bnb, "Skip branch-and-bound (no normalized values)");
  experiment->add_flag("--no-timing", no_timing, "Write 0 for wall time so reruns are byte-identical");
  experiment->add_option("--out", out_dir, "Directory for sapi.csv and bnb.csv")->capture_default_str();
  experiment->callback([&] {
    ExperimentSpec spec;
    spec.domain = exp_domain.domain == "grid" ? DomainKind::kGridworld : DomainKind::kWarehouse;
    spec.grid = exp_domain.grid_config();
    spec.warehouse = exp_domain.warehouse_config();
    spec.sweep = sweep == "gamma" ? SweepVariable::kDiscount : SweepVariable::kRnr;
    spec.values = parse_list(values_text);
    if (spec.values.empty()) throw UsageError("--values needs at least one value");
    spec.sapi_runs = runs;
    spec.run_bnb = !no_bnb;
    spec.seed = exp_domain.seed;
    spec.vi_max_iters = vi_iters;
    spec.record_wall_time = !no_timing;
    ExperimentResult r;
    try {
      r = run_experiment(spec);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    fs::create_directories(out_dir);
    write_output((fs::path(out_dir) / "sapi.csv").string(), sapi_csv(r));
    if (spec.run_bnb) write_output((fs::path(out_dir) / "bnb.csv").string(), bnb_csv(r));
    for (const auto& row : r.bnb_rows) {
      std::cout << "sweep " << format_real(row.sweep_value) << ": optimum " << format_real(row.bnb_value) << ", nodes opened "
                << row.nodes_opened << "\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidModel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
