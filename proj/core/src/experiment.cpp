#include "hasa/experiment.hpp"

#include <cstdio>
#include <sstream>

#include "hasa/sapi.hpp"

namespace hasa {

HasaMdp experiment_model(const ExperimentSpec& spec, double sweep_value) {
  if (spec.domain == DomainKind::kGridworld) {
    GridworldConfig config = spec.grid;
    (spec.sweep == SweepVariable::kDiscount ? config.discount : config.rnr) = sweep_value;
    return make_gridworld(config);
  }
  WarehouseConfig config = spec.warehouse;
  (spec.sweep == SweepVariable::kDiscount ? config.discount : config.rnr) = sweep_value;
  return make_warehouse(config);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.values.empty()) throw ConfigError("experiment needs at least one sweep value");
  if (spec.sapi_runs == 0) throw ConfigError("experiment needs at least one SAPI run per setting");

  ExperimentResult result;
  for (double value : spec.values) {
    const HasaMdp model = experiment_model(spec, value);
    const SapiRestartsResult sapi = sapi_restarts(model, spec.sapi_runs, spec.seed);

    std::optional<double> optimum;
    if (spec.run_bnb) {
      BnbConfig config;
      config.vi_max_iters = spec.vi_max_iters;
      config.seed = spec.seed;
      config.incumbent = sapi.best.policy;
      const BnbResult bnb = branch_and_bound(model, config);
      optimum = bnb.value;
      result.bnb_rows.push_back({value, bnb.value, bnb.nodes_opened, spec.record_wall_time ? bnb.wall_seconds : 0.0});
    }
    for (const auto& run : sapi.runs) {
      SapiRow row{value, run.restart_index, run.value, std::nullopt};
      if (optimum) row.normalized_value = run.value / *optimum;
      result.sapi_rows.push_back(row);
    }
  }
  return result;
}

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::string sapi_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "sweep_value,run_index,sapi_value,normalized_value\n";
  for (const auto& row : result.sapi_rows) {
    os << format_real(row.sweep_value) << ',' << row.run_index << ',' << format_real(row.sapi_value) << ','
       << (row.normalized_value ? format_real(*row.normalized_value) : std::string()) << '\n';
  }
  return os.str();
}

std::string bnb_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "sweep_value,bnb_value,nodes_opened,wall_time\n";
  for (const auto& row : result.bnb_rows) {
    os << format_real(row.sweep_value) << ',' << format_real(row.bnb_value) << ',' << row.nodes_opened << ','
       << format_real(row.wall_time) << '\n';
  }
  return os.str();
}

}  // namespace hasa
