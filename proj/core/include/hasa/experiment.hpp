#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hasa/bnb.hpp"
#include "hasa/domains.hpp"

namespace hasa {

enum class DomainKind { kGridworld, kWarehouse };
enum class SweepVariable { kDiscount, kRnr };

struct ExperimentSpec {
  DomainKind domain = DomainKind::kGridworld;
  GridworldConfig grid;
  WarehouseConfig warehouse;
  SweepVariable sweep = SweepVariable::kDiscount;
  std::vector<double> values;
  std::size_t sapi_runs = 30;
  bool run_bnb = true;
  std::uint64_t seed = 0;
  std::size_t vi_max_iters = kDefaultViIterations;
  /// Writes 0 in the wall_time column so that repeated runs produce identical bytes.
  bool record_wall_time = true;
};

struct SapiRow {
  double sweep_value = 0.0;
  std::size_t run_index = 0;
  double sapi_value = 0.0;
  std::optional<double> normalized_value;  // empty without branch-and-bound
};

struct BnbRow {
  double sweep_value = 0.0;
  double bnb_value = 0.0;
  std::size_t nodes_opened = 0;
  double wall_time = 0.0;
};

struct ExperimentResult {
  std::vector<SapiRow> sapi_rows;
  std::vector<BnbRow> bnb_rows;
};

/// Domain instance for one sweep point.
HasaMdp experiment_model(const ExperimentSpec& spec, double sweep_value);

/// Runs every sweep point in order; rows come out sorted by (sweep value, run index).
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// 12 significant digits.
std::string format_real(double value);

/// Columns: sweep_value,run_index,sapi_value,normalized_value
std::string sapi_csv(const ExperimentResult& result);
/// Columns: sweep_value,bnb_value,nodes_opened,wall_time
std::string bnb_csv(const ExperimentResult& result);

}  // namespace hasa
