#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hasa/model.hpp"

namespace hasa {

/// One probe of the human: what they guessed for an instance of `true_state`.
struct GuessRecord {
  StateIndex true_state = 0;
  StateIndex best_guess = 0;
  std::vector<StateIndex> alternates;  // may be empty
};

/// How many non-policy repetitions the human took before acting.
struct RetryRecord {
  StateIndex true_state = 0;
  std::size_t retry_count = 0;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

/// p_c(g | t) = count(best = g, true = t) / count(true = t), rows indexed by `states`.
/// With add-one smoothing every guess gets one pseudo-count.
std::vector<double> estimate_classification(const std::vector<std::string>& states, std::span<const GuessRecord> records,
                                            bool add_one_smoothing = false);

/// Each distinct (true, best, alternate set) is one event, weighted by its share of the true state's records.
UncertaintyModel estimate_uncertainty(const std::vector<std::string>& states, std::span<const GuessRecord> records);

/// Inverts E = p / (1 - p) for the geometric number of non-policy repetitions.
double estimate_psi(double mean_retries);

struct PsiEstimate {
  /// Per-state estimate; empty for states without retry records.
  std::vector<std::optional<double>> per_state;
  double pooled = 0.0;
};

PsiEstimate estimate_psi(std::size_t num_states, std::span<const RetryRecord> records);

/// Line formats: "true,best,alt1;alt2" and "true,retry_count". Blank lines,
/// '#' comments and a leading "true_state" header are skipped.
std::vector<GuessRecord> parse_guess_records(std::string_view text, const std::vector<std::string>& states);
std::vector<RetryRecord> parse_retry_records(std::string_view text, const std::vector<std::string>& states);

/// Sorted distinct state names mentioned in guess and retry record files.
std::vector<std::string> infer_states(std::string_view guess_text, std::string_view retry_text = {});

}  // namespace hasa
