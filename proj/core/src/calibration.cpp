#include "hasa/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace hasa {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Calls fn(line_number, fields) for every data line.
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const std::string_view line = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, ',');
    if (line_no == 1 && fields.front() == "true_state") continue;
    fn(line_no, fields);
  }
}

StateIndex lookup(const std::vector<std::string>& states, std::string_view name, std::size_t line_no) {
  auto it = std::find(states.begin(), states.end(), name);
  if (it == states.end()) {
    throw EstimationError("line " + std::to_string(line_no) + ": unknown state '" + std::string(name) + "'");
  }
  return static_cast<StateIndex>(it - states.begin());
}

std::vector<std::size_t> count_by_true_state(std::size_t n, std::span<const GuessRecord> records) {
  std::vector<std::size_t> counts(n, 0);
  for (const auto& r : records) {
    if (r.true_state >= n || r.best_guess >= n) throw EstimationError("guess record references an unknown state");
    ++counts[r.true_state];
  }
  return counts;
}

}  // namespace

std::vector<double> estimate_classification(const std::vector<std::string>& states, std::span<const GuessRecord> records,
                                            bool add_one_smoothing) {
  const std::size_t n = states.size();
  const auto totals = count_by_true_state(n, records);
  std::vector<double> counts(n * n, add_one_smoothing ? 1.0 : 0.0);
  for (const auto& r : records) counts[r.true_state * n + r.best_guess] += 1.0;
  for (StateIndex t = 0; t < n; ++t) {
    if (totals[t] == 0 && !add_one_smoothing) throw EstimationError("no guess records for state '" + states[t] + "'");
    const double denom = static_cast<double>(totals[t]) + (add_one_smoothing ? static_cast<double>(n) : 0.0);
    for (StateIndex g = 0; g < n; ++g) counts[t * n + g] /= denom;
  }
  return counts;
}

UncertaintyModel estimate_uncertainty(const std::vector<std::string>& states, std::span<const GuessRecord> records) {
  const std::size_t n = states.size();
  const auto totals = count_by_true_state(n, records);
  for (StateIndex t = 0; t < n; ++t) {
    if (totals[t] == 0) throw EstimationError("no guess records for state '" + states[t] + "'");
  }
  std::map<std::tuple<StateIndex, StateIndex, std::vector<StateIndex>>, std::size_t> groups;
  for (const auto& r : records) {
    std::vector<StateIndex> alts = r.alternates;
    std::sort(alts.begin(), alts.end());
    alts.erase(std::unique(alts.begin(), alts.end()), alts.end());
    if (std::find(alts.begin(), alts.end(), r.best_guess) != alts.end()) {
      throw EstimationError("guess record lists its best guess '" + states[r.best_guess] + "' as an alternate");
    }
    if (alts.empty()) alts.push_back(r.best_guess);
    ++groups[{r.true_state, r.best_guess, std::move(alts)}];
  }
  std::vector<UncertaintyEvent> events;
  events.reserve(groups.size());
  for (const auto& [key, count] : groups) {
    const auto& [t, best, alts] = key;
    events.push_back({t, best, alts, static_cast<double>(count) / static_cast<double>(totals[t])});
  }
  return UncertaintyModel(n, std::move(events));
}

double estimate_psi(double mean_retries) {
  if (!(mean_retries >= 0.0)) throw std::invalid_argument("mean retry count must be non-negative");
  return mean_retries / (1.0 + mean_retries);
}

PsiEstimate estimate_psi(std::size_t num_states, std::span<const RetryRecord> records) {
  if (records.empty()) throw EstimationError("no retry records");
  std::vector<double> sums(num_states, 0.0);
  std::vector<std::size_t> counts(num_states, 0);
  double total = 0.0;
  for (const auto& r : records) {
    if (r.true_state >= num_states) throw EstimationError("retry record references an unknown state");
    sums[r.true_state] += static_cast<double>(r.retry_count);
    ++counts[r.true_state];
    total += static_cast<double>(r.retry_count);
  }
  PsiEstimate out;
  out.per_state.resize(num_states);
  for (StateIndex s = 0; s < num_states; ++s) {
    if (counts[s] > 0) out.per_state[s] = estimate_psi(sums[s] / static_cast<double>(counts[s]));
  }
  out.pooled = estimate_psi(total / static_cast<double>(records.size()));
  return out;
}

std::vector<GuessRecord> parse_guess_records(std::string_view text, const std::vector<std::string>& states) {
  std::vector<GuessRecord> out;
  for_each_record(text, [&](std::size_t line_no, const std::vector<std::string_view>& fields) {
    if (fields.size() < 2 || fields.size() > 3) {
      throw EstimationError("line " + std::to_string(line_no) + ": expected true_state,best_guess[,alternates]");
    }
    GuessRecord r;
    r.true_state = lookup(states, fields[0], line_no);
    r.best_guess = lookup(states, fields[1], line_no);
    if (fields.size() == 3 && !fields[2].empty()) {
      for (auto alt : split(fields[2], ';')) {
        if (!alt.empty()) r.alternates.push_back(lookup(states, alt, line_no));
      }
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<RetryRecord> parse_retry_records(std::string_view text, const std::vector<std::string>& states) {
  std::vector<RetryRecord> out;
  for_each_record(text, [&](std::size_t line_no, const std::vector<std::string_view>& fields) {
    if (fields.size() != 2) throw EstimationError("line " + std::to_string(line_no) + ": expected true_state,retry_count");
    RetryRecord r;
    r.true_state = lookup(states, fields[0], line_no);
    const auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), r.retry_count);
    if (ec != std::errc() || ptr != fields[1].data() + fields[1].size()) {
      throw EstimationError("line " + std::to_string(line_no) + ": retry count must be a non-negative integer");
    }
    out.push_back(r);
  });
  return out;
}

std::vector<std::string> infer_states(std::string_view guess_text, std::string_view retry_text) {
  std::set<std::string> names;
  for_each_record(guess_text, [&](std::size_t, const std::vector<std::string_view>& fields) {
    for (std::size_t i = 0; i < std::min<std::size_t>(fields.size(), 2); ++i) names.emplace(fields[i]);
    if (fields.size() == 3) {
      for (auto alt : split(fields[2], ';')) {
        if (!alt.empty()) names.emplace(alt);
      }
    }
  });
  for_each_record(retry_text, [&](std::size_t, const std::vector<std::string_view>& fields) {
    if (!fields.empty()) names.emplace(fields[0]);
  });
  return {names.begin(), names.end()};
}

}  // namespace hasa
