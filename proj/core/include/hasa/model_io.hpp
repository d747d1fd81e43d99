#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hasa/model.hpp"

namespace hasa {

inline constexpr int kSchemaVersion = 1;

/// A document that is not well formed or does not follow the model schema.
/// `path()` is the offending field (e.g. "transition[3][1]") or empty for
/// syntax errors, whose message carries the line and column.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

/// JSON document. Per-state action tables (transition, reward) list the policy
/// actions in declaration order followed by the non-policy action.
std::string serialize_model(const HasaMdp& model);
HasaMdp parse_model(std::string_view document);

HasaMdp load_model(const std::filesystem::path& path);
void save_model(const HasaMdp& model, const std::filesystem::path& path);

/// Helpers shared by the CLI and tests.
std::string policy_to_json(const HasaMdp& model, const DeterministicPolicy& policy);
DeterministicPolicy policy_from_json(const HasaMdp& model, std::string_view document);

}  // namespace hasa
