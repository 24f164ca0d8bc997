#pragma once

// Sectioned `key = value` run configuration.
//
//   # comment
//   [domain]
//   x_a = 1.0
//   [regularization]
//   n_list = [4, 8, 16]
//
// Every key must be known; unknown keys and malformed values raise
// ConfigError naming the full `section.key` path.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qlpme/convergence.hpp"
#include "qlpme/presets.hpp"
#include "qlpme/validation.hpp"

namespace qlpme::cli {

class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Raw `section.key -> value` pairs with source line numbers.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;
  int line(const std::string& key) const;
  std::vector<std::string> keys() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
};

struct DataSection {
  std::string preset = "bump_on_tail";
  std::optional<std::filesystem::path> phi0_csv;
  std::optional<std::filesystem::path> f0_csv;
  std::optional<std::filesystem::path> W0_csv;
  std::optional<std::filesystem::path> g0_csv;
  PresetParams params;
};

struct OutputSection {
  std::filesystem::path directory = "qlt_pme_out";
  bool csv = true;
  bool json = true;
  bool svg = true;
  bool snapshots = false;
};

struct ToleranceSection {
  double max_principle_lower = 1e-10;
  double max_principle_upper = 1e-8;
  double linear_solver = 1e-10;
  double dt_safety = 1.0;
  double uniformity_factor = 10.0;
  /// Multiplies the acceptance tolerances of `validate`.
  double scale = 1.0;
};

struct RunConfig {
  double x_a = 1.0;
  double x_b = 2.0;
  Index nx = 201;
  Index nt = 2000;
  double horizon = 0.5;
  DataSection data;
  int n = 64;
  std::vector<int> n_list{4, 8, 16, 32, 64, 128, 256, 512};
  FunctionalRequest functionals;
  OutputSection output;
  ToleranceSection tolerances;
  std::vector<std::pair<Index, Index>> refinement_grids;

  /// Defaults overridden by every key present; unknown keys are errors.
  static RunConfig from(const KeyValueConfig& kv);
  static RunConfig load(const std::filesystem::path& path);

  SolverConfig solver_config() const;
  ValidationSettings validation_settings() const;

  /// Fully resolved configuration for report provenance.
  nlohmann::json to_json() const;
};

}  // namespace qlpme::cli
