#pragma once

// Desk-scale acceptance checks shared by the acceptance test binary and the
// `validate` CLI subcommand.

#include <iosfwd>
#include <string>
#include <vector>

#include "qlpme/convergence.hpp"
#include "qlpme/presets.hpp"

namespace qlpme {

struct ValidationSettings {
  double x_a = 1.0;
  double x_b = 2.0;
  Index nx = 201;
  Index nt = 2000;
  double horizon = 0.5;
  std::vector<int> n_values{4, 8, 16, 32, 64, 128, 256, 512};
  Preset preset = Preset::BumpOnTail;
  PresetParams params;
  FunctionalRequest functionals;
  SolverConfig solver;
  /// Multiplies every absolute tolerance; 0.01 tightens them 100x.
  double tolerance_scale = 1.0;
  /// Allowed max/min spread of each estimate across the sweep.
  double uniformity_factor = 10.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs every criterion; numerical failures inside a criterion mark it
/// failed rather than propagating.
std::vector<CriterionResult> run_validation(const ValidationSettings& settings);

/// One "PASS|FAIL  #id name  detail" line per criterion.
void print_validation_table(std::ostream& os, const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace qlpme
