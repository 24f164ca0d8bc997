#pragma once

#include <atomic>
#include <functional>
#include <iosfwd>

#include "run_config.hpp"

namespace qlpme::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kNumericalFailure = 2, kInvariantViolation = 3 };

/// Set from a signal handler; polled between solver phases.
std::atomic<bool>& interrupt_flag();

/// Preset data with any CSV overrides from the data section applied.
PresetData build_data(const RunConfig& config, const SpatialGrid& grid, const TimeGrid& tgrid);

/// Output directory after applying the QLT_PME_OUT override.
std::filesystem::path output_directory(const RunConfig& config);

int cmd_solve(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_equilibrium(const RunConfig& config, std::ostream& log);
int cmd_validate(const RunConfig& config, std::ostream& log);

/// Runs `body`, mapping the error hierarchy onto the exit-code contract and
/// printing the message to `err`.
int guarded_run(const std::function<int()>& body, std::ostream& err);

}  // namespace qlpme::cli
