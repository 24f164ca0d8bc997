#pragma once

// Named initial-data configurations shared by the CLI and the validation
// suite.

#include <optional>
#include <string>

#include "qlpme/kinetic.hpp"

namespace qlpme {

enum class Preset { Zero, BumpOnTail, LinearEquilibrium, ConstantF0 };

std::optional<Preset> parse_preset(const std::string& name);
std::string preset_name(Preset preset);

struct PresetParams {
  /// Peak of the reduced initial datum w0 = phi0.
  double amplitude = 1.0;
  /// Location and width of the particle bump in momentum.
  double center = 1.5;
  double width = 0.1;
  /// Bump height relative to the Maxwellian background.
  double bump_height = 0.5;
};

/// A ((x - x_a)(x_b - x))^3 scaled to peak A: vanishes with its first two
/// derivatives at both endpoints.
ScalarField cubic_bump(const SpatialGrid& grid, double amplitude);

/// Maxwellian exp(-p^2/2)/sqrt(2 pi) plus a Gaussian bump on the tail.
ScalarField bump_on_tail_f0(const SpatialGrid& grid, const PresetParams& params);

struct PresetData {
  KineticData kinetic;
  ProblemData problem;
  /// Reduced initial datum entering the equilibrium formula.
  ScalarField u0;
};

/// zero: everything vanishes.
/// bump_on_tail: f0 bump-on-tail, w0 = phi0 = cubic bump.
/// linear_equilibrium: f0(p) = p, u0 = 0, phi0 = M = (x - x_a)(x_b - x)/2.
/// constant_f0: f0 = 1, w0 = phi0 = cubic bump.
PresetData make_preset(Preset preset, const SpatialGrid& grid, const TimeGrid& tgrid,
                       const PresetParams& params = {});

}  // namespace qlpme
