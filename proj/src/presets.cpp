#include "qlpme/presets.hpp"

#include <numbers>

#include "qlpme/equilibrium.hpp"

namespace qlpme {

std::optional<Preset> parse_preset(const std::string& name) {
  if (name == "zero") return Preset::Zero;
  if (name == "bump_on_tail") return Preset::BumpOnTail;
  if (name == "linear_equilibrium") return Preset::LinearEquilibrium;
  if (name == "constant_f0") return Preset::ConstantF0;
  return std::nullopt;
}

std::string preset_name(Preset preset) {
  switch (preset) {
    case Preset::Zero:
      return "zero";
    case Preset::BumpOnTail:
      return "bump_on_tail";
    case Preset::LinearEquilibrium:
      return "linear_equilibrium";
    case Preset::ConstantF0:
      return "constant_f0";
  }
  return "unknown";
}

ScalarField cubic_bump(const SpatialGrid& grid, double amplitude) {
  require(amplitude >= 0.0, "cubic_bump: amplitude must be nonnegative");
  const double half = 0.5 * grid.length();
  const double peak = std::pow(half * half, 3);
  return ScalarField::sample(grid, [&](double x) {
    return amplitude * std::pow((x - grid.x_a()) * (grid.x_b() - x), 3) / peak;
  });
}

ScalarField bump_on_tail_f0(const SpatialGrid& grid, const PresetParams& params) {
  require(params.width > 0.0, "bump_on_tail: width must be positive");
  require(params.bump_height >= 0.0, "bump_on_tail: bump height must be nonnegative");
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return ScalarField::sample(grid, [&](double p) {
    const double z = (p - params.center) / params.width;
    return norm * (std::exp(-0.5 * p * p) + params.bump_height * std::exp(-0.5 * z * z));
  });
}

PresetData make_preset(Preset preset, const SpatialGrid& grid, const TimeGrid& tgrid,
                       const PresetParams& params) {
  switch (preset) {
    case Preset::Zero: {
      auto kin = KineticData::from_reduced(ScalarField::zeros(grid), ScalarField::zeros(grid));
      ProblemData problem(tgrid, kin.w0, kin.g0);
      return PresetData{std::move(kin), std::move(problem), ScalarField::zeros(grid)};
    }
    case Preset::BumpOnTail: {
      auto kin = KineticData::from_reduced(bump_on_tail_f0(grid, params),
                                           cubic_bump(grid, params.amplitude));
      ProblemData problem(tgrid, kin.w0, kin.g0);
      ScalarField u0 = kin.w0;
      return PresetData{std::move(kin), std::move(problem), std::move(u0)};
    }
    case Preset::LinearEquilibrium: {
      const ScalarField u0 = ScalarField::zeros(grid);
      auto kin = KineticData::from_reduced(ScalarField::sample(grid, [](double p) { return p; }),
                                           u0);
      ProblemData problem(tgrid, equilibrium_M(u0, kin.f0), kin.g0);
      return PresetData{std::move(kin), std::move(problem), u0};
    }
    case Preset::ConstantF0: {
      auto kin = KineticData::from_reduced(ScalarField::constant(grid, 1.0),
                                           cubic_bump(grid, params.amplitude));
      ProblemData problem(tgrid, kin.w0, kin.g0);
      ScalarField u0 = kin.w0;
      return PresetData{std::move(kin), std::move(problem), std::move(u0)};
    }
  }
  throw DomainError("unknown preset");
}

}  // namespace qlpme
