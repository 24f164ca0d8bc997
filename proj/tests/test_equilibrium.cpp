#include <doctest.h>

#include <cmath>

#include "qlpme/equilibrium.hpp"
#include "qlpme/kinetic.hpp"
#include "qlpme/presets.hpp"

using namespace qlpme;

TEST_CASE("equilibrium_M examples") {
  const SpatialGrid g(1.0, 2.0, 41);
  const auto u0 = cubic_bump(g, 0.6);
  CHECK((equilibrium_M(u0, ScalarField::zeros(g)).values == u0.values).all());
  CHECK((equilibrium_M(u0, ScalarField::constant(g, 2.5)).values - u0.values).abs().maxCoeff() <
        1e-13);
  const auto M = equilibrium_M(u0, ScalarField::sample(g, [](double s) { return s; }));
  const auto expect =
      ScalarField::sample(g, [](double x) { return (x - 1.0) * (2.0 - x) / 2.0; });
  CHECK((M.values - u0.values - expect.values).abs().maxCoeff() < 1e-14);
}

TEST_CASE("equilibrium_M is affine in u0 and the correction vanishes at the ends") {
  const SpatialGrid g(1.0, 2.0, 41);
  const auto f0 = bump_on_tail_f0(g, PresetParams{});
  const auto u0 = cubic_bump(g, 1.0);
  const auto v = ScalarField::sample(g, [](double x) { return std::sin(7 * x); });
  const auto lhs = equilibrium_M(ScalarField(g, u0.values + v.values), f0);
  const Eigen::ArrayXd rhs = equilibrium_M(u0, f0).values + v.values;
  CHECK((lhs.values - rhs).abs().maxCoeff() < 1e-14);
  const Eigen::ArrayXd bracket = equilibrium_M(u0, f0).values - u0.values;
  CHECK(bracket(0) == 0.0);
  CHECK(bracket(g.nx() - 1) == 0.0);
}

TEST_CASE("positive_part examples") {
  const SpatialGrid g(1.0, 2.0, 5);
  const auto pos = ScalarField::sample(g, [](double x) { return x; });
  CHECK((positive_part(pos).values == pos.values).all());
  CHECK((positive_part(ScalarField::constant(g, -1.0)).values == 0.0).all());
  Eigen::ArrayXd mixed(5);
  mixed << 0.0, -0.3, 0.2, -1e-9, 0.0;
  Eigen::ArrayXd expect(5);
  expect << 0.0, 0.0, 0.2, 0.0, 0.0;
  CHECK((positive_part(ScalarField(g, mixed)).values == expect).all());
}

TEST_CASE("stationarity residual examples") {
  const SpatialGrid g(1.0, 2.0, 41);
  CHECK(stationarity_residual(ScalarField::zeros(g), ScalarField::zeros(g)) == 0.0);
  const auto f0 = ScalarField::sample(g, [](double s) { return s; });
  const auto M = equilibrium_M(ScalarField::zeros(g), f0);
  const auto g0 = build_g0(f0, ScalarField::zeros(g));
  CHECK(stationarity_residual(M, g0) <= 1e-12);
  CHECK_THROWS_AS(stationarity_residual(ScalarField::constant(g, 1.0), g0), DomainError);
}

TEST_CASE("compute_equilibrium on positive and sign-changing profiles") {
  const SpatialGrid g(1.0, 2.0, 101);
  const TimeGrid tg(0.5, 10);
  const auto lin = make_preset(Preset::LinearEquilibrium, g, tg);
  const auto eq = compute_equilibrium(lin.u0, lin.kinetic.f0, lin.problem.g0);
  CHECK(eq.positive_everywhere);
  CHECK(eq.residual_inf <= 1e-10);
  CHECK((eq.M_plus.values == eq.M.values).all());

  const auto bot = make_preset(Preset::BumpOnTail, g, tg);
  const auto mixed = compute_equilibrium(bot.u0, bot.kinetic.f0, bot.problem.g0);
  CHECK_FALSE(mixed.positive_everywhere);
  CHECK(mixed.M.values.minCoeff() < 0.0);
  CHECK(mixed.M_plus.values.minCoeff() == 0.0);
  CHECK(std::isfinite(mixed.residual_inf));
}

TEST_CASE("residual on the positive set matches the full-M residual there") {
  const SpatialGrid g(1.0, 2.0, 101);
  const TimeGrid tg(0.5, 10);
  const auto bot = make_preset(Preset::BumpOnTail, g, tg);
  const auto eq = compute_equilibrium(bot.u0, bot.kinetic.f0, bot.problem.g0);
  const auto full = stationarity_profile(eq.M, bot.problem.g0);
  const auto plus = stationarity_profile(eq.M_plus, bot.problem.g0);
  // Nodes whose stencil lies inside {M > 0}.
  for (Index i = 2; i + 2 < g.nx(); ++i) {
    if (eq.M[i - 1] > 0.0 && eq.M[i] > 0.0 && eq.M[i + 1] > 0.0) {
      CHECK(plus[i] == doctest::Approx(full[i]).epsilon(1e-12));
    }
  }
}
