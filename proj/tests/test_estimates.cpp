#include <doctest.h>

#include <cmath>

#include "qlpme/estimates.hpp"
#include "qlpme/presets.hpp"
#include "qlpme/solver.hpp"

using namespace qlpme;

namespace {

SpaceTimeField bump_solution(int n) {
  const SpatialGrid g(1.0, 2.0, 61);
  const TimeGrid tg(0.3, 120);
  const auto data = make_preset(Preset::BumpOnTail, g, tg);
  return solve_sn(data.problem, RegularizationFamily(n)).solution;
}

}  // namespace

TEST_CASE("test functions vanish where their role requires") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(0.5, 10);
  for (const auto& psi : {TestFunctionSpec::psi_poly(), TestFunctionSpec::psi_sine()}) {
    const auto v = psi.sample(g, tg);
    CHECK(v.values.minCoeff() >= 0.0);
    CHECK(v.values.row(0).abs().maxCoeff() < 1e-14);
    CHECK(v.values.row(g.nx() - 1).abs().maxCoeff() < 1e-14);
    CHECK(v.values.col(0).abs().maxCoeff() < 1e-14);
    CHECK(v.values.col(tg.nt()).abs().maxCoeff() < 1e-14);
  }
  CHECK(TestFunctionSpec::psi_poly().sample(g, tg).values.maxCoeff() ==
        doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& eta : default_eta_library()) {
    const auto v = eta.sample(g, tg);
    CHECK(v.values.row(0).abs().maxCoeff() < 1e-14);
    CHECK(v.values.row(g.nx() - 1).abs().maxCoeff() < 1e-14);
    CHECK(v.values.col(tg.nt()).abs().maxCoeff() < 1e-14);
  }
  CHECK(TestFunctionSpec::eta_sine(2).name() == "eta_sine2");
}

TEST_CASE("test function derivatives match finite differences") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(0.5, 10);
  const double e = 1e-6;
  for (const auto& f : {TestFunctionSpec::psi_poly(), TestFunctionSpec::psi_sine(),
                        TestFunctionSpec::eta_poly(), TestFunctionSpec::eta_sine(3)}) {
    for (double x : {1.2, 1.5, 1.77}) {
      for (double t : {0.1, 0.31}) {
        const double fdx = (f.value(g, tg, x + e, t) - f.value(g, tg, x - e, t)) / (2 * e);
        const double fdt = (f.value(g, tg, x, t + e) - f.value(g, tg, x, t - e)) / (2 * e);
        CHECK(f.dx(g, tg, x, t) == doctest::Approx(fdx).epsilon(1e-6));
        CHECK(f.dt(g, tg, x, t) == doctest::Approx(fdt).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("energy functional examples") {
  const SpatialGrid g(1.0, 2.0, 401);
  const TimeGrid tg(1.0, 4);
  CHECK(energy_functional(SpaceTimeField::sample(g, tg, [](double, double) { return 0.3; })) <
        1e-14);
  const auto root = SpaceTimeField::sample(g, tg, [](double x, double) { return std::sqrt(x); });
  CHECK(energy_functional(root) == doctest::Approx(std::sqrt(7.0 / 3.0)).epsilon(1e-5));
}

TEST_CASE("sup_grad_norm examples") {
  const SpatialGrid g(1.0, 3.0, 21);
  const TimeGrid tg(1.0, 4);
  CHECK(sup_grad_norm(SpaceTimeField::zeros(g, tg), 2) == 0.0);
  const auto lin = SpaceTimeField::sample(g, tg, [](double x, double) { return x; });
  for (int l : {1, 2, 4}) {
    CHECK(sup_grad_norm(lin, l) == doctest::Approx(std::pow(2.0, 1.0 / (2 * l))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sup_grad_norm(lin, 0), DomainError);
}

TEST_CASE("time_deriv_sq_norm examples") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(1.0, 10);
  const auto frozen = SpaceTimeField::sample(g, tg, [](double x, double) { return x; });
  CHECK(time_deriv_sq_norm(frozen) == 0.0);
  const auto root = SpaceTimeField::sample(g, tg, [](double, double t) { return std::sqrt(t); });
  CHECK(time_deriv_sq_norm(root) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(time_deriv_sq_norm(SpaceTimeField::zeros(g, TimeGrid(1.0, 1))), DomainError);
}

TEST_CASE("weighted_power_functional examples") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(1.0, 10);
  const auto c = SpaceTimeField::sample(g, tg, [](double, double) { return 0.5; });
  CHECK(weighted_power_functional(c, TestFunctionSpec::psi_poly(), 0.25) == 0.0);
  const auto u = SpaceTimeField::sample(g, tg, [](double x, double) { return x; });
  CHECK(weighted_power_functional(u, TestFunctionSpec::psi_poly(), 0.25) > 0.0);
  CHECK_THROWS_AS(weighted_power_functional(u, TestFunctionSpec::psi_poly(), 0.5), DomainError);
  CHECK_THROWS_AS(weighted_power_functional(u, TestFunctionSpec::eta_poly(), 0.25), DomainError);
  CHECK_THROWS_AS(
      weighted_power_functional(SpaceTimeField::zeros(g, tg), TestFunctionSpec::psi_poly(), 0.25),
      DomainError);
}

TEST_CASE("functionals are homogeneous of the expected degree") {
  const auto u = tilde_shift(bump_solution(16), 16);
  const double c = 2.5;
  const SpaceTimeField cu(u.grid, u.tgrid, c * u.values);
  const auto psi = TestFunctionSpec::psi_poly();
  const double theta = 0.25;
  CHECK(energy_functional(cu) == doctest::Approx(c * c * energy_functional(u)).epsilon(1e-12));
  CHECK(sup_grad_norm(cu, 2) == doctest::Approx(c * sup_grad_norm(u, 2)).epsilon(1e-12));
  CHECK(time_deriv_sq_norm(cu) == doctest::Approx(c * c * time_deriv_sq_norm(u)).epsilon(1e-12));
  CHECK(weighted_power_functional(cu, psi, theta) ==
        doctest::Approx(std::pow(c, 1.0 - theta) * weighted_power_functional(u, psi, theta))
            .epsilon(1e-12));
}

TEST_CASE("estimate_report of the zero solution") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(0.5, 10);
  const auto rep = estimate_report(SpaceTimeField::zeros(g, tg), 8, {1, 2, 4}, 0.25,
                                   TestFunctionSpec::psi_poly());
  CHECK(rep.n == 8);
  CHECK(rep.energy == 0.0);
  CHECK(rep.time_deriv_sq == 0.0);
  CHECK(rep.weighted_power == 0.0);
  for (int l : {1, 2, 4}) CHECK(rep.grad_norms.at(l) == 0.0);
}

TEST_CASE("cutoff and primitive examples") {
  CHECK(cutoff_T(0.3, 0.5) == 0.3);
  CHECK(cutoff_T(2.0, 0.5) == 0.5);
  CHECK(cutoff_T(-2.0, 0.5) == -0.5);
  CHECK(primitive_J(0.3, 0.5) == doctest::Approx(0.045).epsilon(1e-15));
  CHECK(primitive_J(2.0, 0.5) == doctest::Approx(0.875).epsilon(1e-15));
  for (double y = -3.0; y <= 3.0; y += 0.25) CHECK(primitive_J(y, 0.5) >= 0.0);
}

TEST_CASE("cutoff properties on samples") {
  for (double eps : {0.1, 0.5, 2.0}) {
    for (double y = -5.0; y <= 5.0; y += 0.0137) {
      CHECK(std::abs(cutoff_T(y, eps)) <= eps);
      CHECK(y * cutoff_T(y, eps) >= 0.0);
      if (std::abs(std::abs(y) - eps) > 1e-3) {
        const double h = 1e-4;
        const double fd = (primitive_J(y + h, eps) - primitive_J(y - h, eps)) / (2 * h);
        CHECK(std::abs(fd - cutoff_T(y, eps)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("time regularization examples") {
  const SpatialGrid g(1.0, 2.0, 11);
  const TimeGrid tg(1.0, 50);
  const double nu = 3.0;
  const auto c = SpaceTimeField::sample(g, tg, [](double, double) { return 0.4; });
  const auto fixed = time_regularize(c, ScalarField::constant(g, 0.4), nu);
  CHECK((fixed.values - 0.4).abs().maxCoeff() < 1e-15);

  const auto one = SpaceTimeField::sample(g, tg, [](double, double) { return 1.0; });
  const auto rise = time_regularize(one, ScalarField::zeros(g), nu);
  for (Index m = 0; m < tg.levels(); ++m) {
    const double expect = 1.0 - std::exp(-nu * tg.t(m));
    CHECK((rise.values.col(m) - expect).abs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("time regularization residual is first order and starts at phi0") {
  const SpatialGrid g(1.0, 2.0, 31);
  auto residual = [&](Index nt) {
    const TimeGrid tg(0.5, nt);
    const auto u =
        SpaceTimeField::sample(g, tg, [](double x, double t) { return std::sin(6 * t) * x; });
    const auto phi0 = ScalarField::sample(g, [](double x) { return 0.2 * x; });
    const auto u_nu = time_regularize(u, phi0, 10.0);
    CHECK((u_nu.values.col(0) == phi0.values).all());
    return time_regularization_residual(u_nu, u, 10.0);
  };
  const double r1 = residual(50), r2 = residual(100);
  CHECK(r2 < r1);
  CHECK(r1 / r2 > 1.8);
}

TEST_CASE("mixed convergence functional") {
  const auto a = tilde_shift(bump_solution(8), 8);
  const auto b = tilde_shift(bump_solution(32), 32);
  CHECK(mixed_convergence_functional(a, a, 0.5) == 0.0);
  for (double s : {0.25, 0.5, 0.75}) {
    const double v = mixed_convergence_functional(a, b, s);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
  CHECK_THROWS_AS(mixed_convergence_functional(a, b, 1.0), DomainError);
}
