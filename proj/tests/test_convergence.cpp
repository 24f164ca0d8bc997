#include <doctest.h>

#include "qlpme/convergence.hpp"
#include "qlpme/presets.hpp"

using namespace qlpme;

namespace {

SweepPlan small_plan(std::vector<int> ns) {
  SweepPlan plan;
  plan.n_values = std::move(ns);
  return plan;
}

}  // namespace

TEST_CASE("plan validation") {
  CHECK_THROWS_AS(small_plan({8}).validate(), DomainError);
  CHECK_THROWS_AS(small_plan({8, 4}).validate(), DomainError);
  auto plan = small_plan({4, 8});
  plan.functionals.sigma = 2.0;
  CHECK_THROWS_AS(plan.validate(), DomainError);
  plan.functionals.sigma = 1.5;
  plan.psi = TestFunctionSpec::eta_poly();
  CHECK_THROWS_AS(plan.validate(), DomainError);
}

TEST_CASE("sweep of zero data has zero distances") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(0.2, 20);
  const ProblemData problem(tg, ScalarField::zeros(g), ScalarField::constant(g, 2.0));
  const auto rep = run_sweep(problem, small_plan({4, 8, 16}));
  CHECK(rep.reference_n == 16);
  CHECK_FALSE(rep.failed);
  for (const auto& [n, v] : rep.pairwise_l2) CHECK(v == 0.0);
  for (const auto& [key, v] : rep.grad_sigma_norms) CHECK(v == 0.0);
  for (const auto& [n, v] : rep.ae_proxy) CHECK(v == 0.0);
  for (const auto& [name, v] : rep.weak_residuals) CHECK(v == 0.0);
  CHECK(rep.pairwise_l2.size() == 2);
}

TEST_CASE("weak residual examples") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(0.2, 20);
  const ProblemData zero(tg, ScalarField::zeros(g), ScalarField::zeros(g));
  for (const auto& eta : default_eta_library()) {
    CHECK(weak_residual(SpaceTimeField::zeros(g, tg), zero, eta) == 0.0);
  }
  // A psi-role bump also satisfies the eta vanishing conditions.
  CHECK(weak_residual(SpaceTimeField::zeros(g, tg), zero, TestFunctionSpec::psi_sine()) == 0.0);
}

TEST_CASE("weak residual of the stationary profile is quadrature error") {
  auto residual = [](Index nx, Index nt) {
    const SpatialGrid g(1.0, 2.0, nx);
    const TimeGrid tg(0.5, nt);
    const auto data = make_preset(Preset::LinearEquilibrium, g, tg);
    const auto u = SpaceTimeField::frozen(data.problem.phi0, tg);
    double worst = 0.0;
    for (const auto& eta : default_eta_library()) {
      worst = std::max(worst, weak_residual(u, data.problem, eta));
    }
    return worst;
  };
  const double coarse = residual(51, 200), fine = residual(101, 400);
  CHECK(coarse < 1e-3);
  CHECK(coarse / fine > 3.0);
}

TEST_CASE("bump-on-tail sweep diagnostics decrease in n") {
  const SpatialGrid g(1.0, 2.0, 81);
  const TimeGrid tg(0.5, 400);
  const auto data = make_preset(Preset::BumpOnTail, g, tg);
  const auto rep = run_sweep(data.problem, small_plan({4, 8, 16, 32, 64}));
  CHECK_FALSE(rep.failed);
  std::vector<double> l2, ae;
  for (const auto& [n, v] : rep.pairwise_l2) l2.push_back(v);
  for (const auto& [n, v] : rep.ae_proxy) ae.push_back(v);
  CHECK(strictly_decreasing(l2));
  CHECK(strictly_decreasing(ae));
  CHECK(l2.back() < l2.front());
  for (const auto& m : rep.members) {
    CHECK(m.max_principle_ok);
    CHECK(m.coercivity_min >= SolveReport::coercivity_floor(g, m.n));
  }
}

TEST_CASE("ae proxy is finite for several exponents and zero on itself") {
  const SpatialGrid g(1.0, 2.0, 41);
  const TimeGrid tg(0.3, 60);
  const auto data = make_preset(Preset::BumpOnTail, g, tg);
  const auto a = solve_sn(data.problem, RegularizationFamily(8)).solution;
  const auto b = solve_sn(data.problem, RegularizationFamily(32)).solution;
  const auto psi = TestFunctionSpec::psi_poly();
  CHECK(ae_gradient_proxy(a, a, 0.5, psi) == 0.0);
  for (double alpha : {0.25, 0.5, 0.75}) {
    const double v = ae_gradient_proxy(a, b, alpha, psi);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}

TEST_CASE("sweeps are deterministic, serial or parallel") {
  const SpatialGrid g(1.0, 2.0, 41);
  const TimeGrid tg(0.3, 100);
  const auto data = make_preset(Preset::BumpOnTail, g, tg);
  auto plan = small_plan({4, 8, 16});
  const auto par = run_sweep(data.problem, plan);
  plan.parallel = false;
  const auto ser = run_sweep(data.problem, plan);
  CHECK(par.pairwise_l2 == ser.pairwise_l2);
  CHECK(par.grad_sigma_norms == ser.grad_sigma_norms);
  CHECK(par.mixed_functional == ser.mixed_functional);
  CHECK(par.ae_proxy == ser.ae_proxy);
  CHECK(par.weak_residuals == ser.weak_residuals);
  for (std::size_t i = 0; i < par.estimates.size(); ++i) {
    CHECK(par.estimates[i].energy == ser.estimates[i].energy);
    CHECK(par.estimates[i].weighted_power == ser.estimates[i].weighted_power);
  }
}

TEST_CASE("cancelled sweeps throw") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(0.2, 20);
  const auto data = make_preset(Preset::BumpOnTail, g, tg);
  auto plan = small_plan({4, 8});
  plan.cancelled = [] { return true; };
  CHECK_THROWS_AS(run_sweep(data.problem, plan), Cancelled);
}

TEST_CASE("refinement study reduces the weak residual") {
  const SpatialGrid base(1.0, 2.0, 21);
  auto make = [](const SpatialGrid& g, const TimeGrid& tg) {
    return make_preset(Preset::BumpOnTail, g, tg).problem;
  };
  const auto levels =
      refinement_study(make, base, 0.5, {{41, 400}, {81, 1600}, {161, 6400}}, 64,
                       default_eta_library());
  REQUIRE(levels.size() == 3);
  CHECK(levels[0].nx == 41);
  std::vector<double> r;
  for (const auto& l : levels) r.push_back(l.weak_residual_max);
  CHECK(strictly_decreasing(r));
}

TEST_CASE("strictly_decreasing") {
  CHECK(strictly_decreasing({3.0, 2.0, 1.0}));
  CHECK_FALSE(strictly_decreasing({3.0, 3.0, 1.0}));
  CHECK(strictly_decreasing({}));
}
