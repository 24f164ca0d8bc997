#include <doctest.h>

#include <cmath>
#include <random>

#include "qlpme/equilibrium.hpp"
#include "qlpme/presets.hpp"
#include "qlpme/solver.hpp"

using namespace qlpme;

TEST_CASE("regularization family properties") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int n : {1, 4, 64, 512}) {
    const RegularizationFamily P(n);
    double prev_y = -11.0, prev = P(prev_y);
    for (int k = 0; k < 200; ++k) {
      const double y = d(rng);
      CHECK(P(y) >= 1.0 / (2.0 * n));
      if (y >= 0.0) CHECK(P(y) == doctest::Approx(y + 1.0 / n).epsilon(1e-15));
    }
    for (double y = -11.0; y <= 11.0; y += 0.01) {
      CHECK(P(y) >= prev);
      prev = P(y);
      prev_y = y;
    }
    (void)prev_y;
  }
  CHECK_THROWS_AS(RegularizationFamily(0), DomainError);
}

TEST_CASE("tridiagonal solve matches a dense solve") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const Index n = 7;
  Eigen::ArrayXd lo(n), di(n), up(n), rhs(n);
  for (Index i = 0; i < n; ++i) {
    lo(i) = d(rng);
    up(i) = d(rng);
    di(i) = 3.0 + d(rng);
    rhs(i) = d(rng);
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    A(i, i) = di(i);
    if (i > 0) A(i, i - 1) = lo(i);
    if (i + 1 < n) A(i, i + 1) = up(i);
  }
  const Eigen::VectorXd ref = A.partialPivLu().solve(rhs.matrix());
  CHECK((solve_tridiagonal(lo, di, up, rhs).matrix() - ref).norm() < 1e-13);
}

TEST_CASE("step_sn on three interior nodes matches a hand-assembled system") {
  const SpatialGrid g(1.0, 2.0, 5);
  const TimeGrid tg(0.1, 1);
  Eigen::ArrayXd phi(5), g0(5);
  phi << 0.0, 0.3, 0.7, 0.2, 0.0;
  g0 << 0.5, -0.4, 1.2, 0.8, 0.1;
  const ProblemData problem(tg, ScalarField(g, phi), ScalarField(g, g0));
  const RegularizationFamily P(4);
  const double dt = 0.05, h = g.h();

  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b;
  for (int r = 0; r < 3; ++r) {
    const Index i = r + 1;
    const double x = g.x(i);
    const double c = dt * x * x * P(phi(i)) / (h * h);
    A(r, r) = 1.0 + 2.0 * c;
    if (r > 0) A(r, r - 1) = -c;
    if (r < 2) A(r, r + 1) = -c;
    b(r) = (1.0 + dt * g0(i)) * phi(i);
  }
  const Eigen::Vector3d ref = A.fullPivLu().solve(b);
  const auto next = step_sn(ScalarField(g, phi), problem, P, dt);
  CHECK(next[0] == 0.0);
  CHECK(next[4] == 0.0);
  for (int r = 0; r < 3; ++r) CHECK(next[r + 1] == doctest::Approx(ref(r)).epsilon(1e-14));
}

TEST_CASE("step_sn preconditions") {
  const SpatialGrid g(1.0, 2.0, 11);
  const TimeGrid tg(1.0, 10);
  const auto g0 = ScalarField::constant(g, -4.0);
  const ProblemData problem(tg, cubic_bump(g, 1.0), g0);
  CHECK_THROWS_AS(step_sn(problem.phi0, problem, RegularizationFamily(4), 0.5), DomainError);
  CHECK_THROWS_AS(step_sn(ScalarField::constant(g, 1.0), problem, RegularizationFamily(4), 0.1),
                  DomainError);
}

TEST_CASE("zero is a fixed point") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(0.5, 50);
  const auto g0 = ScalarField::sample(g, [](double x) { return 3.0 * std::sin(5 * x); });
  const ProblemData problem(tg, ScalarField::zeros(g), g0);
  CHECK((step_sn(problem.phi0, problem, RegularizationFamily(8), tg.dt()).values == 0.0).all());
  const auto rep = solve_sn(problem, RegularizationFamily(8));
  CHECK((rep.solution.values == 0.0).all());
  CHECK(rep.max_principle_ok);
}

TEST_CASE("without a source the maximum never grows") {
  const SpatialGrid g(1.0, 2.0, 101);
  const TimeGrid tg(0.5, 500);
  const ProblemData problem(tg, cubic_bump(g, 1.0), ScalarField::zeros(g));
  const RegularizationFamily P(16);
  const auto one = step_sn(problem.phi0, problem, P, tg.dt());
  CHECK(one.values.maxCoeff() <= problem.phi0.values.maxCoeff());
  const auto rep = solve_sn(problem, P);
  CHECK(rep.max_principle_ok);
  CHECK(rep.solution.values.maxCoeff() <= problem.phi0.values.maxCoeff() + 1e-10);
  CHECK(rep.solution.values.minCoeff() >= -1e-10);
}

TEST_CASE("maximum principle and coercivity on bump-on-tail data") {
  const SpatialGrid g(1.0, 2.0, 101);
  const TimeGrid tg(0.5, 500);
  const auto data = make_preset(Preset::BumpOnTail, g, tg);
  for (int n : {4, 64}) {
    const auto rep = solve_sn(data.problem, RegularizationFamily(n));
    CHECK(rep.max_principle_ok);
    CHECK(rep.lower_violation == 0.0);
    CHECK(rep.upper_violation == 0.0);
    CHECK(rep.coercivity_min >= SolveReport::coercivity_floor(g, n));
    CHECK(rep.substeps >= 1);
  }
}

TEST_CASE("substepping follows the step guard") {
  const SpatialGrid g(1.0, 2.0, 41);
  const TimeGrid tg(0.5, 5);
  const auto g0 = ScalarField::constant(g, -50.0);
  const ProblemData problem(tg, cubic_bump(g, 1.0), g0);
  CHECK(max_stable_dt(g0, SolverConfig{}) == doctest::Approx(1.0 / 50.0));
  const auto rep = solve_sn(problem, RegularizationFamily(8));
  CHECK(rep.substeps == 5);
  CHECK(rep.max_principle_ok);
}

TEST_CASE("tilde_shift examples") {
  const SpatialGrid g(1.0, 2.0, 21);
  const TimeGrid tg(0.5, 20);
  const auto z = tilde_shift(SpaceTimeField::zeros(g, tg), 4);
  CHECK((z.values == 0.25).all());
  const ProblemData problem(tg, cubic_bump(g, 0.8), ScalarField::zeros(g));
  const auto rep = solve_sn(problem, RegularizationFamily(8));
  const auto shifted = tilde_shift(rep.solution, 8);
  CHECK(shifted.values.minCoeff() >= 0.125);
  CHECK((shifted.values.col(0) - (problem.phi0.values + 0.125)).abs().maxCoeff() == 0.0);
}

TEST_CASE("equilibrium data drifts by O(1/n) from the stationary profile") {
  // M solves x^2 M M'' + g0 M = 0 while the regularized equation uses
  // x^2 (M + 1/n) M'', so the drift over [0, T] scales with 1/n.
  const SpatialGrid g(1.0, 2.0, 51);
  const TimeGrid tg(0.2, 200);
  const auto data = make_preset(Preset::LinearEquilibrium, g, tg);
  auto drift = [&](int n) {
    const auto rep = solve_sn(data.problem, RegularizationFamily(n));
    return (rep.solution.final_level().values - data.problem.phi0.values).abs().maxCoeff();
  };
  const double d64 = drift(64), d128 = drift(128), d256 = drift(256);
  CHECK(d128 < d64);
  CHECK(d256 < d128);
  CHECK(d64 / d128 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(d128 / d256 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("coupled solver trivial cases") {
  const SpatialGrid g(1.0, 2.0, 41);
  const TimeGrid tg(0.2, 40);
  SUBCASE("w0 = 0 freezes f and keeps w = 0") {
    const auto kin =
        KineticData::from_reduced(bump_on_tail_f0(g, PresetParams{}), ScalarField::zeros(g));
    const auto sol = solve_coupled(kin, tg);
    CHECK((sol.w.values == 0.0).all());
    CHECK((sol.f.values.colwise() - kin.f0.values).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("constant f0 freezes both") {
    const auto kin = KineticData::from_reduced(ScalarField::constant(g, 0.7), cubic_bump(g, 1.0));
    const auto sol = solve_coupled(kin, tg);
    CHECK((sol.w.values.colwise() - kin.w0.values).abs().maxCoeff() < 1e-14);
    CHECK((sol.f.values - 0.7).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("coupled solver conserves particle number") {
  const SpatialGrid g(1.0, 2.0, 101);
  const TimeGrid tg(0.5, 500);
  const auto data = make_preset(Preset::BumpOnTail, g, tg);
  const auto sol = solve_coupled(data.kinetic, tg);
  const double m0 = integrate_space(sol.f.level(0));
  double drift = 0.0;
  for (Index m = 0; m < tg.levels(); ++m) {
    drift = std::max(drift, std::abs(integrate_space(sol.f.level(m)) - m0) / std::abs(m0));
  }
  CHECK(drift / tg.horizon() <= 1e-6);
  CHECK(sol.w.values.minCoeff() >= 0.0);
}

TEST_CASE("coupled and reduced descriptions agree under refinement") {
  auto mismatch = [](Index nx, Index nt) {
    const SpatialGrid g(1.0, 2.0, nx);
    const TimeGrid tg(0.5, nt);
    const auto data = make_preset(Preset::BumpOnTail, g, tg);
    const auto sol = solve_coupled(data.kinetic, tg);
    const auto f = reconstruct_f(sol.w, data.kinetic.w0, data.kinetic.f0);
    return (f.values - sol.f.values).abs().maxCoeff();
  };
  const double e1 = mismatch(51, 250), e2 = mismatch(101, 500), e3 = mismatch(201, 1000);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
}
