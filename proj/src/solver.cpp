#include "qlpme/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qlpme {

RegularizationFamily::RegularizationFamily(int n) : n_(n) {
  require(n >= 1, "regularization: n must be a positive integer");
}

void SolverConfig::validate() const {
  require(dt_safety > 0.0 && dt_safety <= 1.0, "solver: dt_safety must lie in (0, 1]");
  require(max_principle_tol > 0.0 && max_principle_upper_tol > 0.0,
          "solver: maximum-principle tolerances must be positive");
  require(linear_solver_tol > 0.0, "solver: linear_solver_tol must be positive");
  require(w_clip > 0.0, "solver: w_clip must be positive");
}

Eigen::ArrayXd solve_tridiagonal(const Eigen::ArrayXd& lower, const Eigen::ArrayXd& diag,
                                 const Eigen::ArrayXd& upper, const Eigen::ArrayXd& rhs) {
  const Index n = diag.size();
  require(lower.size() == n && upper.size() == n && rhs.size() == n,
          "tridiagonal: band sizes differ");
  Eigen::ArrayXd c(n);
  Eigen::ArrayXd d(n);
  double pivot = diag(0);
  if (pivot == 0.0) throw NumericalFailure("tridiagonal: zero pivot in row 0");
  c(0) = upper(0) / pivot;
  d(0) = rhs(0) / pivot;
  for (Index i = 1; i < n; ++i) {
    pivot = diag(i) - lower(i) * c(i - 1);
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw NumericalFailure("tridiagonal: singular pivot in row " + std::to_string(i));
    }
    c(i) = upper(i) / pivot;
    d(i) = (rhs(i) - lower(i) * d(i - 1)) / pivot;
  }
  Eigen::ArrayXd x(n);
  x(n - 1) = d(n - 1);
  for (Index i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
  ensure_finite(x, "tridiagonal solution");
  return x;
}

namespace {

double tridiagonal_residual(const Eigen::ArrayXd& lower, const Eigen::ArrayXd& diag,
                            const Eigen::ArrayXd& upper, const Eigen::ArrayXd& x,
                            const Eigen::ArrayXd& rhs) {
  const Index n = x.size();
  Eigen::ArrayXd ax = diag * x;
  if (n > 1) {
    ax.tail(n - 1) += lower.tail(n - 1) * x.head(n - 1);
    ax.head(n - 1) += upper.head(n - 1) * x.tail(n - 1);
  }
  const double scale = std::max(rhs.abs().maxCoeff(), std::numeric_limits<double>::min());
  return (ax - rhs).abs().maxCoeff() / scale;
}

}  // namespace

double max_stable_dt(const ScalarField& g0, const SolverConfig& config) {
  return config.dt_safety / std::max(1.0, g0.values.abs().maxCoeff());
}

ScalarField step_sn(const ScalarField& u_m, const ProblemData& problem,
                    const RegularizationFamily& reg, double dt, const SolverConfig& config) {
  const SpatialGrid& grid = problem.grid();
  require(u_m.grid == grid, "step_sn: state and problem grids differ");
  require(dt > 0.0, "step_sn: dt must be positive");
  const double negative_source = (-problem.g0.values).max(0.0).maxCoeff();
  require(dt * negative_source <= 1.0, "step_sn: dt * max(g0^-) exceeds 1");
  const Index nx = grid.nx();
  const double tol = config.max_principle_tol;
  require(u_m.values.minCoeff() >= -tol, "step_sn: state must be nonnegative");
  require(std::abs(u_m.values(0)) <= tol && std::abs(u_m.values(nx - 1)) <= tol,
          "step_sn: state must vanish on the boundary");

  const Index m = nx - 2;
  const Eigen::ArrayXd x = grid.nodes().segment(1, m);
  const Eigen::ArrayXd u = u_m.values.segment(1, m);
  const Eigen::ArrayXd r = dt / (grid.h() * grid.h()) * x.square() * reg(u);
  const Eigen::ArrayXd lower = -r;
  const Eigen::ArrayXd diag = 1.0 + 2.0 * r;
  const Eigen::ArrayXd upper = -r;
  const Eigen::ArrayXd rhs = (1.0 + dt * problem.g0.values.segment(1, m)) * u;

  const Eigen::ArrayXd interior = solve_tridiagonal(lower, diag, upper, rhs);
  if (rhs.abs().maxCoeff() > 0.0 &&
      tridiagonal_residual(lower, diag, upper, interior, rhs) > config.linear_solver_tol) {
    throw NumericalFailure("step_sn: tridiagonal residual above tolerance");
  }
  if (interior.size() > 0 && interior.minCoeff() < -tol) {
    throw NumericalFailure("step_sn: nonnegativity violated by " +
                           std::to_string(-interior.minCoeff()));
  }
  Eigen::ArrayXd next = Eigen::ArrayXd::Zero(nx);
  next.segment(1, m) = interior;
  return ScalarField(grid, std::move(next));
}

SolveReport solve_sn(const ProblemData& problem, const RegularizationFamily& reg,
                     const SolverConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const SpatialGrid& grid = problem.grid();
  const TimeGrid& tgrid = problem.tgrid;

  const double dt_cap = max_stable_dt(problem.g0, config);
  const Index substeps =
      std::max<Index>(1, static_cast<Index>(std::ceil(tgrid.dt() / dt_cap * (1.0 - 1e-12))));
  const double dt = tgrid.dt() / static_cast<double>(substeps);

  const double phi_max = problem.phi0.values.maxCoeff();
  const double g_max = problem.g0.values.abs().maxCoeff();
  const Eigen::ArrayXd x2 = grid.nodes().square();

  Eigen::ArrayXXd traj(grid.nx(), tgrid.levels());
  traj.col(0) = problem.phi0.values;

  SolveReport report{SpaceTimeField::zeros(grid, tgrid)};
  report.substeps = substeps;
  report.compatibility_defect = problem.compatibility_defect();
  report.coercivity_min = (x2 * reg(problem.phi0.values)).minCoeff();

  auto monitor = [&](Index level, const Eigen::ArrayXd& u) {
    const double bound = phi_max * std::exp(g_max * tgrid.t(level));
    report.lower_violation = std::max(report.lower_violation, -u.minCoeff());
    report.upper_violation = std::max(report.upper_violation, u.maxCoeff() - bound);
    report.coercivity_min = std::min(report.coercivity_min, (x2 * reg(u)).minCoeff());
  };
  monitor(0, problem.phi0.values);

  ScalarField u = problem.phi0;
  for (Index level = 1; level < tgrid.levels(); ++level) {
    for (Index s = 0; s < substeps; ++s) u = step_sn(u, problem, reg, dt, config);
    traj.col(level) = u.values;
    monitor(level, u.values);
  }

  report.lower_violation = std::max(report.lower_violation, 0.0);
  report.upper_violation = std::max(report.upper_violation, 0.0);
  report.max_principle_ok = report.lower_violation <= config.max_principle_tol &&
                            report.upper_violation <= config.max_principle_upper_tol;
  report.solution = SpaceTimeField(grid, tgrid, std::move(traj), 0.0);
  report.wallclock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SpaceTimeField tilde_shift(const SpaceTimeField& u_n, int n) {
  require(n >= 1, "tilde_shift: n must be a positive integer");
  require(u_n.values.minCoeff() >= 0.0, "tilde_shift: u_n must be nonnegative");
  const double shift = 1.0 / n;
  Eigen::ArrayXXd v = u_n.values + shift;
  const Index last = u_n.grid.nx() - 1;
  v.row(0).setConstant(shift);
  v.row(last).setConstant(shift);
  return SpaceTimeField(u_n.grid, u_n.tgrid, std::move(v), shift);
}

CoupledSolution solve_coupled(const KineticData& kin, const TimeGrid& tgrid,
                              const SolverConfig& config) {
  config.validate();
  const SpatialGrid& grid = kin.pgrid;
  const Index nx = grid.nx();
  const double h = grid.h();
  const double dt = tgrid.dt();
  require((kin.w0.values >= 0.0).all(), "solve_coupled: w0 must be nonnegative");

  const Eigen::ArrayXd p = grid.nodes();
  const Eigen::ArrayXd p2 = p.square();
  const Eigen::ArrayXd p_mid = 0.5 * (p.head(nx - 1) + p.tail(nx - 1));
  // Control volumes of the trapezoid rule: half cells at the endpoints.
  Eigen::ArrayXd volume = Eigen::ArrayXd::Constant(nx, h);
  volume(0) = volume(nx - 1) = 0.5 * h;

  Eigen::ArrayXXd f_traj(nx, tgrid.levels());
  Eigen::ArrayXXd w_traj(nx, tgrid.levels());
  Eigen::ArrayXd f = kin.f0.values;
  Eigen::ArrayXd w = kin.w0.values;
  f_traj.col(0) = f;
  w_traj.col(0) = w;

  for (Index level = 1; level < tgrid.levels(); ++level) {
    // Face coefficients p^2 w at half nodes, lagged in time.
    const Eigen::ArrayXd face =
        p_mid.square() * 0.5 * (w.head(nx - 1) + w.tail(nx - 1)) * (dt / h);
    Eigen::ArrayXd lower = Eigen::ArrayXd::Zero(nx);
    Eigen::ArrayXd upper = Eigen::ArrayXd::Zero(nx);
    Eigen::ArrayXd diag = volume;
    lower.tail(nx - 1) = -face;
    upper.head(nx - 1) = -face;
    diag.head(nx - 1) += face;
    diag.tail(nx - 1) += face;
    const Eigen::ArrayXd rhs = volume * f;
    f = solve_tridiagonal(lower, diag, upper, rhs);
    if (tridiagonal_residual(lower, diag, upper, f, rhs) > config.linear_solver_tol) {
      throw NumericalFailure("solve_coupled: tridiagonal residual above tolerance");
    }

    w = w * (1.0 + dt * p2 * derivative(f, h));
    ensure_finite(w, "coupled w");
    if (w.minCoeff() < -config.w_clip) {
      throw NumericalFailure("solve_coupled: w fell below -" + std::to_string(config.w_clip) +
                             " at level " + std::to_string(level));
    }
    w = w.max(0.0);
    f_traj.col(level) = f;
    w_traj.col(level) = w;
  }
  return CoupledSolution{SpaceTimeField(grid, tgrid, std::move(f_traj)),
                         SpaceTimeField(grid, tgrid, std::move(w_traj))};
}

}  // namespace qlpme
