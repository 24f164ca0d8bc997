#include "qlpme/convergence.hpp"

#include <future>
#include <string>

namespace qlpme {

void FunctionalRequest::validate() const {
  require(!l_values.empty(), "functionals: l_list must not be empty");
  for (int l : l_values) require(l >= 1, "functionals: l must be a positive integer");
  require(s > 0.0 && s < 1.0, "functionals: s must lie in (0, 1)");
  require(sigma > 0.0 && sigma < 2.0, "functionals: sigma must lie in (0, 2)");
  require(theta > 0.0 && theta < 0.5, "functionals: theta must lie in (0, 1/2)");
  require(delta > 0.0 && delta < 1.0, "functionals: delta must lie in (0, 1)");
  require(alpha > 0.0 && alpha < 1.0, "functionals: alpha must lie in (0, 1)");
  require(epsilon > 0.0, "functionals: epsilon must be positive");
  require(nu > 0.0, "functionals: nu must be positive");
}

void SweepPlan::validate() const {
  require(n_values.size() >= 2, "sweep: need at least two n values");
  require(n_values.front() >= 1, "sweep: n values must be positive");
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    require(n_values[i] > n_values[i - 1], "sweep: n values must be strictly increasing");
  }
  require(psi.role == TestFunctionSpec::Role::Psi, "sweep: psi must have the psi role");
  for (const auto& eta : etas) {
    require(eta.role == TestFunctionSpec::Role::Eta, "sweep: eta library entries need the eta role");
  }
  functionals.validate();
  solver.validate();
}

namespace {

double weighted_integral(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b,
                         const SpaceTimeField& shape) {
  return trapezoid_2d((a * b).eval(), shape.grid.h(), shape.tgrid.dt());
}

void check_eta(const SpaceTimeField& eta) {
  const Index last_x = eta.grid.nx() - 1;
  const Index last_t = eta.tgrid.nt();
  const double scale = std::max(1.0, eta.values.abs().maxCoeff());
  const double edge = std::max({eta.values.row(0).abs().maxCoeff(),
                                eta.values.row(last_x).abs().maxCoeff(),
                                eta.values.col(last_t).abs().maxCoeff()});
  if (edge > 1e-12 * scale) {
    throw DomainError("weak_residual: eta must vanish on the spatial boundary and at t = T");
  }
}

}  // namespace

double weak_residual(const SpaceTimeField& u, const ProblemData& problem,
                     const TestFunctionSpec& eta) {
  require(u.grid == problem.grid() && u.tgrid == problem.tgrid,
          "weak_residual: solution and problem grids differ");
  const SpatialGrid& grid = u.grid;
  const TimeGrid& tgrid = u.tgrid;
  const SpaceTimeField eta_v = eta.sample(grid, tgrid);
  check_eta(eta_v);
  const Eigen::ArrayXXd eta_x = eta.sample_dx(grid, tgrid).values;
  const Eigen::ArrayXXd eta_t = eta.sample_dt(grid, tgrid).values;

  const Eigen::ArrayXd x = grid.nodes();
  const Eigen::ArrayXd x2 = x.square();
  const Eigen::ArrayXXd ux = derivative_columns(u.values, grid.h());
  const Eigen::ArrayXXd u2x = derivative_columns(u.values.square().eval(), grid.h());

  const double lhs = -weighted_integral(u.values, eta_t, u) +
                     weighted_integral((u2x.colwise() * (0.5 * x2)).eval(), eta_x, u);
  const double rhs = weighted_integral((-(ux.square().colwise() * x2)).eval(), eta_v.values, u) +
                     weighted_integral((-(u2x.colwise() * x)).eval(), eta_v.values, u) +
                     weighted_integral((u.values.colwise() * problem.g0.values).eval(),
                                       eta_v.values, u) +
                     trapezoid((problem.phi0.values * eta_v.values.col(0)).eval(), grid.h());
  return std::abs(lhs - rhs);
}

double ae_gradient_proxy(const SpaceTimeField& u_n, const SpaceTimeField& u_ref, double alpha,
                         const TestFunctionSpec& psi) {
  require(alpha > 0.0 && alpha < 1.0, "ae_gradient_proxy: alpha must lie in (0, 1)");
  require(psi.role == TestFunctionSpec::Role::Psi, "ae_gradient_proxy: psi role required");
  require(u_n.grid == u_ref.grid && u_n.tgrid == u_ref.tgrid, "ae_gradient_proxy: grids differ");
  const double h = u_n.grid.h();
  const Eigen::ArrayXXd diff = derivative_columns((u_n.values - u_ref.values).eval(), h);
  const Eigen::ArrayXXd weight = psi.sample(u_n.grid, u_n.tgrid).values;
  return trapezoid_2d((diff.abs().pow(alpha) * weight).eval(), h, u_n.tgrid.dt());
}

namespace {

template <typename Error>
[[noreturn]] void rethrow_with_n(const Error& e, int n) {
  throw Error("sweep member n=" + std::to_string(n) + ": " + e.what());
}

SolveReport solve_member(const ProblemData& problem, int n, const SolverConfig& config) {
  try {
    return solve_sn(problem, RegularizationFamily(n), config);
  } catch (const NumericalFailure& e) {
    rethrow_with_n(e, n);
  } catch (const DomainError& e) {
    rethrow_with_n(e, n);
  }
}

}  // namespace

ConvergenceReport run_sweep(const ProblemData& problem, const SweepPlan& plan) {
  plan.validate();
  const auto& ns = plan.n_values;
  const auto poll = [&] {
    if (plan.cancelled && plan.cancelled()) throw Cancelled();
  };

  std::vector<SolveReport> solves;
  solves.reserve(ns.size());
  poll();
  if (plan.parallel) {
    std::vector<std::future<SolveReport>> pending;
    for (int n : ns) {
      pending.push_back(std::async(std::launch::async, solve_member, std::cref(problem), n,
                                   std::cref(plan.solver)));
    }
    for (auto& f : pending) solves.push_back(f.get());
  } else {
    for (int n : ns) {
      solves.push_back(solve_member(problem, n, plan.solver));
      poll();
    }
  }
  poll();

  ConvergenceReport report;
  const std::size_t last = ns.size() - 1;
  report.reference_n = ns[last];
  const SpaceTimeField& u_ref = solves[last].solution;
  const SpaceTimeField u_ref_tilde = tilde_shift(u_ref, ns[last]);
  const double h = problem.grid().h();
  const Eigen::ArrayXXd ref_sq_grad = derivative_columns(u_ref_tilde.values.square().eval(), h);
  const auto& fr = plan.functionals;

  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    const SolveReport& solve = solves[i];
    const SpaceTimeField& u = solve.solution;

    SweepMember member;
    member.n = n;
    member.max_principle_ok = solve.max_principle_ok;
    member.coercivity_min = solve.coercivity_min;
    member.lower_violation = solve.lower_violation;
    member.upper_violation = solve.upper_violation;
    for (const auto& eta : plan.etas) {
      member.weak_residual_max = std::max(member.weak_residual_max, weak_residual(u, problem, eta));
    }
    report.failed = report.failed || !solve.max_principle_ok ||
                    solve.coercivity_min < SolveReport::coercivity_floor(problem.grid(), n);
    report.members.push_back(member);

    report.estimates.push_back(estimate_report(u, n, fr.l_values, fr.theta, plan.psi));
    report.final_levels.emplace(n, u.final_level());

    if (i < last) {
      const SpaceTimeField diff(u.grid, u.tgrid, u.values - solves[i + 1].solution.values);
      report.pairwise_l2[n] = lq_norm(diff, 2.0);

      const SpaceTimeField u_tilde = tilde_shift(u, n);
      const Eigen::ArrayXXd sq_grad = derivative_columns(u_tilde.values.square().eval(), h);
      const SpaceTimeField grad_diff(u.grid, u.tgrid, sq_grad - ref_sq_grad);
      report.grad_sigma_norms[{n, fr.sigma}] =
          std::pow(power_integral(grad_diff, fr.sigma), 1.0 / fr.sigma);
      report.mixed_functional[n] = mixed_convergence_functional(u_tilde, u_ref, fr.s);
      report.ae_proxy[n] = ae_gradient_proxy(u, u_ref, fr.alpha, plan.psi);
    }
  }
  for (const auto& eta : plan.etas) {
    report.weak_residuals[eta.name()] = weak_residual(u_ref, problem, eta);
  }
  return report;
}

std::vector<RefinementLevel> refinement_study(
    const std::function<ProblemData(const SpatialGrid&, const TimeGrid&)>& make_problem,
    const SpatialGrid& base, double horizon, const std::vector<std::pair<Index, Index>>& grids,
    int n, const std::vector<TestFunctionSpec>& etas, const SolverConfig& solver) {
  std::vector<RefinementLevel> out;
  for (const auto& [nx, nt] : grids) {
    const SpatialGrid grid(base.x_a(), base.x_b(), nx);
    const TimeGrid tgrid(horizon, nt);
    const ProblemData problem = make_problem(grid, tgrid);
    const SolveReport solve = solve_sn(problem, RegularizationFamily(n), solver);
    RefinementLevel level{nx, nt, 0.0, solve.solution.final_level().values.abs().maxCoeff()};
    for (const auto& eta : etas) {
      level.weak_residual_max =
          std::max(level.weak_residual_max, weak_residual(solve.solution, problem, eta));
    }
    out.push_back(level);
  }
  return out;
}

bool strictly_decreasing(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1])) return false;
  }
  return true;
}

}  // namespace qlpme
