#include "qlpme/estimates.hpp"

#include <numbers>

namespace qlpme {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

std::string TestFunctionSpec::name() const {
  const std::string prefix = role == Role::Psi ? "psi_" : "eta_";
  if (kind == Kind::PolyBump) return prefix + "poly";
  return prefix + "sine" + std::to_string(mode);
}

double TestFunctionSpec::value(const SpatialGrid& grid, const TimeGrid& tgrid, double x,
                               double t) const {
  const double L = grid.length();
  const double T = tgrid.horizon();
  const double xi = x - grid.x_a();
  if (role == Role::Psi) {
    if (kind == Kind::PolyBump) {
      const double norm = std::pow(L / 2.0, 4) * std::pow(T / 2.0, 4);
      return std::pow(xi * (L - xi), 2) * std::pow(t * (T - t), 2) / norm;
    }
    return std::pow(std::sin(mode * kPi * xi / L), 2) * std::pow(std::sin(kPi * t / T), 2);
  }
  if (kind == Kind::PolyBump) return xi * xi * (L - xi) * (L - xi) * (T - t);
  return std::sin(mode * kPi * xi / L) * (T - t);
}

double TestFunctionSpec::dx(const SpatialGrid& grid, const TimeGrid& tgrid, double x,
                            double t) const {
  const double L = grid.length();
  const double T = tgrid.horizon();
  const double xi = x - grid.x_a();
  if (role == Role::Psi) {
    if (kind == Kind::PolyBump) {
      const double norm = std::pow(L / 2.0, 4) * std::pow(T / 2.0, 4);
      return 2.0 * xi * (L - xi) * (L - 2.0 * xi) * std::pow(t * (T - t), 2) / norm;
    }
    const double k = mode * kPi / L;
    return k * std::sin(2.0 * k * xi) * std::pow(std::sin(kPi * t / T), 2);
  }
  if (kind == Kind::PolyBump) return 2.0 * xi * (L - xi) * (L - 2.0 * xi) * (T - t);
  const double k = mode * kPi / L;
  return k * std::cos(k * xi) * (T - t);
}

double TestFunctionSpec::dt(const SpatialGrid& grid, const TimeGrid& tgrid, double x,
                            double t) const {
  const double L = grid.length();
  const double T = tgrid.horizon();
  const double xi = x - grid.x_a();
  if (role == Role::Psi) {
    if (kind == Kind::PolyBump) {
      const double norm = std::pow(L / 2.0, 4) * std::pow(T / 2.0, 4);
      return std::pow(xi * (L - xi), 2) * 2.0 * t * (T - t) * (T - 2.0 * t) / norm;
    }
    return std::pow(std::sin(mode * kPi * xi / L), 2) * (kPi / T) * std::sin(2.0 * kPi * t / T);
  }
  if (kind == Kind::PolyBump) return -xi * xi * (L - xi) * (L - xi);
  return -std::sin(mode * kPi * xi / L);
}

SpaceTimeField TestFunctionSpec::sample(const SpatialGrid& grid, const TimeGrid& tgrid) const {
  return SpaceTimeField::sample(grid, tgrid,
                                [&](double x, double t) { return value(grid, tgrid, x, t); });
}

SpaceTimeField TestFunctionSpec::sample_dx(const SpatialGrid& grid, const TimeGrid& tgrid) const {
  return SpaceTimeField::sample(grid, tgrid,
                                [&](double x, double t) { return dx(grid, tgrid, x, t); });
}

SpaceTimeField TestFunctionSpec::sample_dt(const SpatialGrid& grid, const TimeGrid& tgrid) const {
  return SpaceTimeField::sample(grid, tgrid,
                                [&](double x, double t) { return dt(grid, tgrid, x, t); });
}

std::vector<TestFunctionSpec> default_eta_library() {
  return {TestFunctionSpec::eta_poly(), TestFunctionSpec::eta_sine(1),
          TestFunctionSpec::eta_sine(2), TestFunctionSpec::eta_sine(3)};
}

double energy_functional(const SpaceTimeField& u_tilde) {
  const Eigen::ArrayXd x = u_tilde.grid.nodes();
  const Eigen::ArrayXXd grad = derivative_columns(u_tilde.values.square(), u_tilde.grid.h());
  const Eigen::ArrayXXd integrand = (grad.colwise() * x).square();
  return std::sqrt(trapezoid_2d(integrand, u_tilde.grid.h(), u_tilde.tgrid.dt()));
}

double sup_grad_norm(const SpaceTimeField& u, int l) {
  require(l >= 1, "sup_grad_norm: l must be a positive integer");
  const double q = 2.0 * l;
  const Eigen::ArrayXXd grad = derivative_columns(u.values, u.grid.h());
  double best = 0.0;
  for (Index m = 0; m < grad.cols(); ++m) {
    best = std::max(best, trapezoid(grad.col(m).abs().pow(q).eval(), u.grid.h()));
  }
  return std::pow(best, 1.0 / q);
}

double time_deriv_sq_norm(const SpaceTimeField& u_tilde) {
  const Index nt = u_tilde.tgrid.nt();
  require(nt >= 2, "time_deriv_sq_norm: need at least two time steps");
  const double dt = u_tilde.tgrid.dt();
  const Eigen::ArrayXXd sq = u_tilde.values.square();
  const Eigen::ArrayXXd diff = (sq.rightCols(nt) - sq.leftCols(nt)) / dt;
  double total = 0.0;
  for (Index m = 0; m < nt; ++m) total += dt * trapezoid(diff.col(m).square().eval(), u_tilde.grid.h());
  return std::sqrt(total);
}

double weighted_power_functional(const SpaceTimeField& u_tilde, const TestFunctionSpec& psi,
                                 double theta) {
  require(theta > 0.0 && theta < 0.5, "weighted_power_functional: theta must lie in (0, 1/2)");
  require(psi.role == TestFunctionSpec::Role::Psi, "weighted_power_functional: psi role required");
  if (u_tilde.values.minCoeff() <= 0.0) {
    throw DomainError("weighted_power_functional: u~ must be strictly positive");
  }
  const Eigen::ArrayXd x2 = u_tilde.grid.nodes().square();
  const Eigen::ArrayXXd grad = derivative_columns(u_tilde.values, u_tilde.grid.h());
  const Eigen::ArrayXXd weight = psi.sample(u_tilde.grid, u_tilde.tgrid).values;
  const Eigen::ArrayXXd integrand =
      (weight * u_tilde.values.pow(-theta) * grad.abs()).colwise() * x2;
  return trapezoid_2d(integrand, u_tilde.grid.h(), u_tilde.tgrid.dt());
}

EstimateReport estimate_report(const SpaceTimeField& u_n, int n, const std::vector<int>& l_values,
                               double theta, const TestFunctionSpec& psi) {
  EstimateReport report;
  report.n = n;
  const SpaceTimeField u_tilde(u_n.grid, u_n.tgrid, u_n.values + 1.0 / n);
  report.energy = energy_functional(u_tilde);
  for (int l : l_values) report.grad_norms[l] = sup_grad_norm(u_n, l);
  report.time_deriv_sq = time_deriv_sq_norm(u_tilde);
  report.weighted_power = weighted_power_functional(u_tilde, psi, theta);
  return report;
}

double cutoff_T(double y, double epsilon) {
  require(epsilon > 0.0, "cutoff_T: epsilon must be positive");
  if (std::abs(y) < epsilon) return y;
  return std::copysign(epsilon, y);
}

double primitive_J(double y, double epsilon) {
  require(epsilon > 0.0, "primitive_J: epsilon must be positive");
  if (y < -epsilon) return -epsilon * y - 0.5 * epsilon * epsilon;
  if (y > epsilon) return epsilon * y - 0.5 * epsilon * epsilon;
  return 0.5 * y * y;
}

SpaceTimeField time_regularize(const SpaceTimeField& u, const ScalarField& phi0, double nu) {
  require(nu > 0.0, "time_regularize: nu must be positive");
  require(phi0.grid == u.grid, "time_regularize: grids differ");
  const double decay = std::exp(-nu * u.tgrid.dt());
  Eigen::ArrayXXd out(u.values.rows(), u.values.cols());
  out.col(0) = phi0.values;
  for (Index m = 1; m < u.values.cols(); ++m) {
    const Eigen::ArrayXd mean = 0.5 * (u.values.col(m - 1) + u.values.col(m));
    out.col(m) = decay * out.col(m - 1) + (1.0 - decay) * mean;
  }
  return SpaceTimeField(u.grid, u.tgrid, std::move(out));
}

double time_regularization_residual(const SpaceTimeField& u_nu, const SpaceTimeField& u,
                                    double nu) {
  require(nu > 0.0, "time_regularization_residual: nu must be positive");
  const Index nt = u.tgrid.nt();
  const double dt = u.tgrid.dt();
  const Eigen::ArrayXXd rate = (u_nu.values.rightCols(nt) - u_nu.values.leftCols(nt)) / dt;
  const Eigen::ArrayXXd mean_nu = 0.5 * (u_nu.values.rightCols(nt) + u_nu.values.leftCols(nt));
  const Eigen::ArrayXXd mean_u = 0.5 * (u.values.rightCols(nt) + u.values.leftCols(nt));
  return (rate / nu + mean_nu - mean_u).abs().maxCoeff();
}

double mixed_convergence_functional(const SpaceTimeField& u_tilde_n, const SpaceTimeField& u_ref,
                                    double s) {
  require(s > 0.0 && s < 1.0, "mixed_convergence_functional: s must lie in (0, 1)");
  require(u_tilde_n.grid == u_ref.grid && u_tilde_n.tgrid == u_ref.tgrid,
          "mixed_convergence_functional: grids differ");
  if (u_tilde_n.values.minCoeff() <= 0.0) {
    throw DomainError("mixed_convergence_functional: u~_n must be strictly positive");
  }
  const Eigen::ArrayXd x2 = u_tilde_n.grid.nodes().square();
  const Eigen::ArrayXXd grad =
      derivative_columns((u_tilde_n.values - u_ref.values).eval(), u_tilde_n.grid.h());
  const Eigen::ArrayXXd base = (u_tilde_n.values * grad.square()).colwise() * x2;
  return trapezoid_2d(base.pow(s).eval(), u_tilde_n.grid.h(), u_tilde_n.tgrid.dt());
}

}  // namespace qlpme
