#include "qlpme/equilibrium.hpp"

namespace qlpme {

ScalarField equilibrium_M(const ScalarField& u0, const ScalarField& f0) {
  require(u0.grid == f0.grid, "equilibrium_M: u0 and f0 must share a grid");
  const SpatialGrid& grid = u0.grid;
  const Eigen::ArrayXd F = cumulative_trapezoid(f0.values, grid.h());
  const double total = F(F.size() - 1);
  const double L = grid.length();
  const Eigen::ArrayXd offset = grid.nodes() - grid.x_a();
  Eigen::ArrayXd bracket = (total * offset - F * L) / L;
  // The bracket is zero at both ends analytically; pin it.
  bracket(0) = 0.0;
  bracket(bracket.size() - 1) = 0.0;
  return ScalarField(grid, u0.values + bracket);
}

ScalarField positive_part(const ScalarField& M) {
  return ScalarField(M.grid, M.values.max(0.0));
}

ScalarField stationarity_profile(const ScalarField& u_inf, const ScalarField& g0) {
  require(u_inf.grid == g0.grid, "stationarity_residual: grids differ");
  const Index n = u_inf.size();
  const double scale = std::max(1.0, u_inf.values.abs().maxCoeff());
  require(std::abs(u_inf.values(0)) <= 1e-14 * scale &&
              std::abs(u_inf.values(n - 1)) <= 1e-14 * scale,
          "stationarity_residual: u must vanish on the boundary");
  const double h = u_inf.grid.h();
  const Eigen::ArrayXd x2 = u_inf.grid.nodes().square();
  Eigen::ArrayXd r = Eigen::ArrayXd::Zero(n);
  for (Index i = 1; i < n - 1; ++i) {
    const double d2 = (u_inf.values(i - 1) - 2.0 * u_inf.values(i) + u_inf.values(i + 1)) / (h * h);
    r(i) = std::abs(x2(i) * u_inf.values(i) * d2 + g0.values(i) * u_inf.values(i));
  }
  return ScalarField(u_inf.grid, std::move(r));
}

double stationarity_residual(const ScalarField& u_inf, const ScalarField& g0) {
  return stationarity_profile(u_inf, g0).values.maxCoeff();
}

EquilibriumResult compute_equilibrium(const ScalarField& u0, const ScalarField& f0,
                                      const ScalarField& g0) {
  ScalarField M = equilibrium_M(u0, f0);
  ScalarField M_plus = positive_part(M);
  const Index n = M.size();
  const bool positive = (M.values.segment(1, n - 2) > 0.0).all();
  const double residual = stationarity_residual(M_plus, g0);
  return EquilibriumResult{std::move(M), std::move(M_plus), positive, residual};
}

}  // namespace qlpme
