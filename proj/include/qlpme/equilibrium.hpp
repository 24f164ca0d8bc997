#pragma once

// Stationary states of the degenerate reduced problem
//
//   0 = x^2 u d2x u + g0 u,  u = 0 on the boundary,
//
// built from the closed-form profile M(x) of the linear equation
// x^2 d2x M + g0 = 0 with g0 = x^2 d/dx (f0 - d/dx u0).

#include "qlpme/core.hpp"

namespace qlpme {

struct EquilibriumResult {
  ScalarField M;
  ScalarField M_plus;
  /// M > 0 at every interior node.
  bool positive_everywhere = false;
  /// stationarity_residual(M_plus, g0).
  double residual_inf = 0.0;
};

/// M(x) = u0(x) + [ F(x_b) (x - x_a) - F(x) (x_b - x_a) ] / (x_b - x_a),
/// F(x) the running trapezoid integral of f0 from x_a.
ScalarField equilibrium_M(const ScalarField& u0, const ScalarField& f0);

/// Pointwise max(M, 0).
ScalarField positive_part(const ScalarField& M);

/// |x^2 u D2 u + g0 u| at interior nodes, zero at the endpoints.
/// Rejects u that does not vanish on the boundary.
ScalarField stationarity_profile(const ScalarField& u_inf, const ScalarField& g0);

/// max of stationarity_profile.
double stationarity_residual(const ScalarField& u_inf, const ScalarField& g0);

EquilibriumResult compute_equilibrium(const ScalarField& u0, const ScalarField& f0,
                                      const ScalarField& g0);

}  // namespace qlpme
