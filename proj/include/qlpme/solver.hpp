#pragma once

// Time steppers for the regularized reduced problem
//
//   dt u = x^2 P_n(u) d2x u + g0 u   in (x_a, x_b),  u = 0 on the boundary,
//
// and for the coupled kinetic system
//
//   dt f = d/dp (p^2 w d/dp f),   dt w = p^2 w d/dp f.

#include <chrono>

#include "qlpme/core.hpp"
#include "qlpme/kinetic.hpp"

namespace qlpme {

/// P_n(y) = max(y, 0) + 1/n: bounded below by 1/n, equal to y + 1/n on
/// y >= 0, nondecreasing.
class RegularizationFamily {
 public:
  explicit RegularizationFamily(int n);

  int n() const { return n_; }
  double offset() const { return 1.0 / n_; }
  double operator()(double y) const { return std::max(y, 0.0) + offset(); }

  template <typename Derived>
  Eigen::ArrayXd operator()(const Eigen::ArrayBase<Derived>& y) const {
    return y.derived().max(0.0) + offset();
  }

 private:
  int n_;
};

struct SolverConfig {
  double dt_safety = 1.0;
  /// Lower slack of the maximum principle, also the per-step nonnegativity guard.
  double max_principle_tol = 1e-10;
  /// Upper slack of the maximum principle.
  double max_principle_upper_tol = 1e-8;
  /// Relative residual accepted from a tridiagonal solve.
  double linear_solver_tol = 1e-10;
  /// Negative w above -clip is zeroed in the coupled stepper; below aborts.
  double w_clip = 1e-14;

  void validate() const;
};

struct SolveReport {
  SpaceTimeField solution;
  bool max_principle_ok = true;
  /// min over the trajectory of x^2 P_n(u).
  double coercivity_min = 0.0;
  /// Largest amount by which u dropped below 0 (0 when never).
  double lower_violation = 0.0;
  /// Largest amount by which u exceeded max(phi0) exp(max|g0| t) (0 when never).
  double upper_violation = 0.0;
  /// Internal steps per time level required by the step guard.
  Index substeps = 1;
  double compatibility_defect = 0.0;
  double wallclock_seconds = 0.0;

  /// The coercivity floor x_a^2 / (2n).
  static double coercivity_floor(const SpatialGrid& grid, int n) {
    return grid.x_a() * grid.x_a() / (2.0 * n);
  }
};

/// Thomas algorithm for a tridiagonal system. `lower(i)` multiplies x(i-1),
/// `upper(i)` multiplies x(i+1); lower(0) and upper(n-1) are ignored.
/// Throws NumericalFailure on a vanishing pivot.
Eigen::ArrayXd solve_tridiagonal(const Eigen::ArrayXd& lower, const Eigen::ArrayXd& diag,
                                 const Eigen::ArrayXd& upper, const Eigen::ArrayXd& rhs);

/// Largest step keeping the explicit reaction term sign-preserving:
/// dt_safety / max(1, max|g0|).
double max_stable_dt(const ScalarField& g0, const SolverConfig& config);

/// One linearly implicit step
///   (u+ - u)/dt = x^2 P_n(u) D2 u+ + g0 u,   u+ = 0 on the boundary.
ScalarField step_sn(const ScalarField& u_m, const ProblemData& problem,
                    const RegularizationFamily& reg, double dt, const SolverConfig& config = {});

/// Full trajectory on the problem's time grid with maximum-principle and
/// coercivity monitoring. Violations are recorded in the report.
SolveReport solve_sn(const ProblemData& problem, const RegularizationFamily& reg,
                     const SolverConfig& config = {});

/// u + 1/n; the result has boundary value exactly 1/n.
SpaceTimeField tilde_shift(const SpaceTimeField& u_n, int n);

struct CoupledSolution {
  SpaceTimeField f;
  SpaceTimeField w;
};

/// Semi-implicit kinetic stepper: f implicit in conservative flux form with
/// lagged coefficient p^2 w, then w <- w (1 + dt p^2 d/dp f).
CoupledSolution solve_coupled(const KineticData& kin, const TimeGrid& tgrid,
                              const SolverConfig& config = {});

}  // namespace qlpme
