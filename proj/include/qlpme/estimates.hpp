#pragma once

// Functionals whose uniform-in-n boundedness is monitored, the cut-off pair
// T_eps / J_eps, and the exponential time regularization u_nu.

#include <map>
#include <string>
#include <vector>

#include "qlpme/core.hpp"

namespace qlpme {

/// Smooth test functions on Q_T.
///
/// Psi role: nonnegative, vanishing on all of the boundary of Q_T.
/// Eta role: vanishing on the spatial boundary and at t = T.
struct TestFunctionSpec {
  enum class Kind { PolyBump, SineBump };
  enum class Role { Psi, Eta };

  Kind kind = Kind::PolyBump;
  Role role = Role::Psi;
  /// Spatial mode number of SineBump.
  int mode = 1;

  static TestFunctionSpec psi_poly() { return {Kind::PolyBump, Role::Psi, 1}; }
  static TestFunctionSpec psi_sine() { return {Kind::SineBump, Role::Psi, 1}; }
  static TestFunctionSpec eta_poly() { return {Kind::PolyBump, Role::Eta, 1}; }
  static TestFunctionSpec eta_sine(int k) { return {Kind::SineBump, Role::Eta, k}; }

  std::string name() const;

  double value(const SpatialGrid& grid, const TimeGrid& tgrid, double x, double t) const;
  double dx(const SpatialGrid& grid, const TimeGrid& tgrid, double x, double t) const;
  double dt(const SpatialGrid& grid, const TimeGrid& tgrid, double x, double t) const;

  SpaceTimeField sample(const SpatialGrid& grid, const TimeGrid& tgrid) const;
  SpaceTimeField sample_dx(const SpatialGrid& grid, const TimeGrid& tgrid) const;
  SpaceTimeField sample_dt(const SpatialGrid& grid, const TimeGrid& tgrid) const;
};

/// poly_bump plus sine modes 1..3, all in the eta role.
std::vector<TestFunctionSpec> default_eta_library();

struct EstimateReport {
  int n = 0;
  double energy = 0.0;
  std::map<int, double> grad_norms;
  double time_deriv_sq = 0.0;
  double weighted_power = 0.0;
};

/// ||x d/dx (u~^2)||_{L2(Q_T)}.
double energy_functional(const SpaceTimeField& u_tilde);

/// max over levels of ||d/dx u||_{L^{2l}(Omega)}.
double sup_grad_norm(const SpaceTimeField& u, int l);

/// ||d/dt (u~^2)||_{L2(Q_T)} with forward differences, each difference
/// integrated over its own time interval. Needs nt >= 2.
double time_deriv_sq_norm(const SpaceTimeField& u_tilde);

/// Integral of x^2 psi u~^-theta |d/dx u~| over Q_T; theta in (0, 1/2).
double weighted_power_functional(const SpaceTimeField& u_tilde, const TestFunctionSpec& psi,
                                 double theta);

/// Collects the four functionals for one member of an n-sweep.
EstimateReport estimate_report(const SpaceTimeField& u_n, int n, const std::vector<int>& l_values,
                               double theta, const TestFunctionSpec& psi);

/// T_eps(y) = y inside (-eps, eps), sign(y) eps outside.
double cutoff_T(double y, double epsilon);

/// Nonnegative primitive of T_eps with J_eps(0) = 0.
double primitive_J(double y, double epsilon);

/// u_nu with u_nu(., 0) = phi0 and (1/nu) dt u_nu + u_nu = u, advanced
/// exactly over each interval with u replaced by its interval mean.
SpaceTimeField time_regularize(const SpaceTimeField& u, const ScalarField& phi0, double nu);

/// max over nodes and intervals of |(1/nu) D_t u_nu + mean(u_nu) - mean(u)|.
double time_regularization_residual(const SpaceTimeField& u_nu, const SpaceTimeField& u,
                                    double nu);

/// Integral of [x^2 u~_n (d/dx (u~_n - u_ref))^2]^s over Q_T, s in (0, 1).
double mixed_convergence_functional(const SpaceTimeField& u_tilde_n, const SpaceTimeField& u_ref,
                                    double s);

}  // namespace qlpme
