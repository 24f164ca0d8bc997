#pragma once

// n-sweeps, inter-solution distances and the weak-form residual.

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qlpme/estimates.hpp"
#include "qlpme/kinetic.hpp"
#include "qlpme/solver.hpp"

namespace qlpme {

/// Exponents and parameters of the monitored functionals.
struct FunctionalRequest {
  std::vector<int> l_values{1, 2, 4};
  double s = 0.5;
  double sigma = 1.5;
  double theta = 0.25;
  double delta = 0.5;
  double alpha = 0.5;
  double epsilon = 0.1;
  double nu = 10.0;

  void validate() const;
};

struct SweepPlan {
  std::vector<int> n_values;
  FunctionalRequest functionals;
  SolverConfig solver;
  TestFunctionSpec psi = TestFunctionSpec::psi_poly();
  std::vector<TestFunctionSpec> etas = default_eta_library();
  bool parallel = true;
  /// Polled between solves; returning true aborts the sweep.
  std::function<bool()> cancelled;

  void validate() const;
};

/// Monitor summary of one solve in a sweep.
struct SweepMember {
  int n = 0;
  bool max_principle_ok = true;
  double coercivity_min = 0.0;
  double lower_violation = 0.0;
  double upper_violation = 0.0;
  double weak_residual_max = 0.0;
};

struct ConvergenceReport {
  std::vector<SweepMember> members;
  /// ||u_n - u_next||_{L2(Q_T)} for consecutive sweep entries, keyed by n.
  std::map<int, double> pairwise_l2;
  /// ||d/dx u~_n^2 - d/dx u~_ref^2||_{L^sigma}, keyed by (n, sigma).
  std::map<std::pair<int, double>, double> grad_sigma_norms;
  /// Mixed functional at exponent s against the finest-n solution.
  std::map<int, double> mixed_functional;
  /// Gradient a.e. proxy at exponent alpha against the finest-n solution.
  std::map<int, double> ae_proxy;
  /// Weak-form residual of the finest-n solution per test function.
  std::map<std::string, double> weak_residuals;
  std::vector<EstimateReport> estimates;
  /// Final time level of each member.
  std::map<int, ScalarField> final_levels;
  int reference_n = 0;
  /// Any member breached the maximum principle or the coercivity floor.
  bool failed = false;
};

/// Thrown when SweepPlan::cancelled reports true.
class Cancelled : public std::runtime_error {
 public:
  Cancelled() : std::runtime_error("run cancelled") {}
};

/// |LHS - RHS| of the weak identity
///   -(u, dt eta) + (x^2/2 dx u^2, dx eta)
///     = (-x^2 (dx u)^2, eta) + (-x dx u^2, eta) + (g0 u, eta) + (phi0, eta(., 0)).
/// Rejects eta that does not vanish on the spatial boundary and at t = T.
double weak_residual(const SpaceTimeField& u, const ProblemData& problem,
                     const TestFunctionSpec& eta);

/// Integral of |dx u_n - dx u_ref|^alpha psi over Q_T, alpha in (0, 1).
double ae_gradient_proxy(const SpaceTimeField& u_n, const SpaceTimeField& u_ref, double alpha,
                         const TestFunctionSpec& psi);

/// Solves (S_n) for every n of the plan on the problem's grid and assembles
/// all distances and estimates. Errors name the failing n.
ConvergenceReport run_sweep(const ProblemData& problem, const SweepPlan& plan);

struct RefinementLevel {
  Index nx = 0;
  Index nt = 0;
  double weak_residual_max = 0.0;
  double final_sup = 0.0;
};

/// Solves at fixed n on each (nx, nt) and reports the weak residual.
std::vector<RefinementLevel> refinement_study(
    const std::function<ProblemData(const SpatialGrid&, const TimeGrid&)>& make_problem,
    const SpatialGrid& base, double horizon, const std::vector<std::pair<Index, Index>>& grids,
    int n, const std::vector<TestFunctionSpec>& etas, const SolverConfig& solver = {});

/// True when every entry is strictly below its predecessor.
bool strictly_decreasing(const std::vector<double>& values);

}  // namespace qlpme
