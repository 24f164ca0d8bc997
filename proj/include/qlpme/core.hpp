#pragma once

// Grids, fields and discrete calculus on Q_T = (x_a, x_b) x [0, T].
//
// The stencils and quadrature rules are free function templates over
// Eigen::ArrayBase so they work on whole vectors, columns of a space-time
// block, or expressions without materializing a temporary.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <span>

#include "qlpme/error.hpp"

namespace qlpme {

using Index = Eigen::Index;

/// Uniform node set x_i = x_a + i h, i = 0..nx-1, on a positive interval.
class SpatialGrid {
 public:
  SpatialGrid(double x_a, double x_b, Index nx);

  double x_a() const { return x_a_; }
  double x_b() const { return x_b_; }
  Index nx() const { return nx_; }
  double h() const { return h_; }
  double length() const { return x_b_ - x_a_; }

  // Last node is pinned to x_b so endpoint evaluations are exact.
  double x(Index i) const { return i == nx_ - 1 ? x_b_ : x_a_ + static_cast<double>(i) * h_; }
  Eigen::ArrayXd nodes() const;

  bool operator==(const SpatialGrid&) const = default;

 private:
  double x_a_;
  double x_b_;
  Index nx_;
  double h_;
};

/// Uniform time levels t_m = m dt, m = 0..nt.
class TimeGrid {
 public:
  TimeGrid(double horizon, Index nt);

  double horizon() const { return horizon_; }
  Index nt() const { return nt_; }
  Index levels() const { return nt_ + 1; }
  double dt() const { return dt_; }
  double t(Index m) const { return m == nt_ ? horizon_ : static_cast<double>(m) * dt_; }
  Eigen::ArrayXd nodes() const;

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_;
  Index nt_;
  double dt_;
};

/// Node values on a SpatialGrid. Construction rejects NaN/Inf.
struct ScalarField {
  ScalarField(SpatialGrid grid, Eigen::ArrayXd values);

  static ScalarField zeros(const SpatialGrid& grid);
  static ScalarField constant(const SpatialGrid& grid, double c);
  static ScalarField sample(const SpatialGrid& grid, const std::function<double(double)>& fn);

  double operator[](Index i) const { return values(i); }
  Index size() const { return values.size(); }

  SpatialGrid grid;
  Eigen::ArrayXd values;
};

/// Values on nodes x time levels; column m is time level t_m.
///
/// When `boundary` is set, both boundary rows must equal it at every level.
struct SpaceTimeField {
  SpaceTimeField(SpatialGrid grid, TimeGrid tgrid, Eigen::ArrayXXd values,
                 std::optional<double> boundary = std::nullopt);

  static SpaceTimeField zeros(const SpatialGrid& grid, const TimeGrid& tgrid);
  static SpaceTimeField sample(const SpatialGrid& grid, const TimeGrid& tgrid,
                               const std::function<double(double, double)>& fn);
  /// Time-constant extension of a spatial profile.
  static SpaceTimeField frozen(const ScalarField& profile, const TimeGrid& tgrid);

  ScalarField level(Index m) const { return ScalarField(grid, values.col(m)); }
  ScalarField final_level() const { return level(tgrid.nt()); }

  SpatialGrid grid;
  TimeGrid tgrid;
  Eigen::ArrayXXd values;
  std::optional<double> boundary;
};

/// Throws NumericalFailure when any entry is NaN or infinite.
template <typename Derived>
void ensure_finite(const Eigen::DenseBase<Derived>& values, const char* what) {
  if (!values.derived().allFinite()) {
    throw NumericalFailure(std::string("non-finite value in ") + what);
  }
}

// ---------------------------------------------------------------------------
// Stencils

/// First derivative: central at interior nodes, one-sided second order at
/// the two endpoints. Exact on quadratics everywhere.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> derivative(
    const Eigen::ArrayBase<Derived>& v, typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Index n = v.size();
  if (n < 3) throw DomainError("derivative: grid needs at least 3 nodes");
  Eigen::Array<Scalar, Eigen::Dynamic, 1> d(n);
  const Scalar inv2h = Scalar(1) / (Scalar(2) * h);
  d.segment(1, n - 2) = (v.tail(n - 2) - v.head(n - 2)) * inv2h;
  d(0) = (Scalar(-3) * v(0) + Scalar(4) * v(1) - v(2)) * inv2h;
  d(n - 1) = (Scalar(3) * v(n - 1) - Scalar(4) * v(n - 2) + v(n - 3)) * inv2h;
  return d;
}

/// Second derivative: (1,-2,1)/h^2 inside, (2,-5,4,-1)/h^2 at the endpoints
/// (exact on cubics). Needs four nodes.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> second_derivative(
    const Eigen::ArrayBase<Derived>& v, typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Index n = v.size();
  if (n < 4) throw DomainError("second_derivative: grid needs at least 4 nodes");
  Eigen::Array<Scalar, Eigen::Dynamic, 1> d(n);
  const Scalar inv_h2 = Scalar(1) / (h * h);
  d.segment(1, n - 2) = (v.head(n - 2) - Scalar(2) * v.segment(1, n - 2) + v.tail(n - 2)) * inv_h2;
  d(0) = (Scalar(2) * v(0) - Scalar(5) * v(1) + Scalar(4) * v(2) - v(3)) * inv_h2;
  d(n - 1) =
      (Scalar(2) * v(n - 1) - Scalar(5) * v(n - 2) + Scalar(4) * v(n - 3) - v(n - 4)) * inv_h2;
  return d;
}

/// Composite trapezoid rule on a uniform node set.
template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::ArrayBase<Derived>& v,
                                   typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Index n = v.size();
  if (n < 2) return Scalar(0);
  return h * (v.sum() - Scalar(0.5) * (v(0) + v(n - 1)));
}

/// Running trapezoid integral, out(0) = 0, out(i) = integral over [x_0, x_i].
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> cumulative_trapezoid(
    const Eigen::ArrayBase<Derived>& v, typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Index n = v.size();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> out(n);
  if (n == 0) return out;
  out(0) = Scalar(0);
  for (Index i = 1; i < n; ++i) out(i) = out(i - 1) + Scalar(0.5) * h * (v(i - 1) + v(i));
  return out;
}

/// Tensor trapezoid over a nodes x levels block.
template <typename Derived>
typename Derived::Scalar trapezoid_2d(const Eigen::ArrayBase<Derived>& block,
                                      typename Derived::Scalar h,
                                      typename Derived::Scalar dt) {
  using Scalar = typename Derived::Scalar;
  const Index levels = block.cols();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> per_level(levels);
  for (Index m = 0; m < levels; ++m) per_level(m) = trapezoid(block.col(m), h);
  return trapezoid(per_level, dt);
}

/// Column-wise spatial derivative of a nodes x levels block.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> derivative_columns(
    const Eigen::ArrayBase<Derived>& block, typename Derived::Scalar h) {
  Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(block.rows(),
                                                                            block.cols());
  for (Index m = 0; m < block.cols(); ++m) out.col(m) = derivative(block.col(m), h);
  return out;
}

// ---------------------------------------------------------------------------
// Field-level operations

ScalarField derivative(const ScalarField& field);
ScalarField second_derivative(const ScalarField& field);
double integrate_space(const ScalarField& field);
double integrate_spacetime(const SpaceTimeField& field);

/// d/dx of every time level.
SpaceTimeField space_derivative(const SpaceTimeField& field);

/// Integral of |field|^q over Q_T for any q > 0 (a quasi-norm below q = 1).
double power_integral(const SpaceTimeField& field, double q);

/// (integral of |field|^q)^(1/q); requires q >= 1.
double lq_norm(const SpaceTimeField& field, double q);

/// L^{2l}(0,T; W^{1,2l}_0) norm. Rejects fields whose boundary rows are not
/// zero to within boundary_tol * max(1, max|field|).
double bochner_norm(const SpaceTimeField& field, int l, double boundary_tol = 1e-12);

// ---------------------------------------------------------------------------
// Interpolation

/// Shape-preserving piecewise cubic Hermite interpolation (PCHIP). `xs`
/// strictly increasing; queries outside [xs.front(), xs.back()] are a
/// DomainError.
class MonotoneCubic {
 public:
  MonotoneCubic(Eigen::ArrayXd xs, Eigen::ArrayXd ys);
  double operator()(double x) const;
  Eigen::ArrayXd operator()(const Eigen::ArrayXd& xq) const;
  double lower() const { return xs_(0); }
  double upper() const { return xs_(xs_.size() - 1); }

 private:
  Eigen::ArrayXd xs_;
  Eigen::ArrayXd ys_;
  Eigen::ArrayXd slopes_;
};

}  // namespace qlpme
