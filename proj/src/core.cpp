#include "qlpme/core.hpp"

#include <algorithm>
#include <string>

namespace qlpme {

SpatialGrid::SpatialGrid(double x_a, double x_b, Index nx) : x_a_(x_a), x_b_(x_b), nx_(nx) {
  require(std::isfinite(x_a) && std::isfinite(x_b), "grid: endpoints must be finite");
  require(x_a > 0.0, "grid: x_a must be positive");
  require(x_b > x_a, "grid: x_b must exceed x_a");
  require(nx >= 3, "grid: nx must be at least 3");
  h_ = (x_b - x_a) / static_cast<double>(nx - 1);
}

Eigen::ArrayXd SpatialGrid::nodes() const {
  Eigen::ArrayXd out(nx_);
  for (Index i = 0; i < nx_; ++i) out(i) = x(i);
  return out;
}

TimeGrid::TimeGrid(double horizon, Index nt) : horizon_(horizon), nt_(nt) {
  require(std::isfinite(horizon) && horizon > 0.0, "time grid: T must be positive");
  require(nt >= 1, "time grid: nt must be at least 1");
  dt_ = horizon / static_cast<double>(nt);
}

Eigen::ArrayXd TimeGrid::nodes() const {
  Eigen::ArrayXd out(levels());
  for (Index m = 0; m < levels(); ++m) out(m) = t(m);
  return out;
}

ScalarField::ScalarField(SpatialGrid g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
  require(values.size() == grid.nx(), "field: value count does not match grid");
  ensure_finite(values, "scalar field");
}

ScalarField ScalarField::zeros(const SpatialGrid& grid) {
  return ScalarField(grid, Eigen::ArrayXd::Zero(grid.nx()));
}

ScalarField ScalarField::constant(const SpatialGrid& grid, double c) {
  return ScalarField(grid, Eigen::ArrayXd::Constant(grid.nx(), c));
}

ScalarField ScalarField::sample(const SpatialGrid& grid, const std::function<double(double)>& fn) {
  Eigen::ArrayXd v(grid.nx());
  for (Index i = 0; i < grid.nx(); ++i) v(i) = fn(grid.x(i));
  return ScalarField(grid, std::move(v));
}

SpaceTimeField::SpaceTimeField(SpatialGrid g, TimeGrid tg, Eigen::ArrayXXd v,
                               std::optional<double> b)
    : grid(g), tgrid(tg), values(std::move(v)), boundary(b) {
  require(values.rows() == grid.nx() && values.cols() == tgrid.levels(),
          "space-time field: shape does not match grids");
  ensure_finite(values, "space-time field");
  if (boundary) {
    const double b0 = *boundary;
    const Index last = grid.nx() - 1;
    for (Index m = 0; m < values.cols(); ++m) {
      if (values(0, m) != b0 || values(last, m) != b0) {
        throw DomainError("space-time field: boundary value differs from declared value");
      }
    }
  }
}

SpaceTimeField SpaceTimeField::zeros(const SpatialGrid& grid, const TimeGrid& tgrid) {
  return SpaceTimeField(grid, tgrid, Eigen::ArrayXXd::Zero(grid.nx(), tgrid.levels()), 0.0);
}

SpaceTimeField SpaceTimeField::sample(const SpatialGrid& grid, const TimeGrid& tgrid,
                                      const std::function<double(double, double)>& fn) {
  Eigen::ArrayXXd v(grid.nx(), tgrid.levels());
  for (Index m = 0; m < tgrid.levels(); ++m) {
    for (Index i = 0; i < grid.nx(); ++i) v(i, m) = fn(grid.x(i), tgrid.t(m));
  }
  return SpaceTimeField(grid, tgrid, std::move(v));
}

SpaceTimeField SpaceTimeField::frozen(const ScalarField& profile, const TimeGrid& tgrid) {
  Eigen::ArrayXXd v = profile.values.replicate(1, tgrid.levels());
  return SpaceTimeField(profile.grid, tgrid, std::move(v));
}

ScalarField derivative(const ScalarField& field) {
  return ScalarField(field.grid, derivative(field.values, field.grid.h()));
}

ScalarField second_derivative(const ScalarField& field) {
  return ScalarField(field.grid, second_derivative(field.values, field.grid.h()));
}

double integrate_space(const ScalarField& field) {
  return trapezoid(field.values, field.grid.h());
}

double integrate_spacetime(const SpaceTimeField& field) {
  return trapezoid_2d(field.values, field.grid.h(), field.tgrid.dt());
}

SpaceTimeField space_derivative(const SpaceTimeField& field) {
  return SpaceTimeField(field.grid, field.tgrid, derivative_columns(field.values, field.grid.h()));
}

double power_integral(const SpaceTimeField& field, double q) {
  require(q > 0.0, "power_integral: exponent must be positive");
  const Eigen::ArrayXXd p = field.values.abs().pow(q);
  return trapezoid_2d(p, field.grid.h(), field.tgrid.dt());
}

double lq_norm(const SpaceTimeField& field, double q) {
  require(q >= 1.0, "lq_norm: q must be >= 1");
  return std::pow(power_integral(field, q), 1.0 / q);
}

double bochner_norm(const SpaceTimeField& field, int l, double boundary_tol) {
  require(l >= 1, "bochner_norm: l must be a positive integer");
  const Index last = field.grid.nx() - 1;
  const double scale = std::max(1.0, field.values.abs().maxCoeff());
  const double edge =
      std::max(field.values.row(0).abs().maxCoeff(), field.values.row(last).abs().maxCoeff());
  if (edge > boundary_tol * scale) {
    throw DomainError("bochner_norm: field does not vanish on the spatial boundary");
  }
  const double q = 2.0 * l;
  const Eigen::ArrayXXd grad = derivative_columns(field.values, field.grid.h());
  const Eigen::ArrayXXd integrand = field.values.abs().pow(q) + grad.abs().pow(q);
  return std::pow(trapezoid_2d(integrand, field.grid.h(), field.tgrid.dt()), 1.0 / q);
}

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

// Three-point endpoint slope with the usual PCHIP limiting.
double edge_slope(double h0, double h1, double d0, double d1) {
  double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (sign(s) != sign(d0)) {
    s = 0.0;
  } else if (sign(d0) != sign(d1) && std::abs(s) > 3.0 * std::abs(d0)) {
    s = 3.0 * d0;
  }
  return s;
}

}  // namespace

MonotoneCubic::MonotoneCubic(Eigen::ArrayXd xs, Eigen::ArrayXd ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  const Index n = xs_.size();
  require(n >= 2 && ys_.size() == n, "interpolation: need at least 2 matching samples");
  ensure_finite(xs_, "interpolation abscissae");
  ensure_finite(ys_, "interpolation ordinates");
  for (Index i = 1; i < n; ++i) {
    require(xs_(i) > xs_(i - 1), "interpolation: abscissae must be strictly increasing");
  }
  const Eigen::ArrayXd hk = xs_.tail(n - 1) - xs_.head(n - 1);
  const Eigen::ArrayXd dk = (ys_.tail(n - 1) - ys_.head(n - 1)) / hk;
  slopes_.resize(n);
  if (n == 2) {
    slopes_.setConstant(dk(0));
    return;
  }
  for (Index k = 1; k < n - 1; ++k) {
    if (dk(k - 1) * dk(k) <= 0.0) {
      slopes_(k) = 0.0;
    } else {
      const double w1 = 2.0 * hk(k) + hk(k - 1);
      const double w2 = hk(k) + 2.0 * hk(k - 1);
      slopes_(k) = (w1 + w2) / (w1 / dk(k - 1) + w2 / dk(k));
    }
  }
  slopes_(0) = edge_slope(hk(0), hk(1), dk(0), dk(1));
  slopes_(n - 1) = edge_slope(hk(n - 2), hk(n - 3), dk(n - 2), dk(n - 3));
}

double MonotoneCubic::operator()(double x) const {
  const Index n = xs_.size();
  const double span = xs_(n - 1) - xs_(0);
  const double slack = 1e-12 * span;
  if (x < xs_(0) - slack || x > xs_(n - 1) + slack) {
    throw DomainError("interpolation: query " + std::to_string(x) + " outside sampled range");
  }
  x = std::clamp(x, xs_(0), xs_(n - 1));
  const double* begin = xs_.data();
  Index k = static_cast<Index>(std::upper_bound(begin, begin + n, x) - begin) - 1;
  k = std::clamp<Index>(k, 0, n - 2);
  const double hk = xs_(k + 1) - xs_(k);
  const double s = (x - xs_(k)) / hk;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  return h00 * ys_(k) + h10 * hk * slopes_(k) + h01 * ys_(k + 1) + h11 * hk * slopes_(k + 1);
}

Eigen::ArrayXd MonotoneCubic::operator()(const Eigen::ArrayXd& xq) const {
  Eigen::ArrayXd out(xq.size());
  for (Index i = 0; i < xq.size(); ++i) out(i) = (*this)(xq(i));
  return out;
}

}  // namespace qlpme
