#include "qlpme/kinetic.hpp"

#include <algorithm>

namespace qlpme {

SpectralSamples::SpectralSamples(Eigen::ArrayXd k_, Eigen::ArrayXd W_)
    : k(std::move(k_)), W(std::move(W_)) {
  require(k.size() >= 2 && k.size() == W.size(), "spectrum: need >= 2 matching samples");
  ensure_finite(k, "wavenumbers");
  ensure_finite(W, "spectral density");
  for (Index i = 1; i < k.size(); ++i) {
    require(k(i) > k(i - 1), "spectrum: wavenumbers must be strictly increasing");
  }
  require(k(0) > 0.0, "spectrum: wavenumbers must be positive");
}

Eigen::ArrayXd resonant_wavenumbers(const SpatialGrid& pgrid) {
  return pgrid.nodes().reverse().inverse();
}

namespace {

bool matches_resonant_grid(const Eigen::ArrayXd& k, const SpatialGrid& pgrid) {
  if (k.size() != pgrid.nx()) return false;
  const Eigen::ArrayXd expected = resonant_wavenumbers(pgrid);
  return ((k - expected).abs() <= 1e-12 * expected).all();
}

}  // namespace

ScalarField build_w0(const SpectralSamples& W0, const SpatialGrid& pgrid) {
  require((W0.W >= 0.0).all(), "build_w0: spectral density must be nonnegative");
  const Eigen::ArrayXd p = pgrid.nodes();
  Eigen::ArrayXd W_at_p(pgrid.nx());
  if (matches_resonant_grid(W0.k, pgrid)) {
    W_at_p = W0.W.reverse();
  } else {
    const double k_lo = 1.0 / pgrid.x_b();
    const double k_hi = 1.0 / pgrid.x_a();
    const double slack = 1e-12 * (k_hi - k_lo);
    if (W0.k(0) > k_lo + slack || W0.k(W0.k.size() - 1) < k_hi - slack) {
      throw DomainError("build_w0: wavenumber grid does not cover (1/p_b, 1/p_a)");
    }
    const MonotoneCubic interp(W0.k, W0.W);
    for (Index i = 0; i < pgrid.nx(); ++i) {
      W_at_p(i) = interp(std::clamp(1.0 / p(i), interp.lower(), interp.upper()));
    }
    // Monotone cubic preserves sign of nonnegative data up to roundoff.
    W_at_p = W_at_p.max(0.0);
  }
  return ScalarField(pgrid, W_at_p / p.cube());
}

SpectralSamples reconstruct_W(const ScalarField& w) {
  const Eigen::ArrayXd p = w.grid.nodes();
  Eigen::ArrayXd W = (p.cube() * w.values).reverse().eval();
  return SpectralSamples(resonant_wavenumbers(w.grid), std::move(W));
}

SpectralSamples resample(const SpectralSamples& W, const Eigen::ArrayXd& k) {
  const MonotoneCubic interp(W.k, W.W);
  return SpectralSamples(k, interp(k));
}

ScalarField build_g0(const ScalarField& f0, const ScalarField& w0) {
  require(f0.grid == w0.grid, "build_g0: f0 and w0 must share a grid");
  const double h = f0.grid.h();
  const Eigen::ArrayXd inner = f0.values - derivative(w0.values, h);
  const Eigen::ArrayXd p = f0.grid.nodes();
  return ScalarField(f0.grid, p.square() * derivative(inner, h));
}

SpaceTimeField reconstruct_f(const SpaceTimeField& w, const ScalarField& w0,
                             const ScalarField& f0) {
  require(w.grid == w0.grid && w.grid == f0.grid, "reconstruct_f: grids differ");
  Eigen::ArrayXXd f(w.values.rows(), w.values.cols());
  const double h = w.grid.h();
  for (Index m = 0; m < w.values.cols(); ++m) {
    f.col(m) = derivative((w.values.col(m) - w0.values).eval(), h) + f0.values;
  }
  return SpaceTimeField(w.grid, w.tgrid, std::move(f));
}

namespace {

void check_reduced_support(const ScalarField& w0) {
  require((w0.values >= 0.0).all(), "kinetic data: w0 must be nonnegative");
  const double scale = std::max(1.0, w0.values.maxCoeff());
  require(std::abs(w0.values(0)) <= 1e-14 * scale &&
              std::abs(w0.values(w0.size() - 1)) <= 1e-14 * scale,
          "kinetic data: w0 must vanish at p_a and p_b");
}

}  // namespace

KineticData KineticData::from_spectrum(ScalarField f0, SpectralSamples W0) {
  ScalarField w0 = build_w0(W0, f0.grid);
  check_reduced_support(w0);
  ScalarField g0 = build_g0(f0, w0);
  return KineticData{f0.grid, std::move(f0), std::move(W0), std::move(w0), std::move(g0)};
}

KineticData KineticData::from_reduced(ScalarField f0, ScalarField w0) {
  require(f0.grid == w0.grid, "kinetic data: f0 and w0 must share a grid");
  check_reduced_support(w0);
  SpectralSamples W0 = reconstruct_W(w0);
  ScalarField g0 = build_g0(f0, w0);
  return KineticData{f0.grid, std::move(f0), std::move(W0), std::move(w0), std::move(g0)};
}

ProblemData::ProblemData(TimeGrid tg, ScalarField phi, ScalarField g)
    : tgrid(tg), phi0(std::move(phi)), g0(std::move(g)) {
  require(phi0.grid == g0.grid, "problem data: phi0 and g0 must share a grid");
  require((phi0.values >= 0.0).all(), "problem data: phi0 must be nonnegative");
  const double scale = std::max(1.0, phi0.values.maxCoeff());
  require(std::abs(phi0.values(0)) <= 1e-14 * scale &&
              std::abs(phi0.values(phi0.size() - 1)) <= 1e-14 * scale,
          "problem data: phi0 must vanish at both endpoints");
}

double ProblemData::compatibility_defect() const {
  if (phi0.size() < 4) return 0.0;
  const Eigen::ArrayXd d2 = second_derivative(phi0.values, phi0.grid.h());
  return std::max(std::abs(d2(0)), std::abs(d2(d2.size() - 1)));
}

}  // namespace qlpme
