#pragma once

// Maps between the kinetic pair (f, W) and the reduced unknown w.
//
// With the resonance p = 1/k the wave density W(k) becomes w(p) = p^-3 W(1/p),
// the particle density satisfies f = d/dp (w - w0) + f0, and w alone obeys
// dt w = p^2 w d2p w + g0 w with g0 = p^2 d/dp (f0 - d/dp w0).

#include "qlpme/core.hpp"

namespace qlpme {

/// Wave spectral energy density sampled at strictly increasing wavenumbers.
/// Non-uniform in general: the default grid is the image {1/p_i} of a
/// uniform momentum grid.
struct SpectralSamples {
  SpectralSamples(Eigen::ArrayXd k, Eigen::ArrayXd W);

  Eigen::ArrayXd k;
  Eigen::ArrayXd W;
};

/// Wavenumbers 1/p_i of a momentum grid, ascending.
Eigen::ArrayXd resonant_wavenumbers(const SpatialGrid& pgrid);

/// w0(p) = p^-3 W0(1/p). Uses the samples directly when `W0.k` is the
/// resonant image of `pgrid`, otherwise monotone cubic interpolation.
ScalarField build_w0(const SpectralSamples& W0, const SpatialGrid& pgrid);

/// Inverse of build_w0: W(k) = k^-3 w(1/k) on the resonant wavenumbers.
SpectralSamples reconstruct_W(const ScalarField& w);

/// Interpolate spectral samples onto new wavenumbers (monotone cubic).
SpectralSamples resample(const SpectralSamples& W, const Eigen::ArrayXd& k);

/// g0 = p^2 d/dp (f0 - d/dp w0).
ScalarField build_g0(const ScalarField& f0, const ScalarField& w0);

/// f(., t) = d/dp (w(., t) - w0) + f0 at every level.
SpaceTimeField reconstruct_f(const SpaceTimeField& w, const ScalarField& w0, const ScalarField& f0);

/// Kinetic initial data together with the derived reduced data (w0, g0).
struct KineticData {
  /// Builds w0 from W0 on the momentum grid of f0, then g0. Throws when
  /// W0 < 0 or w0 does not vanish at both endpoints.
  static KineticData from_spectrum(ScalarField f0, SpectralSamples W0);
  /// Same, starting from w0 (W0 is reconstructed on the resonant grid).
  static KineticData from_reduced(ScalarField f0, ScalarField w0);

  SpatialGrid pgrid;
  ScalarField f0;
  SpectralSamples W0;
  ScalarField w0;
  ScalarField g0;
};

/// Data of the reduced problem: initial datum phi0 and source coefficient g0.
///
/// Construction enforces phi0 >= 0 and phi0 = 0 at both endpoints. The
/// compatibility condition d2x phi0 = 0 on the boundary is reported by
/// compatibility_defect() rather than enforced, since the equilibrium
/// profiles used as initial data do not satisfy it.
struct ProblemData {
  ProblemData(TimeGrid tgrid, ScalarField phi0, ScalarField g0);

  const SpatialGrid& grid() const { return phi0.grid; }

  /// max |d2x phi0| over the two endpoints, one-sided second order.
  double compatibility_defect() const;

  TimeGrid tgrid;
  ScalarField phi0;
  ScalarField g0;
};

}  // namespace qlpme
