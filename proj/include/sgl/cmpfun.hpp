#pragma once

#include "sgl/errors.hpp"
#include "sgl/types.hpp"

namespace sgl {

// Solutions of u'' + kappa*u = 0 for constant curvature bound kappa,
// with sn(0)=0, sn'(0)=1 and cs(0)=1, cs'(0)=0.  Continuous in kappa;
// the kappa -> 0 limit is handled by series when |kappa|*t^2 is tiny.
Real sn(Real kappa, Real t);
Real cs(Real kappa, Real t);
Real tn(Real kappa, Real t); // sn/cs
Real ct(Real kappa, Real t); // cs/sn, throws DivisionByZero when sn = 0

/// arsinh x = ln(x + sqrt(x^2 + 1))
Real arsinh(Real x);

enum class CollarSide { TwoSided, OneSided };

/// Embedded tube half-width around a systolic geodesic on a curvature >= -1
/// surface: arsinh(1/sinh(sys/2)) for a two-sided core, arsinh(1/sinh(sys))
/// for a one-sided core.
Real collar_width(Real sys, CollarSide side);

enum class FunnelMode { Expanding, Cusp };

/// Sampled solution of j'' + kappa(x) j = 0 on a uniform grid over [0, x_max].
struct WarpProfile {
  VecX x;  // grid points, x[0] = 0
  VecX j;  // warp values
  VecX dj; // first derivative at grid points

  Real x_max() const { return x[x.size() - 1]; }
  /// Linear interpolation of j; clamps to the grid range.
  Real eval(Real xq) const;
  Real eval_deriv(Real xq) const;
};

/// Integrates j'' + kappa j = 0 with j(0)=1 and either j'(0)=0 (Expanding)
/// or the decaying solution j(inf)=0 (Cusp, found by shooting on j'(0)).
/// Requires kappa monotone nonincreasing with kappa = -1 on [0, 1].
WarpProfile funnel_warp(const std::function<Real(Real)>& kappa, FunnelMode mode,
                        Real x_max, int n_samples);

} // namespace sgl
