#pragma once

#include "sgl/cmpfun.hpp"
#include "sgl/mesh.hpp"

namespace sgl {

/// Closed flat torus R^2 / (Z a + Z b).  The basis is Lagrange-reduced first
/// (an isometry) and cells are split union-jack so short lattice geodesics
/// appear as straight edge paths.
MetricSurface make_flat_torus(const Vec2& basis_a, const Vec2& basis_b, int resolution);

/// Closed flat Klein bottle: [0,width] x [0,height] with (width,y) ~ (0,height-y)
/// and (x,height) ~ (x,0).  The y=0 horizontal loop is one-sided.
MetricSurface make_klein_bottle_flat(Real width, Real height, int resolution);

/// Closed genus-2 surface from the regular hyperbolic octagon (angle sum 2*pi)
/// with opposite sides identified.  `resolution` is the number of segments per
/// octagon side, rounded down to a power of two (minimum 4).
MetricSurface make_hyperbolic_octagon(int resolution);

/// Annulus [x0,x1] x R/(circumference Z) with metric dx^2 + warp(x)^2 dy^2.
/// `curvature` is the optional exact Gaussian curvature -warp''/warp.
MetricSurface make_warped_cylinder(const std::function<Real(Real)>& warp, Real x0, Real x1,
                                   Real circumference, int resolution,
                                   const std::function<Real(Real)>& curvature = nullptr);

/// Geodesic disc of constant curvature kappa: polar metric dr^2 + sn_kappa(r)^2 dtheta^2.
/// For kappa > 0 the radius must stay below pi/sqrt(kappa).
MetricSurface make_constant_curvature_disc(Real radius, Real kappa, int resolution);

/// Geodesic disc of curvature -1.
MetricSurface make_hyperbolic_disc(Real radius, int resolution);

} // namespace sgl
