// Test-side reference computations, independent of the library paths they
// check: ODE integration, radial shooting for disc eigenvalues, lattice and
// dual-lattice enumeration, separable cylinder values.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Real = double;

// Classic RK4 for u'' = f(x, u), fixed step.
inline void rk4_second_order(const std::function<Real(Real, Real)>& f, Real x0, Real u0, Real du0,
                             Real x1, int steps, Real* u_out, Real* du_out) {
  Real x = x0, u = u0, du = du0;
  const Real h = (x1 - x0) / steps;
  for (int i = 0; i < steps; ++i) {
    const Real k1u = du, k1v = f(x, u);
    const Real k2u = du + h / 2 * k1v, k2v = f(x + h / 2, u + h / 2 * k1u);
    const Real k3u = du + h / 2 * k2v, k3v = f(x + h / 2, u + h / 2 * k2u);
    const Real k4u = du + h * k3v, k4v = f(x + h, u + h * k3u);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    du += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    x += h;
  }
  *u_out = u;
  *du_out = du;
}

// First Dirichlet eigenvalue of the geodesic disc of curvature kappa and
// radius R: radial shooting on v'' + (sn'/sn) v' + lambda v = 0.
inline Real disc_lambda0(Real kappa, Real R) {
  auto sn_over = [kappa](Real r) { // sn_kappa'(r)/sn_kappa(r)
    if (kappa == 0) return 1.0 / r;
    if (kappa < 0) {
      const Real s = std::sqrt(-kappa);
      return s / std::tanh(s * r);
    }
    const Real s = std::sqrt(kappa);
    return s / std::tan(s * r);
  };
  auto endpoint = [&](Real lam) {
    // series start near 0: v = 1 - lam r^2 / 4
    const Real r0 = 1e-6;
    Real v = 1 - lam * r0 * r0 / 4, dv = -lam * r0 / 2;
    const int steps = 40000;
    Real r = r0;
    const Real h = (R - r0) / steps;
    bool crossed = false;
    for (int i = 0; i < steps; ++i) {
      auto f = [&](Real rr, Real vv, Real dvv) { return -sn_over(rr) * dvv - lam * vv; };
      const Real k1v = dv, k1w = f(r, v, dv);
      const Real k2v = dv + h / 2 * k1w, k2w = f(r + h / 2, v + h / 2 * k1v, dv + h / 2 * k1w);
      const Real k3v = dv + h / 2 * k2w, k3w = f(r + h / 2, v + h / 2 * k2v, dv + h / 2 * k2w);
      const Real k4v = dv + h * k3w, k4w = f(r + h, v + h * k3v, dv + h * k3w);
      const Real vn = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
      dv += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
      if (vn <= 0) crossed = true;
      v = vn;
      r += h;
    }
    return crossed ? -1.0 : +1.0; // crossed zero before R -> lambda too big
  };
  Real lo = 1e-6, hi = 1.0;
  while (endpoint(hi) > 0) hi *= 2;
  for (int it = 0; it < 60; ++it) {
    const Real mid = (lo + hi) / 2;
    if (endpoint(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

// Shortest nonzero lattice vector |m a + n b|, |m|,|n| <= 10.
inline Real lattice_systole(Real ax, Real ay, Real bx, Real by) {
  Real best = 1e300;
  for (int m = -10; m <= 10; ++m)
    for (int n = -10; n <= 10; ++n) {
      if (m == 0 && n == 0) continue;
      const Real x = m * ax + n * bx, y = m * ay + n * by;
      best = std::min(best, std::sqrt(x * x + y * y));
    }
  return best;
}

// Laplace eigenvalues of a flat torus R^2/(Z a + Z b): 4 pi^2 |m a* + n b*|^2
// over the dual lattice, ascending with multiplicity.
inline std::vector<Real> flat_torus_eigenvalues(Real ax, Real ay, Real bx, Real by, int count) {
  const Real det = ax * by - ay * bx;
  // dual basis rows of inverse transpose
  const Real dax = by / det, day = -bx / det;
  const Real dbx = -ay / det, dby = ax / det;
  std::vector<Real> vals;
  for (int m = -12; m <= 12; ++m)
    for (int n = -12; n <= 12; ++n) {
      const Real x = m * dax + n * dbx, y = m * day + n * dby;
      vals.push_back(4 * M_PI * M_PI * (x * x + y * y));
    }
  std::sort(vals.begin(), vals.end());
  vals.resize(count);
  return vals;
}

} // namespace oracle
