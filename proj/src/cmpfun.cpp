#include "sgl/cmpfun.hpp"

#include <cmath>

namespace sgl {

namespace {

// Below this the closed forms lose digits to cancellation; switch to series.
constexpr Real kSeriesCut = 1e-8;

} // namespace

Real sn(Real kappa, Real t) {
  const Real q = kappa * t * t;
  if (std::abs(q) < kSeriesCut) {
    // t * (1 - q/6 + q^2/120)
    return t * (1.0 - q / 6.0 * (1.0 - q / 20.0));
  }
  if (kappa > 0) {
    const Real s = std::sqrt(kappa);
    return std::sin(s * t) / s;
  }
  const Real s = std::sqrt(-kappa);
  return std::sinh(s * t) / s;
}

Real cs(Real kappa, Real t) {
  const Real q = kappa * t * t;
  if (std::abs(q) < kSeriesCut) {
    return 1.0 - q / 2.0 * (1.0 - q / 12.0);
  }
  if (kappa > 0) {
    return std::cos(std::sqrt(kappa) * t);
  }
  return std::cosh(std::sqrt(-kappa) * t);
}

Real tn(Real kappa, Real t) { return sn(kappa, t) / cs(kappa, t); }

Real ct(Real kappa, Real t) {
  const Real s = sn(kappa, t);
  if (s == 0.0) throw DivisionByZero("ct undefined where sn vanishes, t=" + std::to_string(t));
  return cs(kappa, t) / s;
}

Real arsinh(Real x) { return std::log(x + std::sqrt(x * x + 1.0)); }

Real collar_width(Real sys, CollarSide side) {
  if (!(sys > 0)) throw NonPositiveSystole("sys=" + std::to_string(sys));
  const Real arg = (side == CollarSide::TwoSided) ? sys / 2 : sys;
  return arsinh(1.0 / std::sinh(arg));
}

Real WarpProfile::eval(Real xq) const {
  const int n = static_cast<int>(x.size());
  if (xq <= x[0]) return j[0];
  if (xq >= x[n - 1]) return j[n - 1];
  const Real h = x[1] - x[0];
  int k = static_cast<int>((xq - x[0]) / h);
  if (k > n - 2) k = n - 2;
  const Real w = (xq - x[k]) / (x[k + 1] - x[k]);
  return (1 - w) * j[k] + w * j[k + 1];
}

Real WarpProfile::eval_deriv(Real xq) const {
  const int n = static_cast<int>(x.size());
  if (xq <= x[0]) return dj[0];
  if (xq >= x[n - 1]) return dj[n - 1];
  const Real h = x[1] - x[0];
  int k = static_cast<int>((xq - x[0]) / h);
  if (k > n - 2) k = n - 2;
  const Real w = (xq - x[k]) / (x[k + 1] - x[k]);
  return (1 - w) * dj[k] + w * dj[k + 1];
}

namespace {

struct State {
  Real j, dj;
};

State rk4_step(const std::function<Real(Real)>& kappa, Real x, State s, Real h) {
  auto f = [&](Real xx, State st) { return State{st.dj, -kappa(xx) * st.j}; };
  State k1 = f(x, s);
  State k2 = f(x + h / 2, {s.j + h / 2 * k1.j, s.dj + h / 2 * k1.dj});
  State k3 = f(x + h / 2, {s.j + h / 2 * k2.j, s.dj + h / 2 * k2.dj});
  State k4 = f(x + h, {s.j + h * k3.j, s.dj + h * k3.dj});
  return State{s.j + h / 6 * (k1.j + 2 * k2.j + 2 * k3.j + k4.j),
               s.dj + h / 6 * (k1.dj + 2 * k2.dj + 2 * k3.dj + k4.dj)};
}

// Adaptive RK4 by step doubling, 1e-10 relative control.
State integrate_to(const std::function<Real(Real)>& kappa, Real x0, State s, Real x1) {
  constexpr Real rel = 1e-12;
  Real x = x0;
  Real h = (x1 - x0) / 8;
  while (x < x1) {
    if (x + h > x1) h = x1 - x;
    State big = rk4_step(kappa, x, s, h);
    State half = rk4_step(kappa, x, s, h / 2);
    State two = rk4_step(kappa, x + h / 2, half, h / 2);
    const Real scale = std::max({std::abs(two.j), std::abs(two.dj), 1.0});
    const Real err = std::max(std::abs(big.j - two.j), std::abs(big.dj - two.dj)) / scale;
    if (err < rel || h < 1e-13) {
      x += h;
      s = two;
      if (err < rel / 32) h *= 2;
    } else {
      h /= 2;
    }
  }
  return s;
}

void validate_profile(const std::function<Real(Real)>& kappa, Real x_max) {
  const int n = 256;
  Real prev = kappa(0.0);
  for (int i = 0; i <= n; ++i) {
    const Real x = x_max * i / n;
    const Real k = kappa(x);
    if (x <= 1.0 + 1e-12 && std::abs(k + 1.0) > 1e-9)
      throw InvalidProfile("kappa must equal -1 on [0,1], got " + std::to_string(k) +
                           " at x=" + std::to_string(x));
    if (k > prev + 1e-9) throw InvalidProfile("kappa must be monotone nonincreasing");
    prev = k;
  }
}

// Shooting classification for the decaying solution: a slope that drives j
// through zero is too low, one that lets j turn upward is too high.  The
// classification domain extends well past x_max so the decision boundary
// pins the decaying slope to machine precision.
int classify_cusp_slope(const std::function<Real(Real)>& kappa, Real slope, Real x_max) {
  State s{1.0, slope};
  const Real x_end = x_max + 20;
  const int steps = static_cast<int>(256 * x_end);
  Real x = 0;
  const Real h = x_end / steps;
  for (int i = 0; i < steps; ++i) {
    s = integrate_to(kappa, x, s, x + h);
    x += h;
    if (s.j <= 0) return -1;
    if (s.dj >= 0) return +1;
  }
  return 0;
}

} // namespace

WarpProfile funnel_warp(const std::function<Real(Real)>& kappa, FunnelMode mode,
                        Real x_max, int n_samples) {
  if (n_samples < 2 || !(x_max > 0)) throw InvalidProfile("need x_max > 0 and >= 2 samples");
  validate_profile(kappa, x_max);

  Real slope0 = 0.0;
  if (mode == FunnelMode::Cusp) {
    // Decaying solutions have j'(0) <= -1; bracket and bisect.
    Real lo = -2.0;
    while (classify_cusp_slope(kappa, lo, x_max) >= 0) lo *= 2;
    Real hi = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
      const Real mid = (lo + hi) / 2;
      if (classify_cusp_slope(kappa, mid, x_max) < 0)
        lo = mid;
      else
        hi = mid;
    }
    slope0 = (lo + hi) / 2;
  }

  WarpProfile out;
  out.x.resize(n_samples);
  out.j.resize(n_samples);
  out.dj.resize(n_samples);
  State s{1.0, slope0};
  out.x[0] = 0;
  out.j[0] = s.j;
  out.dj[0] = s.dj;
  for (int i = 1; i < n_samples; ++i) {
    const Real xa = x_max * (i - 1) / (n_samples - 1);
    const Real xb = x_max * i / (n_samples - 1);
    // Fixed substeps keep the integration error smooth in x, so finite
    // differences of the samples reproduce the ODE to stencil accuracy.
    const int ns = std::max(8, static_cast<int>(std::ceil((xb - xa) / 5e-4)));
    const Real h = (xb - xa) / ns;
    for (int q = 0; q < ns; ++q) s = rk4_step(kappa, xa + q * h, s, h);
    out.x[i] = xb;
    out.j[i] = s.j;
    out.dj[i] = s.dj;
  }
  for (int i = 0; i < n_samples; ++i) {
    const Real xi = out.x[i];
    if (mode == FunnelMode::Expanding && out.j[i] < std::cosh(xi) * (1 - 1e-7))
      throw InvalidProfile("expanding warp fell below cosh");
    if (mode == FunnelMode::Cusp && out.j[i] > std::exp(-xi) * (1 + 1e-6) + 1e-12)
      throw InvalidProfile("cusp warp exceeded exp(-x)");
  }
  return out;
}

} // namespace sgl
