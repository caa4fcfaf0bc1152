#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgl/cmpfun.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace sgl;

TEST_CASE("sn closed forms and kappa -> 0 limit") {
  CHECK(sn(0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sn(-1, 1.0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));

  // RK4 oracle for u'' = u, u(0)=0, u'(0)=1 at t=0.5.
  Real u, du;
  oracle::rk4_second_order([](Real, Real uu) { return uu; }, 0, 0, 1, 0.5, 4000, &u, &du);
  CHECK(sn(-1, 0.5) == doctest::Approx(u).epsilon(1e-10));
  CHECK(sn(-1, 0.5) == doctest::Approx(0.521095).epsilon(1e-5));

  // Continuity across the series window.
  for (Real k : {-1e-9, -1e-12, 1e-12, 1e-9}) {
    CHECK(sn(k, 3.0) == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(cs(k, 3.0) == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(sn(4.0, kPi / 4) == doctest::Approx(0.5).epsilon(1e-13)); // sin(2t)/2 at t=pi/4
}

TEST_CASE("ct and tn") {
  for (Real r : {0.25, 1.0, 3.0}) {
    CHECK(ct(0, r) == doctest::Approx(1.0 / r).epsilon(1e-13));
    CHECK(tn(0, r / 2) == doctest::Approx(r / 2).epsilon(1e-13));
  }
  CHECK(ct(-1, 1.0) == doctest::Approx(1.0 / std::tanh(1.0)).epsilon(1e-13));
  CHECK(ct(-1, 1.0) == doctest::Approx(1.313035).epsilon(1e-6));
  CHECK_THROWS_AS(ct(-1, 0.0), DivisionByZero);
}

TEST_CASE("sn*ct = cs identity") {
  for (Real k : {-4.0, -1.0, -1e-3, 1e-3, 1.0, 2.5})
    for (Real t : {0.1, 0.7, 1.3})
      CHECK(sn(k, t) * ct(k, t) == doctest::Approx(cs(k, t)).epsilon(1e-12));
}

TEST_CASE("half-angle identity (1-cs)/(kappa sn) = tn(t/2) for kappa<0") {
  for (Real k : {-0.5, -1.0, -3.0})
    for (Real t : {0.2, 1.0, 2.5}) {
      const Real lhs = (1 - cs(k, t)) / (k * sn(k, t));
      CHECK(lhs == doctest::Approx(tn(k, t / 2)).epsilon(1e-10));
    }
}

TEST_CASE("collar widths") {
  // ln-form evaluation as the oracle.
  auto w_of = [](Real s) { return std::log(1 / std::sinh(s) + std::sqrt(1 / (std::sinh(s) * std::sinh(s)) + 1)); };
  CHECK(collar_width(1.0, CollarSide::TwoSided) == doctest::Approx(w_of(0.5)).epsilon(1e-14));
  CHECK(collar_width(1.0, CollarSide::TwoSided) == doctest::Approx(1.4068291).epsilon(1e-6));
  CHECK(collar_width(1.0, CollarSide::OneSided) == doctest::Approx(w_of(1.0)).epsilon(1e-14));
  CHECK(collar_width(1.0, CollarSide::OneSided) == doctest::Approx(0.7719368).epsilon(1e-6));

  // Strictly decreasing in sys; two-sided wider than one-sided.
  Real prev2 = 1e300, prev1 = 1e300;
  for (Real s = 0.2; s < 4.0; s += 0.2) {
    const Real w2 = collar_width(s, CollarSide::TwoSided);
    const Real w1 = collar_width(s, CollarSide::OneSided);
    CHECK(w2 < prev2);
    CHECK(w1 < prev1);
    CHECK(w2 > w1);
    prev2 = w2;
    prev1 = w1;
  }

  // w ~ -ln(sys) as sys -> 0.
  CHECK(collar_width(1e-3, CollarSide::TwoSided) / (-std::log(1e-3)) ==
        doctest::Approx(1.0).epsilon(0.15));
  CHECK(collar_width(1e-5, CollarSide::TwoSided) / (-std::log(1e-5)) ==
        doctest::Approx(1.0).epsilon(0.08));

  CHECK_THROWS_AS(collar_width(0.0, CollarSide::TwoSided), NonPositiveSystole);
  CHECK_THROWS_AS(collar_width(-1.0, CollarSide::OneSided), NonPositiveSystole);
}

namespace {

Real fd_residual_max(const WarpProfile& w, const std::function<Real(Real)>& kappa) {
  // 5-point second-derivative stencil on the interior grid.
  Real worst = 0;
  const Real h = w.x[1] - w.x[0];
  for (int i = 2; i + 2 < w.x.size(); ++i) {
    const Real d2 =
        (-w.j[i - 2] + 16 * w.j[i - 1] - 30 * w.j[i] + 16 * w.j[i + 1] - w.j[i + 2]) / (12 * h * h);
    worst = std::max(worst, std::abs(d2 + kappa(w.x[i]) * w.j[i]));
  }
  return worst;
}

Real smooth_kappa(Real x, Real k_inf) {
  // -1 on [0,1], C-infinity monotone transition to k_inf by x=3.
  if (x <= 1) return -1;
  if (x >= 3) return k_inf;
  const Real s = (x - 1) / 2;
  const Real a = std::exp(-1 / s), b = std::exp(-1 / (1 - s));
  const Real t = a / (a + b);
  return -1 + (k_inf + 1) * t;
}

} // namespace

TEST_CASE("funnel warp, constant curvature branches") {
  auto kconst = [](Real) { return -1.0; };
  const WarpProfile exp_w = funnel_warp(kconst, FunnelMode::Expanding, 3.0, 301);
  for (int i = 0; i < exp_w.x.size(); ++i)
    CHECK(exp_w.j[i] == doctest::Approx(std::cosh(exp_w.x[i])).epsilon(1e-8));

  const WarpProfile cusp_w = funnel_warp(kconst, FunnelMode::Cusp, 3.0, 301);
  for (int i = 0; i < cusp_w.x.size(); ++i)
    CHECK(cusp_w.j[i] == doctest::Approx(std::exp(-cusp_w.x[i])).epsilon(1e-6));
}

TEST_CASE("funnel warp, pinched profile grows like exp(2x)") {
  auto kap = [](Real x) { return smooth_kappa(x, -4.0); };
  const WarpProfile w = funnel_warp(kap, FunnelMode::Expanding, 8.0, 801);
  // log-derivative tends to sqrt(4) = 2.
  const Real ld = w.eval_deriv(8.0) / w.eval(8.0);
  CHECK(ld == doctest::Approx(2.0).epsilon(1e-3));
  for (int i = 0; i < w.x.size(); ++i) CHECK(w.j[i] >= std::cosh(w.x[i]) * (1 - 1e-9));
}

TEST_CASE("funnel warp residual under finite differences") {
  // Grid spacing balances stencil truncation against roundoff, which scales
  // with max |j|; the expanding profile is checked where j stays moderate.
  auto kap = [](Real x) { return smooth_kappa(x, -4.0); };
  const WarpProfile w = funnel_warp(kap, FunnelMode::Expanding, 2.0, 501);
  CHECK(fd_residual_max(w, kap) < 1e-8);

  const WarpProfile wc = funnel_warp(kap, FunnelMode::Cusp, 3.0, 501);
  CHECK(fd_residual_max(wc, kap) < 1e-8);
}

TEST_CASE("funnel warp rejects bad profiles") {
  CHECK_THROWS_AS(funnel_warp([](Real) { return 1.0; }, FunnelMode::Expanding, 2.0, 65),
                  InvalidProfile);
  CHECK_THROWS_AS(funnel_warp([](Real x) { return -1.0 - std::max(0.0, 1.0 - x); },
                              FunnelMode::Expanding, 2.0, 65),
                  InvalidProfile); // not -1 on [0,1]
  auto nonmono = [](Real x) { return (x < 2) ? -1.0 : (x < 2.5 ? -3.0 : -2.0); };
  CHECK_THROWS_AS(funnel_warp(nonmono, FunnelMode::Expanding, 4.0, 65), InvalidProfile);
}
