#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgl/covers.hpp"
#include "sgl/generators.hpp"
#include "sgl/geodesics.hpp"
#include "sgl/spectral.hpp"

#include "oracles.hpp"

#include <cmath>
#include <memory>

using namespace sgl;

namespace {

SurfacePtr share(MetricSurface&& s) { return std::make_shared<MetricSurface>(std::move(s)); }

std::uint64_t rng_state = 777;
Real urand() {
  rng_state ^= rng_state << 13;
  rng_state ^= rng_state >> 7;
  rng_state ^= rng_state << 17;
  return static_cast<Real>(rng_state >> 11) / static_cast<Real>(1ull << 53);
}

// Hand-built two-triangle unit square.
SurfacePtr unit_square() {
  MetricSurface S;
  S.nv = 4;
  S.tris.resize(2, 3);
  S.tris << 0, 1, 2, 0, 2, 3;
  S.tri_len.resize(2, 3);
  const Real r2 = std::sqrt(2.0);
  S.tri_len << 1.0, r2, 1.0, 1.0, 1.0, r2;
  S.finalize();
  return std::make_shared<MetricSurface>(std::move(S));
}

} // namespace

TEST_CASE("stiffness of the unit square matches the hand-assembled cotan weights") {
  const auto S = unit_square();
  const FemSystem sys = assemble_full(whole_surface(S));
  MatX K = MatX(sys.K);
  MatX expected(4, 4);
  expected << 1, -0.5, 0, -0.5, -0.5, 1, -0.5, 0, 0, -0.5, 1, -0.5, -0.5, 0, -0.5, 1;
  CHECK((K - expected).cwiseAbs().maxCoeff() < 1e-14);

  // Consistent mass row sums add up to the area.
  MatX M = MatX(sys.M);
  CHECK(M.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mass matrix row sums total the area") {
  const auto S = share(make_flat_torus(Vec2(1, 0), Vec2(0.3, 1.1), 12));
  const FemSystem sys = assemble_full(whole_surface(S));
  CHECK(MatX(sys.M).sum() == doctest::Approx(S->total_area()).epsilon(1e-12));

  const auto H = share(make_hyperbolic_disc(1.0, 24));
  const FemSystem hs = assemble_full(whole_surface(H));
  CHECK(MatX(hs.M).sum() == doctest::Approx(H->total_area()).epsilon(1e-12));
}

TEST_CASE("euclidean disc eigenvalue converges to the Bessel root") {
  const Real target = oracle::disc_lambda0(0.0, 1.0);
  CHECK(target == doctest::Approx(5.78319).epsilon(1e-5));

  VecX raw(3);
  int i = 0;
  for (int res : {32, 64, 128}) {
    const auto D = share(make_constant_curvature_disc(1.0, 0.0, res));
    raw[i++] = lambda0(whole_surface(D)).lambda0;
  }
  // Conforming elements converge from above, monotonically.
  CHECK(raw[0] > raw[1]);
  CHECK(raw[1] > raw[2]);
  CHECK(raw[2] > target);
  const Extrapolated ex = extrapolate_lambda(raw);
  CHECK(ex.value == doctest::Approx(target).epsilon(0.01));
}

TEST_CASE("flat cylinder eigenvalue is pi^2/t^2") {
  auto one = [](Real) { return 1.0; };
  const auto C = share(make_warped_cylinder(one, 0, 0.5, 1.0, 48, [](Real) { return 0.0; }));
  const SpectralResult r = lambda0(whole_surface(C));
  CHECK(r.lambda0 == doctest::Approx(4 * kPi * kPi).epsilon(0.01));
  CHECK(r.rayleigh == doctest::Approx(r.lambda0).epsilon(1e-9));

  // Ground state strictly positive on the interior after sign normalization.
  const Subsurface F = whole_surface(C);
  Real min_interior = 1e300;
  for (int v : F.vertices)
    if (!F.boundary_vertex[v]) min_interior = std::min(min_interior, r.ground_state[v]);
  CHECK(min_interior > 0);
}

TEST_CASE("hyperbolic disc eigenvalue matches radial shooting") {
  const Real target = oracle::disc_lambda0(-1.0, 2.0);
  const auto D = share(make_hyperbolic_disc(2.0, 64));
  const SpectralResult r = lambda0(whole_surface(D));
  CHECK(r.lambda0 == doctest::Approx(target).epsilon(0.01));
  // Upper bound from the comparison-ball argument.
  CHECK(r.lambda0 > 0.25);
  CHECK(r.lambda0 < 0.25 + 4 * kPi * kPi / 4.0);
}

TEST_CASE("closed surfaces have lambda0 = 0 and lattice spectra") {
  const auto T = share(make_flat_torus(Vec2(1, 0), Vec2(0, 1), 48));
  const SpectralResult r = lambda0(whole_surface(T));
  CHECK(r.lambda0 == 0.0);

  const auto vals = lambda_k(*T, 4, 1e-8);
  const auto want = oracle::flat_torus_eigenvalues(1, 0, 0, 1, 5);
  REQUIRE(vals.size() == 5);
  CHECK(std::abs(vals[0]) < 1e-6);
  for (int i = 1; i < 5; ++i) CHECK(vals[i] == doctest::Approx(want[i]).epsilon(0.015));
  // lambda_1 of the unit square torus has multiplicity four.
  CHECK(vals[4] == doctest::Approx(vals[1]).epsilon(0.01));

  const auto R = share(make_flat_torus(Vec2(1, 0), Vec2(0, 2), 32));
  const auto rvals = lambda_k(*R, 1, 1e-8);
  CHECK(rvals[1] == doctest::Approx(kPi * kPi).epsilon(0.01));
}

TEST_CASE("rayleigh quotients") {
  const auto D = share(make_constant_curvature_disc(1.0, 0.0, 32));
  const Subsurface F = whole_surface(D);
  const SpectralResult r = lambda0(F);
  CHECK(rayleigh(F, r.ground_state) == doctest::Approx(r.lambda0).epsilon(1e-8));

  // Any admissible field sits above the bottom (variational principle).
  rng_state = 5;
  for (int t = 0; t < 10; ++t) {
    VecX v = VecX::Zero(D->nv);
    for (int i = 0; i < D->nv; ++i) v[i] = urand();
    CHECK(rayleigh(F, v) >= r.lambda0 * (1 - 1e-9));
  }
  CHECK_THROWS_AS(rayleigh(F, VecX::Zero(D->nv)), ZeroVector);
}

TEST_CASE("domain monotonicity on nested pairs") {
  const auto T = share(make_flat_torus(Vec2(1, 0), Vec2(0, 1), 24));
  const EdgeGraph g = edge_graph(*T);
  rng_state = 2024;
  int tested = 0;
  for (int trial = 0; trial < 80 && tested < 50; ++trial) {
    const int c = static_cast<int>(urand() * T->nv);
    const Real r_big = 0.18 + 0.22 * urand();
    const Real r_small = r_big * (0.4 + 0.5 * urand());
    const DijkstraResult d = dijkstra(g, {c});
    auto mask_of = [&](Real rr) {
      std::vector<char> m(T->n_faces(), 0);
      for (int f = 0; f < T->n_faces(); ++f) {
        const Real bd =
            (d.dist[T->tris(f, 0)] + d.dist[T->tris(f, 1)] + d.dist[T->tris(f, 2)]) / 3;
        m[f] = bd <= rr;
      }
      return m;
    };
    try {
      const Subsurface big = extract_subsurface(T, mask_of(r_big));
      const Subsurface small = extract_subsurface(T, mask_of(r_small));
      const Real lb = lambda0(big).lambda0;
      const Real ls = lambda0(small).lambda0;
      CHECK(ls >= lb * (1 - 1e-8));
      ++tested;
    } catch (const EmptyInterior&) {
    } catch (const EmptySelection&) {
    }
  }
  CHECK(tested == 50);
}

TEST_CASE("conformal invariance of the stiffness matrix") {
  // Per-triangle constant factor: stiffness entries unchanged to 1e-12,
  // global constant: mass scales entrywise.
  for (bool chart : {false, true}) {
    SurfacePtr S;
    if (chart) {
      auto one = [](Real) { return 1.0; };
      S = share(make_warped_cylinder(one, 0, 1.0, 1.0, 12, nullptr));
    } else {
      S = share(make_flat_torus(Vec2(1, 0), Vec2(0.2, 1.0), 12));
    }
    VecX face_factor(S->n_faces());
    rng_state = 31 + chart;
    for (int f = 0; f < S->n_faces(); ++f) face_factor[f] = 0.5 + 2.0 * urand();
    const auto Sc = share(conformal_scale_faces(*S, face_factor));

    const FemSystem a = assemble_full(whole_surface(S));
    const FemSystem b = assemble_full(whole_surface(Sc));
    const MatX Ka = MatX(a.K), Kb = MatX(b.K);
    CHECK((Ka - Kb).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, Ka.cwiseAbs().maxCoeff()));

    const auto S2 = share(conformal_scale(*S, VecX::Constant(S->nv, 3.0)));
    const FemSystem c = assemble_full(whole_surface(S2));
    const MatX Ma = MatX(a.M), Mc = MatX(c.M);
    CHECK((3.0 * Ma - Mc).cwiseAbs().maxCoeff() < 1e-12 * Ma.cwiseAbs().maxCoeff() * 3);
  }
}

TEST_CASE("sweep profiles and integral identities") {
  const auto D = share(make_constant_curvature_disc(1.0, 0.0, 48));
  const Subsurface F = whole_surface(D);

  // Constant density: full area below the max, zero level length.
  VecX ones = VecX::Ones(D->nv);
  const SweepProfile flat = sweep(F, ones, 8);
  for (int i = 0; i < flat.area.size(); ++i) {
    CHECK(flat.area[i] == doctest::Approx(F.area).epsilon(1e-12));
    CHECK(flat.length[i] == 0.0);
  }

  const SpectralResult r = lambda0(F);
  const VecX psi = r.ground_state.cwiseProduct(r.ground_state);
  const SweepProfile prof = sweep(F, psi, 256);

  // Cavalieri and coarea against the exact per-triangle integrals.
  CHECK(prof.cavalieri_integral() == doctest::Approx(prof.integral_psi).epsilon(1e-3));
  CHECK(prof.coarea_integral() == doctest::Approx(prof.integral_grad).epsilon(1e-2));

  // Areas decrease in t.
  for (int i = 1; i < prof.area.size(); ++i) CHECK(prof.area[i] <= prof.area[i - 1] + 1e-12);

  // Ground-state sweep inequality with discretization slack.
  CHECK(prof.integral_grad <=
        2 * std::sqrt(r.lambda0) * prof.integral_psi * (1 + 5 * r.mesh_h) + 1e-9);

  CHECK_THROWS_AS(sweep(F, VecX::Constant(D->nv, -1.0), 8), NegativeDensity);
}

TEST_CASE("mass_in normalization and locality") {
  auto one = [](Real) { return 1.0; };
  const auto C = share(make_warped_cylinder(one, 0, 2.0, 1.0, 16, nullptr));
  const Subsurface F = whole_surface(C);
  const SpectralResult r = lambda0(F);

  CHECK(mass_in(F, F, &r) == doctest::Approx(1.0).epsilon(1e-12));

  const Subsurface half = extract_subsurface(C, [&](int f) { return C->radial[f] < 1.0; });
  const Subsurface other = extract_subsurface(C, [&](int f) { return C->radial[f] >= 1.0; });
  const Real m1 = mass_in(F, half, &r), m2 = mass_in(F, other, &r);
  CHECK(m1 + m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m1 == doctest::Approx(0.5).epsilon(0.05)); // symmetric ground state

  const Subsurface band = extract_subsurface(C, [&](int f) { return C->radial[f] < 0.3; });
  const Submesh sm = submesh(band);
  const auto other_parent = std::make_shared<MetricSurface>(sm.surface);
  CHECK_THROWS_AS(mass_in(F, whole_surface(other_parent), &r), DisjointRegion);
}

TEST_CASE("k-chain covers of the square torus behave like cylinders") {
  const auto T = share(make_flat_torus(Vec2(1, 0), Vec2(0, 1), 48));
  const LoopResult loop = systole_upper(*T);
  for (int k : {2, 4}) {
    const auto cov = share(cyclic_cover(*T, loop.vertices, k, CoverMode::Chain));
    const SpectralResult r = lambda0(whole_surface(cov));
    CHECK(r.lambda0 == doctest::Approx(kPi * kPi / (k * k)).epsilon(0.01));
  }
}

TEST_CASE("solver guards") {
  const auto D = share(make_constant_curvature_disc(0.5, 0.0, 16));
  // Selecting a single boundary-touching triangle leaves no interior dof.
  const Subsurface tiny = extract_subsurface(D, [&](int f) { return f == D->n_faces() - 1; });
  CHECK_THROWS_AS(lambda0(tiny), EmptyInterior);
}
