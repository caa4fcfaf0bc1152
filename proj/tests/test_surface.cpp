#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgl/covers.hpp"
#include "sgl/generators.hpp"
#include "sgl/geodesics.hpp"
#include "sgl/homology.hpp"

#include <cmath>
#include <memory>
#include <set>

using namespace sgl;

namespace {

SurfacePtr share(MetricSurface&& s) { return std::make_shared<MetricSurface>(std::move(s)); }

std::uint64_t rng_state = 12345;
Real urand() {
  rng_state ^= rng_state << 13;
  rng_state ^= rng_state >> 7;
  rng_state ^= rng_state << 17;
  return static_cast<Real>(rng_state >> 11) / static_cast<Real>(1ull << 53);
}

// Independent Euler characteristic from a face list.
int chi_of_faces(const MetricSurface& S, const std::vector<int>& faces) {
  std::set<int> verts;
  std::set<std::pair<int, int>> edges;
  for (int f : faces)
    for (int k = 0; k < 3; ++k) {
      const int a = S.tris(f, k), b = S.tris(f, (k + 1) % 3);
      verts.insert(a);
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  return static_cast<int>(verts.size()) - static_cast<int>(edges.size()) +
         static_cast<int>(faces.size());
}

} // namespace

TEST_CASE("flat torus basics") {
  const auto S = share(make_flat_torus(Vec2(1, 0), Vec2(0, 1), 16));
  CHECK(S->topo.chi == 0);
  CHECK(S->topo.orientable);
  CHECK(S->topo.boundary_loops.empty());
  CHECK(S->total_area() == doctest::Approx(1.0).epsilon(1e-12));

  const auto T = share(make_flat_torus(Vec2(1, 0), Vec2(0.3, 1.1), 16));
  CHECK(T->total_area() == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(T->topo.boundary_loops.empty());

  CHECK_THROWS_AS(make_flat_torus(Vec2(1, 0), Vec2(2, 0), 16), DegenerateLattice);
  CHECK_THROWS_AS(make_flat_torus(Vec2(1, 0), Vec2(0, 1), 2), DegenerateLattice);
}

TEST_CASE("klein bottle basics") {
  const auto S = share(make_klein_bottle_flat(1.0, 1.0, 12));
  CHECK(S->topo.chi == 0);
  CHECK_FALSE(S->topo.orientable);
  CHECK(S->topo.boundary_loops.empty());
  CHECK(S->total_area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hyperbolic octagon: genus two, area 4 pi") {
  const auto S = share(make_hyperbolic_octagon(16));
  CHECK(S->topo.chi == -2);
  CHECK(S->topo.orientable);
  CHECK(S->topo.boundary_loops.empty());
  // Gauss-Bonnet oracle: |S| = 2 pi |chi| = 4 pi.
  CHECK(S->total_area() == doctest::Approx(4 * kPi).epsilon(0.02));

  const auto S64 = share(make_hyperbolic_octagon(64));
  CHECK(S64->total_area() == doctest::Approx(4 * kPi).epsilon(0.02));
  CHECK(S64->topo.chi == -2);
}

TEST_CASE("gauss-bonnet defect decays at second order") {
  // Ratios of at least 4 per halving, or already at the rounding floor.
  auto check_rates = [](const std::vector<Real>& defects, Real floor) {
    for (size_t i = 1; i < defects.size(); ++i) {
      if (defects[i] < floor) continue;
      CHECK(defects[i - 1] / defects[i] > 2.5);
    }
  };
  std::vector<Real> oct, disc;
  for (int level = 0; level < 3; ++level) {
    oct.push_back(std::abs(gauss_bonnet_defect(make_hyperbolic_octagon(8 << level))));
    disc.push_back(std::abs(gauss_bonnet_defect(make_hyperbolic_disc(1.0, 16 << level))));
  }
  check_rates(oct, 1e-4);
  // The disc defect changes sign near 1e-3 of the 2*pi*chi scale; below that
  // floor competing error terms hide the rate.
  check_rates(disc, 2e-3);
  CHECK(oct.back() < 0.01);
  CHECK(disc.back() < 2e-3);
}

TEST_CASE("warped cylinders") {
  auto one = [](Real) { return 1.0; };
  const auto flat = share(make_warped_cylinder(one, 0, 2.0, 1.0, 16, [](Real) { return 0.0; }));
  CHECK(flat->topo.chi == 0);
  CHECK(flat->topo.boundary_loops.size() == 2);
  CHECK(flat->total_area() == doctest::Approx(2.0).epsilon(1e-9));

  auto ch = [](Real x) { return std::cosh(x); };
  const auto collar = share(make_warped_cylinder(ch, -0.5, 0.5, 2.0, 24, [](Real) { return -1.0; }));
  CHECK(collar->total_area() == doctest::Approx(2 * 2.0 * std::sinh(0.5)).epsilon(1e-3));
  CHECK(std::abs(gauss_bonnet_defect(*collar)) < 0.05);

  auto ex = [](Real x) { return std::exp(-x); };
  const auto cusp = share(make_warped_cylinder(ex, 0, 4.0, 1.0, 16, [](Real) { return -1.0; }));
  CHECK(cusp->total_area() == doctest::Approx(1 - std::exp(-4.0)).epsilon(1e-3));

  CHECK_THROWS_AS(make_warped_cylinder([](Real x) { return 1.0 - x; }, 0, 2, 1, 8, nullptr),
                  NonPositiveWarp);
}

TEST_CASE("constant curvature discs") {
  const auto H = share(make_hyperbolic_disc(1.0, 48));
  CHECK(H->topo.chi == 1);
  CHECK(H->topo.boundary_loops.size() == 1);
  CHECK(H->total_area() == doctest::Approx(2 * kPi * (std::cosh(1.0) - 1)).epsilon(0.01));

  const auto E = share(make_constant_curvature_disc(0.02, 0.0, 32));
  CHECK(E->total_area() / (kPi * 0.02 * 0.02) == doctest::Approx(1.0).epsilon(0.01));

  // Spherical caps approach the full sphere area as R -> pi.
  const auto C = share(make_constant_curvature_disc(2.8, 1.0, 48));
  CHECK(C->total_area() < 4 * kPi);
  CHECK(C->total_area() > 0.9 * 2 * kPi * (1 - std::cos(2.8)));
}

TEST_CASE("subsurface extraction and classification") {
  const auto S = share(make_flat_torus(Vec2(1, 0), Vec2(0, 1), 24));

  const Subsurface ball = metric_ball(S, 0, 0.2);
  CHECK(ball.topo_class == TopoClass::Disc);
  CHECK(ball.chi == 1);
  CHECK(ball.n_boundary_loops() == 1);

  const Subsurface all = whole_surface(S);
  CHECK(all.topo_class == TopoClass::Other);
  CHECK(all.closed());

  auto one = [](Real) { return 1.0; };
  const auto C = share(make_warped_cylinder(one, 0, 3.0, 1.0, 12, nullptr));
  const Subsurface band = extract_subsurface(C, [&](int f) {
    return C->radial[f] > 1.0 && C->radial[f] < 2.0;
  });
  CHECK(band.topo_class == TopoClass::Annulus);
  CHECK(band.chi == 0);
  CHECK(band.n_boundary_loops() == 2);
  CHECK(band.area == doctest::Approx(1.0).epsilon(0.2)); // stepped boundary

  CHECK_THROWS_AS(extract_subsurface(S, [](int) { return false; }), EmptySelection);

  // Mobius band around the one-sided loop of the Klein bottle.
  const auto K = share(make_klein_bottle_flat(1.0, 1.0, 16));
  const Subsurface mob = extract_subsurface(K, [&](int f) {
    const Real y = K->face_center(f, 1);
    return y < 0.25 || y > 0.75;
  });
  CHECK(mob.chi == 0);
  CHECK(mob.n_boundary_loops() == 1);
  CHECK_FALSE(mob.orientable);
  CHECK(mob.topo_class == TopoClass::CrossCap);
}

TEST_CASE("classification agrees with independent chi on random selections") {
  const auto S = share(make_flat_torus(Vec2(1, 0), Vec2(0.2, 1.0), 16));
  rng_state = 99;
  int interesting = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // Random union of 1-3 balls.
    std::vector<char> mask(S->n_faces(), 0);
    const int nballs = 1 + static_cast<int>(urand() * 3);
    for (int b = 0; b < nballs; ++b) {
      const int c = static_cast<int>(urand() * S->nv);
      const Real r = 0.05 + 0.25 * urand();
      const Subsurface B = metric_ball(S, c, r);
      for (int f : B.faces) mask[f] = 1;
    }
    Subsurface F = extract_subsurface(S, mask);
    CHECK(F.chi == chi_of_faces(*S, F.faces));
    switch (F.topo_class) {
      case TopoClass::Disc:
        CHECK(F.chi == 1);
        CHECK(F.n_boundary_loops() == 1);
        CHECK(F.connected);
        ++interesting;
        break;
      case TopoClass::Annulus:
        CHECK(F.chi == 0);
        CHECK(F.n_boundary_loops() == 2);
        CHECK(F.orientable);
        ++interesting;
        break;
      case TopoClass::CrossCap:
        CHECK(false); // impossible on an orientable parent
        break;
      default:
        break;
    }
  }
  CHECK(interesting > 20);
}

TEST_CASE("incompressibility classification") {
  const auto S = share(make_flat_torus(Vec2(1, 0), Vec2(0, 1), 24));

  // Collar of a systolic loop: homologically nontrivial core.
  const LoopResult sys_loop = systole_upper(*S);
  const Subsurface tube = collar(S, sys_loop, 0.2);
  REQUIRE(tube.topo_class == TopoClass::Annulus);
  CHECK(classify_incompressible(tube) == Incompressibility::Incompressible);

  // Ring around a contractible circle bounds a disc.
  const EdgeGraph g = edge_graph(*S);
  const DijkstraResult d = dijkstra(g, {0});
  const Subsurface ring = extract_subsurface(S, [&](int f) {
    const Real bd = (d.dist[S->tris(f, 0)] + d.dist[S->tris(f, 1)] + d.dist[S->tris(f, 2)]) / 3;
    return bd > 0.15 && bd < 0.32;
  });
  REQUIRE(ring.topo_class == TopoClass::Annulus);
  CHECK(classify_incompressible(ring) == Incompressibility::Compressible);

  // Separating annulus on the Klein bottle: homology is silent.
  const auto K = share(make_klein_bottle_flat(1.0, 1.0, 16));
  const Subsurface sep = extract_subsurface(K, [&](int f) {
    const Real y = K->face_center(f, 1);
    return std::abs(y - 0.25) < 0.125 || std::abs(y - 0.75) < 0.125;
  });
  REQUIRE(sep.topo_class == TopoClass::Annulus);
  CHECK(classify_incompressible(sep) == Incompressibility::Unknown);

  CHECK_THROWS_AS(classify_incompressible(metric_ball(S, 0, 0.2)), WrongClass);
}

TEST_CASE("conformal scaling") {
  const MetricSurface S = make_flat_torus(Vec2(1, 0), Vec2(0, 1), 12);

  const MetricSurface same = conformal_scale(S, VecX::Ones(S.nv));
  CHECK((same.tri_len - S.tri_len).cwiseAbs().maxCoeff() == 0.0);

  const MetricSurface twice = conformal_scale(S, VecX::Constant(S.nv, 2.0));
  CHECK(twice.total_area() == doctest::Approx(2 * S.total_area()).epsilon(1e-12));
  CHECK(twice.tri_len(0, 0) == doctest::Approx(std::sqrt(2.0) * S.tri_len(0, 0)).epsilon(1e-14));

  CHECK_THROWS_AS(conformal_scale(S, VecX::Zero(S.nv)), NonPositiveFactor);
}

TEST_CASE("cyclic covers") {
  const auto S = share(make_flat_torus(Vec2(1, 0), Vec2(0, 1), 16));
  const LoopResult loop = systole_upper(*S);
  REQUIRE(loop.length == doctest::Approx(1.0).epsilon(1e-9));

  const MetricSurface chain4 = cyclic_cover(*S, loop.vertices, 4, CoverMode::Chain);
  CHECK(chain4.total_area() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(chain4.topo.chi == 0);
  CHECK(chain4.topo.boundary_loops.size() == 2);

  const MetricSurface closed3 = cyclic_cover(*S, loop.vertices, 3, CoverMode::Closed);
  CHECK(closed3.total_area() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(closed3.topo.chi == 0);
  CHECK(closed3.topo.boundary_loops.empty());

  const MetricSurface re = cyclic_cover(*S, loop.vertices, 1, CoverMode::Closed);
  CHECK(re.topo.chi == 0);
  CHECK(re.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(re.topo.n_vertices == S->topo.n_vertices);

  // Octagon cover doubles area and curvature.
  const auto O = share(make_hyperbolic_octagon(8));
  const LoopResult oloop = systole_upper(*O);
  const MetricSurface ocover = cyclic_cover(*O, oloop.vertices, 2, CoverMode::Closed);
  CHECK(ocover.topo.chi == 2 * O->topo.chi);
  CHECK(ocover.total_area() == doctest::Approx(2 * O->total_area()).epsilon(1e-12));

  // Separating loop: boundary circle of a small disc.
  const Subsurface ball = metric_ball(S, 0, 0.2);
  REQUIRE(ball.topo_class == TopoClass::Disc);
  CHECK_THROWS_AS(cyclic_cover(*S, ball.boundary_loops[0], 2, CoverMode::Chain), SeparatingLoop);

  // Non-simple loop.
  std::vector<int> bad = loop.vertices;
  bad.push_back(loop.vertices[0]);
  CHECK_THROWS_AS(cyclic_cover(*S, bad, 2, CoverMode::Chain), NonSimpleLoop);

  // One-sided loop on the Klein bottle: the y=0 row.
  const auto K = share(make_klein_bottle_flat(1.0, 1.0, 12));
  std::vector<int> row;
  for (int i = 0; i < 12; ++i) row.push_back(i * 12 + 0);
  CHECK_THROWS_AS(cyclic_cover(*K, row, 2, CoverMode::Chain), OneSidedLoop);
}

TEST_CASE("exhaustion families") {
  auto ch = [](Real x) { return std::cosh(x); };
  const auto S = share(make_warped_cylinder(ch, 0, 6.0, 1.0, 8, [](Real) { return -1.0; }));
  const ExhaustionFamily fam = build_exhaustion(S, {1.0, 2.0, 3.0});
  CHECK(fam.truncations.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(fam.truncations[i].chi == S->topo.chi);
    CHECK(fam.complements[i].topo_class == TopoClass::Annulus);
    if (i > 0)
      CHECK(fam.truncations[i].faces.size() >= fam.truncations[i - 1].faces.size());
  }
  CHECK_THROWS_AS(build_exhaustion(S, {2.0, 1.0}), NonIncreasingRadii);

  const auto T = share(make_flat_torus(Vec2(1, 0), Vec2(0, 1), 8));
  CHECK_THROWS_AS(build_exhaustion(T, {0.5}), NonIncreasingRadii);
}

TEST_CASE("submesh roundtrip") {
  auto one = [](Real) { return 1.0; };
  const auto C = share(make_warped_cylinder(one, 0, 3.0, 1.0, 12, nullptr));
  const Subsurface band = extract_subsurface(C, [&](int f) {
    return C->radial[f] > 0.9 && C->radial[f] < 2.1;
  });
  const Submesh sm = submesh(band);
  CHECK(sm.surface.topo.chi == band.chi);
  CHECK(sm.surface.total_area() == doctest::Approx(band.area).epsilon(1e-12));
  CHECK(sm.surface.topo.boundary_loops.size() == band.boundary_loops.size());
}
