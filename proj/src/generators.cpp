#include "sgl/generators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <vector>

namespace sgl {

namespace {

// Lagrange (Gauss) reduction; returns an equivalent basis with |a| <= |b|
// and |<a,b>| <= |a|^2/2.
void reduce_basis(Vec2& a, Vec2& b) {
  for (int it = 0; it < 64; ++it) {
    if (a.squaredNorm() > b.squaredNorm()) std::swap(a, b);
    const Real mu = std::round(a.dot(b) / a.squaredNorm());
    if (mu == 0) break;
    b -= mu * a;
  }
}

} // namespace

MetricSurface make_flat_torus(const Vec2& basis_a, const Vec2& basis_b, int resolution) {
  const int n = resolution;
  if (n < 4) throw DegenerateLattice("resolution must be >= 4");
  Vec2 a = basis_a, b = basis_b;
  const Real det = a.x() * b.y() - a.y() * b.x();
  if (std::abs(det) < 1e-12 * std::max(a.norm(), b.norm()))
    throw DegenerateLattice("basis vectors are linearly dependent");
  reduce_basis(a, b);

  auto vid = [n](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };
  auto at = [&](int i, int j) -> Vec2 { return (Real(i) / n) * a + (Real(j) / n) * b; };

  MetricSurface S;
  S.nv = n * n;
  std::vector<Eigen::Vector3i> tris;
  std::vector<std::array<Vec2, 3>> coords;
  tris.reserve(2 * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 p00 = at(i, j), p10 = at(i + 1, j), p11 = at(i + 1, j + 1), p01 = at(i, j + 1);
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({v00, v10, v11});
        coords.push_back({p00, p10, p11});
        tris.push_back({v00, v11, v01});
        coords.push_back({p00, p11, p01});
      } else {
        tris.push_back({v00, v10, v01});
        coords.push_back({p00, p10, p01});
        tris.push_back({v10, v11, v01});
        coords.push_back({p10, p11, p01});
      }
    }
  }
  const int nf = static_cast<int>(tris.size());
  S.tris.resize(nf, 3);
  S.tri_len.resize(nf, 3);
  S.face_center.resize(nf, 2);
  for (int f = 0; f < nf; ++f) {
    S.tris.row(f) = tris[f];
    for (int k = 0; k < 3; ++k)
      S.tri_len(f, k) = (coords[f][(k + 2) % 3] - coords[f][(k + 1) % 3]).norm();
    S.face_center.row(f) = ((coords[f][0] + coords[f][1] + coords[f][2]) / 3).transpose();
  }
  S.positions.resize(S.nv, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 p = at(i, j);
      S.positions.row(vid(i, j)) << p.x(), p.y(), 0.0;
    }
  S.curvature = [](int) { return Real(0); };
  S.model = "flat_torus";
  S.finalize();
  return S;
}

MetricSurface make_klein_bottle_flat(Real width, Real height, int resolution) {
  const int n = resolution;
  if (n < 4) throw DegenerateLattice("resolution must be >= 4");
  if (!(width > 0 && height > 0)) throw DegenerateLattice("side lengths must be positive");

  // (width, y) ~ (0, height - y), (x, height) ~ (x, 0)
  auto vid = [n](int i, int j) {
    j = (j % n + n) % n;
    if (i == n) {
      i = 0;
      j = (n - j) % n;
    }
    return i * n + j;
  };
  const Real dx = width / n, dy = height / n;

  MetricSurface S;
  S.nv = n * n;
  std::vector<Eigen::Vector3i> tris;
  std::vector<std::array<Vec2, 3>> coords;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 p00(i * dx, j * dy), p10((i + 1) * dx, j * dy), p11((i + 1) * dx, (j + 1) * dy),
          p01(i * dx, (j + 1) * dy);
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({v00, v10, v11});
        coords.push_back({p00, p10, p11});
        tris.push_back({v00, v11, v01});
        coords.push_back({p00, p11, p01});
      } else {
        tris.push_back({v00, v10, v01});
        coords.push_back({p00, p10, p01});
        tris.push_back({v10, v11, v01});
        coords.push_back({p10, p11, p01});
      }
    }
  }
  const int nf = static_cast<int>(tris.size());
  S.tris.resize(nf, 3);
  S.tri_len.resize(nf, 3);
  S.face_center.resize(nf, 2);
  for (int f = 0; f < nf; ++f) {
    S.tris.row(f) = tris[f];
    for (int k = 0; k < 3; ++k)
      S.tri_len(f, k) = (coords[f][(k + 2) % 3] - coords[f][(k + 1) % 3]).norm();
    S.face_center.row(f) = ((coords[f][0] + coords[f][1] + coords[f][2]) / 3).transpose();
  }
  S.positions.resize(S.nv, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S.positions.row(i * n + j) << i * dx, j * dy, 0.0;
  S.curvature = [](int) { return Real(0); };
  S.model = "klein_bottle_flat";
  S.finalize();
  return S;
}

MetricSurface make_warped_cylinder(const std::function<Real(Real)>& warp, Real x0, Real x1,
                                   Real circumference, int resolution,
                                   const std::function<Real(Real)>& curvature) {
  if (!(x1 > x0) || !(circumference > 0)) throw NonPositiveWarp("bad domain");
  const int ny = std::max(4, resolution);
  const int nx = std::max(4, static_cast<int>(std::ceil(ny * (x1 - x0) / circumference)));
  const Real L = circumference;

  for (int i = 0; i <= 4 * nx; ++i) {
    const Real x = x0 + (x1 - x0) * i / (4 * nx);
    if (!(warp(x) > 0)) throw NonPositiveWarp("warp nonpositive at x=" + std::to_string(x));
  }

  MetricSurface S;
  S.nv = (nx + 1) * ny;
  auto vid = [ny](int i, int j) { return i * ny + ((j % ny + ny) % ny); };
  auto xat = [&](int i) { return x0 + (x1 - x0) * i / nx; };
  auto yat = [&](int j) { return L * j / ny; };

  std::vector<Eigen::Vector3i> tris;
  std::vector<std::array<Vec2, 3>> uv;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const Vec2 p00(xat(i), yat(j)), p10(xat(i + 1), yat(j)), p11(xat(i + 1), yat(j + 1)),
          p01(xat(i), yat(j + 1));
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({v00, v10, v11});
        uv.push_back({p00, p10, p11});
        tris.push_back({v00, v11, v01});
        uv.push_back({p00, p11, p01});
      } else {
        tris.push_back({v00, v10, v01});
        uv.push_back({p00, p10, p01});
        tris.push_back({v10, v11, v01});
        uv.push_back({p10, p11, p01});
      }
    }
  }
  const int nf = static_cast<int>(tris.size());
  S.tris.resize(nf, 3);
  S.corner_uv.resize(nf, 6);
  S.face_center.resize(nf, 2);
  for (int f = 0; f < nf; ++f) {
    S.tris.row(f) = tris[f];
    for (int k = 0; k < 3; ++k) {
      S.corner_uv(f, 2 * k) = uv[f][k].x();
      S.corner_uv(f, 2 * k + 1) = uv[f][k].y();
    }
    S.face_center.row(f) = ((uv[f][0] + uv[f][1] + uv[f][2]) / 3).transpose();
  }
  S.backend = MetricBackend::Chart;
  S.metric = [warp](const Vec2& p) {
    Mat2 g = Mat2::Zero();
    g(0, 0) = 1.0;
    const Real j = warp(p.x());
    g(1, 1) = j * j;
    return g;
  };
  if (curvature) {
    VecX bx(nf);
    for (int f = 0; f < nf; ++f) bx[f] = (uv[f][0].x() + uv[f][1].x() + uv[f][2].x()) / 3;
    S.curvature = [curvature, bx](int f) { return curvature(bx[f]); };
  }
  S.radial.resize(nf);
  for (int f = 0; f < nf; ++f) S.radial[f] = (uv[f][0].x() + uv[f][1].x() + uv[f][2].x()) / 3;
  S.positions.resize(S.nv, 3);
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j < ny; ++j) S.positions.row(vid(i, j)) << xat(i), yat(j), 0.0;
  S.model = "warped_cylinder";
  S.finalize();
  return S;
}

MetricSurface make_constant_curvature_disc(Real radius, Real kappa, int resolution) {
  if (!(radius > 0)) throw DegenerateTriangle("radius must be positive");
  if (kappa > 0 && radius >= kPi / std::sqrt(kappa) - 1e-9)
    throw DegenerateTriangle("radius must stay below pi/sqrt(kappa)");
  const int n = std::max(8, resolution);
  const int nr = std::max(3, static_cast<int>(std::round(n * radius / (2 * kPi))));

  // Geodesic normal coordinates: g = rhat rhat^T + (sn_kappa(r)/r)^2 (I - rhat rhat^T),
  // smooth across the center, one global chart.
  MetricSurface S;
  S.nv = 1 + nr * n;
  auto vid = [n](int k, int i) { return 1 + (k - 1) * n + ((i % n + n) % n); };
  const Real dth = 2 * kPi / n;
  auto at = [&](int k, int i) -> Vec2 {
    const Real r = radius * k / nr;
    return Vec2(r * std::cos(i * dth), r * std::sin(i * dth));
  };

  std::vector<Eigen::Vector3i> tris;
  std::vector<std::array<Vec2, 3>> uv;
  for (int i = 0; i < n; ++i) {
    tris.push_back({0, vid(1, i), vid(1, i + 1)});
    uv.push_back({Vec2(0, 0), at(1, i), at(1, i + 1)});
  }
  for (int k = 1; k < nr; ++k) {
    for (int i = 0; i < n; ++i) {
      const Vec2 p00 = at(k, i), p10 = at(k + 1, i), p11 = at(k + 1, i + 1), p01 = at(k, i + 1);
      const int v00 = vid(k, i), v10 = vid(k + 1, i), v11 = vid(k + 1, i + 1), v01 = vid(k, i + 1);
      if ((k + i) % 2 == 0) {
        tris.push_back({v00, v10, v11});
        uv.push_back({p00, p10, p11});
        tris.push_back({v00, v11, v01});
        uv.push_back({p00, p11, p01});
      } else {
        tris.push_back({v00, v10, v01});
        uv.push_back({p00, p10, p01});
        tris.push_back({v10, v11, v01});
        uv.push_back({p10, p11, p01});
      }
    }
  }
  const int nf = static_cast<int>(tris.size());
  S.tris.resize(nf, 3);
  S.corner_uv.resize(nf, 6);
  S.face_center.resize(nf, 2);
  for (int f = 0; f < nf; ++f) {
    S.tris.row(f) = tris[f];
    for (int k = 0; k < 3; ++k) {
      S.corner_uv(f, 2 * k) = uv[f][k].x();
      S.corner_uv(f, 2 * k + 1) = uv[f][k].y();
    }
    S.face_center.row(f) = ((uv[f][0] + uv[f][1] + uv[f][2]) / 3).transpose();
  }
  S.backend = MetricBackend::Chart;
  S.metric = [kappa](const Vec2& p) {
    const Real r2 = p.squaredNorm();
    const Real x = kappa * r2;
    Real q; // (sn_kappa(r)/r)^2
    if (std::abs(x) < 1e-8) {
      q = 1 - x / 3 + 2 * x * x / 45;
    } else {
      const Real r = std::sqrt(r2);
      const Real s = sn(kappa, r);
      q = s * s / r2;
    }
    if (r2 < 1e-300) return Mat2(Mat2::Identity());
    return Mat2(q * Mat2::Identity() + ((1 - q) / r2) * (p * p.transpose()));
  };
  S.curvature = [kappa](int) { return kappa; };
  S.radial.resize(nf);
  for (int f = 0; f < nf; ++f)
    S.radial[f] = (uv[f][0].norm() + uv[f][1].norm() + uv[f][2].norm()) / 3;
  S.positions.resize(S.nv, 3);
  S.positions.row(0).setZero();
  for (int k = 1; k <= nr; ++k)
    for (int i = 0; i < n; ++i) S.positions.row(vid(k, i)) << at(k, i).x(), at(k, i).y(), 0.0;
  S.model = "constant_curvature_disc";
  S.finalize();
  return S;
}

MetricSurface make_hyperbolic_disc(Real radius, int resolution) {
  MetricSurface S = make_constant_curvature_disc(radius, -1.0, resolution);
  S.model = "hyperbolic_disc";
  return S;
}

namespace {

using Cx = std::complex<Real>;

Real hyp_dist(const Cx& p, const Cx& q) {
  const Cx num = q - p;
  const Cx den = Cx(1, 0) - std::conj(p) * q;
  const Real r = std::abs(num / den);
  return 2 * std::atanh(std::min(r, Real(1) - Real(1e-16)));
}

Cx hyp_midpoint(const Cx& p, const Cx& q) {
  const Cx qp = (q - p) / (Cx(1, 0) - std::conj(p) * q);
  const Real r = std::abs(qp);
  if (r < 1e-300) return p;
  const Cx mp = qp / r * std::tanh(std::atanh(r) / 2);
  return (mp + p) / (Cx(1, 0) + std::conj(p) * mp);
}

struct DiscMesh {
  std::vector<Cx> verts;
  std::vector<Eigen::Vector3i> tris;
};

} // namespace

MetricSurface make_hyperbolic_octagon(int resolution) {
  if (resolution < 4) throw DegenerateTriangle("resolution must be >= 4");
  int level = 2;
  while ((1 << (level + 1)) <= resolution) ++level;
  const int m = 1 << level; // segments per octagon side

  // Regular octagon with corner angle pi/4: cosh(circumradius) = cot^2(pi/8).
  const Real cot8 = 1.0 / std::tan(kPi / 8);
  const Real coshR = cot8 * cot8;
  const Real rho_c = std::sqrt((coshR - 1) / (coshR + 1)); // Euclidean radius, tanh(R/2)

  DiscMesh mesh;
  mesh.verts.push_back(Cx(0, 0));
  for (int k = 0; k < 8; ++k)
    mesh.verts.push_back(std::polar(rho_c, kPi / 4 * k));
  for (int k = 0; k < 8; ++k) mesh.tris.push_back({0, 1 + k, 1 + (k + 1) % 8});

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const int id = static_cast<int>(mesh.verts.size());
      mesh.verts.push_back(hyp_midpoint(mesh.verts[a], mesh.verts[b]));
      mid.emplace(key, id);
      return id;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(mesh.tris.size() * 4);
    for (const auto& t : mesh.tris) {
      const int m01 = midpoint(t[0], t[1]), m12 = midpoint(t[1], t[2]), m20 = midpoint(t[2], t[0]);
      next.push_back({t[0], m01, m20});
      next.push_back({t[1], m12, m01});
      next.push_back({t[2], m20, m12});
      next.push_back({m01, m12, m20});
    }
    mesh.tris = std::move(next);
  }

  const int nv_disc = static_cast<int>(mesh.verts.size());
  const int nf = static_cast<int>(mesh.tris.size());

  // Boundary walk of the refined octagon, split into the 8 sides at corners.
  MatXi raw(nf, 3);
  for (int f = 0; f < nf; ++f) raw.row(f) = mesh.tris[f];
  const SurfaceTopology pre = build_topology(raw, nv_disc);
  if (pre.boundary_loops.size() != 1) throw Error("Internal", "octagon boundary walk failed");
  std::vector<int> loop = pre.boundary_loops[0];

  // Rotate so it starts at corner 1 (vertex id 1) and runs 1,2,...,8 ccw.
  const auto start = std::find(loop.begin(), loop.end(), 1);
  std::rotate(loop.begin(), start, loop.end());
  {
    // Direction check: corner 2 must come before corner 8.
    size_t i2 = 0, i8 = 0;
    for (size_t i = 0; i < loop.size(); ++i) {
      if (loop[i] == 2) i2 = i;
      if (loop[i] == 8) i8 = i;
    }
    if (i8 < i2) {
      std::reverse(loop.begin() + 1, loop.end());
    }
  }
  if (static_cast<int>(loop.size()) != 8 * m) throw Error("Internal", "octagon boundary size");

  // side k runs from corner k to corner k+1: loop[k*m .. (k+1)*m]
  auto side_vertex = [&](int k, int j) { // j in [0, m]
    return loop[(k * m + j) % (8 * m)];
  };

  // Identify side k with side k+4 reversed: S_k[j] ~ S_{k+4}[m-j].
  std::vector<int> canon(nv_disc);
  std::iota(canon.begin(), canon.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (canon[v] != v) {
      canon[v] = canon[canon[v]];
      v = canon[v];
    }
    return v;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) canon[std::max(a, b)] = std::min(a, b);
  };
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j <= m; ++j) unite(side_vertex(k, j), side_vertex(k + 4, m - j));

  std::vector<int> remap(nv_disc, -1);
  int nv = 0;
  for (int v = 0; v < nv_disc; ++v)
    if (find(v) == v) remap[v] = nv++;
  for (int v = 0; v < nv_disc; ++v) remap[v] = remap[find(v)];

  MetricSurface S;
  S.nv = nv;
  S.tris.resize(nf, 3);
  S.tri_len.resize(nf, 3);
  S.face_center.resize(nf, 2);
  for (int f = 0; f < nf; ++f) {
    const auto& t = mesh.tris[f];
    Cx c(0, 0);
    for (int k = 0; k < 3; ++k) {
      S.tris(f, k) = remap[t[k]];
      S.tri_len(f, k) = hyp_dist(mesh.verts[t[(k + 1) % 3]], mesh.verts[t[(k + 2) % 3]]);
      c += mesh.verts[t[k]];
    }
    S.face_center(f, 0) = c.real() / 3;
    S.face_center(f, 1) = c.imag() / 3;
  }
  S.positions.resize(nv, 3);
  for (int v = 0; v < nv_disc; ++v)
    S.positions.row(remap[v]) << mesh.verts[v].real(), mesh.verts[v].imag(), 0.0;
  S.curvature = [](int) { return Real(-1); };
  S.model = "hyperbolic_octagon";
  S.finalize();
  return S;
}

} // namespace sgl
