#include "sgl/spectral.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sgl {

namespace {

const Vec3 kMidBary[3] = {Vec3(0.0, 0.5, 0.5), Vec3(0.5, 0.0, 0.5), Vec3(0.5, 0.5, 0.0)};

// Local 3x3 stiffness and mass of one face.
void local_matrices(const MetricSurface& S, int f, Eigen::Matrix3d& K, Eigen::Matrix3d& M) {
  if (S.backend == MetricBackend::EdgeLengths) {
    const Real a = S.tri_len(f, 0), b = S.tri_len(f, 1), c = S.tri_len(f, 2);
    const Real area = heron_area(a, b, c);
    if (!(area > 0)) throw DegenerateTriangle("face " + std::to_string(f));
    const Real l2[3] = {a * a, b * b, c * c};
    K.setZero();
    for (int k = 0; k < 3; ++k) {
      // cot of the angle at corner k
      const Real cot = (l2[(k + 1) % 3] + l2[(k + 2) % 3] - l2[k]) / (4 * area);
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      K(i, j) -= cot / 2;
      K(j, i) -= cot / 2;
      K(i, i) += cot / 2;
      K(j, j) += cot / 2;
    }
    M.setConstant(area / 12);
    M.diagonal().setConstant(area / 6);
    return;
  }

  // Chart backend: 3-point midpoint quadrature, exact conformal invariance.
  const Vec2 p0 = S.corner(f, 0), p1 = S.corner(f, 1), p2 = S.corner(f, 2);
  const Real det2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  if (det2 == 0) throw DegenerateTriangle("flat chart triangle " + std::to_string(f));
  const Real area_uv = std::abs(det2) / 2;
  Vec2 grad[3];
  grad[0] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / det2;
  grad[1] = Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / det2;
  grad[2] = Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / det2;

  K.setZero();
  M.setZero();
  for (int q = 0; q < 3; ++q) {
    const Mat2 g = S.metric_at(f, kMidBary[q]);
    const Real det = g.determinant();
    if (!(det > 0)) throw DegenerateTriangle("metric not SPD in face " + std::to_string(f));
    const Real w = area_uv / 3 * std::sqrt(det);
    const Mat2 ginv = g.inverse();
    Real phi[3];
    for (int i = 0; i < 3; ++i) phi[i] = kMidBary[q][i];
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const Real kij = w * grad[i].dot(ginv * grad[j]);
        const Real mij = w * phi[i] * phi[j];
        K(i, j) += kij;
        M(i, j) += mij;
        if (j > i) {
          K(j, i) += kij;
          M(j, i) += mij;
        }
      }
  }
}

FemSystem assemble_impl(const Subsurface& F, bool eliminate) {
  const auto& S = *F.parent;
  FemSystem sys;
  sys.dof_of_vertex.assign(S.nv, -1);
  for (int v : F.vertices) {
    if (eliminate && F.boundary_vertex[v]) continue;
    sys.dof_of_vertex[v] = static_cast<int>(sys.vertex_of_dof.size());
    sys.vertex_of_dof.push_back(v);
  }
  const int n = static_cast<int>(sys.vertex_of_dof.size());
  std::vector<Triplet> tk, tm;
  tk.reserve(F.faces.size() * 9);
  tm.reserve(F.faces.size() * 9);
  Eigen::Matrix3d Kl, Ml;
  for (int f : F.faces) {
    local_matrices(S, f, Kl, Ml);
    int dof[3];
    for (int k = 0; k < 3; ++k) dof[k] = sys.dof_of_vertex[S.tris(f, k)];
    for (int i = 0; i < 3; ++i) {
      if (dof[i] < 0) continue;
      for (int j = 0; j < 3; ++j) {
        if (dof[j] < 0) continue;
        tk.emplace_back(dof[i], dof[j], Kl(i, j));
        tm.emplace_back(dof[i], dof[j], Ml(i, j));
      }
    }
  }
  sys.K.resize(n, n);
  sys.M.resize(n, n);
  sys.K.setFromTriplets(tk.begin(), tk.end());
  sys.M.setFromTriplets(tm.begin(), tm.end());
  return sys;
}

Real mesh_h_of(const Subsurface& F) {
  Real h = 0;
  for (int f : F.faces) h = std::max(h, F.parent->tri_len.row(f).maxCoeff());
  return h;
}

// integral |phi| |grad phi| evaluated with the same per-face quadrature the
// assembly uses, so Cauchy-Schwarz against (phi^T K phi, phi^T M phi) is exact.
Real integral_phi_gradphi(const Subsurface& F, const VecX& phi) {
  const auto& S = *F.parent;
  Real total = 0;
  for (int f : F.faces) {
    const Real v0 = phi[S.tris(f, 0)], v1 = phi[S.tris(f, 1)], v2 = phi[S.tris(f, 2)];
    if (S.backend == MetricBackend::EdgeLengths) {
      const auto p = layout_triangle(S.tri_len(f, 0), S.tri_len(f, 1), S.tri_len(f, 2));
      const Real det2 =
          (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[2] - p[0]).x() * (p[1] - p[0]).y();
      const Vec2 grad = (v0 * Vec2(p[1].y() - p[2].y(), p[2].x() - p[1].x()) +
                         v1 * Vec2(p[2].y() - p[0].y(), p[0].x() - p[2].x()) +
                         v2 * Vec2(p[0].y() - p[1].y(), p[1].x() - p[0].x())) /
                        det2;
      total += S.face_area[f] * grad.norm() * std::abs(v0 + v1 + v2) / 3;
    } else {
      const Vec2 p0 = S.corner(f, 0), p1 = S.corner(f, 1), p2 = S.corner(f, 2);
      const Real det2 =
          (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
      const Vec2 grad = (v0 * Vec2(p1.y() - p2.y(), p2.x() - p1.x()) +
                         v1 * Vec2(p2.y() - p0.y(), p0.x() - p2.x()) +
                         v2 * Vec2(p0.y() - p1.y(), p1.x() - p0.x())) /
                        det2;
      const Real area_uv = std::abs(det2) / 2;
      const Real vals[3] = {v0, v1, v2};
      for (int q = 0; q < 3; ++q) {
        const Mat2 g = S.metric_at(f, kMidBary[q]);
        const Real w = area_uv / 3 * std::sqrt(g.determinant());
        const Real gn = std::sqrt(std::max(grad.dot(g.inverse() * grad), Real(0)));
        Real pv = 0;
        for (int i = 0; i < 3; ++i) pv += kMidBary[q][i] * vals[i];
        total += w * std::abs(pv) * gn;
      }
    }
  }
  return total;
}

} // namespace

FemSystem assemble(const Subsurface& F) { return assemble_impl(F, true); }
FemSystem assemble_full(const Subsurface& F) { return assemble_impl(F, false); }

SpectralResult lambda0(const Subsurface& F, Real tol) {
  const auto& S = *F.parent;
  SpectralResult out;
  out.mesh_h = mesh_h_of(F);

  if (F.closed()) {
    out.lambda0 = 0;
    out.rayleigh = 0;
    out.ground_state = VecX::Zero(S.nv);
    const Real c = 1.0 / std::sqrt(F.area);
    for (int v : F.vertices) out.ground_state[v] = c;
    return out;
  }

  FemSystem sys = assemble(F);
  const int n = static_cast<int>(sys.vertex_of_dof.size());
  if (n == 0) throw EmptyInterior("no interior vertices");

  Eigen::SimplicialLDLT<SparseMat> chol(sys.K);
  if (chol.info() != Eigen::Success) throw SolverDivergence("stiffness factorization failed");

  VecX x = VecX::Ones(n);
  x /= std::sqrt(x.dot(sys.M * x));
  Real lam = x.dot(sys.K * x);
  const int max_iter = 2000;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    VecX y = chol.solve(sys.M * x);
    const Real ny = std::sqrt(y.dot(sys.M * y));
    if (!(ny > 0) || !std::isfinite(ny)) throw SolverDivergence("inverse iteration broke down");
    x = y / ny;
    lam = x.dot(sys.K * x);
    const VecX res = sys.K * x - lam * (sys.M * x);
    const Real den = (sys.M * x).norm();
    if (res.norm() / den <= tol * std::max(Real(1), std::abs(lam))) {
      converged = true;
      break;
    }
  }
  if (!converged) throw SolverDivergence("inverse iteration hit the cap");

  // Sign normalization: positive mean in the mass inner product.
  if ((sys.M * x).sum() < 0) x = -x;

  out.lambda0 = lam;
  out.rayleigh = lam;
  out.ground_state = VecX::Zero(S.nv);
  for (int i = 0; i < n; ++i) out.ground_state[sys.vertex_of_dof[i]] = x[i];

  // Consistency check: 2 * integral |phi| |grad phi| <= 2 sqrt(lambda) holds
  // exactly under the assembly quadrature (Cauchy-Schwarz).
  const Real lhs = integral_phi_gradphi(F, out.ground_state);
  const Real bound = std::sqrt(std::max(lam, Real(0)));
  if (lhs > bound * (1 + 1e-6) + 1e-12)
    throw SolverDivergence("ground-state energy identity violated; assembly inconsistent");
  return out;
}

EigenPairs eigenpairs_closed(const MetricSurface& S, int k, Real tol) {
  const SurfacePtr sp(&S, [](const MetricSurface*) {});
  const Subsurface all = whole_surface(sp);
  if (!all.closed()) throw EmptyInterior("eigenpairs_closed expects a closed surface");
  FemSystem sys = assemble_full(all);
  const int n = static_cast<int>(sys.vertex_of_dof.size());
  const int p = std::min(n, k + 5);
  if (k + 1 > n) throw SolverDivergence("mesh too small for requested modes");

  const Real sigma = 1e-3 * sys.K.diagonal().sum() / sys.M.diagonal().sum() + 1e-12;
  SparseMat A = sys.K + sigma * sys.M;
  Eigen::SimplicialLDLT<SparseMat> chol(A);
  if (chol.info() != Eigen::Success) throw SolverDivergence("shifted factorization failed");

  // Deterministic start block.
  MatX X(n, p);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<Real>(state >> 11) / static_cast<Real>(1ull << 53) - 0.5;
  };
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = (j == 0) ? 1.0 : next();

  EigenPairs out;
  const int max_iter = 500;
  for (int it = 0; it < max_iter; ++it) {
    MatX Y(n, p);
    for (int j = 0; j < p; ++j) Y.col(j) = chol.solve(sys.M * X.col(j));
    // Rayleigh-Ritz in the block.
    MatX KY = sys.K * Y, MY = sys.M * Y;
    MatX Ar = Y.transpose() * KY, Br = Y.transpose() * MY;
    Eigen::GeneralizedSelfAdjointEigenSolver<MatX> ges(Ar, Br);
    if (ges.info() != Eigen::Success) throw SolverDivergence("dense Ritz solve failed");
    X = Y * ges.eigenvectors();
    // Convergence of the first k+1 Ritz pairs.
    bool ok = true;
    for (int j = 0; j <= k && ok; ++j) {
      const VecX xj = X.col(j);
      const Real lam = ges.eigenvalues()[j];
      const VecX res = sys.K * xj - lam * (sys.M * xj);
      const Real den = (sys.M * xj).norm();
      if (res.norm() / den > tol * std::max(Real(1), std::abs(lam))) ok = false;
    }
    if (ok) {
      out.values = ges.eigenvalues().head(k + 1);
      out.vectors = X.leftCols(k + 1);
      // M-normalize columns.
      for (int j = 0; j <= k; ++j) {
        const Real nj = std::sqrt(out.vectors.col(j).dot(sys.M * out.vectors.col(j)));
        out.vectors.col(j) /= nj;
      }
      out.vertex_of_dof = sys.vertex_of_dof;
      // Clamp the closed-surface zero mode.
      if (std::abs(out.values[0]) < 1e-7 * std::max(Real(1), std::abs(out.values[k])))
        out.values[0] = std::max(out.values[0], Real(0));
      return out;
    }
  }
  throw SolverDivergence("subspace iteration hit the cap");
}

std::vector<Real> lambda_k(const MetricSurface& S, int k, Real tol) {
  const EigenPairs ep = eigenpairs_closed(S, k, tol);
  return std::vector<Real>(ep.values.data(), ep.values.data() + ep.values.size());
}

Real rayleigh(const Subsurface& F, const VecX& vertex_values) {
  FemSystem sys = F.closed() ? assemble_full(F) : assemble(F);
  const int n = static_cast<int>(sys.vertex_of_dof.size());
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = vertex_values[sys.vertex_of_dof[i]];
  const Real m = v.dot(sys.M * v);
  if (!(m > 0)) throw ZeroVector("field vanishes after Dirichlet masking");
  return v.dot(sys.K * v) / m;
}

namespace {

// Clipped superlevel area and level-segment length of a P1 field on one
// laid-out triangle.
void face_level_stats(const std::array<Vec2, 3>& p, const Real val[3], Real t, Real area,
                      Real* a_out, Real* l_out) {
  int above = 0;
  for (int k = 0; k < 3; ++k)
    if (val[k] >= t) ++above;
  if (above == 0) {
    *a_out = 0;
    *l_out = 0;
    return;
  }
  if (above == 3) {
    *a_out = area;
    *l_out = 0;
    return;
  }
  // One or two corners above: the level line crosses the two edges adjacent
  // to the isolated corner.
  int iso = -1;
  for (int k = 0; k < 3; ++k) {
    const bool is_above = val[k] >= t;
    if ((above == 1 && is_above) || (above == 2 && !is_above)) iso = k;
  }
  const int i1 = (iso + 1) % 3, i2 = (iso + 2) % 3;
  const Real d1 = (val[iso] - t) / (val[iso] - val[i1]);
  const Real d2 = (val[iso] - t) / (val[iso] - val[i2]);
  const Vec2 q1 = p[iso] + d1 * (p[i1] - p[iso]);
  const Vec2 q2 = p[iso] + d2 * (p[i2] - p[iso]);
  *l_out = (q2 - q1).norm();
  const Real corner_area =
      std::abs((q1 - p[iso]).x() * (q2 - p[iso]).y() - (q2 - p[iso]).x() * (q1 - p[iso]).y()) / 2;
  *a_out = (above == 1) ? corner_area : area - corner_area;
}

} // namespace

Real integrate_field(const Subsurface& F, const VecX& vv) {
  Real total = 0;
  const auto& S = *F.parent;
  for (int f : F.faces) {
    const Real mean = (vv[S.tris(f, 0)] + vv[S.tris(f, 1)] + vv[S.tris(f, 2)]) / 3;
    total += S.face_area[f] * mean;
  }
  return total;
}

Real integrate_grad_norm(const Subsurface& F, const VecX& vv) {
  Real total = 0;
  const auto& S = *F.parent;
  for (int f : F.faces) {
    const auto p = layout_triangle(S.tri_len(f, 0), S.tri_len(f, 1), S.tri_len(f, 2));
    const Real det2 = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[2] - p[0]).x() * (p[1] - p[0]).y();
    Vec2 grad = Vec2::Zero();
    const Real v0 = vv[S.tris(f, 0)], v1 = vv[S.tris(f, 1)], v2 = vv[S.tris(f, 2)];
    grad += v0 * Vec2(p[1].y() - p[2].y(), p[2].x() - p[1].x());
    grad += v1 * Vec2(p[2].y() - p[0].y(), p[0].x() - p[2].x());
    grad += v2 * Vec2(p[0].y() - p[1].y(), p[1].x() - p[0].x());
    grad /= det2;
    total += S.face_area[f] * grad.norm();
  }
  return total;
}

SweepProfile sweep(const Subsurface& F, const VecX& psi, int n_thresholds) {
  const auto& S = *F.parent;
  for (int v : F.vertices)
    if (psi[v] < -1e-12) throw NegativeDensity("psi negative at vertex " + std::to_string(v));
  if (n_thresholds < 2) throw NegativeDensity("need at least two thresholds");

  SweepProfile out;
  out.integral_psi = integrate_field(F, psi);
  out.integral_grad = integrate_grad_norm(F, psi);
  out.total_area = F.area;

  // Lumped vertex areas for the quantile placement.
  VecX w = VecX::Zero(S.nv);
  for (int f : F.faces)
    for (int k = 0; k < 3; ++k) w[S.tris(f, k)] += S.face_area[f] / 3;
  std::vector<int> order(F.vertices.begin(), F.vertices.end());
  std::sort(order.begin(), order.end(), [&](int a, int b) { return psi[a] < psi[b]; });
  const Real total_w = F.area;
  out.max_psi = psi[order.back()];

  std::vector<Real> th;
  th.reserve(n_thresholds + n_thresholds / 2);
  {
    // Area-equidistributed quantiles of psi, interpolated within the sorted
    // vertex distribution so symmetric meshes do not collapse the nodes,
    // interleaved with uniform nodes so the upper range stays resolved.
    std::vector<Real> cum(order.size() + 1, 0);
    for (size_t i = 0; i < order.size(); ++i) cum[i + 1] = cum[i] + w[order[i]];
    size_t pos = 0;
    for (int q = 0; q < n_thresholds; ++q) {
      const Real target = total_w * (q + 0.5) / n_thresholds;
      while (pos + 1 < cum.size() && cum[pos + 1] < target) ++pos;
      const size_t hi = std::min(pos, order.size() - 1);
      const Real v1 = psi[order[hi]];
      const Real v0 = (hi > 0) ? psi[order[hi - 1]] : Real(0);
      const Real seg = cum[hi + 1] - cum[hi];
      const Real frac = (seg > 0) ? (target - cum[hi]) / seg : Real(1);
      const Real t = v0 + (v1 - v0) * std::clamp(frac, Real(0), Real(1));
      // Strictly positive: at t = 0 the level set degenerates into the
      // boundary and the marching length collapses.
      th.push_back(std::clamp(t, out.max_psi * 1e-12, out.max_psi * (1 - 1e-9)));
    }
    for (int q = 1; q <= n_thresholds / 2; ++q)
      th.push_back(out.max_psi * (1 - 1e-9) * q / (n_thresholds / 2 + 1));
    std::sort(th.begin(), th.end());
    th.erase(std::unique(th.begin(), th.end()), th.end());
  }

  const int nt = static_cast<int>(th.size());
  out.thresholds.resize(nt);
  out.area.resize(nt);
  out.length.resize(nt);
  out.ratio.resize(nt);
  for (int q = 0; q < nt; ++q) {
    const Real t = th[q];
    Real A = 0, L = 0;
    for (int f : F.faces) {
      const auto p = layout_triangle(S.tri_len(f, 0), S.tri_len(f, 1), S.tri_len(f, 2));
      const Real val[3] = {psi[S.tris(f, 0)], psi[S.tris(f, 1)], psi[S.tris(f, 2)]};
      Real a, l;
      face_level_stats(p, val, t, S.face_area[f], &a, &l);
      A += a;
      L += l;
    }
    out.thresholds[q] = t;
    out.area[q] = A;
    out.length[q] = L;
    out.ratio[q] = (A > 1e-14) ? L / A : 0;
  }
  return out;
}

namespace {

Real trapezoid(const VecX& t, const VecX& y) {
  Real total = 0;
  for (int i = 1; i < t.size(); ++i) total += (y[i] + y[i - 1]) / 2 * (t[i] - t[i - 1]);
  return total;
}

} // namespace

Real SweepProfile::cavalieri_integral() const {
  if (thresholds.size() == 0) return 0;
  Real total = trapezoid(thresholds, area);
  // Closures: A(0) is the full area, A(max) = 0.
  total += (total_area + area[0]) / 2 * thresholds[0];
  total += area[area.size() - 1] / 2 * std::max(max_psi - thresholds[thresholds.size() - 1], Real(0));
  return total;
}

Real SweepProfile::coarea_integral() const {
  if (thresholds.size() == 0) return 0;
  Real total = trapezoid(thresholds, length);
  // L(0) is unavailable (the level set degenerates into the boundary); hold
  // the first sample. The top closes linearly to zero.
  total += length[0] * thresholds[0];
  total += length[length.size() - 1] / 2 *
           std::max(max_psi - thresholds[thresholds.size() - 1], Real(0));
  return total;
}

Real mass_in(const Subsurface& F, const Subsurface& region, const SpectralResult* pre) {
  if (region.parent != F.parent) throw DisjointRegion("region has a different parent surface");
  SpectralResult local;
  if (!pre) {
    local = lambda0(F);
    pre = &local;
  }
  const auto& S = *F.parent;
  const VecX& phi = pre->ground_state;
  Real total = 0;
  Eigen::Matrix3d Kl, Ml;
  for (int f : F.faces) {
    if (!region.face_mask[f]) continue;
    local_matrices(S, f, Kl, Ml);
    Vec3 v(phi[S.tris(f, 0)], phi[S.tris(f, 1)], phi[S.tris(f, 2)]);
    total += v.dot(Ml * v);
  }
  return total;
}

Extrapolated extrapolate_lambda(const VecX& raw) {
  Extrapolated out;
  out.raw = raw;
  const int n = static_cast<int>(raw.size());
  if (n < 3) {
    out.value = raw[n - 1];
    out.error_bar = (n >= 2) ? std::abs(raw[n - 1] - raw[n - 2]) : 0;
    return out;
  }
  const Real l0 = raw[n - 3], l1 = raw[n - 2], l2 = raw[n - 1];
  const Real d1 = l1 - l0, d2 = l2 - l1;
  const Real den = d2 - d1;
  if (std::abs(den) < 1e-300) {
    out.value = l2;
    out.error_bar = std::abs(d2);
    return out;
  }
  out.value = l2 - d2 * d2 / den;
  out.error_bar = std::max(std::abs(l2 - out.value) / 2, std::abs(out.value) * 1e-12);
  return out;
}

} // namespace sgl
