#include "sgl/mesh.hpp"

#include "sgl/homology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace sgl {

namespace {

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Direction of edge {u,v} inside face f under an optional logical flip:
// +1 if the (possibly flipped) face traverses min(u,v) -> max(u,v).
int edge_sign_in_face(const MatXi& tris, int f, int a, int b, bool flipped) {
  int s = 0;
  for (int k = 0; k < 3; ++k) {
    const int u = tris(f, k), v = tris(f, (k + 1) % 3);
    if (u == a && v == b) s = +1;
    if (u == b && v == a) s = -1;
  }
  if (s == 0) throw Error("Internal", "edge not in face");
  if (a > b) s = -s;
  return flipped ? -s : s;
}

} // namespace

SurfaceTopology build_topology(const MatXi& tris, int n_vertices) {
  SurfaceTopology topo;
  const int nf = static_cast<int>(tris.rows());

  std::unordered_map<std::uint64_t, int> edge_ids;
  edge_ids.reserve(nf * 2);
  std::vector<std::array<int, 2>> edge_faces;
  std::vector<std::pair<int, int>> edge_verts;
  topo.face_edges.resize(nf);
  topo.manifold = true;

  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      int a = tris(f, (k + 1) % 3), b = tris(f, (k + 2) % 3);
      if (a == b || a < 0 || b < 0 || a >= n_vertices || b >= n_vertices)
        throw DegenerateTriangle("bad vertex indices in face " + std::to_string(f));
      const auto key = edge_key(a, b);
      auto it = edge_ids.find(key);
      int e;
      if (it == edge_ids.end()) {
        e = static_cast<int>(edge_verts.size());
        edge_ids.emplace(key, e);
        edge_verts.emplace_back(std::min(a, b), std::max(a, b));
        edge_faces.push_back({f, -1});
      } else {
        e = it->second;
        if (edge_faces[e][1] >= 0) topo.manifold = false;
        else edge_faces[e][1] = f;
      }
      topo.face_edges[f][k] = e;
    }
  }

  const int ne = static_cast<int>(edge_verts.size());
  topo.edges.resize(ne, 2);
  for (int e = 0; e < ne; ++e) {
    topo.edges(e, 0) = edge_verts[e].first;
    topo.edges(e, 1) = edge_verts[e].second;
  }
  topo.edge_faces = std::move(edge_faces);

  // Used vertices and Euler characteristic.
  std::vector<char> used(n_vertices, 0);
  for (int f = 0; f < nf; ++f)
    for (int k = 0; k < 3; ++k) used[tris(f, k)] = 1;
  topo.n_vertices = static_cast<int>(std::count(used.begin(), used.end(), 1));
  topo.chi = topo.n_vertices - ne + nf;

  // Face components over shared edges.
  std::vector<int> comp(nf, -1);
  int nc = 0;
  for (int seed = 0; seed < nf; ++seed) {
    if (comp[seed] >= 0) continue;
    std::queue<int> q;
    q.push(seed);
    comp[seed] = nc;
    while (!q.empty()) {
      int f = q.front();
      q.pop();
      for (int k = 0; k < 3; ++k) {
        const auto& ef = topo.edge_faces[topo.face_edges[f][k]];
        for (int g : ef)
          if (g >= 0 && comp[g] < 0) {
            comp[g] = nc;
            q.push(g);
          }
      }
    }
    ++nc;
  }
  topo.n_components = nc;

  // Orientability by propagating logical flips.
  if (topo.manifold) {
    std::vector<int> flip(nf, -1);
    topo.orientable = true;
    for (int seed = 0; seed < nf && topo.orientable; ++seed) {
      if (flip[seed] >= 0) continue;
      flip[seed] = 0;
      std::queue<int> q;
      q.push(seed);
      while (!q.empty() && topo.orientable) {
        int f = q.front();
        q.pop();
        for (int k = 0; k < 3; ++k) {
          const int e = topo.face_edges[f][k];
          const auto& ef = topo.edge_faces[e];
          const int g = (ef[0] == f) ? ef[1] : ef[0];
          if (g < 0) continue;
          const int a = topo.edges(e, 0), b = topo.edges(e, 1);
          const int sf = edge_sign_in_face(tris, f, a, b, flip[f] != 0);
          // Coherent orientation needs opposite traversal in the neighbor.
          const int want = (sf == +1) ? -1 : +1;
          const int sg = edge_sign_in_face(tris, g, a, b, false);
          const int need_flip = (sg == want) ? 0 : 1;
          if (flip[g] < 0) {
            flip[g] = need_flip;
            q.push(g);
          } else if (flip[g] != need_flip) {
            topo.orientable = false;
            break;
          }
        }
      }
    }
  } else {
    topo.orientable = false;
  }

  // Boundary loops.
  topo.regular_boundary = true;
  std::unordered_map<int, std::vector<int>> bnd_at_vertex;
  std::vector<int> bnd_edges;
  for (int e = 0; e < ne; ++e) {
    if (topo.edge_faces[e][1] < 0) {
      bnd_edges.push_back(e);
      bnd_at_vertex[topo.edges(e, 0)].push_back(e);
      bnd_at_vertex[topo.edges(e, 1)].push_back(e);
    }
  }
  for (const auto& [v, es] : bnd_at_vertex)
    if (es.size() != 2) topo.regular_boundary = false;

  if (topo.regular_boundary) {
    std::vector<char> seen(ne, 0);
    for (int e0 : bnd_edges) {
      if (seen[e0]) continue;
      std::vector<int> loop;
      int v = topo.edges(e0, 0);
      int e = e0;
      while (true) {
        seen[e] = 1;
        loop.push_back(v);
        const int w = (topo.edges(e, 0) == v) ? topo.edges(e, 1) : topo.edges(e, 0);
        const auto& es = bnd_at_vertex[w];
        const int next = (es[0] == e) ? es[1] : es[0];
        v = w;
        e = next;
        if (e == e0) {
          break;
        }
      }
      topo.boundary_loops.push_back(std::move(loop));
    }
  }

  return topo;
}

Real heron_area(Real a, Real b, Real c) {
  const Real s = (a + b + c) / 2;
  const Real arg = s * (s - a) * (s - b) * (s - c);
  return std::sqrt(std::max(arg, Real(0)));
}

std::array<Vec2, 3> layout_triangle(Real l0, Real l1, Real l2) {
  const Real x = (l1 * l1 + l2 * l2 - l0 * l0) / (2 * l2);
  const Real y2 = l1 * l1 - x * x;
  if (!(l0 > 0 && l1 > 0 && l2 > 0) || y2 <= 0)
    throw DegenerateTriangle("edge lengths " + std::to_string(l0) + "," + std::to_string(l1) +
                             "," + std::to_string(l2));
  return {Vec2(0, 0), Vec2(l2, 0), Vec2(x, std::sqrt(y2))};
}

namespace {

// 3-point Gauss-Legendre on [0,1].
constexpr Real kGaussT[3] = {0.11270166537925831, 0.5, 0.88729833462074169};
constexpr Real kGaussW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Midpoint quadrature barycentrics (node k is the midpoint opposite corner k).
const Vec3 kMidBary[3] = {Vec3(0.0, 0.5, 0.5), Vec3(0.5, 0.0, 0.5), Vec3(0.5, 0.5, 0.0)};

} // namespace

Real MetricSurface::edge_length(int e) const {
  const int f = topo.edge_faces[e][0];
  for (int k = 0; k < 3; ++k)
    if (topo.face_edges[f][k] == e) return tri_len(f, k);
  throw Error("Internal", "edge/face mismatch");
}

void MetricSurface::finalize() {
  const int nf = n_faces();
  if (nf == 0) throw EmptySelection("surface has no faces");

  if (backend == MetricBackend::Chart) {
    if (!metric) throw Error("Internal", "chart backend without metric sampler");
    if (corner_uv.rows() != nf || corner_uv.cols() != 6)
      throw Error("Internal", "corner_uv must be F x 6");
    if (tri_len.rows() != nf) {
      tri_len.resize(nf, 3);
      for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
          const int i = (k + 1) % 3, j = (k + 2) % 3;
          const Vec2 d = corner(f, j) - corner(f, i);
          Real len = 0;
          for (int g = 0; g < 3; ++g) {
            Vec3 bary = Vec3::Zero();
            bary[i] = 1 - kGaussT[g];
            bary[j] = kGaussT[g];
            const Mat2 gm = metric_at(f, bary);
            len += kGaussW[g] * std::sqrt(std::max(d.dot(gm * d), Real(0)));
          }
          tri_len(f, k) = len;
        }
      }
    }
  }

  if (tri_len.rows() != nf || tri_len.cols() != 3)
    throw Error("Internal", "tri_len must be F x 3");
  for (int f = 0; f < nf; ++f) {
    const Real a = tri_len(f, 0), b = tri_len(f, 1), c = tri_len(f, 2);
    if (!(a > 0 && b > 0 && c > 0))
      throw DegenerateTriangle("nonpositive edge length in face " + std::to_string(f));
    if (a < b + c && b < a + c && c < a + b) continue;
    if (backend == MetricBackend::EdgeLengths)
      throw DegenerateTriangle("triangle inequality fails in face " + std::to_string(f));
    // Chart quadrature lengths of strongly anisotropic cells can overshoot
    // by O(h^2); clamp the longest edge so length-based algorithms stay sane.
    // Assembly never reads these (it integrates the metric directly).
    for (int k = 0; k < 3; ++k) {
      const Real other = tri_len(f, (k + 1) % 3) + tri_len(f, (k + 2) % 3);
      if (tri_len(f, k) >= other) tri_len(f, k) = other * (1 - 1e-9);
    }
  }

  face_area.resize(nf);
  if (backend == MetricBackend::EdgeLengths) {
    for (int f = 0; f < nf; ++f) {
      face_area[f] = heron_area(tri_len(f, 0), tri_len(f, 1), tri_len(f, 2));
      if (!(face_area[f] > 0)) throw DegenerateTriangle("zero area face " + std::to_string(f));
    }
  } else {
    for (int f = 0; f < nf; ++f) {
      const Vec2 p0 = corner(f, 0), p1 = corner(f, 1), p2 = corner(f, 2);
      const Real auv =
          std::abs((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y())) / 2;
      Real area = 0;
      for (int q = 0; q < 3; ++q) {
        const Mat2 g = metric_at(f, kMidBary[q]);
        const Real det = g.determinant();
        if (!(det > 0) || !(g(0, 0) > 0))
          throw DegenerateTriangle("metric not SPD in face " + std::to_string(f));
        area += auv / 3 * std::sqrt(det);
      }
      face_area[f] = area;
    }
  }

  topo = build_topology(tris, nv);
  if (!topo.manifold) throw Error("Internal", "non-manifold surface");
}

Mat2 MetricSurface::metric_at(int f, const Vec3& bary) const {
  const Vec2 uv = bary[0] * corner(f, 0) + bary[1] * corner(f, 1) + bary[2] * corner(f, 2);
  Mat2 g = metric(uv);
  if (corner_factor.rows() == tris.rows()) {
    const Real c = corner_factor(f, 0) * bary[0] + corner_factor(f, 1) * bary[1] +
                   corner_factor(f, 2) * bary[2];
    g *= c;
  }
  return g;
}

const char* to_string(TopoClass c) {
  switch (c) {
    case TopoClass::Disc: return "Disc";
    case TopoClass::Annulus: return "Annulus";
    case TopoClass::CrossCap: return "CrossCap";
    default: return "Other";
  }
}

std::vector<std::vector<int>> face_components(const MetricSurface& S,
                                              const std::vector<char>& face_mask) {
  const int nf = S.n_faces();
  std::vector<int> comp(nf, -1);
  std::vector<std::vector<int>> out;
  for (int seed = 0; seed < nf; ++seed) {
    if (!face_mask[seed] || comp[seed] >= 0) continue;
    std::vector<int> cur;
    std::queue<int> q;
    q.push(seed);
    comp[seed] = static_cast<int>(out.size());
    while (!q.empty()) {
      int f = q.front();
      q.pop();
      cur.push_back(f);
      for (int k = 0; k < 3; ++k) {
        const auto& ef = S.topo.edge_faces[S.topo.face_edges[f][k]];
        for (int g : ef)
          if (g >= 0 && face_mask[g] && comp[g] < 0) {
            comp[g] = static_cast<int>(out.size());
            q.push(g);
          }
      }
    }
    std::sort(cur.begin(), cur.end());
    out.push_back(std::move(cur));
  }
  return out;
}

Subsurface extract_subsurface(const SurfacePtr& S, const std::vector<char>& face_mask) {
  const int nf = S->n_faces();
  if (static_cast<int>(face_mask.size()) != nf) throw Error("Internal", "mask size mismatch");

  Subsurface F;
  F.parent = S;
  F.face_mask = face_mask;
  for (int f = 0; f < nf; ++f)
    if (face_mask[f]) F.faces.push_back(f);
  if (F.faces.empty()) throw EmptySelection("no faces selected");

  MatXi sub(static_cast<int>(F.faces.size()), 3);
  for (size_t i = 0; i < F.faces.size(); ++i) sub.row(static_cast<int>(i)) = S->tris.row(F.faces[i]);
  const SurfaceTopology topo = build_topology(sub, S->nv);

  std::vector<char> vert_used(S->nv, 0);
  for (int f : F.faces)
    for (int k = 0; k < 3; ++k) vert_used[S->tris(f, k)] = 1;
  for (int v = 0; v < S->nv; ++v)
    if (vert_used[v]) F.vertices.push_back(v);

  F.chi = topo.chi;
  F.connected = (topo.n_components == 1);
  F.orientable = topo.orientable;
  F.boundary_loops = topo.boundary_loops;

  F.area = 0;
  for (int f : F.faces) F.area += S->face_area[f];

  F.boundary_vertex.assign(S->nv, 0);
  F.boundary_length = 0;
  for (int e = 0; e < topo.n_edges(); ++e) {
    if (!topo.is_boundary_edge(e)) continue;
    F.boundary_vertex[topo.edges(e, 0)] = 1;
    F.boundary_vertex[topo.edges(e, 1)] = 1;
    const int fl = topo.edge_faces[e][0];
    for (int k = 0; k < 3; ++k)
      if (topo.face_edges[fl][k] == e) F.boundary_length += S->tri_len(F.faces[fl], k);
  }

  const int loops = static_cast<int>(F.boundary_loops.size());
  if (!topo.regular_boundary || !F.connected || loops == 0) {
    F.topo_class = TopoClass::Other;
  } else if (F.chi == 1 && loops == 1) {
    F.topo_class = TopoClass::Disc;
  } else if (F.chi == 0 && loops == 2 && F.orientable) {
    F.topo_class = TopoClass::Annulus;
  } else if (F.chi == 0 && loops == 1 && !F.orientable) {
    F.topo_class = TopoClass::CrossCap;
  } else {
    F.topo_class = TopoClass::Other;
  }
  return F;
}

Submesh submesh(const Subsurface& F) {
  const auto& S = *F.parent;
  Submesh out;
  std::vector<int> local(S.nv, -1);
  for (int v : F.vertices) {
    local[v] = static_cast<int>(out.parent_vertex.size());
    out.parent_vertex.push_back(v);
  }
  MetricSurface& M = out.surface;
  const int nf = static_cast<int>(F.faces.size());
  M.nv = static_cast<int>(out.parent_vertex.size());
  M.tris.resize(nf, 3);
  M.tri_len.resize(nf, 3);
  M.backend = S.backend;
  if (S.backend == MetricBackend::Chart) {
    M.corner_uv.resize(nf, 6);
    M.metric = S.metric;
    if (S.corner_factor.rows() == S.tris.rows()) M.corner_factor.resize(nf, 3);
  }
  for (int i = 0; i < nf; ++i) {
    const int f = F.faces[i];
    for (int k = 0; k < 3; ++k) M.tris(i, k) = local[S.tris(f, k)];
    M.tri_len.row(i) = S.tri_len.row(f);
    if (S.backend == MetricBackend::Chart) {
      M.corner_uv.row(i) = S.corner_uv.row(f);
      if (M.corner_factor.rows() == nf) M.corner_factor.row(i) = S.corner_factor.row(f);
    }
  }
  if (S.curvature) {
    std::vector<int> faces = F.faces;
    FaceScalarFn parent_curv = S.curvature;
    M.curvature = [parent_curv, faces](int i) { return parent_curv(faces[i]); };
  }
  if (S.has_radial()) {
    M.radial.resize(nf);
    for (int i = 0; i < nf; ++i) M.radial[i] = S.radial[F.faces[i]];
  }
  if (S.face_center.rows() == S.tris.rows()) {
    M.face_center.resize(nf, 2);
    for (int i = 0; i < nf; ++i) M.face_center.row(i) = S.face_center.row(F.faces[i]);
  }
  if (S.positions.rows() == S.nv) {
    M.positions.resize(M.nv, 3);
    for (int i = 0; i < M.nv; ++i) M.positions.row(i) = S.positions.row(out.parent_vertex[i]);
  }
  M.model = S.model;
  M.finalize();
  return out;
}

Subsurface extract_subsurface(const SurfacePtr& S, const std::function<bool(int)>& predicate) {
  std::vector<char> mask(S->n_faces(), 0);
  for (int f = 0; f < S->n_faces(); ++f) mask[f] = predicate(f) ? 1 : 0;
  return extract_subsurface(S, mask);
}

Subsurface whole_surface(const SurfacePtr& S) {
  return extract_subsurface(S, std::vector<char>(S->n_faces(), 1));
}

namespace {

// Any Z/2-nontrivial cycle inside the sub-complex, via tree-cotree leftovers.
std::vector<int> nontrivial_cycle_in(const MatXi& sub_tris, const SurfaceTopology& topo) {
  const int ne = topo.n_edges();
  // Vertex spanning forest.
  std::unordered_map<int, std::pair<int, int>> parent; // vertex -> (parent vertex, via edge)
  std::vector<char> in_tree(ne, 0);
  std::vector<char> seen_v;
  {
    std::unordered_map<int, std::vector<std::pair<int, int>>> adj; // v -> (w, e)
    for (int e = 0; e < ne; ++e) {
      adj[topo.edges(e, 0)].push_back({topo.edges(e, 1), e});
      adj[topo.edges(e, 1)].push_back({topo.edges(e, 0), e});
    }
    for (auto& [root, _] : adj) {
      if (parent.count(root)) continue;
      parent[root] = {-1, -1};
      std::queue<int> q;
      q.push(root);
      while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (auto [w, e] : adj[v]) {
          if (parent.count(w)) continue;
          parent[w] = {v, e};
          in_tree[e] = 1;
          q.push(w);
        }
      }
    }
  }
  // Dual spanning forest over non-tree interior edges.
  const int nfc = static_cast<int>(sub_tris.rows());
  std::vector<int> fcomp(nfc, -1);
  std::vector<char> in_cotree(ne, 0);
  for (int seed = 0; seed < nfc; ++seed) {
    if (fcomp[seed] >= 0) continue;
    fcomp[seed] = seed;
    std::queue<int> q;
    q.push(seed);
    while (!q.empty()) {
      int f = q.front();
      q.pop();
      for (int k = 0; k < 3; ++k) {
        const int e = topo.face_edges[f][k];
        if (in_tree[e] || topo.is_boundary_edge(e)) continue;
        const auto& ef = topo.edge_faces[e];
        const int g = (ef[0] == f) ? ef[1] : ef[0];
        if (fcomp[g] < 0) {
          fcomp[g] = seed;
          in_cotree[e] = 1;
          q.push(g);
        }
      }
    }
  }
  // Each leftover edge closes a candidate cycle through the vertex tree.
  auto tree_path_to_root = [&](int v) {
    std::vector<int> path{v};
    while (parent[path.back()].first >= 0) path.push_back(parent[path.back()].first);
    return path;
  };
  for (int e = 0; e < ne; ++e) {
    if (in_tree[e] || in_cotree[e] || topo.is_boundary_edge(e)) continue;
    const int a = topo.edges(e, 0), b = topo.edges(e, 1);
    auto pa = tree_path_to_root(a), pb = tree_path_to_root(b);
    // Strip the common suffix down to the LCA.
    while (pa.size() > 1 && pb.size() > 1 && pa[pa.size() - 2] == pb[pb.size() - 2]) {
      pa.pop_back();
      pb.pop_back();
    }
    if (pa.back() != pb.back()) continue; // different components, not a cycle
    std::vector<int> cycle(pa.begin(), pa.end());
    for (auto it = pb.rbegin() + 1; it != pb.rend(); ++it) cycle.push_back(*it);
    // cycle: a .. lca .. b, then close with edge (b,a)
    auto mask = cycle_edge_mask(topo, sub_tris, cycle);
    if (!cycle_null_z2(topo, mask)) return cycle;
  }
  return {};
}

} // namespace

Incompressibility classify_incompressible(const Subsurface& F) {
  if (F.topo_class != TopoClass::Annulus && F.topo_class != TopoClass::CrossCap)
    throw WrongClass("need Annulus or CrossCap, got " + std::string(to_string(F.topo_class)));

  std::vector<int> core;
  if (F.topo_class == TopoClass::Annulus) {
    core = F.boundary_loops[0];
  } else {
    MatXi sub(static_cast<int>(F.faces.size()), 3);
    for (size_t i = 0; i < F.faces.size(); ++i)
      sub.row(static_cast<int>(i)) = F.parent->tris.row(F.faces[i]);
    const SurfaceTopology sub_topo = build_topology(sub, F.parent->nv);
    core = nontrivial_cycle_in(sub, sub_topo);
    if (core.empty()) return Incompressibility::Unknown;
  }

  const auto& S = *F.parent;
  const auto mask = cycle_edge_mask(S.topo, S.tris, core);
  std::vector<int> region;
  if (!cycle_null_z2(S.topo, mask, &region)) return Incompressibility::Incompressible;
  if (S.topo.orientable && !cycle_null_int(S.topo, S.tris, core))
    return Incompressibility::Incompressible;

  if (!region.empty()) {
    std::vector<char> rmask(S.n_faces(), 0);
    for (int f : region) rmask[f] = 1;
    try {
      Subsurface R = extract_subsurface(F.parent, rmask);
      if (R.topo_class == TopoClass::Disc) return Incompressibility::Compressible;
    } catch (const Error&) {
    }
  }
  return Incompressibility::Unknown;
}

MetricSurface conformal_scale(const MetricSurface& S, const VecX& vertex_factor) {
  if (vertex_factor.size() != S.nv) throw NonPositiveFactor("factor size mismatch");
  if (vertex_factor.minCoeff() <= 0) throw NonPositiveFactor("factor must be positive");

  MetricSurface out = S;
  if (S.backend == MetricBackend::EdgeLengths) {
    for (int f = 0; f < S.n_faces(); ++f)
      for (int k = 0; k < 3; ++k) {
        const Real fu = vertex_factor[S.tris(f, (k + 1) % 3)];
        const Real fv = vertex_factor[S.tris(f, (k + 2) % 3)];
        out.tri_len(f, k) = S.tri_len(f, k) * (0.5 * (std::sqrt(fu) + std::sqrt(fv)));
      }
  } else {
    MatX cf(S.n_faces(), 3);
    for (int f = 0; f < S.n_faces(); ++f)
      for (int k = 0; k < 3; ++k) cf(f, k) = vertex_factor[S.tris(f, k)];
    if (S.corner_factor.rows() == S.tris.rows()) cf = cf.cwiseProduct(S.corner_factor);
    out.corner_factor = cf;
    out.tri_len.resize(0, 3); // recomputed from the scaled sampler
  }
  out.face_area = VecX();
  out.finalize();
  return out;
}

MetricSurface conformal_scale_faces(const MetricSurface& S, const VecX& face_factor) {
  if (face_factor.size() != S.n_faces()) throw NonPositiveFactor("factor size mismatch");
  if (face_factor.minCoeff() <= 0) throw NonPositiveFactor("factor must be positive");
  MetricSurface out = S;
  if (S.backend == MetricBackend::EdgeLengths) {
    for (int f = 0; f < S.n_faces(); ++f) out.tri_len.row(f) = S.tri_len.row(f) * std::sqrt(face_factor[f]);
  } else {
    MatX cf(S.n_faces(), 3);
    for (int f = 0; f < S.n_faces(); ++f) cf.row(f).setConstant(face_factor[f]);
    if (S.corner_factor.rows() == S.tris.rows()) cf = cf.cwiseProduct(S.corner_factor);
    out.corner_factor = cf;
    out.tri_len.resize(0, 3);
  }
  out.face_area = VecX();
  out.finalize();
  return out;
}

namespace {

// Corner angle of the geodesic comparison triangle of constant curvature
// kappa with the face's edge lengths (law of cosines, kappa -> 0 by series).
Real corner_angle(Real a, Real b, Real c, Real kappa) {
  const Real m = std::max({a, b, c});
  Real cosv;
  if (std::abs(kappa) * m * m < 1e-8) {
    cosv = (b * b + c * c - a * a) / (2 * b * c);
  } else {
    Real sna, snb, snc, csa, csb, csc;
    if (kappa < 0) {
      const Real s = std::sqrt(-kappa);
      sna = std::sinh(s * a), snb = std::sinh(s * b), snc = std::sinh(s * c);
      csa = std::cosh(s * a), csb = std::cosh(s * b), csc = std::cosh(s * c);
      cosv = (csb * csc - csa) / (snb * snc);
    } else {
      const Real s = std::sqrt(kappa);
      sna = std::sin(s * a), snb = std::sin(s * b), snc = std::sin(s * c);
      csa = std::cos(s * a), csb = std::cos(s * b), csc = std::cos(s * c);
      cosv = (csa - csb * csc) / (snb * snc);
    }
    (void)sna;
  }
  return std::acos(std::clamp(cosv, Real(-1), Real(1)));
}

} // namespace

Real gauss_bonnet_defect(const MetricSurface& S) {
  if (!S.has_curvature()) throw MissingCurvatureField("gauss_bonnet_defect needs curvature");
  Real total = 0;
  for (int f = 0; f < S.n_faces(); ++f) total += S.curvature(f) * S.face_area[f];

  // Boundary turning: pi minus the interior angle sum at each boundary
  // vertex, with geodesic comparison angles at the face curvature.
  std::vector<char> is_bnd(S.nv, 0);
  for (const auto& loop : S.topo.boundary_loops)
    for (int v : loop) is_bnd[v] = 1;
  VecX angle_sum = VecX::Zero(S.nv);
  for (int f = 0; f < S.n_faces(); ++f) {
    const Real kap = S.curvature(f);
    for (int k = 0; k < 3; ++k) {
      const int v = S.tris(f, k);
      if (!is_bnd[v]) continue;
      angle_sum[v] +=
          corner_angle(S.tri_len(f, k), S.tri_len(f, (k + 1) % 3), S.tri_len(f, (k + 2) % 3), kap);
    }
  }
  for (const auto& loop : S.topo.boundary_loops)
    for (int v : loop) total += kPi - angle_sum[v];

  return total - 2 * kPi * S.topo.chi;
}

} // namespace sgl
