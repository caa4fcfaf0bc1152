#include "sgl/geodesics.hpp"

#include "sgl/covers.hpp"
#include "sgl/homology.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <queue>

namespace sgl {

namespace {

EdgeGraph build_graph(const MetricSurface& S, const std::vector<char>* face_mask) {
  EdgeGraph g;
  g.nv = S.nv;
  const auto& topo = S.topo;
  std::vector<std::vector<EdgeGraph::Arc>> adj(S.nv);
  for (int e = 0; e < topo.n_edges(); ++e) {
    if (face_mask) {
      bool in = false;
      for (int f : topo.edge_faces[e])
        if (f >= 0 && (*face_mask)[f]) in = true;
      if (!in) continue;
    }
    const int a = topo.edges(e, 0), b = topo.edges(e, 1);
    const Real len = S.edge_length(e);
    adj[a].push_back({b, e, len});
    adj[b].push_back({a, e, len});
  }
  g.offsets.resize(S.nv + 1, 0);
  for (int v = 0; v < S.nv; ++v) g.offsets[v + 1] = g.offsets[v] + static_cast<int>(adj[v].size());
  g.arcs.resize(g.offsets.back());
  for (int v = 0; v < S.nv; ++v)
    std::copy(adj[v].begin(), adj[v].end(), g.arcs.begin() + g.offsets[v]);
  return g;
}

} // namespace

EdgeGraph edge_graph(const MetricSurface& S) { return build_graph(S, nullptr); }

EdgeGraph edge_graph(const MetricSurface& S, const std::vector<char>& face_mask) {
  // Edges of masked faces only; lengths still from the canonical face.
  return build_graph(S, &face_mask);
}

DijkstraResult dijkstra(const EdgeGraph& g, const std::vector<int>& sources, Real stop_radius) {
  DijkstraResult r;
  r.dist = VecX::Constant(g.nv, std::numeric_limits<Real>::infinity());
  r.parent.assign(g.nv, -1);
  r.parent_edge.assign(g.nv, -1);
  using Item = std::pair<Real, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (int s : sources) {
    r.dist[s] = 0;
    pq.push({0.0, s});
  }
  r.done.assign(g.nv, 0);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (r.done[v] || d > r.dist[v]) continue;
    if (d > stop_radius) break;
    r.done[v] = 1;
    r.settled.push_back(v);
    for (int i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      const auto& a = g.arcs[i];
      const Real nd = d + a.len;
      if (nd < r.dist[a.to]) {
        r.dist[a.to] = nd;
        r.parent[a.to] = v;
        r.parent_edge[a.to] = a.edge;
        pq.push({nd, a.to});
      }
    }
  }
  return r;
}

namespace {

std::vector<int> tree_path_to_root(const DijkstraResult& d, int v) {
  std::vector<int> p{v};
  while (d.parent[p.back()] >= 0) p.push_back(d.parent[p.back()]);
  return p;
}

} // namespace

namespace {

// Shortest-loop search over Z/2 homology classes.  With per_class, the best
// loop of every nonzero class is tracked (the pruning radius then follows the
// worst tracked class); otherwise only the global optimum matters.
std::vector<LoopResult> loop_search(const MetricSurface& S, bool per_class) {
  const auto& topo = S.topo;
  if (topo.chi > 0) throw PositiveChi("chi = " + std::to_string(topo.chi));
  if (!topo.boundary_loops.empty()) throw PositiveChi("systole search expects a closed surface");

  const auto cocycles = h1_cocycles_z2(topo);
  const int d = static_cast<int>(cocycles.size());
  if (d == 0 || d > 32) throw PositiveChi("unexpected H1 rank " + std::to_string(d));
  if (per_class && d > 8) per_class = false; // 2^d classes would defeat the pruning

  std::vector<std::uint32_t> ebits(topo.n_edges(), 0);
  for (int x = 0; x < d; ++x)
    for (int e = 0; e < topo.n_edges(); ++e)
      if (cocycles[x][e]) ebits[e] |= (1u << x);

  const EdgeGraph g = edge_graph(S);
  const std::uint32_t n_classes = per_class ? ((1u << d) - 1) : 1;
  std::vector<Real> best(n_classes + 1, std::numeric_limits<Real>::infinity());
  std::vector<LoopResult> loops(n_classes + 1);
  auto slot_of = [&](std::uint32_t cls) { return per_class ? cls : 1u; };

  std::vector<std::uint32_t> sigma(S.nv, 0);
  for (int root = 0; root < S.nv; ++root) {
    Real radius = 0;
    for (std::uint32_t c = 1; c <= n_classes; ++c) radius = std::max(radius, best[c]);
    radius = radius / 2 * (1 + 1e-12);
    DijkstraResult dj = dijkstra(g, {root}, radius);
    for (int v : dj.settled)
      sigma[v] = (dj.parent[v] >= 0) ? (sigma[dj.parent[v]] ^ ebits[dj.parent_edge[v]]) : 0;

    for (int v : dj.settled) {
      for (int i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
        const auto& arc = g.arcs[i];
        const int w = arc.to;
        if (w < v || !dj.done[w]) continue;
        if (dj.parent_edge[v] == arc.edge || dj.parent_edge[w] == arc.edge) continue;
        const std::uint32_t cls = sigma[v] ^ sigma[w] ^ ebits[arc.edge];
        if (cls == 0) continue;
        const std::uint32_t slot = slot_of(cls);
        if (dj.dist[v] + arc.len + dj.dist[w] >= best[slot]) continue;
        // Trim the shared tree prefix down to the LCA; the loop is then simple.
        auto pv = tree_path_to_root(dj, v), pw = tree_path_to_root(dj, w);
        while (pv.size() > 1 && pw.size() > 1 && pv[pv.size() - 2] == pw[pw.size() - 2]) {
          pv.pop_back();
          pw.pop_back();
        }
        const int lca = pv.back();
        const Real len = dj.dist[v] + arc.len + dj.dist[w] - 2 * dj.dist[lca];
        if (len >= best[slot]) continue;
        // Cycle runs lca..v, crosses the closing edge to w, then w..child-of-lca.
        std::vector<int> cycle(pv.rbegin(), pv.rend());
        for (size_t j = 0; j + 1 < pw.size(); ++j) cycle.push_back(pw[j]);
        best[slot] = len;
        LoopResult& out = loops[slot];
        out.vertices = std::move(cycle);
        out.length = len;
        out.certificate.kind = CertKind::HomologyNontrivial;
        out.certificate.h1_class.assign(d, 0);
        for (int x = 0; x < d; ++x) out.certificate.h1_class[x] = (cls >> x) & 1;
      }
    }
  }
  std::vector<LoopResult> found;
  for (std::uint32_t c = 1; c <= n_classes; ++c)
    if (best[c] < std::numeric_limits<Real>::infinity()) found.push_back(std::move(loops[c]));
  if (found.empty()) throw PositiveChi("no homologically nontrivial cycle found");
  std::sort(found.begin(), found.end(),
            [](const LoopResult& a, const LoopResult& b) { return a.length < b.length; });
  return found;
}

} // namespace

LoopResult systole_upper(const MetricSurface& S) { return loop_search(S, false).front(); }

std::vector<LoopResult> shortest_loops_by_class(const MetricSurface& S) {
  return loop_search(S, true);
}

Real flat_torus_systole_oracle(const Vec2& a, const Vec2& b) {
  Real best = std::numeric_limits<Real>::infinity();
  for (int m = -10; m <= 10; ++m)
    for (int n = -10; n <= 10; ++n) {
      if (m == 0 && n == 0) continue;
      best = std::min(best, (m * a + n * b).norm());
    }
  return best;
}

std::vector<Real> fuchsian_lengths(const MetricSurface& S, int word_length_cap) {
  if (S.model != "hyperbolic_octagon")
    throw InvalidModel("fuchsian_lengths needs a hyperbolic_octagon surface");
  if (word_length_cap < 1) throw CapTooSmall("word cap must be >= 1");

  using Cx = std::complex<Real>;
  using M2 = Eigen::Matrix2cd;

  // Side pairing of opposite octagon sides: hyperbolic translation through
  // the side midpoints, translation length twice the apothem.
  const Real cot8 = 1.0 / std::tan(kPi / 8);
  const Real coshR = cot8 * cot8;
  const Real sinhR = std::sqrt(coshR * coshR - 1);
  const Real half_side = std::asinh(sinhR * std::sin(kPi / 8));
  const Real apothem = std::acosh(coshR / std::cosh(half_side));
  const Real t = 2 * apothem;

  std::vector<M2> gens;
  for (int k = 0; k < 4; ++k) {
    const Real phi = (k + 0.5) * kPi / 4 + kPi;
    M2 g;
    g << Cx(std::cosh(t / 2), 0), std::polar(std::sinh(t / 2), phi),
        std::polar(std::sinh(t / 2), -phi), Cx(std::cosh(t / 2), 0);
    gens.push_back(g);
    gens.push_back(g.inverse());
  }

  std::map<long long, Real> lengths; // keyed by rounded trace
  std::function<void(const M2&, int, int)> walk = [&](const M2& w, int last, int depth) {
    if (depth > 0) {
      const Real tr = std::abs(w.trace().real());
      if (tr > 2 + 1e-12) {
        const long long key = llround(tr * 1e9);
        if (!lengths.count(key)) lengths[key] = 2 * std::acosh(tr / 2);
      }
    }
    if (depth == word_length_cap) return;
    for (int i = 0; i < 8; ++i) {
      if (last >= 0 && (i ^ 1) == last) continue; // no immediate backtracking
      walk(w * gens[i], i, depth + 1);
    }
  };
  walk(M2::Identity(), -1, 0);

  if (lengths.empty()) throw CapTooSmall("no hyperbolic element below the cap");
  std::vector<Real> out;
  out.reserve(lengths.size());
  for (auto& [k, v] : lengths) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

LoopResult shortest_in_homotopy_class(const Subsurface& F) {
  if (F.topo_class != TopoClass::Annulus)
    throw WrongClass("need an Annulus, got " + std::string(to_string(F.topo_class)));

  // Work on the standalone annulus mesh.
  Submesh sm = submesh(F);
  const MetricSurface& A = sm.surface;
  const auto& loops = A.topo.boundary_loops;
  if (loops.size() != 2) throw WrongClass("annulus must have two boundary loops");

  // Spanning cut arc: shortest path from loop 0 to loop 1 with interior
  // intermediates (boundary vertices are not expanded).
  std::vector<char> is_bnd(A.nv, 0);
  for (const auto& l : loops)
    for (int v : l) is_bnd[v] = 1;
  const EdgeGraph g = edge_graph(A);
  std::vector<char> target(A.nv, 0);
  for (int v : loops[1]) target[v] = 1;

  std::vector<int> arc;
  {
    VecX dist = VecX::Constant(A.nv, std::numeric_limits<Real>::infinity());
    std::vector<int> parent(A.nv, -1);
    using Item = std::pair<Real, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (int s : loops[0]) {
      dist[s] = 0;
      pq.push({0.0, s});
    }
    int hit = -1;
    std::vector<char> done(A.nv, 0);
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (done[v] || d > dist[v]) continue;
      done[v] = 1;
      if (target[v]) {
        hit = v;
        break;
      }
      if (is_bnd[v] && d > 0) continue; // settle but do not expand boundary intermediates
      for (int i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
        const auto& a = g.arcs[i];
        if (d + a.len < dist[a.to]) {
          dist[a.to] = d + a.len;
          parent[a.to] = v;
          pq.push({dist[a.to], a.to});
        }
      }
    }
    if (hit < 0) throw WrongClass("no spanning arc between the boundary loops");
    for (int v = hit; v >= 0; v = parent[v]) arc.push_back(v);
  }

  // Cut along the arc, chain 3 sheets, and connect matching interface copies.
  const CutSides cs = cut_sides(A, arc, /*closed_loop=*/false);
  const int m = static_cast<int>(arc.size());
  const int kSheets = 3;
  const int nf = A.n_faces();
  const int strip_nv = kSheets * A.nv + (kSheets + 1) * m;
  auto interface_id = [&](int t, int i) { return kSheets * A.nv + t * m + i; };

  // Strip graph assembled directly from face corners.
  std::vector<std::array<int, 3>> strip_tris(kSheets * nf);
  for (int j = 0; j < kSheets; ++j)
    for (int f = 0; f < nf; ++f)
      for (int c = 0; c < 3; ++c) {
        const int v = A.tris(f, c);
        const int pi = cs.path_index[v];
        if (pi < 0)
          strip_tris[j * nf + f][c] = j * A.nv + v;
        else
          strip_tris[j * nf + f][c] = interface_id(cs.side[f] == 0 ? j : j + 1, pi);
      }

  // Adjacency with lengths straight from tri_len.
  std::vector<std::vector<std::pair<int, Real>>> adj(strip_nv);
  auto add_edge = [&](int a, int b, Real len) {
    adj[a].push_back({b, len});
    adj[b].push_back({a, len});
  };
  for (int j = 0; j < kSheets; ++j)
    for (int f = 0; f < nf; ++f)
      for (int k = 0; k < 3; ++k) {
        const int a = strip_tris[j * nf + f][(k + 1) % 3], b = strip_tris[j * nf + f][(k + 2) % 3];
        add_edge(a, b, A.tri_len(f, k)); // parallel duplicates are harmless for Dijkstra
      }

  LoopResult out;
  out.length = std::numeric_limits<Real>::infinity();
  std::vector<int> best_path;
  for (int i = 0; i < m; ++i) {
    const int src = interface_id(1, i), dst = interface_id(2, i);
    VecX dist = VecX::Constant(strip_nv, std::numeric_limits<Real>::infinity());
    std::vector<int> parent(strip_nv, -1);
    using Item = std::pair<Real, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[src] = 0;
    pq.push({0.0, src});
    std::vector<char> done(strip_nv, 0);
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (done[v] || d > dist[v]) continue;
      done[v] = 1;
      if (v == dst) break;
      if (d >= out.length) break;
      for (auto [w, len] : adj[v]) {
        if (d + len < dist[w]) {
          dist[w] = d + len;
          parent[w] = v;
          pq.push({dist[w], w});
        }
      }
    }
    if (dist[dst] < out.length) {
      out.length = dist[dst];
      best_path.clear();
      for (int v = dst; v >= 0; v = parent[v]) best_path.push_back(v);
    }
  }
  if (best_path.empty()) throw WrongClass("no core-homotopic loop found");

  // Map strip vertices back to parent vertices; drop the duplicated endpoint.
  out.vertices.clear();
  bool touched_outer = false;
  for (size_t i = 0; i + 1 < best_path.size(); ++i) {
    const int v = best_path[i];
    int av;
    if (v >= kSheets * A.nv) {
      const int t = (v - kSheets * A.nv) / m;
      const int idx = (v - kSheets * A.nv) % m;
      av = arc[idx];
      if (t == 0 || t == kSheets) touched_outer = true;
    } else {
      av = v % A.nv;
    }
    out.vertices.push_back(sm.parent_vertex[av]);
  }
  out.certificate.kind = CertKind::BoundaryParallel;
  if (touched_outer) {
    out.certificate.kind = CertKind::Unknown;
    out.note = "optimum touched the outermost unrolled sheets";
  }
  return out;
}

Real inradius(const Subsurface& F) {
  std::vector<int> sources;
  for (int v : F.vertices)
    if (F.boundary_vertex[v]) sources.push_back(v);
  if (sources.empty()) throw NoBoundary("inradius needs a boundary");
  const EdgeGraph g = edge_graph(*F.parent, F.face_mask);
  const DijkstraResult d = dijkstra(g, sources);
  Real best = 0;
  for (int v : F.vertices)
    if (d.dist[v] < std::numeric_limits<Real>::infinity()) best = std::max(best, d.dist[v]);
  return best;
}

Subsurface metric_ball(const SurfacePtr& S, int center, Real r) {
  if (!(r > 0)) throw EmptySelection("ball radius must be positive");
  const EdgeGraph g = edge_graph(*S);
  const DijkstraResult d = dijkstra(g, {center});
  std::vector<char> mask(S->n_faces(), 0);
  for (int f = 0; f < S->n_faces(); ++f) {
    const Real bd = (d.dist[S->tris(f, 0)] + d.dist[S->tris(f, 1)] + d.dist[S->tris(f, 2)]) / 3;
    mask[f] = (bd <= r) ? 1 : 0;
  }
  return extract_subsurface(S, mask);
}

Subsurface collar(const SurfacePtr& S, const LoopResult& core, Real half_width) {
  if (!(half_width > 0)) throw EmptySelection("half width must be positive");
  std::vector<char> seen(S->nv, 0);
  for (int v : core.vertices) {
    if (seen[v]) throw NonSimpleCore("core repeats vertex " + std::to_string(v));
    seen[v] = 1;
  }
  const EdgeGraph g = edge_graph(*S);
  const DijkstraResult d = dijkstra(g, core.vertices);
  std::vector<char> mask(S->n_faces(), 0);
  for (int f = 0; f < S->n_faces(); ++f) {
    const Real bd = (d.dist[S->tris(f, 0)] + d.dist[S->tris(f, 1)] + d.dist[S->tris(f, 2)]) / 3;
    mask[f] = (bd <= half_width) ? 1 : 0;
  }
  return extract_subsurface(S, mask);
}

Real approx_diameter(const MetricSurface& S) {
  const EdgeGraph g = edge_graph(S);
  DijkstraResult d0 = dijkstra(g, {0});
  int far = 0;
  for (int v = 0; v < S.nv; ++v)
    if (d0.dist[v] < std::numeric_limits<Real>::infinity() && d0.dist[v] > d0.dist[far]) far = v;
  DijkstraResult d1 = dijkstra(g, {far});
  Real best = 0;
  for (int v = 0; v < S.nv; ++v)
    if (d1.dist[v] < std::numeric_limits<Real>::infinity()) best = std::max(best, d1.dist[v]);
  return best;
}

} // namespace sgl
