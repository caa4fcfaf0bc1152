#include "sgl/covers.hpp"

#include "sgl/homology.hpp"

#include <algorithm>
#include <queue>

namespace sgl {

CutSides cut_sides(const MetricSurface& S, const std::vector<int>& path, bool closed_loop) {
  const int m = static_cast<int>(path.size());
  if (m < 2 || (closed_loop && m < 3)) throw NonSimpleLoop("path too short");

  CutSides out;
  out.path_index.assign(S.nv, -1);
  for (int i = 0; i < m; ++i) {
    if (out.path_index[path[i]] >= 0) throw NonSimpleLoop("repeated vertex on path");
    out.path_index[path[i]] = i;
  }

  const auto& topo = S.topo;
  std::vector<std::vector<int>> v_edges(S.nv);
  for (int e = 0; e < topo.n_edges(); ++e) {
    v_edges[topo.edges(e, 0)].push_back(e);
    v_edges[topo.edges(e, 1)].push_back(e);
  }
  std::vector<char> is_path_edge(topo.n_edges(), 0);
  const int n_steps = closed_loop ? m : m - 1;
  for (int i = 0; i < n_steps; ++i) {
    const int a = path[i], b = path[(i + 1) % m];
    int found = -1;
    for (int e : v_edges[a]) {
      const int u = topo.edges(e, 0), v = topo.edges(e, 1);
      if ((u == a && v == b) || (u == b && v == a)) {
        found = e;
        break;
      }
    }
    if (found < 0) throw NonSimpleLoop("path step is not a mesh edge");
    if (closed_loop && topo.is_boundary_edge(found))
      throw NonSimpleLoop("cut loop must be interior");
    is_path_edge[found] = 1;
  }

  // Faces touching the path.
  const int nf = S.n_faces();
  out.side.assign(nf, -1);
  std::vector<char> touched(nf, 0);
  for (int f = 0; f < nf; ++f)
    for (int k = 0; k < 3; ++k)
      if (out.path_index[S.tris(f, k)] >= 0) touched[f] = 1;

  // Propagate sides: equal across non-path edges incident to a path vertex,
  // flipped across path edges.
  for (int seed = 0; seed < nf; ++seed) {
    if (!touched[seed] || out.side[seed] >= 0) continue;
    out.side[seed] = 0;
    std::queue<int> q;
    q.push(seed);
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      for (int k = 0; k < 3; ++k) {
        const int e = topo.face_edges[f][k];
        const auto& ef = topo.edge_faces[e];
        const int g = (ef[0] == f) ? ef[1] : ef[0];
        if (g < 0 || !touched[g]) continue;
        const int a = topo.edges(e, 0), b = topo.edges(e, 1);
        int want;
        if (is_path_edge[e]) {
          want = 1 - out.side[f];
        } else if (out.path_index[a] >= 0 || out.path_index[b] >= 0) {
          want = out.side[f];
        } else {
          continue;
        }
        if (out.side[g] < 0) {
          out.side[g] = want;
          q.push(g);
        } else if (out.side[g] != want) {
          throw OneSidedLoop("no consistent two-sided assignment along the cut");
        }
      }
    }
  }
  return out;
}

MetricSurface cyclic_cover(const MetricSurface& S, const std::vector<int>& cut_loop, int sheets,
                           CoverMode mode) {
  if (sheets < 1) throw NonSimpleLoop("need at least one sheet");
  const int m = static_cast<int>(cut_loop.size());

  const CutSides cs = cut_sides(S, cut_loop, /*closed_loop=*/true);

  // A simple closed curve on a closed surface separates iff it is
  // null-homologous over Z/2.
  const auto mask = cycle_edge_mask(S.topo, S.tris, cut_loop);
  if (cycle_null_z2(S.topo, mask)) throw SeparatingLoop("cut loop separates the surface");

  const int k = sheets;
  const int n_interfaces = (mode == CoverMode::Closed) ? k : k + 1;
  const int nf = S.n_faces();

  MetricSurface out;
  out.nv = k * S.nv + n_interfaces * m;
  out.tris.resize(k * nf, 3);
  out.tri_len.resize(k * nf, 3);
  out.backend = S.backend;
  if (S.backend == MetricBackend::Chart) {
    out.corner_uv.resize(k * nf, 6);
    out.metric = S.metric;
    if (S.corner_factor.rows() == S.tris.rows()) out.corner_factor.resize(k * nf, 3);
  }

  auto interface_id = [&](int t, int i) { return k * S.nv + t * m + i; };
  for (int j = 0; j < k; ++j) {
    for (int f = 0; f < nf; ++f) {
      const int fo = j * nf + f;
      for (int c = 0; c < 3; ++c) {
        const int v = S.tris(f, c);
        const int pi = cs.path_index[v];
        if (pi < 0) {
          out.tris(fo, c) = j * S.nv + v;
        } else {
          const int s = cs.side[f];
          if (s < 0) throw Error("Internal", "face on path without side");
          int t = (s == 0) ? j : j + 1;
          if (mode == CoverMode::Closed) t %= k;
          out.tris(fo, c) = interface_id(t, pi);
        }
      }
      out.tri_len.row(fo) = S.tri_len.row(f);
      if (S.backend == MetricBackend::Chart) {
        out.corner_uv.row(fo) = S.corner_uv.row(f);
        if (out.corner_factor.rows() > 0 && S.corner_factor.rows() == S.tris.rows())
          out.corner_factor.row(fo) = S.corner_factor.row(f);
      }
    }
  }
  if (S.curvature) {
    FaceScalarFn parent = S.curvature;
    out.curvature = [parent, nf](int f) { return parent(f % nf); };
  }
  out.model = S.model + ":cover";
  out.finalize();
  return out;
}

ExhaustionFamily build_exhaustion(const SurfacePtr& S, const std::vector<Real>& radii) {
  if (!S->has_radial()) throw NonIncreasingRadii("surface has no radial coordinate");
  if (radii.size() < 1) throw NonIncreasingRadii("need at least one radius");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw NonIncreasingRadii("radii must be strictly increasing");

  ExhaustionFamily fam;
  fam.surface = S;
  fam.radii = Eigen::Map<const VecX>(radii.data(), radii.size());
  for (Real r : radii) {
    std::vector<char> mask(S->n_faces(), 0), comp(S->n_faces(), 0);
    for (int f = 0; f < S->n_faces(); ++f) {
      mask[f] = (S->radial[f] <= r) ? 1 : 0;
      comp[f] = 1 - mask[f];
    }
    if (std::find(mask.begin(), mask.end(), 1) == mask.end() ||
        std::find(comp.begin(), comp.end(), 1) == comp.end())
      throw NonIncreasingRadii("radius " + std::to_string(r) + " leaves an empty piece");
    fam.truncations.push_back(extract_subsurface(S, mask));
    fam.complements.push_back(extract_subsurface(S, comp));
  }
  return fam;
}

} // namespace sgl
