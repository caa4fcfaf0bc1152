#include "sgl/homology.hpp"

#include <queue>
#include <unordered_map>

namespace sgl {

namespace {

inline std::uint64_t key_of(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::unordered_map<std::uint64_t, int> edge_index(const SurfaceTopology& topo) {
  std::unordered_map<std::uint64_t, int> m;
  m.reserve(topo.n_edges());
  for (int e = 0; e < topo.n_edges(); ++e) m.emplace(key_of(topo.edges(e, 0), topo.edges(e, 1)), e);
  return m;
}

} // namespace

std::vector<char> cycle_edge_mask(const SurfaceTopology& topo, const MatXi&,
                                  const std::vector<int>& cycle) {
  auto idx = edge_index(topo);
  std::vector<char> mask(topo.n_edges(), 0);
  const int m = static_cast<int>(cycle.size());
  for (int i = 0; i < m; ++i) {
    const int a = cycle[i], b = cycle[(i + 1) % m];
    auto it = idx.find(key_of(a, b));
    if (it == idx.end()) throw Error("Internal", "cycle step is not a mesh edge");
    mask[it->second] ^= 1;
  }
  return mask;
}

bool cycle_null_z2(const SurfaceTopology& topo, const std::vector<char>& cycle_edges,
                   std::vector<int>* region) {
  const int nf = static_cast<int>(topo.face_edges.size());
  std::vector<int> label(nf, -1);
  bool has_outside_anchor = false;

  for (int seed = 0; seed < nf; ++seed) {
    if (label[seed] >= 0) continue;
    // Anchor the component at 0; boundary edges constrain against outside=0.
    label[seed] = 0;
    std::queue<int> q;
    q.push(seed);
    std::vector<int> comp{seed};
    bool anchored = false;
    int anchor_flip = -1; // required flip so boundary constraints hold
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      for (int k = 0; k < 3; ++k) {
        const int e = topo.face_edges[f][k];
        const int z = cycle_edges[e] ? 1 : 0;
        const auto& ef = topo.edge_faces[e];
        const int g = (ef[0] == f) ? ef[1] : ef[0];
        if (g < 0) {
          // x_f must equal z against the outside.
          const int want = z;
          const int flip = label[f] ^ want;
          if (!anchored) {
            anchored = true;
            anchor_flip = flip;
          } else if (anchor_flip != flip) {
            return false;
          }
          continue;
        }
        const int want = label[f] ^ z;
        if (label[g] < 0) {
          label[g] = want;
          comp.push_back(g);
          q.push(g);
        } else if (label[g] != want) {
          return false;
        }
      }
    }
    if (anchored) {
      has_outside_anchor = true;
      if (anchor_flip == 1)
        for (int f : comp) label[f] ^= 1;
    }
    // Closed components: either labelling works, keep the smaller side as region.
    if (!anchored && region) {
      int ones = 0;
      for (int f : comp)
        if (label[f]) ++ones;
      if (2 * ones > static_cast<int>(comp.size()))
        for (int f : comp) label[f] ^= 1;
    }
  }
  (void)has_outside_anchor;
  if (region) {
    region->clear();
    for (int f = 0; f < nf; ++f)
      if (label[f] == 1) region->push_back(f);
  }
  return true;
}

bool cycle_null_int(const SurfaceTopology& topo, const MatXi& tris,
                    const std::vector<int>& cycle) {
  if (!topo.orientable) throw Error("Internal", "integer homology test needs orientable complex");
  const int nf = static_cast<int>(tris.rows());
  const int ne = topo.n_edges();

  // Coherent orientation flips.
  std::vector<int> flip(nf, -1);
  auto sign_in = [&](int f, int e) {
    const int a = topo.edges(e, 0), b = topo.edges(e, 1);
    int s = 0;
    for (int k = 0; k < 3; ++k) {
      const int u = tris(f, k), v = tris(f, (k + 1) % 3);
      if (u == a && v == b) s = +1;
      if (u == b && v == a) s = -1;
    }
    return flip[f] ? -s : s;
  };
  for (int seed = 0; seed < nf; ++seed) {
    if (flip[seed] >= 0) continue;
    flip[seed] = 0;
    std::queue<int> q;
    q.push(seed);
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      for (int k = 0; k < 3; ++k) {
        const int e = topo.face_edges[f][k];
        const auto& ef = topo.edge_faces[e];
        const int g = (ef[0] == f) ? ef[1] : ef[0];
        if (g < 0 || flip[g] >= 0) continue;
        flip[g] = 0;
        if (sign_in(f, e) == sign_in(g, e)) flip[g] = 1;
        q.push(g);
      }
    }
  }

  // Signed edge multiplicities of the directed cycle.
  auto idx = edge_index(topo);
  std::vector<long long> z(ne, 0);
  const int m = static_cast<int>(cycle.size());
  for (int i = 0; i < m; ++i) {
    const int a = cycle[i], b = cycle[(i + 1) % m];
    auto it = idx.find(key_of(a, b));
    if (it == idx.end()) throw Error("Internal", "cycle step is not a mesh edge");
    z[it->second] += (a < b) ? +1 : -1;
  }

  // Solve sum_f x_f * sign(f,e) = z_e by propagation.
  std::vector<long long> x(nf);
  std::vector<char> have(nf, 0);
  for (int seed = 0; seed < nf; ++seed) {
    if (have[seed]) continue;
    have[seed] = 1;
    x[seed] = 0;
    std::queue<int> q;
    q.push(seed);
    std::vector<int> comp{seed};
    bool anchored = false;
    long long shift = 0;
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      for (int k = 0; k < 3; ++k) {
        const int e = topo.face_edges[f][k];
        const auto& ef = topo.edge_faces[e];
        const int g = (ef[0] == f) ? ef[1] : ef[0];
        const int sf = sign_in(f, e);
        if (g < 0) {
          // x_f * sf = z_e against the outside.
          const long long need = sf * z[e]; // x_f required value
          if (!anchored) {
            anchored = true;
            shift = need - x[f];
          } else if (x[f] + shift != need) {
            return false;
          }
          continue;
        }
        const int sg = sign_in(g, e);
        // sf*x_f + sg*x_g = z_e  =>  x_g = (z_e - sf*x_f)/sg with sg = +-1
        const long long want = sg * (z[e] - sf * x[f]);
        if (!have[g]) {
          have[g] = 1;
          x[g] = want;
          comp.push_back(g);
          q.push(g);
        } else if (x[g] != want) {
          return false;
        }
      }
    }
    (void)comp;
  }
  return true;
}

std::vector<std::vector<char>> h1_cocycles_z2(const SurfaceTopology& topo) {
  const int nf = static_cast<int>(topo.face_edges.size());
  const int ne = topo.n_edges();

  // Vertex spanning forest.
  std::vector<char> in_tree(ne, 0);
  {
    std::unordered_map<int, std::vector<std::pair<int, int>>> adj;
    for (int e = 0; e < ne; ++e) {
      adj[topo.edges(e, 0)].push_back({topo.edges(e, 1), e});
      adj[topo.edges(e, 1)].push_back({topo.edges(e, 0), e});
    }
    std::unordered_map<int, char> seen;
    for (auto& [root, _] : adj) {
      if (seen.count(root)) continue;
      seen[root] = 1;
      std::queue<int> q;
      q.push(root);
      while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (auto [w, e] : adj[v]) {
          if (seen.count(w)) continue;
          seen[w] = 1;
          in_tree[e] = 1;
          q.push(w);
        }
      }
    }
  }

  // Dual spanning forest over remaining interior edges; remember parents.
  std::vector<int> dual_parent(nf, -1), dual_via(nf, -1);
  std::vector<char> in_cotree(ne, 0), dual_seen(nf, 0);
  for (int seed = 0; seed < nf; ++seed) {
    if (dual_seen[seed]) continue;
    dual_seen[seed] = 1;
    std::queue<int> q;
    q.push(seed);
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      for (int k = 0; k < 3; ++k) {
        const int e = topo.face_edges[f][k];
        if (in_tree[e] || topo.is_boundary_edge(e)) continue;
        const auto& ef = topo.edge_faces[e];
        const int g = (ef[0] == f) ? ef[1] : ef[0];
        if (dual_seen[g]) continue;
        dual_seen[g] = 1;
        dual_parent[g] = f;
        dual_via[g] = e;
        in_cotree[e] = 1;
        q.push(g);
      }
    }
  }

  auto dual_path_mask = [&](int f, std::vector<char>& mask) {
    while (dual_parent[f] >= 0) {
      mask[dual_via[f]] ^= 1;
      f = dual_parent[f];
    }
  };

  std::vector<std::vector<char>> cocycles;
  for (int e = 0; e < ne; ++e) {
    if (in_tree[e] || in_cotree[e] || topo.is_boundary_edge(e)) continue;
    std::vector<char> mask(ne, 0);
    mask[e] = 1;
    // Close the dual loop through the cotree: XOR of the two root paths.
    dual_path_mask(topo.edge_faces[e][0], mask);
    dual_path_mask(topo.edge_faces[e][1], mask);
    cocycles.push_back(std::move(mask));
  }
  return cocycles;
}

int z2_pairing(const std::vector<char>& cycle_edges, const std::vector<char>& cocycle) {
  int s = 0;
  for (size_t e = 0; e < cycle_edges.size(); ++e)
    if (cycle_edges[e] && cocycle[e]) s ^= 1;
  return s;
}

} // namespace sgl
