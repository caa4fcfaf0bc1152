#pragma once

#include "sgl/mesh.hpp"

#include <limits>
#include <string>
#include <vector>

namespace sgl {

enum class CertKind { HomologyNontrivial, Contractible, BoundaryParallel, Unknown };

struct Certificate {
  CertKind kind = CertKind::Unknown;
  std::vector<int> h1_class; // Z/2 pairing bits against the cocycle basis
};

struct LoopResult {
  std::vector<int> vertices; // closed edge path, last connects back to first
  Real length = 0;
  Certificate certificate;
  std::string note;
};

/// Weighted vertex graph of the mesh edges.
struct EdgeGraph {
  int nv = 0;
  std::vector<int> offsets;
  struct Arc {
    int to;
    int edge;
    Real len;
  };
  std::vector<Arc> arcs;
};

EdgeGraph edge_graph(const MetricSurface& S);
EdgeGraph edge_graph(const MetricSurface& S, const std::vector<char>& face_mask);

struct DijkstraResult {
  VecX dist;
  std::vector<int> parent;      // predecessor vertex, -1 at sources
  std::vector<int> parent_edge; // edge id used to reach the vertex
  std::vector<int> settled;     // settle order
  std::vector<char> done;       // settled flags
};

DijkstraResult dijkstra(const EdgeGraph& g, const std::vector<int>& sources,
                        Real stop_radius = std::numeric_limits<Real>::infinity());

/// Shortest homologically nontrivial edge cycle on a closed surface with
/// chi <= 0; an upper bound for the mesh-geodesic systole.
LoopResult systole_upper(const MetricSurface& S);

/// Shortest loop found in every nonzero Z/2 homology class, ascending by
/// length.  Used to seed collar candidates (one-sided cores give cross caps).
std::vector<LoopResult> shortest_loops_by_class(const MetricSurface& S);

/// Lower portion of the geodesic length spectrum of the regular-octagon
/// surface by deck-group word enumeration, deduplicated by trace.
std::vector<Real> fuchsian_lengths(const MetricSurface& S, int word_length_cap);

/// Exact systole of a flat torus by lattice enumeration (|m|,|n| <= 10).
Real flat_torus_systole_oracle(const Vec2& basis_a, const Vec2& basis_b);

/// Shortest cycle in an annulus freely homotopic to the core, by Dijkstra on
/// a 3-sheet unrolled strip.  The note flags optima touching the outer sheets.
LoopResult shortest_in_homotopy_class(const Subsurface& F);

/// Max vertex distance to the boundary (multi-source Dijkstra); a graph-metric
/// overestimate of the true inradius, within one mesh diameter plus the graph
/// stretch of the mesh directions.
Real inradius(const Subsurface& F);

/// Triangles whose barycenter distance (mean corner Dijkstra distance) from
/// `center` is at most r.
Subsurface metric_ball(const SurfacePtr& S, int center, Real r);

/// Tubular neighborhood of a simple closed edge path.
Subsurface collar(const SurfacePtr& S, const LoopResult& core, Real half_width);

/// Two-sweep Dijkstra diameter lower bound.
Real approx_diameter(const MetricSurface& S);

} // namespace sgl
