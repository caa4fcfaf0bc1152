#pragma once

#include "sgl/errors.hpp"
#include "sgl/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sgl {

enum class MetricBackend { EdgeLengths, Chart };

/// Connectivity and per-edge incidence shared by full surfaces and
/// triangle-subset subsurfaces.  Edge k of a face is opposite corner k.
struct SurfaceTopology {
  Eigen::MatrixX2i edges;                       // E x 2, sorted vertex pairs
  std::vector<std::array<int, 3>> face_edges;   // per-face edge ids
  std::vector<std::array<int, 2>> edge_faces;   // incident faces, -1 if none
  std::vector<std::vector<int>> boundary_loops; // vertex cycles
  bool orientable = true;
  bool manifold = true;
  bool regular_boundary = true; // every boundary vertex has exactly 2 boundary edges
  int n_vertices = 0;           // vertices actually used by faces
  int n_components = 0;         // face components (edge adjacency)
  int chi = 0;                  // V - E + F over used simplices

  int n_edges() const { return static_cast<int>(edges.rows()); }
  bool is_boundary_edge(int e) const { return edge_faces[e][1] < 0; }
};

SurfaceTopology build_topology(const MatXi& tris, int n_vertices);

/// Triangulated surface with an intrinsic metric.  Two backends feed the same
/// FEM contract: exact per-triangle edge lengths (flat and glued-polygon
/// models) or a chart metric tensor sampled by quadrature (warped products).
struct MetricSurface {
  int nv = 0;
  MatXi tris;     // F x 3 vertex indices
  MatX tri_len;   // F x 3, edge k opposite corner k
  MetricBackend backend = MetricBackend::EdgeLengths;

  // Chart backend: per-corner chart coordinates (u0,v0,u1,v1,u2,v2) and the
  // metric tensor sampler.  Corner coordinates are stored per face so seams
  // and polygon gluings need no global chart.
  MatX corner_uv;
  MetricTensorFn metric;
  // Optional per-corner conformal factor, P1-interpolated onto the metric.
  MatX corner_factor;

  FaceScalarFn curvature;   // optional Gaussian curvature at face barycenters
  VecX radial;              // optional per-face radial coordinate (surfaces with ends)
  MatX positions;           // optional V x 3 construction coordinates (export only)
  MatX face_center;         // optional F x 2 construction-chart barycenters; unlike
                            // positions these are seam-safe for predicates
  std::string model;        // generator tag, e.g. "flat_torus"

  SurfaceTopology topo;
  VecX face_area;

  int n_faces() const { return static_cast<int>(tris.rows()); }
  Real total_area() const { return face_area.sum(); }
  Vec2 corner(int f, int k) const { return Vec2(corner_uv(f, 2 * k), corner_uv(f, 2 * k + 1)); }
  bool has_curvature() const { return static_cast<bool>(curvature); }
  bool has_radial() const { return radial.size() == tris.rows(); }

  /// Canonical undirected edge length (first incident face).
  Real edge_length(int e) const;

  /// Metric tensor at a barycentric point of a face (chart backend),
  /// including the interpolated conformal factor when present.
  Mat2 metric_at(int f, const Vec3& bary) const;

  /// Builds topology, areas, and validates the metric; call after filling fields.
  void finalize();
};

enum class TopoClass { Disc, Annulus, CrossCap, Other };

const char* to_string(TopoClass c);

/// A selection of parent triangles with derived boundary and classification.
struct Subsurface {
  SurfacePtr parent;
  std::vector<int> faces;            // sorted parent face ids
  std::vector<int> vertices;         // sorted parent vertex ids used
  std::vector<char> face_mask;       // parent-sized
  std::vector<char> boundary_vertex; // parent-sized, Dirichlet set
  std::vector<std::vector<int>> boundary_loops;
  TopoClass topo_class = TopoClass::Other;
  int chi = 0;
  bool connected = false;
  bool orientable = true;
  Real area = 0;
  Real boundary_length = 0;

  bool closed() const { return boundary_length == 0 && boundary_loops.empty(); }
  int n_boundary_loops() const { return static_cast<int>(boundary_loops.size()); }
};

Subsurface extract_subsurface(const SurfacePtr& S, const std::vector<char>& face_mask);
Subsurface extract_subsurface(const SurfacePtr& S, const std::function<bool(int)>& predicate);

/// The whole surface as a Subsurface (Dirichlet on the surface boundary, if any).
Subsurface whole_surface(const SurfacePtr& S);

/// Splits a face mask into edge-connected components.
std::vector<std::vector<int>> face_components(const MetricSurface& S,
                                              const std::vector<char>& face_mask);

/// Standalone surface from a subsurface, with compact vertex ids.
/// `parent_vertex[i]` is the parent id of the new vertex i.
struct Submesh {
  MetricSurface surface;
  std::vector<int> parent_vertex;
};
Submesh submesh(const Subsurface& F);

enum class Incompressibility { Incompressible, Compressible, Unknown };

/// Homology-based sufficient test on the core curve of an annulus or cross cap.
Incompressibility classify_incompressible(const Subsurface& F);

/// Conformal rescale by a positive vertex function: edge lengths scale by the
/// per-edge mean of sqrt(f); chart metrics by the interpolated factor.
MetricSurface conformal_scale(const MetricSurface& S, const VecX& vertex_factor);

/// Discrete conformal factor, constant per triangle.  Dirichlet energy is
/// exactly invariant; shared-edge lengths may disagree where f jumps.
MetricSurface conformal_scale_faces(const MetricSurface& S, const VecX& face_factor);

/// Signed Gauss-Bonnet defect: sum K*area + boundary turning - 2*pi*chi.
/// Angles come from the per-triangle edge-length layout.
Real gauss_bonnet_defect(const MetricSurface& S);

/// Lays out one triangle isometrically in the plane from its edge lengths:
/// p0=(0,0), p1=(len2,0), p2 in the upper half plane.
std::array<Vec2, 3> layout_triangle(Real len0, Real len1, Real len2);

/// Metric area from edge lengths (Heron, clamped).
Real heron_area(Real a, Real b, Real c);

} // namespace sgl
