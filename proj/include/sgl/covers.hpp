#pragma once

#include "sgl/mesh.hpp"

namespace sgl {

enum class CoverMode { Closed, Chain };

/// k-sheeted cyclic cover: cut along a simple two-sided non-separating loop
/// and glue k copies cyclically (Closed) or in a chain with two boundary
/// loops (Chain).  The metric lifts isometrically.
MetricSurface cyclic_cover(const MetricSurface& S, const std::vector<int>& cut_loop, int sheets,
                           CoverMode mode);

/// Side labels for the faces touching a simple cut path; throws OneSidedLoop
/// when no consistent two-sided assignment exists.  Exposed for collar and
/// unrolling constructions.
struct CutSides {
  std::vector<int> side;       // -1 = untouched, 0/1 otherwise
  std::vector<int> path_index; // vertex -> position in path, -1 otherwise
};
CutSides cut_sides(const MetricSurface& S, const std::vector<int>& path, bool closed_loop);

struct ExhaustionFamily {
  SurfacePtr surface;
  VecX radii;
  std::vector<Subsurface> truncations; // K_i = {radial <= r_i}
  std::vector<Subsurface> complements; // closure of S \ K_i
};

/// Nested truncations of a surface with a declared per-face radial coordinate.
ExhaustionFamily build_exhaustion(const SurfacePtr& S, const std::vector<Real>& radii);

} // namespace sgl
