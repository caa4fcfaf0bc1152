#pragma once

#include "sgl/mesh.hpp"

#include <vector>

namespace sgl {

/// Edge-indexed Z/2 chain from a closed vertex path (consecutive pairs must
/// be mesh edges).  Throws if a pair is not an edge.
std::vector<char> cycle_edge_mask(const SurfaceTopology& topo, const MatXi& tris,
                                  const std::vector<int>& vertex_cycle);

/// True iff the Z/2 cycle bounds a 2-chain of faces.  Faces touching the
/// complement anchor to a virtual outside node through boundary edges.  When
/// null and `region` is given, it receives the bounded face set.
bool cycle_null_z2(const SurfaceTopology& topo, const std::vector<char>& cycle_edges,
                   std::vector<int>* region = nullptr);

/// Integer-coefficient version for orientable complexes; the cycle is the
/// directed vertex path.  Returns true iff null-homologous over Z.
bool cycle_null_int(const SurfaceTopology& topo, const MatXi& tris,
                    const std::vector<int>& vertex_cycle);

/// Z/2 cohomology basis via tree-cotree: each cocycle is an edge mask, and
/// pairing a cycle with every mask detects nontrivial H_1 classes.
std::vector<std::vector<char>> h1_cocycles_z2(const SurfaceTopology& topo);

/// Pairing of a Z/2 cycle (edge mask) with a cocycle (edge mask).
int z2_pairing(const std::vector<char>& cycle_edges, const std::vector<char>& cocycle);

} // namespace sgl
