#pragma once

#include "sgl/mesh.hpp"

#include <optional>

namespace sgl {

struct FemSystem {
  SparseMat K, M;                 // stiffness and consistent mass over dofs
  std::vector<int> vertex_of_dof; // parent vertex per dof
  std::vector<int> dof_of_vertex; // parent-sized, -1 where not a dof
};

/// P1 assembly over the subsurface with Dirichlet rows/columns eliminated.
FemSystem assemble(const Subsurface& F);

/// Same, without Dirichlet elimination (all used vertices are dofs).
FemSystem assemble_full(const Subsurface& F);

struct Extrapolated {
  Real value = 0;
  Real error_bar = 0;
  VecX raw; // per-resolution eigenvalues, coarse to fine
};

struct SpectralResult {
  Real lambda0 = 0;
  Real rayleigh = 0;
  Real mesh_h = 0;
  VecX ground_state; // parent-vertex field, L2(M)-normalized, 0 off the domain
  std::optional<Extrapolated> extrapolated;
};

/// First Dirichlet eigenvalue and ground state by shift-inverted power
/// iteration with a sparse Cholesky factorization.  Closed inputs return
/// exactly 0 with the constant eigenvector.
SpectralResult lambda0(const Subsurface& F, Real tol = 1e-9);

/// First k+1 eigenvalues of a closed surface, ascending with multiplicity.
std::vector<Real> lambda_k(const MetricSurface& S, int k, Real tol = 1e-8);

struct EigenPairs {
  VecX values;
  MatX vectors;                   // columns per mode, over dofs
  std::vector<int> vertex_of_dof;
};

/// Eigenpairs behind lambda_k; exposed for superlevel candidate families.
EigenPairs eigenpairs_closed(const MetricSurface& S, int k, Real tol = 1e-8);

/// Rayleigh quotient of a vertex field after Dirichlet masking.
Real rayleigh(const Subsurface& F, const VecX& vertex_values);

struct SweepProfile {
  VecX thresholds;     // ascending
  VecX area;           // superlevel areas A(t)
  VecX length;         // level-set lengths L(t)
  VecX ratio;          // L/A where A > 0
  Real integral_psi;   // exact per-triangle integral of psi
  Real integral_grad;  // exact per-triangle integral of |grad psi|
  Real max_psi = 0;
  Real total_area = 0; // A(0)

  Real cavalieri_integral() const; // trapezoid integral of A(t) over [0, max]
  Real coarea_integral() const;    // trapezoid integral of L(t) over [0, max]
};

/// Superlevel areas and level-set lengths of a nonnegative vertex density by
/// marching triangles, thresholds at area-equidistributed quantiles.
SweepProfile sweep(const Subsurface& F, const VecX& psi_vertex, int n_thresholds);

/// Ground-state mass inside a region: integral of phi^2 over F intersect region.
Real mass_in(const Subsurface& F, const Subsurface& region,
             const SpectralResult* precomputed = nullptr);

/// Exact per-triangle integrals of a P1 vertex field over F.
Real integrate_field(const Subsurface& F, const VecX& vertex_values);
Real integrate_grad_norm(const Subsurface& F, const VecX& vertex_values);

/// Aitken extrapolation of eigenvalues from nested refinements (coarse to
/// fine, assuming O(h^2)).
Extrapolated extrapolate_lambda(const VecX& raw);

} // namespace sgl
