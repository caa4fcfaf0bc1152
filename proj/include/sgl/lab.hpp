#pragma once

#include "sgl/cmpfun.hpp"
#include "sgl/covers.hpp"
#include "sgl/geodesics.hpp"
#include "sgl/report.hpp"
#include "sgl/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sgl {

enum class CandidateFamily { Ball, Collar, Superlevel };

const char* to_string(CandidateFamily f);

struct CandidateRecord {
  std::string id;
  CandidateFamily family = CandidateFamily::Ball;
  TopoClass topo_class = TopoClass::Other;
  Real param = 0; // radius, half width, or threshold
  Real lambda0 = 0;
  Real area = 0;
  int n_faces = 0;
  Incompressibility incompressibility = Incompressibility::Unknown;
};

struct SearchConfig {
  int n_ball_centers = 3;
  int n_ball_radii = 12;
  int n_collar_widths = 12;
  int n_superlevel = 8;
  Real solver_tol = 1e-9;
  int jobs = 0; // 0 = SYSTOLE_LAB_JOBS env or hardware concurrency
};

struct LambdaUpperResult {
  Real lambda_up = 0;
  int best = -1;
  Real systole = 0;
  std::vector<CandidateRecord> candidates;
};

/// Certified upper bound for the analytic systole: minimum first Dirichlet
/// eigenvalue over disc, collar, and superlevel candidate subsurfaces.
LambdaUpperResult lambda_upper(const SurfacePtr& S, const SearchConfig& config = {});

struct LowerBoundResult {
  Real value = 0;
  Real systole = 0;
  bool systole_certified = false;
  std::string caveat;
};

/// Closed-form lower bound for the analytic systole under a curvature bound:
/// -kappa/4 + min(pi, sys^2/|S|)/|S| for kappa <= 0, and the positive-kappa
/// orientable / non-orientable variants.
LowerBoundResult lambda_lower_bound(const SurfacePtr& S, Real kappa,
                                    std::optional<Real> certified_sys = std::nullopt);

struct SandwichResult {
  Real systole = 0;
  Real fuchsian_systole = 0;
  Real lower = 0;  // 1/4 + sys^2/(4 pi^2 chi^2)
  Real upper = 0;  // 1/4 + 4 pi^2 / w2^2
  LambdaUpperResult search;
  InequalityReport lower_vs_lambda_up;
  InequalityReport lambda_up_vs_upper;
};

/// Squeeze of the analytic systole between the systole-based bounds on a
/// closed hyperbolic model.
SandwichResult check_sandwich(const SurfacePtr& S, Real tolerance = 0.05,
                              const SearchConfig& config = {});

/// Upper bound for the Cheeger constant: the best superlevel competitor
/// ratio L(t)/A(t) of the squared ground state.
Real cheeger_upper(const Subsurface& F, int n_thresholds = 128);

struct IsoperimetricInput {
  Real boundary_length = 0;
  Real area = 0;
  Real inradius = 0;
  Real ell = 0; // sum of shortest boundary-homotopic loop lengths, 0 if unavailable
  int chi = 0;
  Real curvature_excess = 0; // integral of (K - kappa)^+
};

/// The three isoperimetric verdicts for a subsurface under curvature bound
/// kappa; (2) applies when kappa <= 0, (3) when F is not a disc and kappa < 0.
std::vector<InequalityReport> check_isoperimetric(const Subsurface& F, Real kappa,
                                                  Real tolerance, Real error_bar = 0);

/// Same, from precomputed ingredients (for closed-form cross-checks).
std::vector<InequalityReport> check_isoperimetric_values(const IsoperimetricInput& in, Real kappa,
                                                         const std::string& instance,
                                                         Real tolerance, Real error_bar = 0);

struct EssSpecEstimate {
  VecX radii;
  VecX values;         // lambda0 of the complements, nondecreasing
  Real limit_estimate = 0;
  Real artifact_slope = 0; // fitted coefficient of 1/(R_far - r)^2
  Real r_far = 0;
  Real sensitivity = 0; // out-of-sample deviation of the artifact model
};

/// Bottom-of-essential-spectrum estimate from Dirichlet truncations: fits
/// lambda(r_i) = limit + slope / (R_far - r_i)^2 over the exhaustion levels.
EssSpecEstimate ess_spectrum_estimate(const ExhaustionFamily& fam, Real solver_tol = 1e-9);

struct CoverRow {
  int sheets = 0;
  Real lambda0 = 0;
};

struct CoverExperiment {
  std::vector<CoverRow> rows;
  Real fitted_exponent = 0; // decay power p in lambda ~ k^-p
  Real base_lambda0 = 0;    // closed base surface, exactly 0
};

/// Dirichlet eigenvalues of truncated cyclic-cover chains along a loop.
CoverExperiment cover_experiment(const SurfacePtr& S, const LoopResult& core,
                                 const std::vector<int>& ks, Real solver_tol = 1e-9);

struct ConformalExperiment {
  Real t = 0;
  Real candidate_lambda_before = 0;
  Real candidate_lambda_after = 0;
  bool candidate_bitwise_equal = false;
  VecX ess_values_before;
  VecX ess_values_after; // expected e^t * before
  Real max_ess_ratio_error = 0;
};

/// Conformal rescale by f = 1 on the core, e^-t outside: candidate
/// eigenvalues inside the core are unchanged bitwise, end truncation values
/// scale by e^t.
ConformalExperiment conformal_experiment(const SurfacePtr& S, Real core_radial,
                                         Real ramp_end_radial, Real t,
                                         const std::vector<Real>& ess_radii,
                                         Real solver_tol = 1e-9);

struct AnnulusGapReport {
  Real delta = 0;
  Real lambda0 = 0;
  Real ell = 0;
  Real area = 0;
  Real lambda_prime = 0; // min disc-candidate lambda0
  Real rhs = 0;
  InequalityReport verdict;
};

/// Boundary-length gap diagnostic for annuli: lambda0(F) against
/// {1 - delta + 2(1 - 1/delta)(|F|/ell) sqrt(lambda0)} times the best
/// interior-disc eigenvalue.
AnnulusGapReport annulus_gap_diagnostic(const Subsurface& F, Real delta, Real tolerance = 0.05);

struct MassConcentration {
  VecX radii;
  VecX mass_inside; // integral of phi^2 over F intersect K_i
  Real fitted_C = 0; // from 1 - mass >= ... <= C / i
};

/// Ground-state mass concentration in an exhaustion (decay of the mass
/// outside K_i); diagnostic, values logged.
MassConcentration mass_concentration(const Subsurface& F, const ExhaustionFamily& fam,
                                     Real solver_tol = 1e-9);

} // namespace sgl
