#include "sgl/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace sgl {

const char* to_string(CandidateFamily f) {
  switch (f) {
    case CandidateFamily::Ball: return "ball";
    case CandidateFamily::Collar: return "collar";
    default: return "superlevel";
  }
}

namespace {

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SYSTOLE_LAB_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 2;
}

// Deterministic farthest-point sample of vertex centers.
std::vector<int> sample_centers(const MetricSurface& S, int count) {
  const EdgeGraph g = edge_graph(S);
  std::vector<int> centers{0};
  VecX mindist = dijkstra(g, {0}).dist;
  while (static_cast<int>(centers.size()) < count) {
    int far = 0;
    for (int v = 0; v < S.nv; ++v)
      if (mindist[v] < std::numeric_limits<Real>::infinity() && mindist[v] > mindist[far]) far = v;
    centers.push_back(far);
    const VecX d = dijkstra(g, {far}).dist;
    mindist = mindist.cwiseMin(d);
  }
  return centers;
}

struct CandidateTask {
  CandidateRecord record;
  Subsurface subsurface;
};

void solve_candidates(std::vector<CandidateTask>& tasks, Real tol, int jobs) {
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      try {
        tasks[i].record.lambda0 = lambda0(tasks[i].subsurface, tol).lambda0;
      } catch (const Error&) {
        tasks[i].record.lambda0 = std::numeric_limits<Real>::quiet_NaN();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(resolve_jobs(jobs), static_cast<int>(tasks.size()) + 1);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

} // namespace

LambdaUpperResult lambda_upper(const SurfacePtr& S, const SearchConfig& config) {
  LambdaUpperResult out;
  const bool closed = S->topo.boundary_loops.empty();
  const Real diam = approx_diameter(*S);
  Real mesh_h = 0;
  for (int f = 0; f < S->n_faces(); ++f) mesh_h = std::max(mesh_h, S->tri_len.row(f).maxCoeff());

  std::vector<CandidateTask> tasks;
  auto push = [&](CandidateFamily fam, const std::string& id, Real param, Subsurface&& F) {
    if (F.topo_class != TopoClass::Disc && F.topo_class != TopoClass::Annulus &&
        F.topo_class != TopoClass::CrossCap)
      return;
    CandidateTask t;
    t.record.id = id;
    t.record.family = fam;
    t.record.topo_class = F.topo_class;
    t.record.param = param;
    t.record.area = F.area;
    t.record.n_faces = static_cast<int>(F.faces.size());
    if (F.topo_class == TopoClass::Annulus || F.topo_class == TopoClass::CrossCap) {
      try {
        t.record.incompressibility = classify_incompressible(F);
      } catch (const Error&) {
      }
    }
    t.subsurface = std::move(F);
    tasks.push_back(std::move(t));
  };

  // Ball family: log-spaced radii up to half the diameter.
  const auto centers = sample_centers(*S, config.n_ball_centers);
  for (size_t ci = 0; ci < centers.size(); ++ci) {
    const Real r_lo = 2.5 * mesh_h, r_hi = diam / 2;
    if (r_hi <= r_lo) break;
    for (int i = 0; i < config.n_ball_radii; ++i) {
      const Real r = r_lo * std::pow(r_hi / r_lo, Real(i) / (config.n_ball_radii - 1));
      try {
        push(CandidateFamily::Ball, "ball:c" + std::to_string(ci) + ":r" + std::to_string(i), r,
             metric_ball(S, centers[ci], r));
      } catch (const Error&) {
      }
    }
  }

  // Collar family around the systolic loop; on non-orientable surfaces the
  // per-class shortest loops also seed Mobius-band candidates around
  // one-sided cores.
  if (closed && S->topo.chi <= 0) {
    try {
      std::vector<LoopResult> cores;
      if (S->topo.orientable) {
        cores.push_back(systole_upper(*S));
      } else {
        cores = shortest_loops_by_class(*S);
      }
      out.systole = cores.front().length;
      for (size_t ci = 0; ci < cores.size(); ++ci) {
        const Real side_w =
            collar_width(cores[ci].length,
                         S->topo.orientable ? CollarSide::TwoSided : CollarSide::OneSided);
        const Real w_hi = std::min(side_w, diam);
        for (int i = 0; i < config.n_collar_widths; ++i) {
          const Real w = std::max(2.5 * mesh_h, w_hi * Real(i + 1) / config.n_collar_widths);
          try {
            push(CandidateFamily::Collar,
                 "collar:l" + std::to_string(ci) + ":w" + std::to_string(i), w,
                 collar(S, cores[ci], w));
          } catch (const Error&) {
          }
        }
        // The widest collar of all: the surface cut open along the core (the
        // one-sheet chain cover).  Valid whenever the cut piece is an
        // annulus; its lambda0 is the limit of exhausting compact annuli.
        try {
          auto cut = std::make_shared<MetricSurface>(
              cyclic_cover(*S, cores[ci].vertices, 1, CoverMode::Chain));
          push(CandidateFamily::Collar, "collar:l" + std::to_string(ci) + ":cut", diam,
               whole_surface(cut));
        } catch (const Error&) {
        }
      }
    } catch (const Error&) {
    }
  }

  // Superlevel family of the first nonconstant eigenfunction (closed) or the
  // ground state (bounded).
  try {
    VecX psi = VecX::Zero(S->nv);
    if (closed) {
      const EigenPairs ep = eigenpairs_closed(*S, 1, config.solver_tol);
      for (size_t i = 0; i < ep.vertex_of_dof.size(); ++i)
        psi[ep.vertex_of_dof[i]] = ep.vectors(i, 1) * ep.vectors(i, 1);
    } else {
      const SpectralResult r = lambda0(whole_surface(S), config.solver_tol);
      psi = r.ground_state.cwiseProduct(r.ground_state);
    }
    const Real pmax = psi.maxCoeff();
    for (int i = 0; i < config.n_superlevel; ++i) {
      const Real t = pmax * Real(i + 1) / (config.n_superlevel + 1);
      std::vector<char> mask(S->n_faces(), 0);
      for (int f = 0; f < S->n_faces(); ++f) {
        const Real m =
            (psi[S->tris(f, 0)] + psi[S->tris(f, 1)] + psi[S->tris(f, 2)]) / 3;
        mask[f] = (m >= t) ? 1 : 0;
      }
      const auto comps = face_components(*S, mask);
      for (size_t c = 0; c < comps.size(); ++c) {
        std::vector<char> cmask(S->n_faces(), 0);
        for (int f : comps[c]) cmask[f] = 1;
        try {
          push(CandidateFamily::Superlevel,
               "superlevel:t" + std::to_string(i) + ":c" + std::to_string(c), t,
               extract_subsurface(S, cmask));
        } catch (const Error&) {
        }
      }
    }
  } catch (const Error&) {
  }

  if (tasks.empty()) throw NoValidCandidate("no disc/annulus/cross-cap candidate produced");
  solve_candidates(tasks, config.solver_tol, config.jobs);

  out.lambda_up = std::numeric_limits<Real>::infinity();
  for (size_t i = 0; i < tasks.size(); ++i) {
    const auto& rec = tasks[i].record;
    if (std::isnan(rec.lambda0)) continue;
    out.candidates.push_back(rec);
    if (rec.lambda0 < out.lambda_up) {
      out.lambda_up = rec.lambda0;
      out.best = static_cast<int>(out.candidates.size()) - 1;
    }
  }
  if (out.candidates.empty()) throw NoValidCandidate("all candidate solves failed");
  return out;
}

LowerBoundResult lambda_lower_bound(const SurfacePtr& S, Real kappa,
                                    std::optional<Real> certified_sys) {
  if (S->has_curvature()) {
    for (int f = 0; f < S->n_faces(); ++f)
      if (S->curvature(f) > kappa + 1e-9)
        throw InvalidCurvatureBound("face curvature " + std::to_string(S->curvature(f)) +
                                    " exceeds kappa");
  }
  LowerBoundResult out;
  if (certified_sys) {
    out.systole = *certified_sys;
    out.systole_certified = true;
  } else if (S->model == "hyperbolic_octagon") {
    out.systole = fuchsian_lengths(*S, 2).front();
    out.systole_certified = true;
  } else {
    out.systole = systole_upper(*S).length;
    out.caveat = "systole from the mesh upper bound; the bound may be optimistic";
  }
  const Real area = S->total_area();
  const Real sys2 = out.systole * out.systole;
  if (kappa <= 0) {
    out.value = -kappa / 4 + std::min(kPi, sys2 / area) / area;
  } else if (S->topo.orientable) {
    out.value = std::min(kPi / area - kappa / 4, sys2 / (area * area));
  } else {
    out.value = std::min(kPi / area - kappa / 4, sys2 / (4 * area * area));
  }
  return out;
}

SandwichResult check_sandwich(const SurfacePtr& S, Real tolerance, const SearchConfig& config) {
  SandwichResult out;
  out.search = lambda_upper(S, config);
  out.systole = out.search.systole > 0 ? out.search.systole : systole_upper(*S).length;
  out.fuchsian_systole =
      (S->model == "hyperbolic_octagon") ? fuchsian_lengths(*S, 2).front() : out.systole;

  const Real chi = static_cast<Real>(S->topo.chi);
  out.lower = 0.25 + out.systole * out.systole / (4 * kPi * kPi * chi * chi);
  const Real w2 = collar_width(out.systole, CollarSide::TwoSided);
  out.upper = 0.25 + 4 * kPi * kPi / (w2 * w2);

  out.lower_vs_lambda_up = make_report("sandwich_lower", S->model, out.search.lambda_up,
                                       out.lower, tolerance);
  out.lambda_up_vs_upper =
      make_report("sandwich_upper", S->model, out.upper, out.search.lambda_up, tolerance);
  return out;
}

Real cheeger_upper(const Subsurface& F, int n_thresholds) {
  const SpectralResult r = lambda0(F);
  const VecX psi = r.ground_state.cwiseProduct(r.ground_state);
  const SweepProfile prof = sweep(F, psi, n_thresholds);
  Real best = std::numeric_limits<Real>::infinity();
  for (int i = 0; i < prof.ratio.size(); ++i)
    if (prof.area[i] > 1e-12 && prof.ratio[i] > 0) best = std::min(best, prof.ratio[i]);
  // The whole subsurface is a competitor as well.
  best = std::min(best, F.boundary_length / F.area);
  return best;
}

std::vector<InequalityReport> check_isoperimetric_values(const IsoperimetricInput& in, Real kappa,
                                                         const std::string& instance,
                                                         Real tolerance, Real error_bar) {
  std::vector<InequalityReport> out;
  const Real topo_term = 2 * kPi * in.chi - in.curvature_excess;

  out.push_back(make_report("isoperimetric_1", instance, in.boundary_length * in.boundary_length,
                            -kappa * in.area * in.area + 2 * topo_term * in.area, tolerance,
                            error_bar));
  if (kappa <= 0) {
    const Real rhs = in.area * ct(kappa, in.inradius) + topo_term * tn(kappa, in.inradius / 2);
    out.push_back(make_report("isoperimetric_2", instance, in.boundary_length, rhs, tolerance,
                              error_bar));
  }
  if (in.chi != 1 && kappa < 0) {
    if (in.ell > 0 && in.boundary_length >= in.ell) {
      const Real lhs =
          std::sqrt(in.boundary_length * in.boundary_length - in.ell * in.ell);
      const Real rhs = std::sqrt(-kappa) * in.area + topo_term / std::sqrt(-kappa);
      out.push_back(make_report("isoperimetric_3", instance, lhs, rhs, tolerance, error_bar));
    } else {
      InequalityReport r = make_report("isoperimetric_3", instance, 0, 0, tolerance, 1.0);
      r.verdict = Verdict::Inconclusive;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<InequalityReport> check_isoperimetric(const Subsurface& F, Real kappa, Real tolerance,
                                                  Real error_bar) {
  if (!F.parent->has_curvature())
    throw MissingCurvatureField("isoperimetric checks need the curvature field");
  IsoperimetricInput in;
  in.boundary_length = F.boundary_length;
  in.area = F.area;
  in.chi = F.chi;
  in.inradius = inradius(F);
  in.curvature_excess = 0;
  for (int f : F.faces)
    in.curvature_excess += std::max(F.parent->curvature(f) - kappa, Real(0)) * F.parent->face_area[f];
  if (F.topo_class == TopoClass::Annulus)
    in.ell = 2 * shortest_in_homotopy_class(F).length;
  return check_isoperimetric_values(in, kappa, to_string(F.topo_class), tolerance, error_bar);
}

EssSpecEstimate ess_spectrum_estimate(const ExhaustionFamily& fam, Real solver_tol) {
  if (fam.complements.size() < 3)
    throw NonIncreasingRadii("essential-spectrum estimate needs at least 3 levels");
  EssSpecEstimate out;
  out.radii = fam.radii;
  out.r_far = fam.surface->radial.maxCoeff();
  const int n = static_cast<int>(fam.complements.size());
  out.values.resize(n);
  for (int i = 0; i < n; ++i)
    out.values[i] = lambda0(fam.complements[i], solver_tol).lambda0;
  for (int i = 1; i < n; ++i)
    if (out.values[i] < out.values[i - 1] * (1 - 1e-8) - 1e-12)
      throw SolverDivergence("truncation values lost monotonicity");

  // Least squares of lambda_i = limit + slope / (r_far - r_i)^2.
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const Real L = out.r_far - out.radii[i];
    const Real x = 1 / (L * L);
    sx += x;
    sy += out.values[i];
    sxx += x * x;
    sxy += x * out.values[i];
  }
  const Real det = n * sxx - sx * sx;
  out.artifact_slope = (n * sxy - sx * sy) / det;
  out.limit_estimate = (sy * sxx - sx * sxy) / det;

  // Out-of-sample check of the artifact model: truncate the far end.
  const SurfacePtr S = fam.surface;
  const Real cut = out.radii[n - 1] + (out.r_far - out.radii[n - 1]) * 0.8;
  try {
    const Subsurface trimmed = extract_subsurface(
        S, [&](int f) { return S->radial[f] > out.radii[n - 1] && S->radial[f] < cut; });
    const Real lam = lambda0(trimmed, solver_tol).lambda0;
    const Real Lp = cut - out.radii[n - 1];
    const Real predicted = out.limit_estimate + out.artifact_slope / (Lp * Lp);
    out.sensitivity = std::abs(lam - predicted);
  } catch (const Error&) {
    out.sensitivity = std::numeric_limits<Real>::quiet_NaN();
  }
  return out;
}

CoverExperiment cover_experiment(const SurfacePtr& S, const LoopResult& core,
                                 const std::vector<int>& ks, Real solver_tol) {
  CoverExperiment out;
  out.base_lambda0 = lambda0(whole_surface(S), solver_tol).lambda0; // 0 for closed S
  for (int k : ks) {
    const auto cover = std::make_shared<MetricSurface>(
        cyclic_cover(*S, core.vertices, k, CoverMode::Chain));
    CoverRow row;
    row.sheets = k;
    row.lambda0 = lambda0(whole_surface(cover), solver_tol).lambda0;
    out.rows.push_back(row);
  }
  // Fit lambda ~ C k^-p by regression in log-log.
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(out.rows.size());
  for (const auto& r : out.rows) {
    const Real x = std::log(Real(r.sheets)), y = std::log(r.lambda0);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.fitted_exponent = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

ConformalExperiment conformal_experiment(const SurfacePtr& S, Real core_radial,
                                         Real ramp_end_radial, Real t,
                                         const std::vector<Real>& ess_radii, Real solver_tol) {
  if (!(core_radial < ramp_end_radial))
    throw FactorNotOneOnCore("core must end before the ramp does");
  if (!S->has_radial() || S->positions.rows() != S->nv)
    throw FactorNotOneOnCore("surface needs radial data and positions");

  // f = 1 on the core, exp(-t) past the ramp, smooth in between.
  VecX f(S->nv);
  for (int v = 0; v < S->nv; ++v) {
    const Real x = S->positions(v, 0);
    if (x <= core_radial) {
      f[v] = 1.0;
    } else if (x >= ramp_end_radial) {
      f[v] = std::exp(-t);
    } else {
      const Real u = (x - core_radial) / (ramp_end_radial - core_radial);
      const Real smooth = u * u * (3 - 2 * u);
      f[v] = std::exp(-t * smooth);
    }
  }
  for (Real r : ess_radii)
    if (r <= ramp_end_radial)
      throw FactorNotOneOnCore("exhaustion radii must lie beyond the ramp");

  const auto scaled = std::make_shared<MetricSurface>(conformal_scale(*S, f));

  ConformalExperiment out;
  out.t = t;

  // Candidate strictly inside the core: identical Dirichlet data, so the
  // deterministic solve reproduces lambda0 bit for bit.
  auto core_pred = [&](const SurfacePtr& M) {
    return extract_subsurface(M, [&](int g) { return M->radial[g] <= core_radial * 0.75; });
  };
  const Real before = lambda0(core_pred(S), solver_tol).lambda0;
  const Real after = lambda0(core_pred(scaled), solver_tol).lambda0;
  out.candidate_lambda_before = before;
  out.candidate_lambda_after = after;
  out.candidate_bitwise_equal = (before == after);

  const ExhaustionFamily fam = build_exhaustion(S, ess_radii);
  const ExhaustionFamily fam2 = build_exhaustion(scaled, ess_radii);
  const int n = static_cast<int>(ess_radii.size());
  out.ess_values_before.resize(n);
  out.ess_values_after.resize(n);
  out.max_ess_ratio_error = 0;
  for (int i = 0; i < n; ++i) {
    out.ess_values_before[i] = lambda0(fam.complements[i], solver_tol).lambda0;
    out.ess_values_after[i] = lambda0(fam2.complements[i], solver_tol).lambda0;
    const Real ratio = out.ess_values_after[i] / out.ess_values_before[i];
    out.max_ess_ratio_error =
        std::max(out.max_ess_ratio_error, std::abs(ratio - std::exp(t)) / std::exp(t));
  }
  return out;
}

AnnulusGapReport annulus_gap_diagnostic(const Subsurface& F, Real delta, Real tolerance) {
  if (!(delta > 0 && delta < 0.5)) throw DeltaOutOfRange("delta must lie in (0, 1/2)");
  if (F.topo_class != TopoClass::Annulus)
    throw WrongClass("diagnostic implemented for annuli");

  AnnulusGapReport out;
  out.delta = delta;
  const SpectralResult r = lambda0(F);
  out.lambda0 = r.lambda0;
  out.area = F.area;
  out.ell = 2 * shortest_in_homotopy_class(F).length;

  // Lambda'(F): disc candidates strictly inside F -- superlevel components of
  // the squared ground state plus inscribed balls around its maximum.
  Real lam_prime = std::numeric_limits<Real>::infinity();
  const VecX psi = r.ground_state.cwiseProduct(r.ground_state);
  const Real pmax = psi.maxCoeff();
  const auto& S = F.parent;
  for (int i = 1; i <= 8; ++i) {
    const Real t = pmax * Real(i) / 9;
    std::vector<char> mask(S->n_faces(), 0);
    for (int f : F.faces) {
      const Real m = (psi[S->tris(f, 0)] + psi[S->tris(f, 1)] + psi[S->tris(f, 2)]) / 3;
      mask[f] = (m >= t) ? 1 : 0;
    }
    for (const auto& comp : face_components(*S, mask)) {
      std::vector<char> cmask(S->n_faces(), 0);
      for (int f : comp) cmask[f] = 1;
      try {
        const Subsurface C = extract_subsurface(S, cmask);
        if (C.topo_class == TopoClass::Disc)
          lam_prime = std::min(lam_prime, lambda0(C).lambda0);
      } catch (const Error&) {
      }
    }
  }
  {
    // Widest inscribed ball around the ground-state maximum.
    int vmax = F.vertices.front();
    for (int v : F.vertices)
      if (psi[v] > psi[vmax]) vmax = v;
    std::vector<int> bnd;
    for (int v : F.vertices)
      if (F.boundary_vertex[v]) bnd.push_back(v);
    const EdgeGraph g = edge_graph(*S, F.face_mask);
    const Real reach = dijkstra(g, bnd).dist[vmax];
    const VecX dc = dijkstra(g, {vmax}).dist;
    for (Real frac : {0.9, 0.7, 0.5}) {
      std::vector<char> mask(S->n_faces(), 0);
      for (int f : F.faces) {
        const Real bd = (dc[S->tris(f, 0)] + dc[S->tris(f, 1)] + dc[S->tris(f, 2)]) / 3;
        mask[f] = (bd <= frac * reach) ? 1 : 0;
      }
      try {
        const Subsurface B = extract_subsurface(S, mask);
        if (B.topo_class == TopoClass::Disc) lam_prime = std::min(lam_prime, lambda0(B).lambda0);
      } catch (const Error&) {
      }
    }
  }
  if (!(lam_prime < std::numeric_limits<Real>::infinity()))
    throw NoValidCandidate("no disc candidate inside the annulus");
  out.lambda_prime = lam_prime;

  const Real factor =
      1 - delta + 2 * (1 - 1 / delta) * (out.area / out.ell) * std::sqrt(out.lambda0);
  out.rhs = factor * lam_prime;
  out.verdict =
      make_report("annulus_gap", to_string(F.topo_class), out.lambda0, out.rhs, tolerance);
  return out;
}

MassConcentration mass_concentration(const Subsurface& F, const ExhaustionFamily& fam,
                                     Real solver_tol) {
  MassConcentration out;
  out.radii = fam.radii;
  const SpectralResult r = lambda0(F, solver_tol);
  const int n = static_cast<int>(fam.truncations.size());
  out.mass_inside.resize(n);
  out.fitted_C = 0;
  for (int i = 0; i < n; ++i) {
    out.mass_inside[i] = mass_in(F, fam.truncations[i], &r);
    out.fitted_C = std::max(out.fitted_C, (1 - out.mass_inside[i]) * (i + 1));
  }
  return out;
}

} // namespace sgl
