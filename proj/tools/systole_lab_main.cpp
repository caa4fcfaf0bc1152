// systole-lab: batch front-end for the spectral-geometry laboratory.
// Subcommands: spectrum | systole | lambda | verify | cover | plot.
// Exit codes: 0 ok, 2 schema/input error, 3 solver failure, 4 violated verdicts.

#include "sgl/cmpfun.hpp"
#include "sgl/covers.hpp"
#include "sgl/generators.hpp"
#include "sgl/geodesics.hpp"
#include "sgl/lab.hpp"
#include "sgl/scene.hpp"
#include "sgl/svg.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace sgl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct Options {
  std::string scene_path;
  std::string manifest_path;
  std::string out_dir = "sgl_out";
  std::string results_path;
  int modes = 0;
  int refinements = 1;
  Real tol = 1e-9;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string export_off;
  std::string ks = "2,4,8";
};

int effective_jobs(int flag_jobs) {
  if (const char* env = std::getenv("SYSTOLE_LAB_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  return flag_jobs;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path);
  out << content;
}

json report_json(const InequalityReport& r) {
  return json{{"name", r.name},        {"instance", r.instance}, {"lhs", r.lhs},
              {"rhs", r.rhs},          {"tolerance", r.tolerance},
              {"error_bar", r.error_bar}, {"verdict", to_string(r.verdict)}};
}

struct Deterministic {
  std::uint64_t state;
  explicit Deterministic(std::uint64_t seed) : state(seed ? seed : 1) {}
  Real next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<Real>(state >> 11) / static_cast<Real>(1ull << 53);
  }
};

// ---------------------------------------------------------------------------
// spectrum

json run_spectrum(const Scene& scene, const Options& opt) {
  json rows = json::array();
  VecX raw(opt.refinements);
  const int base = scene.resolution();
  SpectralResult finest;
  for (int i = 0; i < opt.refinements; ++i) {
    const int res = base << i;
    const SurfacePtr S = scene.build(res);
    finest = lambda0(whole_surface(S), opt.tol);
    raw[i] = finest.lambda0;
    rows.push_back({{"resolution", res},
                    {"n_vertices", S->nv},
                    {"lambda0", finest.lambda0},
                    {"rayleigh", finest.rayleigh},
                    {"mesh_h", finest.mesh_h}});
    if (i == opt.refinements - 1 && !opt.export_off.empty()) write_off(*S, opt.export_off);
  }
  json out{{"schema", 1}, {"tool_version", kToolVersion}, {"scene", scene.spec}, {"rows", rows}};
  if (opt.refinements >= 3) {
    const Extrapolated ex = extrapolate_lambda(raw);
    out["extrapolated"] = {{"value", ex.value}, {"error_bar", ex.error_bar}};
  }
  if (opt.modes > 0) {
    const SurfacePtr S = scene.build();
    out["modes"] = lambda_k(*S, opt.modes, opt.tol);
  }
  return out;
}

// ---------------------------------------------------------------------------
// systole

json run_systole(const Scene& scene, const Options& opt) {
  const SurfacePtr S = scene.build();
  const LoopResult loop = systole_upper(*S);
  json out{{"schema", 1},
           {"tool_version", kToolVersion},
           {"scene", scene.spec},
           {"length", loop.length},
           {"vertices", loop.vertices},
           {"certificate", loop.certificate.kind == CertKind::HomologyNontrivial
                               ? "HomologyNontrivial"
                               : "Unknown"},
           {"h1_class", loop.certificate.h1_class}};
  if (auto cert = scene.certified_systole()) {
    out["oracle_systole"] = *cert;
    out["relative_gap"] = loop.length / *cert - 1;
  }
  (void)opt;
  return out;
}

// ---------------------------------------------------------------------------
// lambda

json candidates_json(const LambdaUpperResult& res) {
  json arr = json::array();
  for (const auto& c : res.candidates) {
    arr.push_back({{"id", c.id},
                   {"family", to_string(c.family)},
                   {"class", to_string(c.topo_class)},
                   {"param", c.param},
                   {"lambda0", c.lambda0},
                   {"area", c.area},
                   {"n_faces", c.n_faces}});
  }
  return arr;
}

json run_lambda(const Scene& scene, const Options& opt) {
  const SurfacePtr S = scene.build();
  SearchConfig cfg;
  cfg.solver_tol = opt.tol;
  cfg.jobs = effective_jobs(opt.jobs);
  const LambdaUpperResult res = lambda_upper(S, cfg);
  const LowerBoundResult low =
      lambda_lower_bound(S, scene.curvature_bound(), scene.certified_systole());
  return json{{"schema", 1},
              {"tool_version", kToolVersion},
              {"scene", scene.spec},
              {"lambda_upper", res.lambda_up},
              {"best_candidate", res.best >= 0 ? res.candidates[res.best].id : ""},
              {"lower_bound", low.value},
              {"systole", low.systole},
              {"systole_certified", low.systole_certified},
              {"caveat", low.caveat},
              {"candidates", candidates_json(res)}};
}

// ---------------------------------------------------------------------------
// cover

json run_cover(const Scene& scene, const std::vector<int>& ks, const Options& opt) {
  const SurfacePtr S = scene.build();
  const LoopResult loop = systole_upper(*S);
  const CoverExperiment exp = cover_experiment(S, loop, ks, opt.tol);
  json rows = json::array();
  for (const auto& r : exp.rows) rows.push_back({{"sheets", r.sheets}, {"lambda0", r.lambda0}});
  return json{{"schema", 1},
              {"tool_version", kToolVersion},
              {"scene", scene.spec},
              {"base_lambda0", exp.base_lambda0},
              {"fitted_exponent", exp.fitted_exponent},
              {"rows", rows}};
}

// ---------------------------------------------------------------------------
// verify: manifest-driven experiment runner

struct Bundle {
  std::vector<InequalityReport> reports;
  json tables = json::object();

  void add(const InequalityReport& r) { reports.push_back(r); }
  void add_all(const std::vector<InequalityReport>& rs) {
    for (const auto& r : rs) reports.push_back(r);
  }
  void equality_pair(const std::string& name, const std::string& instance, Real lhs, Real rhs,
                     Real tol, Real bar = 0) {
    add(make_report(name + "_ge", instance, lhs, rhs, tol, bar));
    add(make_report(name + "_le", instance, rhs, lhs, tol, bar));
  }
};

Scene manifest_scene(const json& manifest, const std::string& ref, const std::string& base_dir) {
  if (!manifest.contains("scenes") || !manifest["scenes"].contains(ref))
    throw SchemaError("experiment references unknown scene '" + ref + "'");
  const json& s = manifest["scenes"][ref];
  if (s.is_string()) {
    fs::path p = s.get<std::string>();
    if (p.is_relative()) p = fs::path(base_dir) / p;
    Scene sc = load_scene(p.string());
    sc.id = ref;
    return sc;
  }
  return parse_scene(s, ref);
}

void exp_sandwich(const json& e, const Scene& scene, Bundle& b, const Options& opt) {
  const Real tol = e.value("tolerance", 0.05);
  SearchConfig cfg;
  cfg.solver_tol = opt.tol;
  cfg.jobs = effective_jobs(opt.jobs);
  if (e.contains("search")) {
    cfg.n_ball_centers = e["search"].value("ball_centers", cfg.n_ball_centers);
    cfg.n_ball_radii = e["search"].value("ball_radii", cfg.n_ball_radii);
    cfg.n_collar_widths = e["search"].value("collar_widths", cfg.n_collar_widths);
    cfg.n_superlevel = e["search"].value("superlevel", cfg.n_superlevel);
  }
  const SandwichResult sr = check_sandwich(scene.build(), tol, cfg);
  b.add(sr.lower_vs_lambda_up);
  b.add(sr.lambda_up_vs_upper);
  // Systole cross-check against the trace oracle.
  b.equality_pair("sandwich_systole_oracle", scene.id, sr.systole, sr.fuchsian_systole,
                  e.value("systole_tolerance", 0.03));
  b.tables["sandwich"] = {{"systole", sr.systole},
                          {"fuchsian_systole", sr.fuchsian_systole},
                          {"lower", sr.lower},
                          {"upper", sr.upper},
                          {"lambda_upper", sr.search.lambda_up},
                          {"candidates", candidates_json(sr.search)}};
}

void bound_one_surface(const SurfacePtr& S, Real kappa, std::optional<Real> cert_sys,
                       const std::string& instance, Real tol, Bundle& b, const Options& opt) {
  SearchConfig cfg;
  cfg.solver_tol = opt.tol;
  cfg.jobs = effective_jobs(opt.jobs);
  cfg.n_ball_centers = 2;
  cfg.n_ball_radii = 8;
  cfg.n_collar_widths = 8;
  cfg.n_superlevel = 6;
  const LambdaUpperResult up = lambda_upper(S, cfg);
  const LowerBoundResult low = lambda_lower_bound(S, kappa, cert_sys);
  Real min_candidate = std::numeric_limits<Real>::infinity();
  for (const auto& c : up.candidates) min_candidate = std::min(min_candidate, c.lambda0);
  b.add(make_report("curvature_systole_bound", instance, min_candidate, low.value, tol));
}

void exp_random_tori_bound(const json& e, Bundle& b, const Options& opt) {
  const int count = e.value("count", 10);
  const int res = e.value("resolution", 48);
  const Real tol = e.value("tolerance", 0.06);
  Deterministic rng(opt.seed);
  for (int i = 0; i < count; ++i) {
    const Real s = 0.8 + 0.5 * rng.next();
    const Real t = -0.4 + 0.8 * rng.next();
    const Real ang = 2 * kPi * rng.next();
    const Real ca = std::cos(ang), sa = std::sin(ang);
    const Vec2 a(ca * s, sa * s), bb(ca * t - sa / s, sa * t + ca / s);
    const auto S = std::make_shared<MetricSurface>(make_flat_torus(a, bb, res));
    const Real cert = flat_torus_systole_oracle(a, bb);
    bound_one_surface(S, 0.0, cert, "torus_" + std::to_string(i), tol, b, opt);
  }
}

void exp_curvature_systole_bound(const json& e, const Scene& scene, Bundle& b,
                                 const Options& opt) {
  bound_one_surface(scene.build(), scene.curvature_bound(), scene.certified_systole(), scene.id,
                    e.value("tolerance", 0.06), b, opt);
}

void exp_hyperbolic_floor(const json& e, const Scene& scene, Bundle& b, const Options& opt) {
  SearchConfig cfg;
  cfg.solver_tol = opt.tol;
  cfg.jobs = effective_jobs(opt.jobs);
  const LambdaUpperResult up = lambda_upper(scene.build(), cfg);
  Real min_candidate = std::numeric_limits<Real>::infinity();
  for (const auto& c : up.candidates) min_candidate = std::min(min_candidate, c.lambda0);
  b.add(make_report("hyperbolic_floor", scene.id, min_candidate, 0.25, e.value("tolerance", 0.02)));
}

void exp_isoperimetric_discs(const json& e, Bundle& b, const Options& opt) {
  const int count = e.value("count", 50);
  const int res = e.value("resolution", 64);
  const Real tol = e.value("tolerance", 0.01);
  const auto T = std::make_shared<MetricSurface>(make_flat_torus(Vec2(1, 0), Vec2(0, 1), res));
  const EdgeGraph g = edge_graph(*T);
  Deterministic rng(opt.seed + 7);
  int made = 0;
  for (int trial = 0; trial < 4 * count && made < count; ++trial) {
    const int c = static_cast<int>(rng.next() * T->nv);
    const Real r0 = 0.12 + 0.18 * rng.next();
    Real amp[3], phase[3];
    for (int k = 0; k < 3; ++k) {
      amp[k] = 0.25 * rng.next() / (k + 1);
      phase[k] = 2 * kPi * rng.next();
    }
    const Vec2 center(T->positions(c, 0), T->positions(c, 1));
    const DijkstraResult d = dijkstra(g, {c});
    std::vector<char> mask(T->n_faces(), 0);
    for (int f = 0; f < T->n_faces(); ++f) {
      const Vec2 fc = T->face_center.row(f).transpose();
      Vec2 rel = fc - center;
      rel.x() -= std::round(rel.x());
      rel.y() -= std::round(rel.y());
      const Real th = std::atan2(rel.y(), rel.x());
      Real rr = r0;
      for (int k = 0; k < 3; ++k) rr *= 1 + amp[k] * std::cos((k + 1) * th + phase[k]);
      const Real bd = (d.dist[T->tris(f, 0)] + d.dist[T->tris(f, 1)] + d.dist[T->tris(f, 2)]) / 3;
      mask[f] = (bd <= rr) ? 1 : 0;
    }
    try {
      const Subsurface F = extract_subsurface(T, mask);
      if (F.topo_class != TopoClass::Disc) continue;
      b.add_all(check_isoperimetric(F, 0.0, tol));
      ++made;
    } catch (const Error&) {
    }
  }
  b.tables["isoperimetric_discs"] = {{"instances", made}};

  // Equality case: the round flat disc.
  const auto D = std::make_shared<MetricSurface>(make_constant_curvature_disc(1.0, 0.0, 64));
  const Subsurface F = whole_surface(D);
  b.equality_pair("isoperimetric_1_round_equality", "euclidean_disc",
                  F.boundary_length * F.boundary_length, 4 * kPi * F.area, tol);
  const Real rho = inradius(F);
  b.equality_pair("isoperimetric_2_round_equality", "euclidean_disc", F.boundary_length,
                  F.area * ct(0.0, rho) + 2 * kPi * tn(0.0, rho / 2), tol);
}

void exp_isoperimetric_collars(const json& e, Bundle& b, const Options&) {
  const Real tol = e.value("tolerance", 0.02);
  const Real bar = e.value("error_bar", 0.0);
  std::vector<Real> widths{0.3, 0.5, 0.8};
  std::vector<Real> cores{1.0, 2.0};
  for (Real w : widths)
    for (Real s : cores) {
      auto ch = [](Real x) { return std::cosh(x); };
      const auto C = std::make_shared<MetricSurface>(
          make_warped_cylinder(ch, -w, w, s, 32, [](Real) { return -1.0; }));
      const Subsurface F = whole_surface(C);
      const std::string inst =
          "collar_w" + std::to_string(w).substr(0, 3) + "_s" + std::to_string(s).substr(0, 3);
      // Closed-form matches.
      b.equality_pair("collar_area", inst, F.area, 2 * s * std::sinh(w), tol, bar);
      b.equality_pair("collar_boundary", inst, F.boundary_length, 2 * s * std::cosh(w), tol, bar);
      const Real ell = 2 * shortest_in_homotopy_class(F).length;
      b.equality_pair("collar_ell", inst, ell, 2 * s, tol, bar);
      // Isoperimetric (3) with kappa = -1 reduces to an equality here.
      b.add_all(check_isoperimetric(F, -1.0, tol, bar));
    }
}

void exp_cheeger(const json& e, const Scene& scene, Bundle& b, const Options& opt) {
  const Real tol = e.value("tolerance", 0.02);
  const int nth = e.value("n_thresholds", 192);
  const SurfacePtr S = scene.build();
  const Subsurface F = whole_surface(S);
  const SpectralResult r = lambda0(F, opt.tol);
  const VecX psi = r.ground_state.cwiseProduct(r.ground_state);
  const SweepProfile prof = sweep(F, psi, nth);
  b.equality_pair("cavalieri", scene.id, prof.cavalieri_integral(), prof.integral_psi, 1e-3);
  b.equality_pair("coarea", scene.id, prof.coarea_integral(), prof.integral_grad, 1e-2);
  b.add(make_report("sweep_inequality", scene.id,
                    2 * std::sqrt(r.lambda0) * prof.integral_psi * (1 + 5 * r.mesh_h) + 1e-12,
                    prof.integral_grad, 0));
  const Real hch = cheeger_upper(F, nth);
  b.tables["cheeger_" + scene.id] = {{"lambda0", r.lambda0}, {"cheeger_upper", hch}};
  if (scene.model() == "euclidean_disc" || scene.model() == "constant_curvature_disc") {
    const Real radius = scene.spec["radius"].get<Real>();
    const Real h_oracle = 2.0 / radius; // full disc is the optimal competitor
    b.add(make_report("cheeger_lambda_bound", scene.id, r.lambda0,
                      h_oracle * h_oracle / 4, tol));
    b.add(make_report("cheeger_upper_close", scene.id, h_oracle * (1 + 0.03), hch, tol));
  }
  b.add(make_report("cheeger_generic_bound", scene.id, r.lambda0, hch * hch / 4, tol));
}

void exp_ess_spectrum(const json& e, const Scene& scene, Bundle& b, const Options& opt) {
  const std::vector<Real> radii = e["radii"].get<std::vector<Real>>();
  const SurfacePtr S = scene.build();
  const ExhaustionFamily fam = build_exhaustion(S, radii);
  const EssSpecEstimate est = ess_spectrum_estimate(fam, opt.tol);
  json vals = json::array();
  for (int i = 0; i < est.values.size(); ++i) vals.push_back(est.values[i]);
  b.tables["ess_" + scene.id] = {{"values", vals},
                                 {"limit_estimate", est.limit_estimate},
                                 {"artifact_slope", est.artifact_slope},
                                 {"sensitivity", est.sensitivity}};
  for (int i = 1; i < est.values.size(); ++i)
    b.add(make_report("ess_monotone", scene.id + "_level" + std::to_string(i), est.values[i],
                      est.values[i - 1], 1e-8));
  if (e.contains("expect"))
    b.equality_pair("ess_limit", scene.id, est.limit_estimate, e["expect"].get<Real>(),
                    e.value("tolerance", 0.05));
  if (e.contains("lower_bound"))
    b.add(make_report("ess_limit_lower", scene.id, est.limit_estimate,
                      e["lower_bound"].get<Real>(), 0.0));
}

void exp_cover(const json& e, const Scene& scene, Bundle& b, const Options& opt) {
  const std::vector<int> ks = e.value("ks", std::vector<int>{2, 4, 8});
  const Real tol = e.value("tolerance", 0.02);
  const Real bar = e.value("error_bar", 0.0);
  const SurfacePtr S = scene.build();
  const LoopResult loop = systole_upper(*S);
  const CoverExperiment exp = cover_experiment(S, loop, ks, opt.tol);
  json rows = json::array();
  for (const auto& r : exp.rows) {
    rows.push_back({{"sheets", r.sheets}, {"lambda0", r.lambda0}});
    const Real want = kPi * kPi / (Real(r.sheets) * r.sheets);
    b.equality_pair("cover_lambda_k" + std::to_string(r.sheets), scene.id, r.lambda0, want, tol,
                    bar);
  }
  b.add(make_report("cover_exponent_hi", scene.id, 2.1, exp.fitted_exponent, 0.0));
  b.add(make_report("cover_exponent_lo", scene.id, exp.fitted_exponent, 1.9, 0.0));
  b.add(make_report("cover_base_lambda0", scene.id, 1e-12, exp.base_lambda0, 0.0));
  b.tables["cover_" + scene.id] = {{"rows", rows}, {"fitted_exponent", exp.fitted_exponent}};
}

void exp_conformal(const json& e, const Scene& scene, Bundle& b, const Options& opt) {
  const Real t = e.value("t", 0.5);
  const Real core = e.value("core", 2.0);
  const Real ramp = e.value("ramp", 3.0);
  const std::vector<Real> radii = e["radii"].get<std::vector<Real>>();
  const Real tol = e.value("tolerance", 0.03);
  const ConformalExperiment exp =
      conformal_experiment(scene.build(), core, ramp, t, radii, opt.tol);
  b.add(make_report("conformal_candidate_bitwise", scene.id, 0.0,
                    std::abs(exp.candidate_lambda_after - exp.candidate_lambda_before), 0.0));
  b.add(make_report("conformal_ess_scaling", scene.id, tol, exp.max_ess_ratio_error, 0.0));
  b.tables["conformal_" + scene.id] = {
      {"t", t},
      {"candidate_before", exp.candidate_lambda_before},
      {"candidate_after", exp.candidate_lambda_after},
      {"bitwise_equal", exp.candidate_bitwise_equal},
      {"max_ess_ratio_error", exp.max_ess_ratio_error}};
}

void exp_annulus_gap(const json& e, const Scene& scene, Bundle& b, const Options& opt) {
  const Real delta = e.value("delta", 0.3);
  const Real tol = e.value("tolerance", 0.05);
  const SurfacePtr S = scene.build();
  const AnnulusGapReport rep = annulus_gap_diagnostic(whole_surface(S), delta, tol);
  b.add(rep.verdict);
  b.tables["annulus_gap_" + scene.id] = {{"delta", rep.delta},
                                     {"lambda0", rep.lambda0},
                                     {"ell", rep.ell},
                                     {"area", rep.area},
                                     {"lambda_prime", rep.lambda_prime},
                                     {"rhs", rep.rhs}};
  (void)opt;
}

void exp_spectrum_check(const json& e, const Scene& scene, Bundle& b, const Options& opt) {
  Options local = opt;
  local.refinements = e.value("refinements", 3);
  const json spec = run_spectrum(scene, local);
  b.tables["spectrum_" + scene.id] = spec;
  const Real value = local.refinements >= 3 ? spec["extrapolated"]["value"].get<Real>()
                                            : spec["rows"].back()["lambda0"].get<Real>();
  Real bar = e.value("error_bar", 0.0);
  if (local.refinements >= 3)
    bar = std::max(bar, spec["extrapolated"]["error_bar"].get<Real>() / std::abs(value));
  if (e.contains("expect"))
    b.equality_pair("spectrum_value", scene.id, value, e["expect"].get<Real>(),
                    e.value("tolerance", 0.01), bar);
  if (e.contains("bracket")) {
    b.add(make_report("spectrum_bracket_lo", scene.id, value, e["bracket"][0].get<Real>(), 0.0));
    b.add(make_report("spectrum_bracket_hi", scene.id, e["bracket"][1].get<Real>(), value, 0.0));
  }
}

void exp_hyperbolic_limit(const json& e, Bundle& b, const Options& opt) {
  const std::vector<Real> radii = e.value("radii", std::vector<Real>{2, 4, 6, 8});
  const int res = e.value("resolution", 48);
  const Real tol = e.value("tolerance", 0.10);
  VecX vals(radii.size());
  for (size_t i = 0; i < radii.size(); ++i) {
    const auto D = std::make_shared<MetricSurface>(make_hyperbolic_disc(radii[i], res));
    vals[i] = lambda0(whole_surface(D), opt.tol).lambda0;
  }
  json jv = json::array();
  for (int i = 0; i < vals.size(); ++i) jv.push_back(vals[i]);
  b.tables["hyperbolic_limit"] = {{"radii", radii}, {"values", jv}};
  for (size_t i = 1; i < radii.size(); ++i)
    b.add(make_report("hyperbolic_limit_decreasing", "R" + std::to_string((int)radii[i]),
                      vals[i - 1], vals[i], 0.0));
  if (e.contains("expect"))
    b.equality_pair("hyperbolic_limit_quarter", "R" + std::to_string((int)radii.back()),
                    vals[vals.size() - 1], e["expect"].get<Real>(), tol);
}

void exp_domain_monotonicity(const json& e, Bundle& b, const Options& opt) {
  const int pairs = e.value("pairs", 50);
  const int res = e.value("resolution", 24);
  const auto T = std::make_shared<MetricSurface>(make_flat_torus(Vec2(1, 0), Vec2(0, 1), res));
  const EdgeGraph g = edge_graph(*T);
  Deterministic rng(opt.seed + 99);
  Real worst = std::numeric_limits<Real>::infinity();
  int tested = 0;
  for (int trial = 0; trial < 4 * pairs && tested < pairs; ++trial) {
    const int c = static_cast<int>(rng.next() * T->nv);
    const Real r_big = 0.18 + 0.22 * rng.next();
    const Real r_small = r_big * (0.4 + 0.5 * rng.next());
    const DijkstraResult d = dijkstra(g, {c});
    auto ball = [&](Real rr) {
      std::vector<char> m(T->n_faces(), 0);
      for (int f = 0; f < T->n_faces(); ++f) {
        const Real bd = (d.dist[T->tris(f, 0)] + d.dist[T->tris(f, 1)] + d.dist[T->tris(f, 2)]) / 3;
        m[f] = bd <= rr;
      }
      return extract_subsurface(T, m);
    };
    try {
      const Real lb = lambda0(ball(r_big), opt.tol).lambda0;
      const Real ls = lambda0(ball(r_small), opt.tol).lambda0;
      worst = std::min(worst, ls / lb - 1);
      ++tested;
    } catch (const Error&) {
    }
  }
  b.tables["domain_monotonicity"] = {{"pairs", tested}, {"worst_margin", worst}};
  b.add(make_report("domain_monotonicity", "flat_torus", worst, 0.0, 1e-8));
}

json run_verify(const json& manifest, const std::string& base_dir, Options opt) {
  if (manifest.value("schema", 0) != 1) throw SchemaError("manifest schema must be 1");
  if (manifest.contains("seed")) opt.seed = manifest["seed"].get<std::uint64_t>();
  if (manifest.contains("tol")) opt.tol = manifest["tol"].get<Real>();

  Bundle b;
  for (const auto& e : manifest.value("experiments", json::array())) {
    const std::string op = e.value("op", "");
    if (op == "sandwich") {
      exp_sandwich(e, manifest_scene(manifest, e["scene"], base_dir), b, opt);
    } else if (op == "curvature_systole_bound") {
      exp_curvature_systole_bound(e, manifest_scene(manifest, e["scene"], base_dir), b, opt);
    } else if (op == "random_tori_bound") {
      exp_random_tori_bound(e, b, opt);
    } else if (op == "hyperbolic_floor") {
      exp_hyperbolic_floor(e, manifest_scene(manifest, e["scene"], base_dir), b, opt);
    } else if (op == "isoperimetric_discs") {
      exp_isoperimetric_discs(e, b, opt);
    } else if (op == "isoperimetric_collars") {
      exp_isoperimetric_collars(e, b, opt);
    } else if (op == "cheeger") {
      exp_cheeger(e, manifest_scene(manifest, e["scene"], base_dir), b, opt);
    } else if (op == "ess_spectrum") {
      exp_ess_spectrum(e, manifest_scene(manifest, e["scene"], base_dir), b, opt);
    } else if (op == "cover") {
      exp_cover(e, manifest_scene(manifest, e["scene"], base_dir), b, opt);
    } else if (op == "conformal") {
      exp_conformal(e, manifest_scene(manifest, e["scene"], base_dir), b, opt);
    } else if (op == "annulus_gap") {
      exp_annulus_gap(e, manifest_scene(manifest, e["scene"], base_dir), b, opt);
    } else if (op == "spectrum_check") {
      exp_spectrum_check(e, manifest_scene(manifest, e["scene"], base_dir), b, opt);
    } else if (op == "hyperbolic_limit") {
      exp_hyperbolic_limit(e, b, opt);
    } else if (op == "domain_monotonicity") {
      exp_domain_monotonicity(e, b, opt);
    } else {
      throw SchemaError("unknown experiment op '" + op + "'");
    }
  }

  int holds = 0, violated = 0, inconclusive = 0;
  json reports = json::array();
  for (const auto& r : b.reports) {
    reports.push_back(report_json(r));
    switch (r.verdict) {
      case Verdict::Holds: ++holds; break;
      case Verdict::Violated: ++violated; break;
      default: ++inconclusive; break;
    }
  }
  json inconclusive_list = json::array();
  for (const auto& r : b.reports)
    if (r.verdict == Verdict::Inconclusive) inconclusive_list.push_back(r.name);

  return json{{"schema", 1},
              {"tool_version", kToolVersion},
              {"seed", opt.seed},
              {"reports", reports},
              {"tables", b.tables},
              {"summary",
               {{"holds", holds},
                {"violated", violated},
                {"inconclusive", inconclusive},
                {"inconclusive_names", inconclusive_list}}}};
}

// ---------------------------------------------------------------------------
// plot

void run_plot(const std::string& results_path, const std::string& out_dir) {
  std::ifstream in(results_path);
  if (!in) throw SchemaError("cannot open results " + results_path);
  json res;
  try {
    in >> res;
  } catch (const std::exception& e) {
    throw SchemaError(std::string("results parse error: ") + e.what());
  }
  ensure_dir(out_dir);
  bool wrote = false;

  const json tables = res.value("tables", json::object());
  if (tables.contains("sandwich")) {
    const json& t = tables["sandwich"];
    SvgPlot plot("analytic systole sandwich", "candidate index", "lambda0");
    std::vector<Real> xs, ys;
    int i = 0;
    for (const auto& c : t["candidates"]) {
      xs.push_back(i++);
      ys.push_back(c["lambda0"].get<Real>());
    }
    plot.add_series("candidates", xs, ys, "#3366cc");
    plot.add_hline(t["lower"].get<Real>(), "lower bound", "#cc3333");
    plot.add_hline(t["upper"].get<Real>(), "upper bound", "#cc8833");
    plot.add_hline(t["lambda_upper"].get<Real>(), "lambda_up", "#338833");
    write_file(out_dir + "/sandwich.svg", plot.render());
    wrote = true;

    SvgPlot widths("candidate families", "parameter", "lambda0", false, true);
    std::vector<Real> bx, by, cx2, cy2, sx, sy;
    for (const auto& c : t["candidates"]) {
      const std::string fam = c["family"];
      const Real p = c["param"].get<Real>(), l = c["lambda0"].get<Real>();
      if (fam == "ball") {
        bx.push_back(p);
        by.push_back(l);
      } else if (fam == "collar") {
        cx2.push_back(p);
        cy2.push_back(l);
      } else {
        sx.push_back(p);
        sy.push_back(l);
      }
    }
    if (!bx.empty()) widths.add_series("ball radius", bx, by, "#3366cc");
    if (!cx2.empty()) widths.add_series("collar width", cx2, cy2, "#cc3333");
    if (!sx.empty()) widths.add_series("superlevel t", sx, sy, "#338833");
    write_file(out_dir + "/candidates.svg", widths.render());
  }
  for (auto it = tables.begin(); it != tables.end(); ++it) {
    if (it.key().rfind("cover_", 0) == 0) {
      SvgPlot plot("cover decay", "sheets k", "lambda0", true, true);
      std::vector<Real> xs, ys;
      for (const auto& r : it.value()["rows"]) {
        xs.push_back(r["sheets"].get<Real>());
        ys.push_back(r["lambda0"].get<Real>());
      }
      plot.add_series("lambda0(k-chain)", xs, ys, "#3366cc");
      std::vector<Real> fx, fy;
      for (Real k : xs) {
        fx.push_back(k);
        fy.push_back(kPi * kPi / (k * k));
      }
      plot.add_series("pi^2/k^2", fx, fy, "#cc3333");
      write_file(out_dir + "/" + it.key() + ".svg", plot.render());
      wrote = true;
    }
    if (it.key().rfind("ess_", 0) == 0) {
      SvgPlot plot("essential spectrum truncations", "level", "lambda0");
      std::vector<Real> xs, ys;
      int i = 0;
      for (const auto& v : it.value()["values"]) {
        xs.push_back(i++);
        ys.push_back(v.get<Real>());
      }
      plot.add_series("lambda0(complement)", xs, ys, "#3366cc");
      plot.add_hline(it.value()["limit_estimate"].get<Real>(), "limit estimate", "#338833");
      write_file(out_dir + "/" + it.key() + ".svg", plot.render());
      wrote = true;
    }
  }
  // Standalone cover.json / lambda.json inputs.
  if (res.contains("rows") && res.contains("fitted_exponent")) {
    SvgPlot plot("cover decay", "sheets k", "lambda0", true, true);
    std::vector<Real> xs, ys;
    for (const auto& r : res["rows"]) {
      xs.push_back(r["sheets"].get<Real>());
      ys.push_back(r["lambda0"].get<Real>());
    }
    plot.add_series("lambda0(k-chain)", xs, ys, "#3366cc");
    write_file(out_dir + "/cover.svg", plot.render());
    wrote = true;
  }
  if (res.contains("candidates")) {
    SvgPlot plot("candidate lambda0", "parameter", "lambda0", false, true);
    std::vector<Real> xs, ys;
    for (const auto& c : res["candidates"]) {
      xs.push_back(c["param"].get<Real>());
      ys.push_back(c["lambda0"].get<Real>());
    }
    plot.add_series("candidates", xs, ys, "#3366cc");
    write_file(out_dir + "/candidates.svg", plot.render());
    wrote = true;
  }
  if (!wrote) throw SchemaError("results contain nothing to plot");
}

std::string csv_from_bundle(const json& verify_out) {
  std::vector<InequalityReport> rs;
  for (const auto& r : verify_out["reports"]) {
    InequalityReport rep;
    rep.name = r["name"];
    rep.instance = r["instance"];
    rep.lhs = r["lhs"].get<Real>();
    rep.rhs = r["rhs"].get<Real>();
    rep.tolerance = r["tolerance"].get<Real>();
    rep.error_bar = r["error_bar"].get<Real>();
    const std::string v = r["verdict"];
    rep.verdict = v == "Holds" ? Verdict::Holds
                               : (v == "Violated" ? Verdict::Violated : Verdict::Inconclusive);
    rs.push_back(rep);
  }
  return reports_to_csv(rs);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"systole-lab: spectral geometry laboratory"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--tol", opt.tol, "eigensolver tolerance");
    cmd->add_option("--seed", opt.seed, "seed for randomized suites");
    cmd->add_option("--jobs", opt.jobs, "worker threads (SYSTOLE_LAB_JOBS overrides)");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "first Dirichlet eigenvalue of a scene");
  spectrum->add_option("--scene", opt.scene_path, "scene JSON")->required();
  spectrum->add_option("--refinements", opt.refinements, "number of nested refinements");
  spectrum->add_option("--modes", opt.modes, "also report the first K+1 closed-surface modes");
  spectrum->add_option("--export-off", opt.export_off, "write the finest mesh as OFF");
  add_common(spectrum);

  CLI::App* systole = app.add_subcommand("systole", "shortest essential loop of a scene");
  systole->add_option("--scene", opt.scene_path, "scene JSON")->required();
  add_common(systole);

  CLI::App* lambda_cmd = app.add_subcommand("lambda", "analytic-systole bounds of a scene");
  lambda_cmd->add_option("--scene", opt.scene_path, "scene JSON")->required();
  add_common(lambda_cmd);

  CLI::App* cover = app.add_subcommand("cover", "cyclic cover eigenvalue decay");
  cover->add_option("--scene", opt.scene_path, "scene JSON")->required();
  cover->add_option("--ks", opt.ks, "comma-separated sheet counts");
  add_common(cover);

  CLI::App* verify = app.add_subcommand("verify", "run a manifest of experiments");
  verify->add_option("--manifest", opt.manifest_path, "manifest JSON")->required();
  add_common(verify);

  CLI::App* plot = app.add_subcommand("plot", "render SVG plots from results");
  plot->add_option("--results", opt.results_path, "results JSON (report/lambda/cover)")
      ->required();
  add_common(plot);

  CLI11_PARSE(app, argc, argv);

  try {
    ensure_dir(opt.out_dir);
    if (spectrum->parsed()) {
      const json out = run_spectrum(load_scene(opt.scene_path), opt);
      write_file(opt.out_dir + "/spectrum.json", out.dump(2) + "\n");
      std::string csv = "resolution,n_vertices,lambda0,mesh_h\n";
      char buf[256];
      for (const auto& r : out["rows"]) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.12g,%.12g\n", r["resolution"].get<int>(),
                      r["n_vertices"].get<int>(), r["lambda0"].get<Real>(),
                      r["mesh_h"].get<Real>());
        csv += buf;
      }
      if (out.contains("extrapolated")) {
        std::snprintf(buf, sizeof(buf), "extrapolated,,%.12g,%.12g\n",
                      out["extrapolated"]["value"].get<Real>(),
                      out["extrapolated"]["error_bar"].get<Real>());
        csv += buf;
      }
      write_file(opt.out_dir + "/spectrum.csv", csv);
      std::cout << out["rows"].back()["lambda0"].get<Real>() << "\n";
    } else if (systole->parsed()) {
      const json out = run_systole(load_scene(opt.scene_path), opt);
      write_file(opt.out_dir + "/systole.json", out.dump(2) + "\n");
      std::cout << out["length"].get<Real>() << "\n";
    } else if (lambda_cmd->parsed()) {
      const json out = run_lambda(load_scene(opt.scene_path), opt);
      write_file(opt.out_dir + "/lambda.json", out.dump(2) + "\n");
      std::string csv = "id,family,class,param,lambda0,area,n_faces\n";
      char buf[256];
      for (const auto& c : out["candidates"]) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.12g,%.12g,%.12g,%d\n",
                      c["id"].get<std::string>().c_str(),
                      c["family"].get<std::string>().c_str(),
                      c["class"].get<std::string>().c_str(), c["param"].get<Real>(),
                      c["lambda0"].get<Real>(), c["area"].get<Real>(), c["n_faces"].get<int>());
        csv += buf;
      }
      write_file(opt.out_dir + "/candidates.csv", csv);
      std::cout << out["lambda_upper"].get<Real>() << "\n";
    } else if (cover->parsed()) {
      std::vector<int> ks;
      for (size_t pos = 0; pos < opt.ks.size();) {
        const size_t comma = opt.ks.find(',', pos);
        ks.push_back(std::stoi(opt.ks.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      const json out = run_cover(load_scene(opt.scene_path), ks, opt);
      write_file(opt.out_dir + "/cover.json", out.dump(2) + "\n");
      std::string csv = "sheets,lambda0\n";
      char buf[128];
      for (const auto& r : out["rows"]) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g\n", r["sheets"].get<int>(),
                      r["lambda0"].get<Real>());
        csv += buf;
      }
      write_file(opt.out_dir + "/cover.csv", csv);
      std::cout << out["fitted_exponent"].get<Real>() << "\n";
    } else if (verify->parsed()) {
      std::ifstream in(opt.manifest_path);
      if (!in) throw SchemaError("cannot open manifest " + opt.manifest_path);
      json manifest;
      try {
        in >> manifest;
      } catch (const std::exception& e) {
        throw SchemaError(std::string("manifest parse error: ") + e.what());
      }
      const std::string base_dir = fs::path(opt.manifest_path).parent_path().string();
      const json out = run_verify(manifest, base_dir.empty() ? "." : base_dir, opt);
      write_file(opt.out_dir + "/report.json", out.dump(2) + "\n");
      write_file(opt.out_dir + "/report.csv", csv_from_bundle(out));
      const auto& s = out["summary"];
      std::cout << "holds=" << s["holds"] << " violated=" << s["violated"]
                << " inconclusive=" << s["inconclusive"] << "\n";
      if (s["violated"].get<int>() > 0) return 4;
    } else if (plot->parsed()) {
      run_plot(opt.results_path, opt.out_dir);
    }
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverDivergence& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
