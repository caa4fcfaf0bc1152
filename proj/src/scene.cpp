#include "sgl/scene.hpp"

#include "sgl/cmpfun.hpp"
#include "sgl/generators.hpp"
#include "sgl/geodesics.hpp"

#include <cmath>
#include <fstream>

namespace sgl {

namespace {

using nlohmann::json;

Real num(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw SchemaError(std::string("missing numeric field '") + key + "'");
  return j[key].get<Real>();
}

Real num_or(const json& j, const char* key, Real fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw SchemaError(std::string("field '") + key + "' must be a number");
  return j[key].get<Real>();
}

Vec2 vec2(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
    throw SchemaError(std::string("field '") + key + "' must be [x, y]");
  return Vec2(j[key][0].get<Real>(), j[key][1].get<Real>());
}

// C-infinity monotone ramp from -1 at ramp[0] to kappa_inf at ramp[1].
std::function<Real(Real)> kappa_profile(Real k_inf, Real r0, Real r1) {
  return [k_inf, r0, r1](Real x) {
    if (x <= r0) return Real(-1);
    if (x >= r1) return k_inf;
    const Real s = (x - r0) / (r1 - r0);
    const Real a = std::exp(-1 / s), b = std::exp(-1 / (1 - s));
    return -1 + (k_inf + 1) * a / (a + b);
  };
}

struct WarpSpec {
  std::function<Real(Real)> warp;
  std::function<Real(Real)> curvature; // may be empty
  Real kappa_bound = 0;
};

WarpSpec parse_warp(const json& spec, Real x1) {
  if (!spec.contains("warp")) throw SchemaError("warped_cylinder needs a 'warp' object");
  const json& w = spec["warp"];
  const std::string kind = w.value("kind", "");
  WarpSpec out;
  if (kind == "constant") {
    const Real c = num_or(w, "value", 1.0);
    if (!(c > 0)) throw SchemaError("constant warp must be positive");
    out.warp = [c](Real) { return c; };
    out.curvature = [](Real) { return Real(0); };
    out.kappa_bound = 0;
  } else if (kind == "cosh") {
    out.warp = [](Real x) { return std::cosh(x); };
    out.curvature = [](Real) { return Real(-1); };
    out.kappa_bound = -1;
  } else if (kind == "exp_decay") {
    out.warp = [](Real x) { return std::exp(-x); };
    out.curvature = [](Real) { return Real(-1); };
    out.kappa_bound = -1;
  } else if (kind == "funnel_ode") {
    const Real k_inf = num(w, "kappa_infinity");
    if (!(k_inf <= -1)) throw SchemaError("kappa_infinity must be <= -1");
    Real r0 = 1.0, r1 = 3.0;
    if (w.contains("ramp")) {
      r0 = w["ramp"][0].get<Real>();
      r1 = w["ramp"][1].get<Real>();
    }
    if (!(r0 >= 1.0 - 1e-12 && r1 > r0)) throw SchemaError("ramp must start at x >= 1");
    const auto kap = kappa_profile(k_inf, r0, r1);
    const std::string mode = w.value("mode", "expanding");
    const FunnelMode fm = (mode == "cusp") ? FunnelMode::Cusp : FunnelMode::Expanding;
    const int samples = std::max(512, static_cast<int>(x1 * 256));
    auto profile = std::make_shared<WarpProfile>(funnel_warp(kap, fm, x1, samples));
    out.warp = [profile](Real x) { return profile->eval(x); };
    out.curvature = kap;
    out.kappa_bound = -1;
  } else {
    throw SchemaError("unknown warp kind '" + kind + "'");
  }
  return out;
}

} // namespace

std::string Scene::model() const { return spec.value("model", ""); }

int Scene::resolution() const {
  if (!spec.contains("resolution")) throw SchemaError("scene needs 'resolution'");
  return spec["resolution"].get<int>();
}

SurfacePtr Scene::build(int resolution_override) const {
  const int res = resolution_override > 0 ? resolution_override : resolution();
  const std::string m = model();
  MetricSurface S;
  if (m == "flat_torus") {
    S = make_flat_torus(vec2(spec, "basis_a"), vec2(spec, "basis_b"), res);
  } else if (m == "klein_bottle_flat") {
    S = make_klein_bottle_flat(num(spec, "width"), num(spec, "height"), res);
  } else if (m == "hyperbolic_octagon") {
    S = make_hyperbolic_octagon(res);
  } else if (m == "hyperbolic_disc") {
    S = make_hyperbolic_disc(num(spec, "radius"), res);
  } else if (m == "euclidean_disc") {
    S = make_constant_curvature_disc(num(spec, "radius"), 0.0, res);
    S.model = "euclidean_disc";
  } else if (m == "constant_curvature_disc") {
    S = make_constant_curvature_disc(num(spec, "radius"), num(spec, "curvature"), res);
  } else if (m == "warped_cylinder") {
    const Real x0 = spec["x_range"][0].get<Real>();
    const Real x1 = spec["x_range"][1].get<Real>();
    const Real circ = num(spec, "circumference");
    const WarpSpec w = parse_warp(spec, x1);
    S = make_warped_cylinder(w.warp, x0, x1, circ, res, w.curvature);
  } else {
    throw SchemaError("unknown model '" + m + "'");
  }
  return std::make_shared<MetricSurface>(std::move(S));
}

Real Scene::curvature_bound() const {
  const std::string m = model();
  if (m == "flat_torus" || m == "klein_bottle_flat" || m == "euclidean_disc") return 0;
  if (m == "hyperbolic_octagon" || m == "hyperbolic_disc") return -1;
  if (m == "constant_curvature_disc") return num(spec, "curvature");
  if (m == "warped_cylinder") return parse_warp(spec, spec["x_range"][1].get<Real>()).kappa_bound;
  throw SchemaError("unknown model '" + m + "'");
}

std::optional<Real> Scene::certified_systole() const {
  const std::string m = model();
  if (m == "flat_torus")
    return flat_torus_systole_oracle(vec2(spec, "basis_a"), vec2(spec, "basis_b"));
  if (m == "hyperbolic_octagon") return 2 * std::acosh(1 + std::sqrt(2.0));
  return std::nullopt;
}

Scene parse_scene(const nlohmann::json& spec, const std::string& id) {
  if (!spec.is_object()) throw SchemaError("scene spec must be an object");
  if (spec.value("schema", 0) != 1) throw SchemaError("scene schema must be 1");
  if (!spec.contains("model")) throw SchemaError("scene needs 'model'");
  Scene s;
  s.spec = spec;
  s.id = id;
  s.resolution();       // validate now
  s.curvature_bound();  // validates model + warp
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scene file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw SchemaError("scene parse error in " + path + ": " + e.what());
  }
  return parse_scene(j, path);
}

void write_off(const MetricSurface& S, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out << "OFF\n" << S.nv << " " << S.n_faces() << " 0\n";
  char buf[256];
  for (int v = 0; v < S.nv; ++v) {
    const Real x = S.positions.rows() == S.nv ? S.positions(v, 0) : 0;
    const Real y = S.positions.rows() == S.nv ? S.positions(v, 1) : 0;
    const Real z = S.positions.rows() == S.nv ? S.positions(v, 2) : 0;
    std::snprintf(buf, sizeof(buf), "%.12g %.12g %.12g\n", x, y, z);
    out << buf;
  }
  for (int f = 0; f < S.n_faces(); ++f)
    out << "3 " << S.tris(f, 0) << " " << S.tris(f, 1) << " " << S.tris(f, 2) << "\n";
  out.close();

  std::ofstream aux(path + ".lengths");
  aux << "# edge lengths: v0 v1 length\n";
  for (int e = 0; e < S.topo.n_edges(); ++e) {
    std::snprintf(buf, sizeof(buf), "%d %d %.12g\n", S.topo.edges(e, 0), S.topo.edges(e, 1),
                  S.edge_length(e));
    aux << buf;
  }
}

} // namespace sgl
