#pragma once

#include "sgl/mesh.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace sgl {

/// Scene spec: {"schema":1, "model":..., parameters..., "resolution":n}.
/// Models: flat_torus, klein_bottle_flat, hyperbolic_octagon, warped_cylinder,
/// hyperbolic_disc, euclidean_disc, constant_curvature_disc.
struct Scene {
  nlohmann::json spec;
  std::string id;

  std::string model() const;
  int resolution() const;

  /// Builds the surface, optionally overriding the resolution.
  SurfacePtr build(int resolution_override = 0) const;

  /// Upper curvature bound implied by the model.
  Real curvature_bound() const;

  /// Exact systole when the model admits an independent oracle.
  std::optional<Real> certified_systole() const;
};

Scene parse_scene(const nlohmann::json& spec, const std::string& id = "scene");
Scene load_scene(const std::string& path);

/// OFF export with an auxiliary `<path>.lengths` table of canonical edge
/// lengths (the OFF coordinates are construction-chart positions).
void write_off(const MetricSurface& S, const std::string& path);

} // namespace sgl
