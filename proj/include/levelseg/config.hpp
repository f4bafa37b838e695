#pragma once

// JSON encodings of model parameters, seed regions and synthetic scenes.
// Missing keys keep their defaults; unknown keys are rejected so that typos
// do not silently fall back to a default.

#include <json.hpp>

#include <set>
#include <string>

#include "levelseg/levelset.hpp"
#include "levelseg/models.hpp"
#include "levelseg/synthetic.hpp"

namespace levelseg {

using Json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw InvalidParameter(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw InvalidParameter(std::string(what) + ": unknown key '" + key + "'");
}

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InvalidParameter(std::string("bad value for '") + key + "'");
  }
}

}  // namespace detail

inline ModelParams params_from_json(const Json& j, ModelParams base = {}) {
  detail::reject_unknown_keys(j,
                              {"dt", "p", "eps", "mu", "nu", "sigma_s", "sigma_m", "lambda1", "lambda2",
                               "alpha1", "alpha2", "sigma_lbf", "nu_cv", "max_iters", "tol"},
                              "params");
  detail::read_field(j, "dt", base.dt);
  detail::read_field(j, "p", base.p);
  detail::read_field(j, "eps", base.eps);
  detail::read_field(j, "mu", base.mu);
  detail::read_field(j, "nu", base.nu);
  detail::read_field(j, "sigma_s", base.sigma_s);
  detail::read_field(j, "sigma_m", base.sigma_m);
  detail::read_field(j, "lambda1", base.lambda1);
  detail::read_field(j, "lambda2", base.lambda2);
  detail::read_field(j, "alpha1", base.alpha1);
  detail::read_field(j, "alpha2", base.alpha2);
  detail::read_field(j, "sigma_lbf", base.sigma_lbf);
  detail::read_field(j, "nu_cv", base.nu_cv);
  detail::read_field(j, "max_iters", base.max_iters);
  detail::read_field(j, "tol", base.tol);
  base.validate();
  return base;
}

inline Json params_to_json(const ModelParams& p) {
  return {{"dt", p.dt},           {"p", p.p},           {"eps", p.eps},         {"mu", p.mu},
          {"nu", p.nu},           {"sigma_s", p.sigma_s}, {"sigma_m", p.sigma_m}, {"lambda1", p.lambda1},
          {"lambda2", p.lambda2}, {"alpha1", p.alpha1}, {"alpha2", p.alpha2},   {"sigma_lbf", p.sigma_lbf},
          {"nu_cv", p.nu_cv},     {"max_iters", p.max_iters}, {"tol", p.tol}};
}

// {"rect": [x0, y0, w, h]} or {"disk": [cx, cy, r]}.
inline RegionSpec region_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"rect", "disk"}, "seed");
  if (j.size() != 1) throw InvalidParameter("seed needs exactly one of 'rect' or 'disk'");
  try {
    if (j.contains("rect")) {
      const auto v = j.at("rect").get<std::vector<int>>();
      if (v.size() != 4) throw InvalidParameter("seed rect needs 4 numbers");
      return RectRegion{v[0], v[1], v[2], v[3]};
    }
    const auto v = j.at("disk").get<std::vector<double>>();
    if (v.size() != 3) throw InvalidParameter("seed disk needs 3 numbers");
    return DiskRegion{v[0], v[1], v[2]};
  } catch (const Json::exception&) {
    throw InvalidParameter("seed values must be numbers");
  }
}

inline Json region_to_json(const RegionSpec& r) {
  if (const auto* rect = std::get_if<RectRegion>(&r)) return {{"rect", {rect->x0, rect->y0, rect->width, rect->height}}};
  if (const auto* disk = std::get_if<DiskRegion>(&r)) return {{"disk", {disk->cx, disk->cy, disk->radius}}};
  throw InvalidParameter("mask seeds have no JSON form");
}

inline ShapeKind parse_shape_kind(const std::string& s) {
  if (s == "disk") return ShapeKind::disk;
  if (s == "rectangle") return ShapeKind::rectangle;
  if (s == "star") return ShapeKind::star;
  throw InvalidParameter("unknown shape kind '" + s + "' (disk, rectangle, star)");
}

inline const char* shape_kind_name(ShapeKind k) {
  switch (k) {
    case ShapeKind::disk: return "disk";
    case ShapeKind::rectangle: return "rectangle";
    case ShapeKind::star: return "star";
  }
  return "?";
}

inline BiasKind parse_bias_kind(const std::string& s) {
  if (s == "none") return BiasKind::none;
  if (s == "linear") return BiasKind::linear;
  if (s == "radial") return BiasKind::radial;
  throw InvalidParameter("unknown bias kind '" + s + "' (none, linear, radial)");
}

inline const char* bias_kind_name(BiasKind k) {
  switch (k) {
    case BiasKind::none: return "none";
    case BiasKind::linear: return "linear";
    case BiasKind::radial: return "radial";
  }
  return "?";
}

inline SceneSpec scene_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"width", "height", "background", "shapes", "bias"}, "scene");
  SceneSpec spec;
  detail::read_field(j, "width", spec.width);
  detail::read_field(j, "height", spec.height);
  detail::read_field(j, "background", spec.background);
  if (j.contains("shapes")) {
    if (!j.at("shapes").is_array()) throw InvalidParameter("scene shapes must be an array");
    for (const Json& s : j.at("shapes")) {
      detail::reject_unknown_keys(s, {"kind", "params", "intensity"}, "shape");
      ShapeSpec shape;
      std::string kind = "disk";
      detail::read_field(s, "kind", kind);
      shape.kind = parse_shape_kind(kind);
      detail::read_field(s, "params", shape.params);
      detail::read_field(s, "intensity", shape.intensity);
      spec.shapes.push_back(std::move(shape));
    }
  }
  if (j.contains("bias")) {
    const Json& b = j.at("bias");
    detail::reject_unknown_keys(b, {"kind", "strength", "angle"}, "bias");
    std::string kind = "none";
    detail::read_field(b, "kind", kind);
    spec.bias.kind = parse_bias_kind(kind);
    detail::read_field(b, "strength", spec.bias.strength);
    detail::read_field(b, "angle", spec.bias.angle);
  }
  if (spec.width < 3 || spec.height < 3) throw InvalidParameter("scene must be at least 3x3");
  return spec;
}

inline Json scene_to_json(const SceneSpec& spec) {
  Json shapes = Json::array();
  for (const ShapeSpec& s : spec.shapes)
    shapes.push_back({{"kind", shape_kind_name(s.kind)}, {"params", s.params}, {"intensity", s.intensity}});
  return {{"width", spec.width},
          {"height", spec.height},
          {"background", spec.background},
          {"shapes", shapes},
          {"bias",
           {{"kind", bias_kind_name(spec.bias.kind)}, {"strength", spec.bias.strength}, {"angle", spec.bias.angle}}}};
}

}  // namespace levelseg
