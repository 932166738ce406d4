// Copyright 2026 The MSA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// YAML experiment configuration. The schema is documented in docs/config.md.

#pragma once

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "msa/eval.hpp"

namespace msa {

enum class Method { hoa, single, mshoa };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::hoa: return "HOA";
    case Method::single: return "Single";
    case Method::mshoa: return "MSHOA";
  }
  return "?";
}

struct SigmaSearch {
  double min = 1e-16;
  double max = 1e2;
  int points = 19;
  bool relative = true;  // bounds are multiples of |T_F|_2^2
};

struct RegularizationSpec {
  double sigma = 0.0;
  bool relative = false;  // sigma is a multiple of |T_F|_2^2
  std::optional<SigmaSearch> search;
};

struct HoaSpec {
  std::vector<int> truncations{14};
  double sigma_relative = 0.0;  // multiple of |Lambda|_2^2
};

struct ExperimentConfig {
  SceneConfig scene;
  Method method = Method::mshoa;
  RegularizationSpec regularization;
  HoaSpec hoa;
  GridSpec grid;
  std::optional<double> search_resolution;  // coarser pixels for hyperparameter searches
  double threshold = 30.0;
  std::string output = "out";
  unsigned threads = 1;

  /// Hash of everything that affects results (not output path or threads).
  std::uint64_t hash() const {
    Fnv1a h;
    h.add(static_cast<std::int64_t>(scene.hash()));
    if (const auto* pw = std::get_if<PlaneWave>(&scene.source)) {
      h.add(std::int64_t{0}).add(pw->direction);
    } else {
      const auto& mono = std::get<Monopole>(scene.source);
      h.add(std::int64_t{1}).add(mono.position).add(mono.amplitude.real()).add(mono.amplitude.imag());
    }
    h.add(to_string(method));
    h.add(regularization.sigma).add(std::int64_t{regularization.relative});
    if (regularization.search) {
      const auto& s = *regularization.search;
      h.add(s.min).add(s.max).add(std::int64_t{s.points}).add(std::int64_t{s.relative});
    }
    for (int n : hoa.truncations) h.add(std::int64_t{n});
    h.add(hoa.sigma_relative);
    h.add(to_string(grid.plane)).add(grid.offset).add(grid.center_u).add(grid.center_v);
    h.add(grid.width).add(grid.height).add(grid.resolution);
    h.add(search_resolution.value_or(0.0)).add(threshold);
    return h.value();
  }
};

namespace detail {

inline std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.line < 0) return "";
  return " (line " + std::to_string(mark.line + 1) + ")";
}

[[noreturn]] inline void config_fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what + where(node));
}

inline void check_keys(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) config_fail(node, section, "expected a mapping");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key)) config_fail(kv.first, section, "unknown key '" + key + "'");
  }
}

template <typename T>
T get(const YAML::Node& parent, const char* key, const std::string& section) {
  const YAML::Node node = parent[key];
  if (!node) config_fail(parent, section + "." + key, "required");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    config_fail(node, section + "." + key, "has the wrong type");
  }
}

template <typename T>
T get_or(const YAML::Node& parent, const char* key, const std::string& section, T fallback) {
  if (!parent[key]) return fallback;
  return get<T>(parent, key, section);
}

template <typename T>
T as(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    config_fail(node, field, "has the wrong type");
  }
}

inline Vec3 get_vec3(const YAML::Node& parent, const char* key, const std::string& section) {
  const YAML::Node node = parent[key];
  if (!node) config_fail(parent, section + "." + key, "required");
  if (!node.IsSequence() || node.size() != 3) config_fail(node, section + "." + key, "expected [x, y, z]");
  try {
    return {node[0].as<double>(), node[1].as<double>(), node[2].as<double>()};
  } catch (const YAML::Exception&) {
    config_fail(node, section + "." + key, "expected numbers");
  }
}

inline Axis parse_axis(const YAML::Node& node, const std::string& field) {
  const auto s = as<std::string>(node, field);
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "z") return Axis::z;
  config_fail(node, field, "expected x, y or z");
}

inline Plane parse_plane(const YAML::Node& node, const std::string& field) {
  const auto s = as<std::string>(node, field);
  if (s == "xy") return Plane::xy;
  if (s == "yz") return Plane::yz;
  if (s == "xz") return Plane::xz;
  config_fail(node, field, "expected xy, yz or xz");
}

inline std::vector<RsmaSpec> parse_spheres(const YAML::Node& node) {
  const std::string sec = "scene.spheres";
  check_keys(node, sec, {"layout", "count", "rows", "cols", "spacing", "axis", "plane", "radius", "capsules", "centers"});
  const auto layout = get_or<std::string>(node, "layout", sec, "linear");
  const double radius = get<double>(node, "radius", sec);
  const int capsules = get<int>(node, "capsules", sec);
  if (!(radius > 0.0)) config_fail(node["radius"], sec + ".radius", "must be > 0");
  if (capsules < 1) config_fail(node["capsules"], sec + ".capsules", "must be >= 1");
  std::vector<Vec3> centers;
  try {
    if (layout == "linear") {
      const Axis axis = node["axis"] ? parse_axis(node["axis"], sec + ".axis") : Axis::x;
      centers = layout_linear(get<int>(node, "count", sec), get_or<double>(node, "spacing", sec, 0.0), axis, radius);
    } else if (layout == "cartesian") {
      const Plane plane = node["plane"] ? parse_plane(node["plane"], sec + ".plane") : Plane::xy;
      centers = layout_cartesian(get<int>(node, "rows", sec), get<int>(node, "cols", sec),
                                 get<double>(node, "spacing", sec), plane, radius);
    } else if (layout == "explicit") {
      const YAML::Node list = node["centers"];
      if (!list || !list.IsSequence() || list.size() == 0) config_fail(node, sec + ".centers", "expected a list of [x, y, z]");
      for (const auto& c : list) {
        if (!c.IsSequence() || c.size() != 3) config_fail(c, sec + ".centers", "expected [x, y, z]");
        centers.emplace_back(as<double>(c[0], sec + ".centers"), as<double>(c[1], sec + ".centers"),
                             as<double>(c[2], sec + ".centers"));
      }
    } else {
      config_fail(node["layout"], sec + ".layout", "expected linear, cartesian or explicit");
    }
  } catch (const GeometryError& e) {
    config_fail(node, sec, e.what());
  }
  return make_arrays(centers, radius, static_cast<std::size_t>(capsules));
}

inline IncidentSource parse_source(const YAML::Node& node) {
  const std::string sec = "scene.source";
  check_keys(node, sec, {"type", "position", "amplitude", "direction"});
  const auto type = get<std::string>(node, "type", sec);
  if (type == "monopole") {
    Monopole m;
    m.position = get_vec3(node, "position", sec);
    m.amplitude = get_or<double>(node, "amplitude", sec, 1.0);
    return m;
  }
  if (type == "plane_wave") {
    const Vec3 d = get_vec3(node, "direction", sec);
    if (!(d.norm() > 0.0)) config_fail(node["direction"], sec + ".direction", "must be nonzero");
    return PlaneWave{d.normalized()};
  }
  config_fail(node["type"], sec + ".type", "expected monopole or plane_wave");
}

}  // namespace detail

/// Parses, defaults and validates an experiment configuration.
inline ExperimentConfig validate_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  using detail::config_fail;
  using detail::get;
  using detail::get_or;
  if (!root || !root.IsMap()) throw ConfigError("config must be a mapping with at least a 'scene' section");
  detail::check_keys(root, "config", {"scene", "method", "regularization", "hoa", "evaluation", "output", "threads"});

  ExperimentConfig cfg;
  const YAML::Node scene = root["scene"];
  if (!scene) throw ConfigError("scene: required");
  detail::check_keys(scene, "scene", {"sound_speed", "frequency", "spheres", "source", "truncation", "incident_eval"});
  cfg.scene.sound_speed = get_or<double>(scene, "sound_speed", "scene", 343.0);
  cfg.scene.frequency = get<double>(scene, "frequency", "scene");
  if (!(cfg.scene.sound_speed > 0.0)) config_fail(scene["sound_speed"], "scene.sound_speed", "must be > 0");
  if (!(cfg.scene.frequency > 0.0)) config_fail(scene["frequency"], "scene.frequency", "must be > 0");
  if (!scene["spheres"]) config_fail(scene, "scene.spheres", "required");
  cfg.scene.spheres = detail::parse_spheres(scene["spheres"]);
  if (!scene["source"]) config_fail(scene, "scene.source", "required");
  cfg.scene.source = detail::parse_source(scene["source"]);

  const double k = cfg.scene.wavenumber();
  const double a = cfg.scene.spheres.front().radius;
  const int heuristic = static_cast<int>(std::floor(std::numbers::e * k * a));
  const YAML::Node trunc = scene["truncation"];
  if (trunc) {
    detail::check_keys(trunc, "scene.truncation", {"incident", "forward"});
    cfg.scene.n_in = get<int>(trunc, "incident", "scene.truncation");
    cfg.scene.n_fwd = get_or<int>(trunc, "forward", "scene.truncation", heuristic);
  } else {
    config_fail(scene, "scene.truncation", "required (incident, optional forward)");
  }
  if (cfg.scene.n_in < 0) config_fail(trunc["incident"], "scene.truncation.incident", "must be >= 0");
  if (cfg.scene.n_fwd < 0) config_fail(trunc, "scene.truncation.forward", "must be >= 0");
  if (cfg.scene.n_fwd > cfg.scene.n_in) {
    config_fail(trunc, "scene.truncation",
                "forward truncation " + std::to_string(cfg.scene.n_fwd) + " exceeds incident truncation " +
                    std::to_string(cfg.scene.n_in));
  }
  const auto eval_mode = get_or<std::string>(scene, "incident_eval", "scene", "direct");
  if (eval_mode == "direct") {
    cfg.scene.incident_eval = IncidentEvaluation::direct;
  } else if (eval_mode == "translated") {
    cfg.scene.incident_eval = IncidentEvaluation::translated;
  } else {
    config_fail(scene["incident_eval"], "scene.incident_eval", "expected direct or translated");
  }
  try {
    cfg.scene.validate();
  } catch (const GeometryError& e) {
    config_fail(scene, "scene", e.what());
  }

  const auto method = get_or<std::string>(root, "method", "config", "MSHOA");
  if (method == "HOA") {
    cfg.method = Method::hoa;
  } else if (method == "Single") {
    cfg.method = Method::single;
  } else if (method == "MSHOA") {
    cfg.method = Method::mshoa;
  } else {
    config_fail(root["method"], "method", "expected HOA, Single or MSHOA");
  }

  if (const YAML::Node reg = root["regularization"]) {
    const std::string sec = "regularization";
    detail::check_keys(reg, sec, {"sigma", "relative", "search"});
    cfg.regularization.sigma = get_or<double>(reg, "sigma", sec, 0.0);
    cfg.regularization.relative = get_or<bool>(reg, "relative", sec, false);
    if (!(cfg.regularization.sigma >= 0.0)) config_fail(reg["sigma"], sec + ".sigma", "must be >= 0");
    if (const YAML::Node s = reg["search"]) {
      detail::check_keys(s, sec + ".search", {"min", "max", "points", "relative"});
      SigmaSearch search;
      search.min = get_or<double>(s, "min", sec + ".search", search.min);
      search.max = get_or<double>(s, "max", sec + ".search", search.max);
      search.points = get_or<int>(s, "points", sec + ".search", search.points);
      search.relative = get_or<bool>(s, "relative", sec + ".search", search.relative);
      if (!(search.min > 0.0) || !(search.max >= search.min)) config_fail(s, sec + ".search", "need 0 < min <= max");
      if (search.points < 1) config_fail(s, sec + ".search.points", "must be >= 1");
      cfg.regularization.search = search;
    }
  }

  if (const YAML::Node hoa = root["hoa"]) {
    const std::string sec = "hoa";
    detail::check_keys(hoa, sec, {"truncation", "range", "sigma_relative"});
    if (hoa["truncation"] && hoa["range"]) config_fail(hoa, sec, "give either truncation or range, not both");
    if (hoa["truncation"]) {
      cfg.hoa.truncations = {get<int>(hoa, "truncation", sec)};
    } else if (const YAML::Node range = hoa["range"]) {
      if (!range.IsSequence() || range.size() != 2) config_fail(range, sec + ".range", "expected [min, max]");
      const int lo = detail::as<int>(range[0], sec + ".range"), hi = detail::as<int>(range[1], sec + ".range");
      if (lo < 0 || hi < lo) config_fail(range, sec + ".range", "need 0 <= min <= max");
      cfg.hoa.truncations.clear();
      for (int n = lo; n <= hi; ++n) cfg.hoa.truncations.push_back(n);
    }
    cfg.hoa.sigma_relative = get_or<double>(hoa, "sigma_relative", sec, 0.0);
    if (!(cfg.hoa.sigma_relative >= 0.0)) config_fail(hoa["sigma_relative"], sec + ".sigma_relative", "must be >= 0");
  }
  if (!root["hoa"]) cfg.hoa.truncations = {std::min(14, cfg.scene.n_in)};
  for (int n : cfg.hoa.truncations) {
    if (cfg.method == Method::hoa && (n < 0 || n > cfg.scene.n_in)) {
      config_fail(root["hoa"] ? root["hoa"] : root, "hoa", "truncation " + std::to_string(n) + " outside [0, incident]");
    }
  }

  // Default window: 2 m x 2 m around the array centroid, 5 mm pixels.
  Vec3 centroid = Vec3::Zero();
  for (const auto& s : cfg.scene.spheres) centroid += s.center;
  centroid /= static_cast<double>(cfg.scene.spheres.size());
  const YAML::Node ev = root["evaluation"];
  if (ev) detail::check_keys(ev, "evaluation", {"plane", "offset", "center", "width", "height", "resolution",
                                               "search_resolution", "threshold"});
  const YAML::Node evn = ev ? ev : YAML::Node(YAML::NodeType::Map);
  cfg.grid.plane = evn["plane"] ? detail::parse_plane(evn["plane"], "evaluation.plane") : Plane::xy;
  int iu = 0, iv = 1, iw = 2;
  if (cfg.grid.plane == Plane::yz) { iu = 1; iv = 2; iw = 0; }
  if (cfg.grid.plane == Plane::xz) { iu = 0; iv = 2; iw = 1; }
  cfg.grid.offset = get_or<double>(evn, "offset", "evaluation", centroid(iw));
  cfg.grid.center_u = centroid(iu);
  cfg.grid.center_v = centroid(iv);
  if (const YAML::Node c = evn["center"]) {
    if (!c.IsSequence() || c.size() != 2) config_fail(c, "evaluation.center", "expected [u, v]");
    cfg.grid.center_u = detail::as<double>(c[0], "evaluation.center");
    cfg.grid.center_v = detail::as<double>(c[1], "evaluation.center");
  }
  cfg.grid.width = get_or<double>(evn, "width", "evaluation", 2.0);
  cfg.grid.height = get_or<double>(evn, "height", "evaluation", cfg.grid.width);
  cfg.grid.resolution = get_or<double>(evn, "resolution", "evaluation", 0.005);
  try {
    cfg.grid.validate();
  } catch (const ConfigError& e) {
    config_fail(evn, "evaluation", e.what());
  }
  if (evn["search_resolution"]) {
    const double r = get<double>(evn, "search_resolution", "evaluation");
    if (!(r > 0.0)) config_fail(evn["search_resolution"], "evaluation.search_resolution", "must be > 0");
    cfg.search_resolution = r;
  }
  cfg.threshold = get_or<double>(evn, "threshold", "evaluation", 30.0);

  cfg.output = get_or<std::string>(root, "output", "config", "out");
  const int threads = get_or<int>(root, "threads", "config", 1);
  if (threads < 1) config_fail(root["threads"], "threads", "must be >= 1");
  cfg.threads = static_cast<unsigned>(threads);
  return cfg;
}

}  // namespace msa
