// Copyright 2026 The PathFuse Authors
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

#pragma once

// JSON files owned by the command-line front end: the calibration set and the
// pipeline configuration.

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pathfuse/error.hpp"
#include "pathfuse/geometry.hpp"
#include "pathfuse/pathml.hpp"
#include "pathfuse/program_gen.hpp"

namespace pathfuse {

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson parse_json_text(std::string_view text, const std::string& what) {
  try {
    return ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw Error(ErrorKind::parse, what + ": " + e.what());
  }
}

inline void reject_unknown_keys(const ojson& obj, std::initializer_list<const char*> known,
                                const std::string& where) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw Error(ErrorKind::parse, where + ": unknown key '" + item.key() + "'");
    }
  }
}

inline double json_number(const ojson& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw Error(ErrorKind::parse, where + ": '" + key + "' must be a number");
  }
  return obj[key].get<double>();
}

inline Vec3 json_vec3(const ojson& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number()) {
    throw Error(ErrorKind::parse, where + " must be an array of 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline Transform4 parse_pose(const ojson& obj, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::parse, where + " must be an object");
  reject_unknown_keys(obj, {"translation_mm", "rotation_deg_fixed_xyz"}, where);
  if (!obj.contains("translation_mm") || !obj.contains("rotation_deg_fixed_xyz")) {
    throw Error(ErrorKind::parse,
                where + " needs 'translation_mm' and 'rotation_deg_fixed_xyz'");
  }
  const Vec3 t = json_vec3(obj["translation_mm"], where + ".translation_mm");
  const Vec3 r = json_vec3(obj["rotation_deg_fixed_xyz"], where + ".rotation_deg_fixed_xyz");
  return make_transform(rot_from_fixed_xyz({deg_to_rad(r.x), deg_to_rad(r.y), deg_to_rad(r.z)}), t);
}

}  // namespace detail

/// {"t_r_f": {"translation_mm": [x,y,z], "rotation_deg_fixed_xyz": [rx,ry,rz]},
///  "t_f_s": {...}}
inline CalibrationSet parse_calibration(std::string_view text) {
  const auto doc = detail::parse_json_text(text, "calibration");
  if (!doc.is_object()) throw Error(ErrorKind::parse, "calibration: expected an object");
  detail::reject_unknown_keys(doc, {"t_r_f", "t_f_s"}, "calibration");
  if (!doc.contains("t_r_f") || !doc.contains("t_f_s")) {
    throw Error(ErrorKind::parse, "calibration: needs 't_r_f' and 't_f_s'");
  }
  return {detail::parse_pose(doc["t_r_f"], "t_r_f"), detail::parse_pose(doc["t_f_s"], "t_f_s")};
}

struct PipelineConfig {
  std::size_t filter_window = 11;
  double filter_k = 3.0;
  std::optional<std::size_t> downsample_target;  // default max(100, 2 * CAD waypoints)
  std::optional<double> resample_spacing;        // mm; no resampling when absent
  std::optional<PathLimits> limits;              // path checks run only when present
  double tolerance = kDefaultToleranceMm;
  std::optional<ProcessParameters> process;
  std::string project = "pathml_project";

  std::size_t downsample_count(std::size_t cad_waypoints, std::size_t demo_samples) const {
    const std::size_t want =
        downsample_target ? *downsample_target : std::max<std::size_t>(100, 2 * cad_waypoints);
    return std::clamp<std::size_t>(want, 2, demo_samples);
  }
};

inline ProcessParameters parse_process_json(const detail::ojson& p) {
  const std::string where = "config.process";
  if (!p.is_object()) throw Error(ErrorKind::parse, where + " must be an object");
  detail::reject_unknown_keys(
      p, {"type", "glue_flow_rate_ml_min", "wire_feed_rate_mm_s", "layer_height_mm", "extra"},
      where);
  ProcessParameters pp;
  if (p.contains("type")) {
    if (!p["type"].is_string()) throw Error(ErrorKind::parse, where + ".type must be a string");
    const auto t = process_type_from_string(p["type"].get<std::string>());
    if (!t) throw Error(ErrorKind::parse, where + ".type must be adhesive, welding or other");
    pp.process_type = *t;
  }
  if (p.contains("glue_flow_rate_ml_min")) pp.glue_flow_rate = detail::json_number(p, "glue_flow_rate_ml_min", where);
  if (p.contains("wire_feed_rate_mm_s")) pp.wire_feed_rate = detail::json_number(p, "wire_feed_rate_mm_s", where);
  if (p.contains("layer_height_mm")) pp.layer_height = detail::json_number(p, "layer_height_mm", where);
  if (p.contains("extra")) {
    if (!p["extra"].is_object()) throw Error(ErrorKind::parse, where + ".extra must be an object");
    for (const auto& item : p["extra"].items()) {
      if (!item.value().is_string()) {
        throw Error(ErrorKind::parse, where + ".extra values must be strings");
      }
      pp.extra.emplace_back(item.key(), item.value().get<std::string>());
    }
  }
  return pp;
}

inline PipelineConfig parse_config(std::string_view text) {
  const auto doc = detail::parse_json_text(text, "config");
  if (!doc.is_object()) throw Error(ErrorKind::parse, "config: expected an object");
  detail::reject_unknown_keys(doc,
                              {"filter", "downsample_target", "resample_spacing_mm", "limits",
                               "tolerance_mm", "process", "project"},
                              "config");
  PipelineConfig cfg;
  if (doc.contains("filter")) {
    const auto& f = doc["filter"];
    if (!f.is_object()) throw Error(ErrorKind::parse, "config.filter must be an object");
    detail::reject_unknown_keys(f, {"window", "k"}, "config.filter");
    if (f.contains("window")) {
      if (!f["window"].is_number_unsigned()) {
        throw Error(ErrorKind::parse, "config.filter.window must be a positive integer");
      }
      cfg.filter_window = f["window"].get<std::size_t>();
    }
    if (f.contains("k")) cfg.filter_k = detail::json_number(f, "k", "config.filter");
  }
  if (doc.contains("downsample_target") && !doc["downsample_target"].is_null()) {
    if (!doc["downsample_target"].is_number_unsigned()) {
      throw Error(ErrorKind::parse, "config.downsample_target must be a positive integer");
    }
    cfg.downsample_target = doc["downsample_target"].get<std::size_t>();
  }
  if (doc.contains("resample_spacing_mm") && !doc["resample_spacing_mm"].is_null()) {
    cfg.resample_spacing = detail::json_number(doc, "resample_spacing_mm", "config");
  }
  if (doc.contains("limits") && !doc["limits"].is_null()) {
    const auto& l = doc["limits"];
    const std::string where = "config.limits";
    if (!l.is_object()) throw Error(ErrorKind::parse, where + " must be an object");
    detail::reject_unknown_keys(l,
                                {"max_step_mm", "max_speed_mm_s", "workspace_center_mm",
                                 "workspace_radius_mm", "max_orient_step_deg"},
                                where);
    PathLimits lim;
    if (l.contains("max_step_mm")) lim.max_step = detail::json_number(l, "max_step_mm", where);
    if (l.contains("max_speed_mm_s")) lim.max_speed = detail::json_number(l, "max_speed_mm_s", where);
    if (l.contains("workspace_center_mm")) {
      lim.workspace_center = detail::json_vec3(l["workspace_center_mm"], where + ".workspace_center_mm");
    }
    if (l.contains("workspace_radius_mm")) {
      lim.workspace_radius = detail::json_number(l, "workspace_radius_mm", where);
    }
    if (l.contains("max_orient_step_deg")) {
      lim.max_orient_step = detail::json_number(l, "max_orient_step_deg", where);
    }
    try {
      validate_limits(lim);
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, std::string("config.limits: ") + e.what());
    }
    cfg.limits = lim;
  }
  if (doc.contains("tolerance_mm")) cfg.tolerance = detail::json_number(doc, "tolerance_mm", "config");
  if (doc.contains("process")) cfg.process = parse_process_json(doc["process"]);
  if (doc.contains("project")) {
    if (!doc["project"].is_string()) throw Error(ErrorKind::parse, "config.project must be a string");
    cfg.project = doc["project"].get<std::string>();
  }
  return cfg;
}

}  // namespace pathfuse
