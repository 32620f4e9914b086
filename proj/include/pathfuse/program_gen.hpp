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

// Geometric path checks ahead of program emission, the neutral robot program
// dialect, and sectioned deviation reports of executed vs. nominal paths.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathfuse/detail/text.hpp"
#include "pathfuse/error.hpp"
#include "pathfuse/fused_path.hpp"
#include "pathfuse/geometry.hpp"
#include "pathfuse/pathml.hpp"
#include "pathfuse/polyline.hpp"

namespace pathfuse {

struct PathLimits {
  double max_step = 50.0;            // mm between consecutive points
  double max_speed = 500.0;          // mm/s
  Vec3 workspace_center{};           // mm, robot frame
  double workspace_radius = 2000.0;  // mm
  double max_orient_step = 30.0;     // degrees between consecutive points
};

inline void validate_limits(const PathLimits& l) {
  const bool ok = l.max_step > 0.0 && l.max_speed > 0.0 && l.workspace_radius > 0.0 &&
                  l.max_orient_step > 0.0 && is_finite(l.workspace_center) &&
                  std::isfinite(l.max_step) && std::isfinite(l.max_speed) &&
                  std::isfinite(l.workspace_radius) && std::isfinite(l.max_orient_step);
  if (!ok) throw Error(ErrorKind::argument, "path limits must be positive and finite");
}

enum class LimitRule { step, orientation_step, reachability, speed };

inline const char* to_string(LimitRule r) {
  switch (r) {
    case LimitRule::step: return "step";
    case LimitRule::orientation_step: return "orientation_step";
    case LimitRule::reachability: return "reachability";
    case LimitRule::speed: return "speed";
  }
  return "?";
}

struct LimitViolation {
  std::size_t layer = 0;
  std::size_t track = 0;
  std::size_t point = 0;  // for step rules, the later point of the pair
  LimitRule rule = LimitRule::step;
  double measured = 0.0;
  double limit = 0.0;
};

struct ValidationReport {
  std::vector<LimitViolation> violations;
  bool passed = true;
};

inline RotationMatrix rotation_of(const PathPoint& p) {
  return rot_from_fixed_xyz({deg_to_rad(p.rx), deg_to_rad(p.ry), deg_to_rad(p.rz)});
}

/// Step, orientation-step, workspace-sphere and speed checks. Violations come
/// out ordered by (layer, track, point) and, per point, in LimitRule order.
inline ValidationReport validate_path(const PathMLDocument& doc, const PathLimits& limits) {
  validate_limits(limits);
  ValidationReport report;
  for (std::size_t l = 0; l < doc.layers.size(); ++l) {
    const auto& tracks = doc.layers[l].tracks;
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      const auto& pts = tracks[t].points;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const PathPoint& p = pts[k];
        const Vec3 pos{p.x, p.y, p.z};
        const auto add = [&](LimitRule rule, double measured, double limit) {
          report.violations.push_back({l, t, k, rule, measured, limit});
        };
        if (k > 0) {
          const PathPoint& q = pts[k - 1];
          const double step = distance(Vec3{q.x, q.y, q.z}, pos);
          if (step > limits.max_step) add(LimitRule::step, step, limits.max_step);
          const double turn = rad_to_deg(geodesic_angle(rotation_of(q), rotation_of(p)));
          if (turn > limits.max_orient_step) {
            add(LimitRule::orientation_step, turn, limits.max_orient_step);
          }
        }
        const double reach = distance(pos, limits.workspace_center);
        if (reach > limits.workspace_radius) {
          add(LimitRule::reachability, reach, limits.workspace_radius);
        }
        if (p.velocity > limits.max_speed) add(LimitRule::speed, p.velocity, limits.max_speed);
      }
    }
  }
  report.passed = report.violations.empty();
  return report;
}

inline std::string format_violation(const PathMLDocument& doc, const LimitViolation& v) {
  return doc.layers[v.layer].name + "/" + doc.layers[v.layer].tracks[v.track].name + "/" +
         pathml::point_name(v.point) + ": " + to_string(v.rule) + " " +
         detail::format_fixed(v.measured, 6) + " > " + detail::format_fixed(v.limit, 6);
}

// ---------------------------------------------------------------------------
// Program text

enum class Dialect { neutral };

struct RobotProgram {
  Dialect dialect = Dialect::neutral;
  std::vector<std::string> lines;

  /// LF-terminated lines.
  std::string text() const {
    std::string out;
    for (const std::string& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }
};

/// Header comment lines emitted ahead of the motion block.
inline std::vector<std::string> program_header(const PathMLDocument& doc) {
  const ProcessParameters& pp = doc.process;
  const auto opt = [](const std::optional<double>& v) {
    return v ? detail::format_fixed(*v, 3) : std::string("none");
  };
  std::vector<std::string> h{
      "# PathML program, neutral dialect",
      "# project: " + doc.project_name,
      std::string("# process: ") + to_string(pp.process_type),
      "# glue_flow_rate_ml_min: " + opt(pp.glue_flow_rate),
      "# wire_feed_rate_mm_s: " + opt(pp.wire_feed_rate),
      "# layer_height_mm: " + opt(pp.layer_height),
  };
  for (const auto& [key, value] : pp.extra) h.push_back("# " + key + ": " + value);
  return h;
}

/// Neutral program: per point `MOVEL x y z rx ry rz V=v` (3 decimals), tool-on
/// tracks wrapped in SET_IO TOOL 1 / SET_IO TOOL 0, layers in index order.
/// When `report` is given, a failing report is refused.
inline RobotProgram emit_program(const PathMLDocument& doc,
                                 const ValidationReport* report = nullptr) {
  if (doc.layers.empty()) throw Error(ErrorKind::argument, "document has no layers");
  if (report && !report->passed) {
    throw Error(ErrorKind::validation,
                "path failed validation with " + std::to_string(report->violations.size()) +
                    " violation(s); refusing to emit");
  }
  RobotProgram prog;
  prog.lines = program_header(doc);
  std::vector<const Layer*> layers;
  for (const Layer& l : doc.layers) layers.push_back(&l);
  std::stable_sort(layers.begin(), layers.end(),
                   [](const Layer* a, const Layer* b) { return a->index < b->index; });
  const auto f3 = [](double v) { return detail::format_fixed(v, 3); };
  for (const Layer* layer : layers) {
    for (const Track& track : layer->tracks) {
      if (track.tool_active) prog.lines.push_back("SET_IO TOOL 1");
      for (const PathPoint& p : track.points) {
        prog.lines.push_back("MOVEL " + f3(p.x) + " " + f3(p.y) + " " + f3(p.z) + " " +
                             f3(p.rx) + " " + f3(p.ry) + " " + f3(p.rz) + " V=" +
                             f3(p.velocity));
      }
      if (track.tool_active) prog.lines.push_back("SET_IO TOOL 0");
    }
  }
  return prog;
}

// ---------------------------------------------------------------------------
// Deviation report

/// Worst accepted deviation in the glass adhesive trials (mm).
inline constexpr double kDefaultToleranceMm = 4.0;

struct DeviationSection {
  std::string label;
  double start = 0.0;  // nominal arc-length parameter range [start, end)
  double end = 1.0;
  double max_deviation = 0.0;  // mm
  std::size_t point_count = 0;
  bool empty = true;
};

struct DeviationReport {
  std::vector<DeviationSection> sections;
  double overall_max = 0.0;
  double tolerance = kDefaultToleranceMm;
  bool within_tolerance = true;
};

/// Each executed point's deviation is its distance to the nominal polyline;
/// it is binned by the normalized arc-length parameter of its closest nominal
/// point. `section_breaks` splits [0, 1] into labelled sections #1, #2, ...
inline DeviationReport deviation_report(const FusedPath& executed, const FusedPath& nominal,
                                        std::span<const double> section_breaks,
                                        double tolerance = kDefaultToleranceMm) {
  if (executed.frame != nominal.frame) {
    throw Error(ErrorKind::frame_mismatch, "executed and nominal paths are in different frames");
  }
  if (executed.points.empty() || nominal.points.size() < 2) {
    throw Error(ErrorKind::argument, "deviation report needs a nominal path of >= 2 points");
  }
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) {
    throw Error(ErrorKind::argument, "tolerance must be >= 0");
  }
  for (std::size_t i = 0; i < section_breaks.size(); ++i) {
    const double b = section_breaks[i];
    if (!(b > 0.0 && b < 1.0) || (i > 0 && !(b > section_breaks[i - 1]))) {
      throw Error(ErrorKind::argument,
                  "section breaks must be strictly increasing and inside (0, 1)");
    }
  }
  std::vector<Vec3> nominal_pts;
  for (const FusedPoint& p : nominal.points) nominal_pts.push_back(p.position);
  const std::vector<Vec3> verts = polyline_vertices(nominal_pts, nominal.closed);
  const double total = cumulative_lengths(verts).back();
  if (!(total > 0.0)) throw Error(ErrorKind::degenerate_path, "nominal path has zero length");

  DeviationReport report;
  report.tolerance = tolerance;
  for (std::size_t s = 0; s <= section_breaks.size(); ++s) {
    DeviationSection sec;
    sec.label = "#" + std::to_string(s + 1);
    sec.start = s == 0 ? 0.0 : section_breaks[s - 1];
    sec.end = s == section_breaks.size() ? 1.0 : section_breaks[s];
    report.sections.push_back(sec);
  }
  for (const FusedPoint& p : executed.points) {
    const PolylineProjection proj = project_onto_polyline(p.position, verts);
    const double u = proj.arc_length / total;
    const auto it = std::upper_bound(section_breaks.begin(), section_breaks.end(), u);
    DeviationSection& sec = report.sections[static_cast<std::size_t>(it - section_breaks.begin())];
    sec.max_deviation = std::max(sec.max_deviation, proj.distance);
    ++sec.point_count;
    sec.empty = false;
  }
  for (const DeviationSection& sec : report.sections) {
    report.overall_max = std::max(report.overall_max, sec.max_deviation);
  }
  report.within_tolerance = report.overall_max <= tolerance;
  return report;
}

inline std::string write_report_json(const DeviationReport& r) {
  nlohmann::ordered_json doc;
  auto& secs = doc["sections"] = nlohmann::ordered_json::array();
  for (const DeviationSection& s : r.sections) {
    nlohmann::ordered_json o;
    o["label"] = s.label;
    o["start"] = s.start;
    o["end"] = s.end;
    o["max_deviation_mm"] = s.max_deviation;
    o["points"] = s.point_count;
    o["empty"] = s.empty;
    secs.push_back(std::move(o));
  }
  doc["overall_max_mm"] = r.overall_max;
  doc["tolerance_mm"] = r.tolerance;
  doc["within_tolerance"] = r.within_tolerance;
  return doc.dump(2) + "\n";
}

}  // namespace pathfuse
