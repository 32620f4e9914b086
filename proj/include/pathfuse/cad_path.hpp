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

// Nominal CAD/CAM waypoint paths: ingestion, arc-length parameterization and
// uniform resampling. Coordinates are millimeters in the CAD frame, which is
// defined to coincide with the tracker receiver frame {S}.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathfuse/detail/text.hpp"
#include "pathfuse/error.hpp"
#include "pathfuse/geometry.hpp"
#include "pathfuse/polyline.hpp"

namespace pathfuse {

/// Consecutive waypoints closer than this are merged on ingestion.
inline constexpr double kMergeDistanceMm = 1e-6;

struct CadPath {
  std::vector<Vec3> waypoints;
  bool closed = false;  // the segment back to waypoints.front() is implicit

  friend bool operator==(const CadPath&, const CadPath&) = default;
};

/// Arc-length parameter per waypoint in [0, 1]. Closed paths get one extra
/// trailing 1.0 for the implicit return to the first waypoint.
struct ArcParams {
  std::vector<double> params;
};

/// Merges near-duplicates and checks the CadPath invariants.
inline CadPath make_cad_path(std::vector<Vec3> points, bool closed) {
  std::vector<Vec3> kept;
  kept.reserve(points.size());
  for (const Vec3& p : points) {
    if (!is_finite(p)) throw Error(ErrorKind::validation, "non-finite waypoint");
    if (kept.empty() || distance(kept.back(), p) >= kMergeDistanceMm) kept.push_back(p);
  }
  if (closed && kept.size() > 1 && distance(kept.back(), kept.front()) < kMergeDistanceMm) {
    kept.pop_back();
  }
  if (kept.size() < 2) {
    throw Error(ErrorKind::degenerate_path, "path needs at least 2 distinct waypoints");
  }
  return {std::move(kept), closed};
}

namespace detail {

inline CadPath parse_cad_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("CAD JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("waypoints") || !doc["waypoints"].is_array()) {
    throw Error(ErrorKind::parse, "CAD JSON: expected an object with a 'waypoints' array");
  }
  bool closed = false;
  if (doc.contains("closed")) {
    if (!doc["closed"].is_boolean()) {
      throw Error(ErrorKind::parse, "CAD JSON: 'closed' must be a boolean");
    }
    closed = doc["closed"].get<bool>();
  }
  std::vector<Vec3> points;
  const auto& arr = doc["waypoints"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& w = arr[i];
    if (!w.is_array() || w.size() != 3 || !w[0].is_number() || !w[1].is_number() ||
        !w[2].is_number()) {
      throw Error(ErrorKind::parse,
                  "CAD JSON: waypoints[" + std::to_string(i) + "] must be [x, y, z]");
    }
    points.push_back({w[0].get<double>(), w[1].get<double>(), w[2].get<double>()});
  }
  return make_cad_path(std::move(points), closed);
}

inline CadPath parse_cad_csv(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw Error(ErrorKind::parse, "CAD CSV: empty input");
  if (trim(lines[i]) != "x_mm,y_mm,z_mm") {
    throw Error(ErrorKind::parse, "CAD CSV: expected header 'x_mm,y_mm,z_mm'", i + 1);
  }
  bool closed = false;
  std::vector<Vec3> points;
  for (++i; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view meta = trim(line.substr(1));
      if (meta == "closed=true") closed = true;
      else if (meta == "closed=false") closed = false;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 3) {
      throw Error(ErrorKind::parse, "CAD CSV: expected 3 columns", i + 1);
    }
    Vec3 p;
    double* dst[3] = {&p.x, &p.y, &p.z};
    for (int c = 0; c < 3; ++c) {
      const auto v = parse_double(cells[c]);
      if (!v) {
        throw Error(ErrorKind::parse,
                    "CAD CSV: column " + std::to_string(c + 1) + " is not a number", i + 1);
      }
      *dst[c] = *v;
    }
    points.push_back(p);
  }
  return make_cad_path(std::move(points), closed);
}

}  // namespace detail

/// Reads the CSV or JSON export; JSON is recognized by a leading '{'.
inline CadPath parse_cad(std::string_view text) {
  const std::string_view body = detail::trim(text);
  if (!body.empty() && body.front() == '{') return detail::parse_cad_json(body);
  return detail::parse_cad_csv(text);
}

inline std::string write_cad_csv(const CadPath& p) {
  std::string out = "x_mm,y_mm,z_mm\n";
  for (const Vec3& w : p.waypoints) {
    out += detail::format_roundtrip(w.x) + "," + detail::format_roundtrip(w.y) + "," +
           detail::format_roundtrip(w.z) + "\n";
  }
  if (p.closed) out += "# closed=true\n";
  return out;
}

inline std::string write_cad_json(const CadPath& p) {
  nlohmann::json doc;
  doc["closed"] = p.closed;
  doc["waypoints"] = nlohmann::json::array();
  for (const Vec3& w : p.waypoints) doc["waypoints"].push_back({w.x, w.y, w.z});
  return doc.dump(2) + "\n";
}

inline double total_length(const CadPath& p) {
  return cumulative_lengths(polyline_vertices(p.waypoints, p.closed)).back();
}

inline ArcParams arc_params(const CadPath& p) {
  std::vector<double> acc = cumulative_lengths(polyline_vertices(p.waypoints, p.closed));
  const double total = acc.back();
  for (double& a : acc) a /= total;
  acc.back() = 1.0;
  return {std::move(acc)};
}

struct ResampleResult {
  CadPath path;
  bool spacing_exceeds_length = false;
};

/// Splits every segment into the fewest equal pieces no longer than
/// `spacing`. Original vertices are kept exactly.
inline ResampleResult resample_cad(const CadPath& p, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error(ErrorKind::argument, "resample spacing must be a positive number");
  }
  ResampleResult result;
  const double total = total_length(p);
  if (spacing > total) {
    result.spacing_exceeds_length = true;
    if (!p.closed) {
      result.path = {{p.waypoints.front(), p.waypoints.back()}, false};
      return result;
    }
  }
  const std::vector<Vec3> verts = polyline_vertices(p.waypoints, p.closed);
  std::vector<Vec3> out{verts.front()};
  for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
    const Vec3& a = verts[i];
    const Vec3& b = verts[i + 1];
    const double len = distance(a, b);
    // The small slack keeps exact multiples (100 / 25) from gaining a piece.
    const auto pieces =
        static_cast<std::size_t>(std::max(1.0, std::ceil(len / spacing - 1e-9)));
    for (std::size_t j = 1; j < pieces; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(pieces);
      out.push_back(a + t * (b - a));
    }
    out.push_back(b);
  }
  if (p.closed) out.pop_back();  // the closing vertex is implicit again
  result.path = {std::move(out), p.closed};
  return result;
}

}  // namespace pathfuse
