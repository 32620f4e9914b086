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

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathfuse/error.hpp"
#include "pathfuse/geometry.hpp"

namespace pathfuse {

struct FusedPoint {
  Vec3 position;          // mm
  FixedXyz orientation;   // radians
  double speed = 0.0;     // mm/s

  friend bool operator==(const FusedPoint& a, const FusedPoint& b) {
    return a.position == b.position && a.orientation.rx == b.orientation.rx &&
           a.orientation.ry == b.orientation.ry && a.orientation.rz == b.orientation.rz &&
           a.speed == b.speed;
  }
};

/// Every point is expressed in `frame` (S or R).
struct FusedPath {
  std::vector<FusedPoint> points;
  FrameId frame = FrameId::S;
  bool closed = false;

  friend bool operator==(const FusedPath&, const FusedPath&) = default;
};

inline void validate_fused_path(const FusedPath& p) {
  if (p.points.size() < 2) {
    throw Error(ErrorKind::validation, "fused path needs at least 2 points");
  }
  if (p.frame != FrameId::S && p.frame != FrameId::R) {
    throw Error(ErrorKind::frame_mismatch, "fused paths live in frame S or R");
  }
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    const FusedPoint& q = p.points[i];
    const bool finite = is_finite(q.position) && std::isfinite(q.orientation.rx) &&
                        std::isfinite(q.orientation.ry) &&
                        std::isfinite(q.orientation.rz) && std::isfinite(q.speed);
    if (!finite || q.speed < 0.0) {
      throw Error(ErrorKind::validation,
                  "fused point " + std::to_string(i) + " is non-finite or has negative speed");
    }
  }
}

/// {"frame": "S"|"R", "closed": bool, "points": [{x_mm, ..., v_mm_s}, ...]}
/// Angles are degrees in the file.
inline std::string write_fused_json(const FusedPath& p) {
  nlohmann::ordered_json doc;
  doc["frame"] = to_string(p.frame);
  doc["closed"] = p.closed;
  auto& pts = doc["points"] = nlohmann::ordered_json::array();
  for (const FusedPoint& q : p.points) {
    nlohmann::ordered_json o;
    o["x_mm"] = q.position.x;
    o["y_mm"] = q.position.y;
    o["z_mm"] = q.position.z;
    o["rx_deg"] = rad_to_deg(q.orientation.rx);
    o["ry_deg"] = rad_to_deg(q.orientation.ry);
    o["rz_deg"] = rad_to_deg(q.orientation.rz);
    o["v_mm_s"] = q.speed;
    pts.push_back(std::move(o));
  }
  return doc.dump(2) + "\n";
}

inline FusedPath parse_fused_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("fused JSON: ") + e.what());
  }
  const auto fail = [](const std::string& what) {
    throw Error(ErrorKind::parse, "fused JSON: " + what);
  };
  if (!doc.is_object()) fail("expected an object");
  if (!doc.contains("frame") || !doc["frame"].is_string()) fail("missing 'frame'");
  if (!doc.contains("points") || !doc["points"].is_array()) fail("missing 'points'");
  FusedPath p;
  p.frame = frame_from_string(doc["frame"].get<std::string>());
  if (doc.contains("closed")) {
    if (!doc["closed"].is_boolean()) fail("'closed' must be a boolean");
    p.closed = doc["closed"].get<bool>();
  }
  static constexpr const char* kKeys[] = {"x_mm",   "y_mm",   "z_mm",  "rx_deg",
                                          "ry_deg", "rz_deg", "v_mm_s"};
  const auto& arr = doc["points"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& o = arr[i];
    double v[7];
    for (int k = 0; k < 7; ++k) {
      if (!o.is_object() || !o.contains(kKeys[k]) || !o[kKeys[k]].is_number()) {
        fail("points[" + std::to_string(i) + "] lacks numeric '" + kKeys[k] + "'");
      }
      v[k] = o[kKeys[k]].get<double>();
    }
    p.points.push_back({{v[0], v[1], v[2]},
                        {deg_to_rad(v[3]), deg_to_rad(v[4]), deg_to_rad(v[5])},
                        v[6]});
  }
  validate_fused_path(p);
  return p;
}

}  // namespace pathfuse
