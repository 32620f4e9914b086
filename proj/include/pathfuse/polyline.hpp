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

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

#include "pathfuse/geometry.hpp"

namespace pathfuse {

/// Vertices of a polyline, optionally with the implicit segment from the last
/// vertex back to the first.
inline std::vector<Vec3> polyline_vertices(std::span<const Vec3> points, bool closed) {
  std::vector<Vec3> v(points.begin(), points.end());
  if (closed && v.size() > 1) v.push_back(v.front());
  return v;
}

/// Running length at each vertex; front() == 0, back() == total length.
inline std::vector<double> cumulative_lengths(std::span<const Vec3> vertices) {
  std::vector<double> acc(vertices.size(), 0.0);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    acc[i] = acc[i - 1] + distance(vertices[i - 1], vertices[i]);
  }
  return acc;
}

struct SegmentProjection {
  double distance;  // from the query point to the segment
  double t;         // clamped position along the segment, 0..1
};

inline SegmentProjection project_onto_segment(const Vec3& p, const Vec3& a,
                                              const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return {distance(p, a + t * ab), t};
}

struct PolylineProjection {
  double distance = std::numeric_limits<double>::infinity();
  double arc_length = 0.0;  // along the polyline to the closest point
  std::size_t segment = 0;
};

/// Closest point of a polyline given by its vertices (closing vertex already
/// appended if the path is closed). Ties go to the earliest segment.
inline PolylineProjection project_onto_polyline(const Vec3& p,
                                                 std::span<const Vec3> vertices) {
  PolylineProjection best;
  if (vertices.size() == 1) {
    best.distance = distance(p, vertices.front());
    return best;
  }
  double run = 0.0;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    const double seg = distance(vertices[i], vertices[i + 1]);
    const SegmentProjection sp = project_onto_segment(p, vertices[i], vertices[i + 1]);
    if (sp.distance < best.distance) {
      best = {sp.distance, run + sp.t * seg, i};
    }
    run += seg;
  }
  return best;
}

}  // namespace pathfuse
