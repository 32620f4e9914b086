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

// Shared synthetic paths for the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pathfuse/cad_path.hpp"
#include "pathfuse/fused_path.hpp"
#include "pathfuse/geometry.hpp"
#include "pathfuse/pathml.hpp"
#include "pathfuse/program_gen.hpp"

namespace pathfuse::testing {

/// Closed 400 x 300 mm rectangle in the z = 0 plane of {S}, corners only,
/// starting at (200, 150) so the receiver-sensor distance varies. Tool tilt
/// changes steadily along the contour; speed is 50 mm/s.
inline FusedPath rectangle_truth() {
  FusedPath p;
  p.frame = FrameId::S;
  p.closed = true;
  const std::vector<Vec3> corners{{200, 150, 0}, {600, 150, 0}, {600, 450, 0}, {200, 450, 0}};
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(corners.size());
    p.points.push_back({corners[i],
                        {deg_to_rad(180.0 - 20.0 * s), deg_to_rad(10.0 + 15.0 * s),
                         deg_to_rad(-90.0 + 180.0 * s)},
                        50.0});
  }
  return p;
}

/// Open polyline with several direction changes and orientations that sweep
/// through all three angles, densely sampled so slerp between neighbours is
/// short.
inline FusedPath weld_seam_truth() {
  FusedPath p;
  p.frame = FrameId::S;
  p.closed = false;
  const int n = 41;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    const Vec3 pos{150.0 + 300.0 * s, 100.0 + 60.0 * std::sin(2.0 * std::numbers::pi * s),
                   20.0 + 15.0 * s};
    p.points.push_back(
        {pos, {deg_to_rad(-30.0 + 40.0 * s), deg_to_rad(25.0 * std::sin(3.0 * s)), deg_to_rad(90.0 * s)},
         20.0 + 10.0 * s});
  }
  return p;
}

inline CadPath cad_from(const FusedPath& truth) {
  std::vector<Vec3> pts;
  for (const FusedPoint& q : truth.points) pts.push_back(q.position);
  return make_cad_path(pts, truth.closed);
}

/// Valid single- or multi-layer document with random geometry, process
/// parameters and extras. Values are not pre-quantized, and extras include
/// characters that need XML escaping.
inline PathMLDocument random_document(std::mt19937_64& rng, int max_layers = 3) {
  std::uniform_real_distribution<double> pos(-1500.0, 1500.0);
  std::uniform_real_distribution<double> ang(-180.0, 180.0);
  std::uniform_real_distribution<double> vel(0.0, 400.0);
  std::uniform_int_distribution<int> n_layers(1, max_layers);
  std::uniform_int_distribution<int> n_tracks(1, 3);
  std::uniform_int_distribution<int> n_points(2, 12);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_int_distribution<int> coin(0, 1);

  PathMLDocument doc;
  doc.project_name = "cell_" + std::to_string(rng() % 10000);
  switch (pick(rng)) {
    case 0:
      doc.process.process_type = ProcessType::adhesive;
      doc.process.glue_flow_rate = vel(rng) / 10.0;
      break;
    case 1:
      doc.process.process_type = ProcessType::welding;
      doc.process.wire_feed_rate = vel(rng) / 20.0;
      break;
    default:
      doc.process.process_type = ProcessType::other;
  }
  if (coin(rng)) doc.process.layer_height = 0.5 + vel(rng) / 100.0;
  static const char* kValues[] = {"plain", "a<b & c>d", "quote\"s'", "ümlaut °C", "  padded  "};
  for (int e = 0, n = pick(rng); e < n; ++e) {
    doc.process.extra.emplace_back("Extra_" + std::to_string(e), kValues[rng() % 5]);
  }
  const int nl = n_layers(rng);
  for (int l = 0; l < nl; ++l) {
    Layer layer{"Layer_" + std::to_string(l), l, {}};
    for (int t = 0, nt = n_tracks(rng); t < nt; ++t) {
      Track track{"Track_" + std::to_string(t), {}, coin(rng) == 1};
      for (int k = 0, np = n_points(rng); k < np; ++k) {
        track.points.push_back({pos(rng), pos(rng), pos(rng), ang(rng), ang(rng) / 2.0, ang(rng), vel(rng)});
      }
      layer.tracks.push_back(std::move(track));
    }
    doc.layers.push_back(std::move(layer));
  }
  return doc;
}

/// A document that passes the default PathLimits with k injected violations
/// and the (point, rule) pairs those injections must produce.
struct MutationCase {
  PathMLDocument doc;
  std::set<std::pair<std::size_t, LimitRule>> expected;
};

/// Baseline: one 100-point track on a circle of radius 1985 mm about the
/// default workspace centre, 10 mm steps, orientation steps under 1 degree,
/// speeds under 400 mm/s. Each mutation touches a distinct point index:
///   speed         that point's velocity raised above max_speed
///   reachability  that point pushed 25 mm radially outward (reach > 2000,
///                 neighbouring steps stay under 50)
///   step          every point from the index on shifted 60 mm along z,
///                 alternating up and down so the track stays reachable
///   orientation   every pose from the index on rotated 60 to 120 degrees,
///                 which changes only the one consecutive pair at the seam
inline MutationCase mutation_case(std::mt19937_64& rng, int k) {
  const PathLimits limits;
  constexpr std::size_t kPoints = 100;
  constexpr double kRadius = 1985.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double theta0 = 2.0 * std::numbers::pi * unit(rng);
  const double dtheta = 10.0 / kRadius;
  const double rx0 = -180.0 + 360.0 * unit(rng);
  const double ry0 = -60.0 + 120.0 * unit(rng);
  const double rz0 = -180.0 + 360.0 * unit(rng);

  MutationCase mc;
  mc.doc.project_name = "mutation";
  mc.doc.layers.push_back({"Layer_0", 0, {{"Track_0", {}, true}}});
  auto& pts = mc.doc.layers[0].tracks[0].points;
  for (std::size_t j = 0; j < kPoints; ++j) {
    const double th = theta0 + dtheta * static_cast<double>(j);
    const double s = static_cast<double>(j) / kPoints;
    pts.push_back({kRadius * std::cos(th), kRadius * std::sin(th), 0.0,
                   rx0 + 40.0 * s, ry0 + 20.0 * s * s, rz0 - 30.0 * s,
                   50.0 + 300.0 * unit(rng)});
  }

  std::vector<std::size_t> idx(kPoints - 1);
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j + 1;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());

  std::uniform_int_distribution<int> kind(0, 3);
  bool raised = false;
  for (std::size_t i : idx) {
    switch (kind(rng)) {
      case 0:
        pts[i].velocity = limits.max_speed * (1.1 + unit(rng));
        mc.expected.insert({i, LimitRule::speed});
        break;
      case 1: {
        const double r = std::hypot(pts[i].x, pts[i].y);
        pts[i].x *= (r + 25.0) / r;
        pts[i].y *= (r + 25.0) / r;
        mc.expected.insert({i, LimitRule::reachability});
        break;
      }
      case 2: {
        const double dz = raised ? -60.0 : 60.0;
        raised = !raised;
        for (std::size_t j = i; j < kPoints; ++j) pts[j].z += dz;
        mc.expected.insert({i, LimitRule::step});
        break;
      }
      default: {
        std::normal_distribution<double> g(0.0, 1.0);
        Vec3 axis{g(rng), g(rng), g(rng)};
        axis = (1.0 / norm(axis)) * axis;
        const double angle = deg_to_rad(60.0 + 60.0 * unit(rng));
        // Rodrigues rotation about `axis`.
        const double c = std::cos(angle), sn = std::sin(angle), t = 1.0 - c;
        const RotationMatrix a = RotationMatrix::from_rows(Mat3{{
            {t * axis.x * axis.x + c, t * axis.x * axis.y - sn * axis.z, t * axis.x * axis.z + sn * axis.y},
            {t * axis.x * axis.y + sn * axis.z, t * axis.y * axis.y + c, t * axis.y * axis.z - sn * axis.x},
            {t * axis.x * axis.z - sn * axis.y, t * axis.y * axis.z + sn * axis.x, t * axis.z * axis.z + c}}});
        for (std::size_t j = i; j < kPoints; ++j) {
          const FixedXyz f = robot_angles_fixed_xyz(a * rotation_of(pts[j]));
          pts[j].rx = rad_to_deg(f.rx);
          pts[j].ry = rad_to_deg(f.ry);
          pts[j].rz = rad_to_deg(f.rz);
        }
        mc.expected.insert({i, LimitRule::orientation_step});
      }
    }
  }
  return mc;
}

}  // namespace pathfuse::testing
