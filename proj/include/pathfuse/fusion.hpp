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

// CAD positions married to demonstrated orientations and speeds, then moved
// into the robot base frame through the calibrated frame chain.

#include <vector>

#include "pathfuse/cad_path.hpp"
#include "pathfuse/demo_capture.hpp"
#include "pathfuse/detail/quaternion.hpp"
#include "pathfuse/error.hpp"
#include "pathfuse/fused_path.hpp"
#include "pathfuse/geometry.hpp"

namespace pathfuse {

struct FusionResult {
  FusedPath path;              // frame S
  bool time_fallback = false;  // demo barely moved; matched by normalized time
};

/// One fused point per CAD waypoint. The position is the waypoint itself; the
/// orientation is slerped and the speed lerped from the demonstration at the
/// waypoint's normalized arc-length parameter. The demonstration is expected
/// to be outlier-filtered already.
inline FusionResult fuse(const CadPath& cad, const PoseSeries& demo) {
  if (cad.waypoints.size() < 2) {
    throw Error(ErrorKind::argument, "CAD path needs at least 2 waypoints");
  }
  if (demo.samples.size() < 2) {
    throw Error(ErrorKind::argument, "demonstration needs at least 2 samples");
  }
  validate_series(demo);

  const ArcParams cad_u = arc_params(cad);
  const DemoParameters demo_u = demo_parameters(demo);
  const std::vector<double> speeds = estimate_speed(demo);
  std::vector<RotationMatrix> rotations;
  rotations.reserve(demo.samples.size());
  for (const PoseSample& s : demo.samples) rotations.push_back(rot_from_euler_zyx(s.orientation));

  FusionResult result;
  result.time_fallback = demo_u.time_fallback;
  result.path.frame = FrameId::S;
  result.path.closed = cad.closed;
  result.path.points.reserve(cad.waypoints.size());
  for (std::size_t i = 0; i < cad.waypoints.size(); ++i) {
    const Bracket b = find_bracket(demo_u.u, cad_u.params[i]);
    const RotationMatrix r = detail::slerp(rotations[b.lo], rotations[b.lo + 1], b.w);
    const double v = speeds[b.lo] + b.w * (speeds[b.lo + 1] - speeds[b.lo]);
    result.path.points.push_back({cad.waypoints[i], robot_angles_fixed_xyz(r), v});
  }
  return result;
}

/// Left-composes every pose with T_R_F * T_F_S and re-extracts fixed X-Y-Z
/// angles. Speeds are unchanged.
inline FusedPath to_robot_frame(const FusedPath& path, const CalibrationSet& calib) {
  if (path.frame != FrameId::S) {
    throw Error(ErrorKind::frame_mismatch,
                std::string("to_robot_frame expects a path in {S}, got {") +
                    to_string(path.frame) + "}");
  }
  FusedPath out;
  out.frame = FrameId::R;
  out.closed = path.closed;
  out.points.reserve(path.points.size());
  for (const FusedPoint& p : path.points) {
    const FramedTransform t_s_e{FrameId::S, FrameId::E,
                                make_transform(rot_from_fixed_xyz(p.orientation), p.position)};
    const FramedTransform t_r_e = chain_to_robot(calib, t_s_e);
    out.points.push_back({t_r_e.transform.translation,
                          robot_angles_fixed_xyz(t_r_e.transform.rotation), p.speed});
  }
  return out;
}

}  // namespace pathfuse
