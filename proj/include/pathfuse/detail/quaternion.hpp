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

// Unit quaternions, used only for orientation interpolation.

#include <algorithm>
#include <cmath>

#include "pathfuse/geometry.hpp"

namespace pathfuse::detail {

struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double dot(const Quat& a, const Quat& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Quat normalized(const Quat& q) {
  const double n = std::sqrt(dot(q, q));
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

// Shepperd's method: pivot on the largest diagonal term.
inline Quat quat_from_rot(const RotationMatrix& r) {
  const double tr = r(0, 0) + r(1, 1) + r(2, 2);
  Quat q;
  if (tr > r(0, 0) && tr > r(1, 1) && tr > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s,
         (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s,
         (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s,
         (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s,
         (r(1, 2) + r(2, 1)) / s, 0.25 * s};
  }
  return normalized(q);
}

inline RotationMatrix rot_from_quat(const Quat& in) {
  const Quat q = normalized(in);
  const double ww = q.w * q.w, xx = q.x * q.x, yy = q.y * q.y, zz = q.z * q.z;
  const double xy = q.x * q.y, xz = q.x * q.z, yz = q.y * q.z;
  const double wx = q.w * q.x, wy = q.w * q.y, wz = q.w * q.z;
  return RotationMatrix::from_rows(
      {{{ww + xx - yy - zz, 2 * (xy - wz), 2 * (xz + wy)},
        {2 * (xy + wz), ww - xx + yy - zz, 2 * (yz - wx)},
        {2 * (xz - wy), 2 * (yz + wx), ww - xx - yy + zz}}},
      1e-6);
}

/// Shortest-arc spherical interpolation; t = 0 gives a, t = 1 gives b (up to
/// sign).
inline Quat slerp(const Quat& a, Quat b, double t) {
  double c = dot(a, b);
  if (c < 0.0) {
    b = {-b.w, -b.x, -b.y, -b.z};
    c = -c;
  }
  c = std::min(c, 1.0);
  double wa, wb;
  if (c > 1.0 - 1e-12) {
    wa = 1.0 - t;
    wb = t;
  } else {
    const double omega = std::acos(c);
    const double so = std::sin(omega);
    wa = std::sin((1.0 - t) * omega) / so;
    wb = std::sin(t * omega) / so;
  }
  return normalized({wa * a.w + wb * b.w, wa * a.x + wb * b.x, wa * a.y + wb * b.y,
                     wa * a.z + wb * b.z});
}

/// Slerp between two rotations, with exact endpoints.
inline RotationMatrix slerp(const RotationMatrix& a, const RotationMatrix& b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  return rot_from_quat(slerp(quat_from_rot(a), quat_from_rot(b), t));
}

}  // namespace pathfuse::detail
