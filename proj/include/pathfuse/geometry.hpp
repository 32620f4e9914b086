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

// Rotation and rigid-transform math for the tracker/robot frame chain.
//
// Conventions:
//  - angles are radians, translations are millimeters;
//  - EulerZyx is the intrinsic Z-Y'-X'' triple reported by the tracker,
//    R = Rz(psi) * Ry(theta) * Rx(phi);
//  - FixedXyz is the robot-side extrinsic X-Y-Z triple. Rotating about the
//    fixed X, then Y, then Z axes by (rx, ry, rz) gives the same matrix as the
//    intrinsic triple (psi, theta, phi) = (rz, ry, rx).

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "pathfuse/error.hpp"

namespace pathfuse {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Vec3 operator*(double s, const Vec3& v) {
    return {s * v.x, s * v.y, s * v.z};
  }
  friend constexpr Vec3 operator*(const Vec3& v, double s) { return s * v; }
  friend constexpr Vec3 operator/(const Vec3& v, double s) { return {v.x / s, v.y / s, v.z / s}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

constexpr double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

/// Maps an angle onto (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a > -std::numbers::pi && a <= std::numbers::pi) return a;
  double w = std::remainder(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

/// Intrinsic Z-Y'-X'' angles: yaw psi, pitch theta, roll phi.
struct EulerZyx {
  double psi = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Extrinsic (fixed-axis) X-Y-Z angles as consumed by the robot controller.
struct FixedXyz {
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Proper rotation. Construction through `from_rows` checks orthonormality;
/// products of rotations stay rotations.
class RotationMatrix {
 public:
  static constexpr double kOrthonormalTol = 1e-9;

  RotationMatrix() : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}

  static RotationMatrix identity() { return {}; }

  static RotationMatrix from_rows(const Mat3& rows, double tol = kOrthonormalTol) {
    if (!is_rotation(rows, tol)) {
      throw Error(ErrorKind::argument, "matrix is not a proper rotation");
    }
    return RotationMatrix(rows, Unchecked{});
  }

  static bool is_rotation(const Mat3& m, double tol = kOrthonormalTol) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (!std::isfinite(m[i][j])) return false;
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += m[k][i] * m[k][j];
        if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) return false;
      }
    }
    return std::abs(determinant(m) - 1.0) <= tol;
  }

  static double determinant(const Mat3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }

  double operator()(int row, int col) const { return m_[row][col]; }
  const Mat3& rows() const { return m_; }

  RotationMatrix transposed() const {
    Mat3 t{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t[i][j] = m_[j][i];
    return RotationMatrix(t, Unchecked{});
  }

  friend RotationMatrix operator*(const RotationMatrix& a, const RotationMatrix& b) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out[i][j] = a.m_[i][0] * b.m_[0][j] + a.m_[i][1] * b.m_[1][j] +
                    a.m_[i][2] * b.m_[2][j];
    return RotationMatrix(out, Unchecked{});
  }

  friend Vec3 operator*(const RotationMatrix& r, const Vec3& v) {
    const Mat3& m = r.m_;
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }

  friend bool operator==(const RotationMatrix&, const RotationMatrix&) = default;

 private:
  struct Unchecked {};
  RotationMatrix(const Mat3& m, Unchecked) : m_(m) {}

  friend RotationMatrix rot_x(double);
  friend RotationMatrix rot_y(double);
  friend RotationMatrix rot_z(double);
  friend RotationMatrix rot_from_euler_zyx(const EulerZyx&);

  Mat3 m_;
};

inline RotationMatrix rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return RotationMatrix({{{1, 0, 0}, {0, c, -s}, {0, s, c}}},
                        RotationMatrix::Unchecked{});
}

inline RotationMatrix rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return RotationMatrix({{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}},
                        RotationMatrix::Unchecked{});
}

inline RotationMatrix rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return RotationMatrix({{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}},
                        RotationMatrix::Unchecked{});
}

inline void require_finite(const EulerZyx& e) {
  if (!std::isfinite(e.psi) || !std::isfinite(e.theta) || !std::isfinite(e.phi)) {
    throw Error(ErrorKind::invalid_angle, "Euler angles must be finite");
  }
}

/// Closed form of Rz(psi) * Ry(theta) * Rx(phi).
inline RotationMatrix rot_from_euler_zyx(const EulerZyx& e) {
  require_finite(e);
  const double cps = std::cos(e.psi), sps = std::sin(e.psi);
  const double cth = std::cos(e.theta), sth = std::sin(e.theta);
  const double cph = std::cos(e.phi), sph = std::sin(e.phi);
  return RotationMatrix(
      {{{cps * cth, cps * sth * sph - sps * cph, cps * sth * cph + sps * sph},
        {sps * cth, sps * sth * sph + cps * cph, sps * sth * cph - cps * sph},
        {-sth, cth * sph, cth * cph}}},
      RotationMatrix::Unchecked{});
}

/// Below this |cos(theta)| the yaw and roll axes are treated as coupled.
inline constexpr double kGimbalLockCos = 1e-7;

namespace detail {
inline double canonical_angle(double a) {
  // atan2 may return -pi exactly; the canonical range is (-pi, pi].
  return a <= -std::numbers::pi ? std::numbers::pi : a;
}
}  // namespace detail

/// Inverse of rot_from_euler_zyx with theta in [-pi/2, pi/2]. In gimbal lock
/// roll is pinned to 0 and the whole free rotation goes to yaw.
inline EulerZyx euler_zyx_from_rot(const RotationMatrix& r) {
  const double cth = std::hypot(r(0, 0), r(1, 0));
  EulerZyx e;
  e.theta = std::atan2(-r(2, 0), cth);
  if (cth < kGimbalLockCos) {
    // With phi = 0: r01 = -sin(psi), r11 = cos(psi) for either sign of theta.
    e.phi = 0.0;
    e.psi = detail::canonical_angle(std::atan2(-r(0, 1), r(1, 1)));
  } else {
    e.psi = detail::canonical_angle(std::atan2(r(1, 0), r(0, 0)));
    e.phi = detail::canonical_angle(std::atan2(r(2, 1), r(2, 2)));
  }
  return e;
}

/// Robot-side angles of `r`: (rx, ry, rz) = (phi, theta, psi).
inline FixedXyz robot_angles_fixed_xyz(const RotationMatrix& r) {
  const EulerZyx e = euler_zyx_from_rot(r);
  return {e.phi, e.theta, e.psi};
}

/// Rotates about fixed X by rx, then fixed Y by ry, then fixed Z by rz.
inline RotationMatrix rot_from_fixed_xyz(const FixedXyz& a) {
  if (!std::isfinite(a.rx) || !std::isfinite(a.ry) || !std::isfinite(a.rz)) {
    throw Error(ErrorKind::invalid_angle, "fixed-axis angles must be finite");
  }
  return rot_z(a.rz) * (rot_y(a.ry) * rot_x(a.rx));
}

inline EulerZyx to_euler_zyx(const FixedXyz& a) { return {a.rz, a.ry, a.rx}; }
inline FixedXyz to_fixed_xyz(const EulerZyx& e) { return {e.phi, e.theta, e.psi}; }

/// Angle of the relative rotation a^T b, in [0, pi].
inline double geodesic_angle(const RotationMatrix& a, const RotationMatrix& b) {
  const RotationMatrix rel = a.transposed() * b;
  const double tr = rel(0, 0) + rel(1, 1) + rel(2, 2);
  // atan2 form stays accurate for small angles where acos loses digits.
  const double sx = rel(2, 1) - rel(1, 2);
  const double sy = rel(0, 2) - rel(2, 0);
  const double sz = rel(1, 0) - rel(0, 1);
  return std::atan2(0.5 * std::sqrt(sx * sx + sy * sy + sz * sz), 0.5 * (tr - 1.0));
}

/// Rigid transform: apply(p) = rotation * p + translation.
struct Transform4 {
  RotationMatrix rotation;
  Vec3 translation;

  static Transform4 identity() { return {}; }
  static Transform4 translate(double x, double y, double z) {
    return {RotationMatrix::identity(), {x, y, z}};
  }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  /// Row-major homogeneous 4x4 matrix; the bottom row is (0, 0, 0, 1).
  std::array<std::array<double, 4>, 4> matrix() const {
    std::array<std::array<double, 4>, 4> m{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] = rotation(i, j);
      m[i][3] = translation[i];
    }
    m[3] = {0.0, 0.0, 0.0, 1.0};
    return m;
  }
};

inline Transform4 make_transform(const RotationMatrix& r, const Vec3& t) {
  return {r, t};
}

/// a * b: maps through b first, then a.
namespace detail {
// r * v + offset with extended-precision accumulation and a single rounding
// per component. Translations in a robot cell reach metres while rotations
// are unit scale, so plain double sums lose the last few bits of the
// translation in round trips.
inline Vec3 affine(const RotationMatrix& r, const Vec3& v, const Vec3& offset) {
  const double in[3] = {v.x, v.y, v.z};
  const double off[3] = {offset.x, offset.y, offset.z};
  double out[3];
  for (int i = 0; i < 3; ++i) {
    long double acc = off[i];
    for (int j = 0; j < 3; ++j) {
      acc += static_cast<long double>(r(i, j)) * static_cast<long double>(in[j]);
    }
    out[i] = static_cast<double>(acc);
  }
  return {out[0], out[1], out[2]};
}
}  // namespace detail

inline Transform4 compose(const Transform4& a, const Transform4& b) {
  return {a.rotation * b.rotation, detail::affine(a.rotation, b.translation, a.translation)};
}

inline Transform4 invert(const Transform4& t) {
  const RotationMatrix rt = t.rotation.transposed();
  const Vec3 inv = detail::affine(rt, t.translation, {0.0, 0.0, 0.0});
  return {rt, {-inv.x, -inv.y, -inv.z}};
}

enum class FrameId {
  F,  // world
  S,  // tracker receiver, coincides with the CAD frame
  R,  // robot base
  E,  // tracker sensor / tool
};

inline const char* to_string(FrameId f) {
  switch (f) {
    case FrameId::F: return "F";
    case FrameId::S: return "S";
    case FrameId::R: return "R";
    case FrameId::E: return "E";
  }
  return "?";
}

inline FrameId frame_from_string(const std::string& s) {
  if (s == "F") return FrameId::F;
  if (s == "S") return FrameId::S;
  if (s == "R") return FrameId::R;
  if (s == "E") return FrameId::E;
  throw Error(ErrorKind::parse, "unknown frame '" + s + "'");
}

/// Pose of frame `child` expressed in frame `parent`.
struct FramedTransform {
  FrameId parent;
  FrameId child;
  Transform4 transform;
};

struct CalibrationSet {
  Transform4 t_r_f;  // {F} relative to {R}
  Transform4 t_f_s;  // {S} relative to {F}

  /// T_R_S, the fixed prefix of every chained pose.
  Transform4 robot_from_receiver() const { return compose(t_r_f, t_f_s); }
};

/// T_R_E = T_R_F * T_F_S * T_S_E.
inline FramedTransform chain_to_robot(const CalibrationSet& calib,
                                      const FramedTransform& t_s_e) {
  if (t_s_e.parent != FrameId::S || t_s_e.child != FrameId::E) {
    throw Error(ErrorKind::frame_mismatch,
                std::string("expected a {S}->{E} pose, got {") +
                    to_string(t_s_e.parent) + "}->{" + to_string(t_s_e.child) + "}");
  }
  return {FrameId::R, FrameId::E,
          compose(calib.t_r_f, compose(calib.t_f_s, t_s_e.transform))};
}

}  // namespace pathfuse
