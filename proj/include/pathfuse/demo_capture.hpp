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

// Single-shot demonstration streams from the magnetic tracker: CSV ingestion,
// Hampel outlier filtering, speed estimation, arc-length downsampling and a
// synthetic tracker error model for test streams.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pathfuse/detail/quaternion.hpp"
#include "pathfuse/detail/text.hpp"
#include "pathfuse/error.hpp"
#include "pathfuse/fused_path.hpp"
#include "pathfuse/geometry.hpp"
#include "pathfuse/polyline.hpp"

namespace pathfuse {

/// One tracker reading: sensor {E} relative to receiver {S}.
struct PoseSample {
  double t = 0.0;  // seconds from stream start
  Vec3 position;   // mm
  EulerZyx orientation;

  friend bool operator==(const PoseSample& a, const PoseSample& b) {
    return a.t == b.t && a.position == b.position &&
           a.orientation.psi == b.orientation.psi &&
           a.orientation.theta == b.orientation.theta &&
           a.orientation.phi == b.orientation.phi;
  }
};

struct PoseSeries {
  std::vector<PoseSample> samples;
  std::string source;

  std::size_t size() const { return samples.size(); }
};

/// Throws unless the series has >= 2 finite samples with strictly increasing,
/// non-negative timestamps.
inline void validate_series(const PoseSeries& s) {
  if (s.samples.size() < 2) {
    throw Error(ErrorKind::too_short, "demonstration needs at least 2 samples");
  }
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const PoseSample& p = s.samples[i];
    if (!std::isfinite(p.t) || p.t < 0.0 || !is_finite(p.position) ||
        !std::isfinite(p.orientation.psi) || !std::isfinite(p.orientation.theta) ||
        !std::isfinite(p.orientation.phi)) {
      throw Error(ErrorKind::validation, "sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(p.t > s.samples[i - 1].t)) {
      throw Error(ErrorKind::validation,
                  "timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
    }
  }
}

inline constexpr std::string_view kDemoHeader = "t_s,x_mm,y_mm,z_mm,az_deg,el_deg,roll_deg";

/// Parses the tracker CSV export. Angles are degrees on the wire.
inline PoseSeries parse_demo(std::string_view text, std::string source = {}) {
  const auto lines = detail::split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw Error(ErrorKind::too_short, "demonstration file is empty");
  if (detail::trim(lines[i]) != kDemoHeader) {
    throw Error(ErrorKind::parse, "expected header '" + std::string(kDemoHeader) + "'", i + 1);
  }
  PoseSeries series;
  series.source = std::move(source);
  for (++i; i < lines.size(); ++i) {
    const std::string_view line = detail::trim(lines[i]);
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != 7) {
      throw Error(ErrorKind::parse,
                  "expected 7 columns, found " + std::to_string(cells.size()), i + 1);
    }
    double v[7];
    for (int c = 0; c < 7; ++c) {
      const auto d = detail::parse_double(cells[c]);
      if (!d) {
        throw Error(ErrorKind::parse,
                    "column " + std::to_string(c + 1) + " is not a number", i + 1);
      }
      v[c] = *d;
    }
    if (v[0] < 0.0) throw Error(ErrorKind::validation, "negative timestamp", i + 1);
    if (!series.samples.empty() && !(v[0] > series.samples.back().t)) {
      throw Error(ErrorKind::validation, "timestamps must be strictly increasing", i + 1);
    }
    series.samples.push_back(
        {v[0], {v[1], v[2], v[3]}, {deg_to_rad(v[4]), deg_to_rad(v[5]), deg_to_rad(v[6])}});
  }
  if (series.samples.size() < 2) {
    throw Error(ErrorKind::too_short, "demonstration needs at least 2 samples");
  }
  return series;
}

inline std::string write_demo(const PoseSeries& s) {
  using detail::format_roundtrip;
  std::string out(kDemoHeader);
  out += '\n';
  for (const PoseSample& p : s.samples) {
    out += format_roundtrip(p.t) + ',' + format_roundtrip(p.position.x) + ',' +
           format_roundtrip(p.position.y) + ',' + format_roundtrip(p.position.z) + ',' +
           format_roundtrip(rad_to_deg(p.orientation.psi)) + ',' +
           format_roundtrip(rad_to_deg(p.orientation.theta)) + ',' +
           format_roundtrip(rad_to_deg(p.orientation.phi)) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Outlier filter

namespace detail {

inline double median_of(std::vector<double>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

/// One Hampel pass over `values` using the unmodified input of this pass.
/// Returns the indices it replaced.
inline std::vector<std::size_t> hampel_pass(std::vector<double>& values, std::size_t window,
                                            double k) {
  constexpr double kMadToSigma = 1.4826;
  const std::size_t n = values.size();
  const std::size_t half = window / 2;
  const std::vector<double> in = values;
  std::vector<double> med(n), mad(n);
  std::vector<double> buf(window), dev(window);
  for (std::size_t i = 0; i < n; ++i) {
    // Full-size window, shifted inward near the ends.
    const std::size_t start = std::min(i > half ? i - half : 0, n - window);
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(start), window, buf.begin());
    med[i] = median_of(buf);
    for (std::size_t j = 0; j < window; ++j) dev[j] = std::abs(in[start + j] - med[i]);
    mad[i] = median_of(dev);
  }
  // A window whose samples were mostly replaced by a median in an earlier
  // pass has an artificially small MAD; the channel's typical MAD bounds it
  // from below so repeated passes do not erode clean noise.
  std::vector<double> all = mad;
  const double floor = median_of(all);
  std::vector<std::size_t> replaced;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(in[i] - med[i]) > k * kMadToSigma * std::max(mad[i], floor)) {
      values[i] = med[i];
      replaced.push_back(i);
    }
  }
  return replaced;
}

inline std::vector<double> unwrap(std::span<const double> wrapped) {
  std::vector<double> out(wrapped.begin(), wrapped.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = out[i - 1] + wrap_angle(wrapped[i] - wrapped[i - 1]);
  }
  return out;
}

}  // namespace detail

/// Upper bound on Hampel passes; in practice the filter settles in 2-3.
inline constexpr int kMaxHampelPasses = 64;

/// Per-channel Hampel filter (rolling median, threshold k * 1.4826 * MAD),
/// repeated until a pass replaces nothing. Angles are filtered unwrapped and
/// wrapped back; untouched samples keep their exact input values.
inline PoseSeries filter_outliers(const PoseSeries& s, std::size_t window = 11,
                                  double k = 3.0) {
  if (window < 3 || window % 2 == 0) {
    throw Error(ErrorKind::argument, "filter window must be odd and >= 3");
  }
  if (!(k > 0.0)) throw Error(ErrorKind::argument, "filter threshold k must be > 0");
  const std::size_t n = s.samples.size();
  if (window > n) {
    throw Error(ErrorKind::degenerate_window, "filter window " + std::to_string(window) +
                                                  " exceeds series length " +
                                                  std::to_string(n));
  }
  PoseSeries out = s;
  const auto get = [](const PoseSample& p, int c) {
    switch (c) {
      case 0: return p.position.x;
      case 1: return p.position.y;
      case 2: return p.position.z;
      case 3: return p.orientation.psi;
      case 4: return p.orientation.theta;
      default: return p.orientation.phi;
    }
  };
  const auto set = [](PoseSample& p, int c, double v) {
    switch (c) {
      case 0: p.position.x = v; break;
      case 1: p.position.y = v; break;
      case 2: p.position.z = v; break;
      case 3: p.orientation.psi = v; break;
      case 4: p.orientation.theta = v; break;
      default: p.orientation.phi = v; break;
    }
  };
  for (int c = 0; c < 6; ++c) {
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = get(s.samples[i], c);
    const bool angular = c >= 3;
    std::vector<double> values = angular ? detail::unwrap(raw) : raw;
    std::vector<bool> touched(n, false);
    for (int pass = 0; pass < kMaxHampelPasses; ++pass) {
      const auto replaced = detail::hampel_pass(values, window, k);
      if (replaced.empty()) break;
      for (std::size_t i : replaced) touched[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (touched[i]) set(out.samples[i], c, angular ? wrap_angle(values[i]) : values[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Speed

/// Speed magnitude per sample (mm/s) from a three-point derivative of the
/// positions: centered on interior samples, one-sided at both ends. Exact for
/// quadratic motion on any strictly increasing time grid.
inline std::vector<double> estimate_speed(const PoseSeries& s) {
  const std::size_t n = s.samples.size();
  if (n < 2) throw Error(ErrorKind::too_short, "speed needs at least 2 samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(s.samples[i].t > s.samples[i - 1].t)) {
      throw Error(ErrorKind::division_by_zero,
                  "duplicate or decreasing timestamp at sample " + std::to_string(i));
    }
  }
  const auto pos = [&](std::size_t i) { return s.samples[i].position; };
  const auto time = [&](std::size_t i) { return s.samples[i].t; };
  std::vector<double> speed(n);
  if (n == 2) {
    const double v = distance(pos(1), pos(0)) / (time(1) - time(0));
    return {v, v};
  }
  // Derivative at `at` of the quadratic through samples a < b < c, in Newton
  // form so a stationary stretch yields exactly zero.
  const auto derivative = [&](std::size_t a, std::size_t b, std::size_t c, double at) {
    const double ta = time(a), tb = time(b), tc = time(c);
    const Vec3 d1 = (pos(b) - pos(a)) / (tb - ta);
    const Vec3 d2 = (pos(c) - pos(b)) / (tc - tb);
    const Vec3 dd = (d2 - d1) / (tc - ta);
    return d1 + ((at - ta) + (at - tb)) * dd;
  };
  speed[0] = norm(derivative(0, 1, 2, time(0)));
  for (std::size_t i = 1; i + 1 < n; ++i) speed[i] = norm(derivative(i - 1, i, i + 1, time(i)));
  speed[n - 1] = norm(derivative(n - 3, n - 2, n - 1, time(n - 1)));
  return speed;
}

// ---------------------------------------------------------------------------
// Parameterization and downsampling

/// Below this total travel (mm) the demonstration is parameterized by time.
inline constexpr double kMinDemoTravelMm = 1.0;

struct DemoParameters {
  std::vector<double> u;  // non-decreasing, u.front() == 0, u.back() == 1
  bool time_fallback = false;
};

/// Normalized cumulative arc length of the sample positions, or normalized
/// time when the positions barely move.
inline DemoParameters demo_parameters(const PoseSeries& s) {
  std::vector<Vec3> pts;
  pts.reserve(s.samples.size());
  for (const PoseSample& p : s.samples) pts.push_back(p.position);
  DemoParameters out;
  out.u = cumulative_lengths(pts);
  const double total = out.u.back();
  if (total < kMinDemoTravelMm) {
    out.time_fallback = true;
    const double t0 = s.samples.front().t;
    const double span = s.samples.back().t - t0;
    for (std::size_t i = 0; i < out.u.size(); ++i) out.u[i] = (s.samples[i].t - t0) / span;
  } else {
    for (double& v : out.u) v /= total;
  }
  out.u.front() = 0.0;
  out.u.back() = 1.0;
  return out;
}

struct Bracket {
  std::size_t lo = 0;  // interpolate between lo and lo + 1
  double w = 0.0;      // weight of lo + 1
};

/// Last sample with u[lo] <= u (capped so lo + 1 exists); a zero-length
/// bracket takes the lower sample.
inline Bracket find_bracket(std::span<const double> params, double u) {
  const auto it = std::upper_bound(params.begin(), params.end(), u);
  std::size_t lo = it == params.begin() ? 0 : static_cast<std::size_t>(it - params.begin()) - 1;
  lo = std::min(lo, params.size() - 2);
  const double span = params[lo + 1] - params[lo];
  double w = span > 0.0 ? (u - params[lo]) / span : 0.0;
  return {lo, std::clamp(w, 0.0, 1.0)};
}

inline PoseSample interpolate_sample(const PoseSample& a, const PoseSample& b, double w) {
  if (w == 0.0) return a;
  if (w == 1.0) return b;
  PoseSample out;
  out.t = a.t + w * (b.t - a.t);
  out.position = a.position + w * (b.position - a.position);
  out.orientation = euler_zyx_from_rot(detail::slerp(
      rot_from_euler_zyx(a.orientation), rot_from_euler_zyx(b.orientation), w));
  return out;
}

/// Resamples to `target_count` samples at uniformly spaced parameters. Both
/// end samples are copied exactly; target_count == size() returns the input.
inline PoseSeries downsample(const PoseSeries& s, std::size_t target_count) {
  const std::size_t n = s.samples.size();
  if (target_count < 2 || target_count > n) {
    throw Error(ErrorKind::argument, "target_count must be in [2, " + std::to_string(n) + "]");
  }
  if (target_count == n) return s;
  const DemoParameters params = demo_parameters(s);
  PoseSeries out;
  out.source = s.source;
  out.samples.reserve(target_count);
  out.samples.push_back(s.samples.front());
  for (std::size_t j = 1; j + 1 < target_count; ++j) {
    const double u = static_cast<double>(j) / static_cast<double>(target_count - 1);
    const Bracket b = find_bracket(params.u, u);
    out.samples.push_back(interpolate_sample(s.samples[b.lo], s.samples[b.lo + 1], b.w));
  }
  out.samples.push_back(s.samples.back());
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic tracker streams

/// Error behavior of the electromagnetic tracker: z drifts upward with the
/// receiver-sensor distance while x/y and orientation stay comparatively clean.
struct TrackerErrorModel {
  double z_bias_max = 60.0;        // mm
  double z_bias_range = 800.0;     // mm; distance at which the bias saturates
  double xy_noise_sigma = 2.0;     // mm
  double orient_noise_sigma = 1.0; // degrees
  double spike_rate = 0.0;         // probability per sample
  double spike_magnitude = 50.0;   // mm
  std::uint64_t seed = 0;

  static TrackerErrorModel none() {
    TrackerErrorModel m;
    m.z_bias_max = 0.0;
    m.xy_noise_sigma = 0.0;
    m.orient_noise_sigma = 0.0;
    m.spike_rate = 0.0;
    m.spike_magnitude = 0.0;
    return m;
  }
};

/// z bias added at a given receiver-sensor distance.
inline double z_bias_at(const TrackerErrorModel& m, double dist) {
  if (m.z_bias_range <= 0.0) return m.z_bias_max;
  return m.z_bias_max * std::min(1.0, dist / m.z_bias_range);
}

/// Samples `truth` (read as a {S}-frame path) at `rate` Hz and corrupts the
/// samples with `model`. Each truth segment takes a whole number of sample
/// periods, so every truth vertex is sampled exactly; the segment speed is the
/// mean of its end speeds rounded to that grid.
inline PoseSeries synth_demo(const FusedPath& truth, const TrackerErrorModel& model,
                             double rate) {
  if (truth.points.empty()) throw Error(ErrorKind::argument, "truth path is empty");
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorKind::argument, "sample rate must be > 0");
  }
  if (model.z_bias_max < 0.0 || model.z_bias_range < 0.0 || model.xy_noise_sigma < 0.0 ||
      model.orient_noise_sigma < 0.0 || model.spike_magnitude < 0.0 ||
      !(model.spike_rate >= 0.0 && model.spike_rate <= 1.0)) {
    throw Error(ErrorKind::argument, "tracker error model magnitudes must be >= 0");
  }
  const double period = 1.0 / rate;

  std::vector<FusedPoint> verts = truth.points;
  if (truth.closed && verts.size() > 1) verts.push_back(verts.front());

  // Ground-truth samples first.
  std::vector<PoseSample> clean;
  std::size_t tick = 0;
  const auto emit = [&](const Vec3& p, const RotationMatrix& r) {
    clean.push_back({static_cast<double>(tick) * period, p, euler_zyx_from_rot(r)});
    ++tick;
  };
  RotationMatrix prev_rot = rot_from_fixed_xyz(verts.front().orientation);
  emit(verts.front().position, prev_rot);
  for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
    const FusedPoint& a = verts[i];
    const FusedPoint& b = verts[i + 1];
    const RotationMatrix rb = rot_from_fixed_xyz(b.orientation);
    const double len = distance(a.position, b.position);
    const double v = 0.5 * (a.speed + b.speed);
    std::size_t steps = 1;
    if (v > 0.0) {
      steps = static_cast<std::size_t>(std::max(1.0, std::round(len / (v * period))));
    }
    for (std::size_t j = 1; j <= steps; ++j) {
      if (j == steps) {
        emit(b.position, rb);
      } else {
        const double w = static_cast<double>(j) / static_cast<double>(steps);
        emit(a.position + w * (b.position - a.position), detail::slerp(prev_rot, rb, w));
      }
    }
    prev_rot = rb;
  }

  std::mt19937_64 rng(model.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double orient_sigma = deg_to_rad(model.orient_noise_sigma);

  PoseSeries out;
  out.source = "synth(seed=" + std::to_string(model.seed) + ")";
  out.samples.reserve(clean.size());
  for (const PoseSample& c : clean) {
    // Fixed draw order per sample keeps the stream reproducible regardless of
    // which magnitudes are zero.
    const double nx = gauss(rng), ny = gauss(rng);
    const double npsi = gauss(rng), ntheta = gauss(rng), nphi = gauss(rng);
    const double spike_draw = uniform(rng);
    const Vec3 dir{gauss(rng), gauss(rng), gauss(rng)};

    PoseSample s = c;
    s.position.x += model.xy_noise_sigma * nx;
    s.position.y += model.xy_noise_sigma * ny;
    s.position.z += z_bias_at(model, norm(c.position));
    if (spike_draw < model.spike_rate && model.spike_magnitude > 0.0) {
      const double dn = norm(dir);
      if (dn > 0.0) s.position = s.position + (model.spike_magnitude / dn) * dir;
    }
    if (orient_sigma > 0.0) {
      const EulerZyx noisy{c.orientation.psi + orient_sigma * npsi,
                           c.orientation.theta + orient_sigma * ntheta,
                           c.orientation.phi + orient_sigma * nphi};
      s.orientation = euler_zyx_from_rot(rot_from_euler_zyx(noisy));
    }
    out.samples.push_back(s);
  }
  return out;
}

}  // namespace pathfuse
