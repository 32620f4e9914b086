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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "pathfuse/demo_capture.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace pathfuse {
namespace {

constexpr double kPi = std::numbers::pi;

PoseSeries make_series(std::size_t n, double dt,
                       const std::function<Vec3(double)>& pos,
                       const std::function<EulerZyx(double)>& rot = {}) {
  PoseSeries s;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    s.samples.push_back({t, pos(t), rot ? rot(t) : EulerZyx{}});
  }
  return s;
}

std::size_t count_modified(const PoseSeries& a, const PoseSeries& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a.samples[i] == b.samples[i] ? 0 : 1;
  return n;
}

// --- parse_demo ------------------------------------------------------------

TEST(ParseDemo, HeaderAndTwoRows) {
  const PoseSeries s = parse_demo(
      "t_s,x_mm,y_mm,z_mm,az_deg,el_deg,roll_deg\r\n"
      "0,1,2,3,90,0,0\r\n"
      "0.01,1.5,2,3,90,-45,180\r\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s.samples[0].orientation.psi, kPi / 2, 1e-15);
  EXPECT_NEAR(s.samples[1].orientation.theta, -kPi / 4, 1e-15);
  EXPECT_NEAR(s.samples[1].orientation.phi, kPi, 1e-15);
  EXPECT_EQ(s.samples[1].position, (Vec3{1.5, 2, 3}));
}

TEST(ParseDemo, TextInNumericColumnNamesTheLine) {
  try {
    parse_demo(
        "t_s,x_mm,y_mm,z_mm,az_deg,el_deg,roll_deg\n"
        "0,1,2,3,0,0,0\n"
        "0.01,1,two,3,0,0,0\n");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(ParseDemo, RejectsNonMonotonicAndShortStreams) {
  const std::string header = "t_s,x_mm,y_mm,z_mm,az_deg,el_deg,roll_deg\n";
  try {
    parse_demo(header + "0,0,0,0,0,0,0\n0.02,0,0,0,0,0,0\n0.02,1,0,0,0,0,0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
    EXPECT_EQ(e.line(), 4u);
  }
  try {
    parse_demo(header + "0,0,0,0,0,0,0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::too_short);
  }
  EXPECT_THROW(parse_demo("t,x,y,z,a,e,r\n0,0,0,0,0,0,0\n1,0,0,0,0,0,0\n"), Error);
  EXPECT_THROW(parse_demo(header + "0,0,0,0,0,0\n1,0,0,0,0,0,0\n"), Error);
}

TEST(ParseDemo, WriteThenReadRoundTrip) {
  TrackerErrorModel model;
  model.seed = 99;
  model.spike_rate = 0.02;
  FusedPath truth = testing::weld_seam_truth();
  PoseSeries s = synth_demo(truth, model, 100.0);
  s.samples.resize(500);
  ASSERT_EQ(s.size(), 500u);
  const PoseSeries back = parse_demo(write_demo(s));
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const PoseSample& a = s.samples[i];
    const PoseSample& b = back.samples[i];
    EXPECT_NEAR(a.t, b.t, 1e-9);
    EXPECT_NEAR(distance(a.position, b.position), 0.0, 1e-9);
    EXPECT_NEAR(a.orientation.psi, b.orientation.psi, 1e-9);
    EXPECT_NEAR(a.orientation.theta, b.orientation.theta, 1e-9);
    EXPECT_NEAR(a.orientation.phi, b.orientation.phi, 1e-9);
  }
}

// --- filter_outliers -------------------------------------------------------

TEST(FilterOutliers, ConstantSeriesUnchanged) {
  const PoseSeries s = make_series(50, 0.01, [](double) { return Vec3{1, 2, 3}; },
                                   [](double) { return EulerZyx{0.3, 0.2, 0.1}; });
  const PoseSeries f = filter_outliers(s);
  EXPECT_EQ(count_modified(s, f), 0u);
}

TEST(FilterOutliers, RemovesSingleSpikeOnLine) {
  PoseSeries s = make_series(101, 0.01, [](double t) { return Vec3{100 * t, 50 * t, 0}; });
  s.samples[40].position.z += 100.0;
  const PoseSeries f = filter_outliers(s, 11, 3.0);
  double worst = 0.0;
  for (const PoseSample& p : f.samples) {
    const Vec3 on_line{100 * p.t, 50 * p.t, 0};
    worst = std::max(worst, distance(p.position, on_line));
  }
  EXPECT_LT(worst, 1.0);
  EXPECT_EQ(f.samples[40].position.z, 0.0);
}

TEST(FilterOutliers, SmoothSinusoidFalsePositiveBudget) {
  const PoseSeries s = make_series(
      1000, 0.01,
      [](double t) {
        return Vec3{200 * std::sin(0.7 * t), 150 * std::cos(0.45 * t), 30 * std::sin(1.3 * t)};
      },
      [](double t) {
        return EulerZyx{wrap_angle(3.0 + 0.8 * t), 0.4 * std::sin(0.5 * t), 0.6 * std::cos(0.9 * t)};
      });
  const PoseSeries f = filter_outliers(s);
  EXPECT_LE(count_modified(s, f), 10u);  // 1% of 1000
}

TEST(FilterOutliers, AngleWrapIsNotASpike) {
  // Yaw crosses +-180 degrees; unwrapped it is a smooth ramp.
  const PoseSeries s = make_series(60, 0.01, [](double t) { return Vec3{t, 0, 0}; },
                                   [](double t) { return EulerZyx{wrap_angle(3.0 + 5.0 * t), 0, 0}; });
  const PoseSeries f = filter_outliers(s);
  EXPECT_EQ(count_modified(s, f), 0u);
}

TEST(FilterOutliers, AngleSpikeReplacedAndRewrapped) {
  PoseSeries s = make_series(60, 0.01, [](double t) { return Vec3{t, 0, 0}; },
                             [](double t) { return EulerZyx{wrap_angle(3.0 + 5.0 * t), 0, 0}; });
  s.samples[30].orientation.psi = wrap_angle(s.samples[30].orientation.psi + 1.5);
  const PoseSeries f = filter_outliers(s);
  const double expected = wrap_angle(3.0 + 5.0 * s.samples[30].t);
  EXPECT_LT(testing::angle_diff(f.samples[30].orientation.psi, expected), 0.06);
  EXPECT_GT(f.samples[30].orientation.psi, -kPi);
  EXPECT_LE(f.samples[30].orientation.psi, kPi);
}

TEST(FilterOutliers, IdempotentOnItsOutput) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    PoseSeries s = make_series(
        300, 0.01, [&](double t) { return Vec3{40 * t + g(rng), 5 * std::sin(t) + g(rng), g(rng)}; },
        [&](double t) { return EulerZyx{wrap_angle(2.5 + t + 0.05 * g(rng)), 0.1 * g(rng), 0.1 * g(rng)}; });
    for (PoseSample& p : s.samples) {
      if (u(rng) < 0.03) p.position.z += 40.0 * (u(rng) < 0.5 ? -1 : 1);
    }
    const PoseSeries once = filter_outliers(s);
    const PoseSeries twice = filter_outliers(once);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ASSERT_NEAR(distance(once.samples[i].position, twice.samples[i].position), 0.0, 1e-9);
      ASSERT_NEAR(testing::angle_diff(once.samples[i].orientation.psi, twice.samples[i].orientation.psi), 0.0, 1e-9);
      ASSERT_NEAR(once.samples[i].orientation.theta, twice.samples[i].orientation.theta, 1e-9);
      ASSERT_NEAR(testing::angle_diff(once.samples[i].orientation.phi, twice.samples[i].orientation.phi), 0.0, 1e-9);
    }
  }
}

TEST(FilterOutliers, ArgumentErrors) {
  const PoseSeries s = make_series(8, 0.01, [](double t) { return Vec3{t, 0, 0}; });
  try {
    filter_outliers(s, 11, 3.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_window);
  }
  EXPECT_THROW(filter_outliers(s, 4, 3.0), Error);
  EXPECT_THROW(filter_outliers(s, 1, 3.0), Error);
  EXPECT_THROW(filter_outliers(s, 5, 0.0), Error);
  EXPECT_EQ(filter_outliers(s, 7, 3.0).size(), 8u);
}

// --- estimate_speed --------------------------------------------------------

TEST(EstimateSpeed, StationaryIsZero) {
  const auto v = estimate_speed(make_series(20, 0.01, [](double) { return Vec3{5, 5, 5}; }));
  for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(EstimateSpeed, ConstantVelocityLine) {
  const auto v = estimate_speed(
      make_series(200, 0.01, [](double t) { return Vec3{60 * t, 80 * t, 0}; }));
  for (double x : v) EXPECT_NEAR(x, 100.0, 1e-6);
}

TEST(EstimateSpeed, QuadraticProfileMatchesAnalyticDerivative) {
  // x = 3 t^2 + 10 t, y = -t^2, on a jittered time grid.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> jitter(0.006, 0.014);
  PoseSeries s;
  double t = 0.0;
  for (int i = 0; i < 150; ++i) {
    s.samples.push_back({t, {3 * t * t + 10 * t, -t * t, 0.0}, {}});
    t += jitter(rng);
  }
  const auto v = estimate_speed(s);
  // A three-point derivative is exact on quadratics; the bound below is the
  // round-off envelope max|x| * eps / min(dt) with a safety factor.
  const double bound = 1e3 * (3 * t * t + 10 * t) * 2.2e-16 / 0.006;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double ti = s.samples[i].t;
    const double analytic = std::hypot(6 * ti + 10, -2 * ti);
    EXPECT_NEAR(v[i], analytic, bound) << i;
  }
}

TEST(EstimateSpeed, DuplicateTimestampGuard) {
  PoseSeries s = make_series(5, 0.01, [](double t) { return Vec3{t, 0, 0}; });
  s.samples[3].t = s.samples[2].t;
  try {
    estimate_speed(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::division_by_zero);
  }
}

// --- downsample ------------------------------------------------------------

TEST(Downsample, FullCountIsIdentity) {
  const PoseSeries s = make_series(37, 0.013, [](double t) { return Vec3{t * t, t, 0}; });
  const PoseSeries d = downsample(s, 37);
  EXPECT_EQ(count_modified(s, d), 0u);
}

TEST(Downsample, UniformSeriesHitsTenthParameters) {
  const PoseSeries s = make_series(101, 0.01, [](double t) { return Vec3{100 * t, 0, 0}; });
  const PoseSeries d = downsample(s, 11);
  ASSERT_EQ(d.size(), 11u);
  for (int j = 0; j < 11; ++j) {
    EXPECT_NEAR(d.samples[j].position.x / 100.0, 0.1 * j, 1e-12);
  }
  EXPECT_EQ(d.samples.front(), s.samples.front());
  EXPECT_EQ(d.samples.back(), s.samples.back());
}

TEST(Downsample, NonUniformTimingGivesUniformArcParameters) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dt(0.002, 0.03);
  std::uniform_real_distribution<double> step(0.5, 6.0);
  PoseSeries s;
  double t = 0.0, a = 0.0;
  for (int i = 0; i < 240; ++i) {
    s.samples.push_back({t, {a, 30 * std::sin(a / 40.0), 0.1 * a}, {0.001 * a, 0, 0}});
    t += dt(rng);
    a += step(rng);
  }
  const PoseSeries d = downsample(s, 21);
  ASSERT_EQ(d.size(), 21u);

  // Oracle: long-double cumulative length; locate each output sample on the
  // input polyline by brute-force segment search.
  std::vector<long double> cum{0.0L};
  for (std::size_t i = 1; i < s.size(); ++i) {
    cum.push_back(cum.back() + distance(s.samples[i - 1].position, s.samples[i].position));
  }
  for (std::size_t j = 0; j < d.size(); ++j) {
    const Vec3& p = d.samples[j].position;
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const double dd = testing::brute_segment_distance(p, s.samples[i].position, s.samples[i + 1].position);
      if (dd < best_d) {
        best_d = dd;
        best = i;
      }
    }
    ASSERT_LT(best_d, 1e-9);
    const long double arc = cum[best] + distance(s.samples[best].position, p);
    EXPECT_NEAR(static_cast<double>(arc / cum.back()), static_cast<double>(j) / 20.0, 1e-9);
  }
  for (std::size_t j = 1; j < d.size(); ++j) EXPECT_GT(d.samples[j].t, d.samples[j - 1].t);
}

TEST(Downsample, RangeErrors) {
  const PoseSeries s = make_series(10, 0.01, [](double t) { return Vec3{t, 0, 0}; });
  EXPECT_THROW(downsample(s, 1), Error);
  EXPECT_THROW(downsample(s, 11), Error);
  EXPECT_EQ(downsample(s, 2).size(), 2u);
}

// --- synth_demo ------------------------------------------------------------

TEST(SynthDemo, ZeroModelLiesOnTruth) {
  const FusedPath truth = testing::rectangle_truth();
  const PoseSeries s = synth_demo(truth, TrackerErrorModel::none(), 100.0);
  std::vector<Vec3> verts;
  for (const FusedPoint& p : truth.points) verts.push_back(p.position);
  verts.push_back(verts.front());
  for (const PoseSample& p : s.samples) {
    EXPECT_LT(testing::brute_polyline_distance(p.position, verts), 1e-9);
  }
  // Every truth vertex is sampled exactly, with its orientation.
  for (const FusedPoint& v : truth.points) {
    bool hit = false;
    for (const PoseSample& p : s.samples) {
      if (p.position == v.position) {
        hit = true;
        const RotationMatrix r = rot_from_euler_zyx(p.orientation);
        EXPECT_LT(geodesic_angle(r, rot_from_fixed_xyz(v.orientation)), 1e-12);
      }
    }
    EXPECT_TRUE(hit);
  }
  EXPECT_NEAR(s.samples[1].t - s.samples[0].t, 0.01, 1e-15);
}

TEST(SynthDemo, ZBiasPeaksAtConfiguredRange) {
  FusedPath truth;
  truth.points = {{{800, 0, 0}, {}, 100.0}, {{0, 800, 0}, {}, 100.0}};
  TrackerErrorModel m = TrackerErrorModel::none();
  m.z_bias_max = 60.0;
  m.z_bias_range = 800.0;
  const PoseSeries s = synth_demo(truth, m, 50.0);
  EXPECT_EQ(s.samples.front().position.z, 60.0);
  EXPECT_EQ(s.samples.back().position.z, 60.0);
  // Closer to the receiver the bias is proportionally smaller.
  const PoseSample& mid = s.samples[s.size() / 2];
  EXPECT_NEAR(mid.position.z, 60.0 * norm(Vec3{mid.position.x, mid.position.y, 0}) / 800.0, 1e-9);
  EXPECT_LT(mid.position.z, 60.0);
  EXPECT_EQ(z_bias_at(m, 2000.0), 60.0);
}

TEST(SynthDemo, FixedSeedIsBitIdentical) {
  TrackerErrorModel m;
  m.seed = 5;
  m.spike_rate = 0.05;
  const FusedPath truth = testing::weld_seam_truth();
  const PoseSeries a = synth_demo(truth, m, 120.0);
  const PoseSeries b = synth_demo(truth, m, 120.0);
  EXPECT_EQ(write_demo(a), write_demo(b));
  m.seed = 6;
  EXPECT_NE(write_demo(synth_demo(truth, m, 120.0)), write_demo(a));
}

TEST(SynthDemo, SpikeRateIsHonoured) {
  TrackerErrorModel m = TrackerErrorModel::none();
  m.spike_rate = 0.1;
  m.spike_magnitude = 50.0;
  m.seed = 77;
  const FusedPath truth = testing::weld_seam_truth();
  const PoseSeries clean = synth_demo(truth, TrackerErrorModel::none(), 200.0);
  const PoseSeries spiky = synth_demo(truth, m, 200.0);
  ASSERT_EQ(clean.size(), spiky.size());
  std::size_t spikes = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double d = distance(clean.samples[i].position, spiky.samples[i].position);
    if (d > 0.0) {
      EXPECT_NEAR(d, 50.0, 1e-9);
      ++spikes;
    }
  }
  const double rate = static_cast<double>(spikes) / static_cast<double>(clean.size());
  EXPECT_GT(rate, 0.05);
  EXPECT_LT(rate, 0.15);
}

TEST(SynthDemo, RejectsBadArguments) {
  const FusedPath truth = testing::weld_seam_truth();
  EXPECT_THROW(synth_demo(truth, TrackerErrorModel::none(), 0.0), Error);
  TrackerErrorModel m;
  m.spike_rate = 1.5;
  EXPECT_THROW(synth_demo(truth, m, 100.0), Error);
  EXPECT_THROW(synth_demo(FusedPath{}, TrackerErrorModel::none(), 100.0), Error);
}

}  // namespace
}  // namespace pathfuse
