// Copyright 2026 The armgnn Authors
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

#include <cmath>
#include <random>

#include "armgnn/metrics.hpp"
#include "armgnn/robotmap.hpp"
#include "doctest.h"

using namespace armgnn;

namespace {

// Link-by-link DH composition with explicit elementary rotations and
// translations: Rz(theta) Tz(d) Tx(a) Rx(alpha).
Eigen::Vector3d oracle_fk(const JointVector& q, const RobotConfig& cfg) {
  Eigen::Affine3d t = Eigen::Affine3d::Identity();
  for (std::size_t i = 0; i < kRobotJoints; ++i) {
    const DhRow& r = cfg.dh[i];
    t = t * Eigen::AngleAxisd(q[static_cast<Eigen::Index>(i)], Eigen::Vector3d::UnitZ()) *
        Eigen::Translation3d(0, 0, r.d) * Eigen::Translation3d(r.a, 0, 0) *
        Eigen::AngleAxisd(r.alpha, Eigen::Vector3d::UnitX());
  }
  return t.translation();
}

JointVector random_joints(std::mt19937_64& rng, double span = M_PI) {
  std::uniform_real_distribution<double> u(-span, span);
  JointVector q;
  for (auto& v : q) v = u(rng);
  return q;
}

}  // namespace

TEST_CASE("workspace map sends corners to corners") {
  WorkspaceMap map;
  const auto& h = map.human_box;
  const auto& r = map.robot_box;
  CHECK((map.apply(h.min()) - r.min()).norm() < 1e-15);
  CHECK((map.apply(h.max()) - r.max()).norm() < 1e-15);
  CHECK((map.apply(h.center()) - r.center()).norm() < 1e-15);
  for (int c = 0; c < 8; ++c) {
    const auto corner = static_cast<Eigen::AlignedBox3d::CornerType>(c);
    CHECK((map.apply(h.corner(corner)) - r.corner(corner)).norm() < 1e-15);
  }

  // Affine maps keep midpoints and collinearity.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Vector3d a = h.sample(), b = h.sample();
    const double t = u(rng);
    const Eigen::Vector3d p = (1 - t) * a + t * b;
    CHECK((map.apply(0.5 * (a + b)) - 0.5 * (map.apply(a) + map.apply(b))).norm() < 1e-15);
    CHECK((map.apply(p) - ((1 - t) * map.apply(a) + t * map.apply(b))).norm() < 1e-15);
  }

  WorkspaceMap unit;
  unit.human_box = Eigen::AlignedBox3d(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones());
  unit.robot_box = Eigen::AlignedBox3d(Eigen::Vector3d::Zero(), Eigen::Vector3d::Constant(0.5));
  CHECK(unit.apply(Eigen::Vector3d::Ones()) == Eigen::Vector3d::Constant(0.5));

  WorkspaceMap flat;
  flat.human_box.max().z() = flat.human_box.min().z();
  CHECK_THROWS(flat.scale());
}

TEST_CASE("map_workspace clamps and renames") {
  WorkspaceMap map;
  const Trajectory t = Trajectory::from_points(
      {{0.3, 0.0, 0.2}, {0.605, 0.0, 0.2}, {2.0, 0.0, 0.2}}, "wrist", 0.04);
  const Trajectory m = map_workspace(t, map);
  CHECK(m.joint_names() == std::vector<std::string>{"ee"});
  CHECK(m.frame_period() == 0.04);
  CHECK(m.point(1, 0).x() == doctest::Approx(map.robot_box.max().x()));
  CHECK(m.point(2, 0).x() == doctest::Approx(map.robot_box.max().x()));
  CHECK_THROWS(map_workspace(Trajectory::arm(3, 0.04), map));
}

TEST_CASE("fk6 known poses") {
  RobotConfig cfg;
  JointVector zero = JointVector::Zero();
  // All-zero: links 2 and 3 stretch along -x; offsets d4 and d6 go along -y
  // and +y after the alpha twists, d1 - d5 is the height.
  const Pose p0 = fk6(zero, cfg);
  CHECK(p0.position.x() == doctest::Approx(-0.8172).epsilon(1e-12));
  CHECK(p0.position.y() == doctest::Approx(-0.2329).epsilon(1e-12));
  CHECK(p0.position.z() == doctest::Approx(0.0628).epsilon(1e-12));
  CHECK((p0.rotation.transpose() * p0.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-14);

  // Rotating the base by pi mirrors x and y.
  JointVector base = zero;
  base[0] = M_PI;
  const Pose pm = fk6(base, cfg);
  CHECK(pm.position.x() == doctest::Approx(0.8172).epsilon(1e-12));
  CHECK(pm.position.y() == doctest::Approx(0.2329).epsilon(1e-12));
  CHECK(pm.position.z() == doctest::Approx(0.0628).epsilon(1e-12));

  JointVector over = zero;
  over[3] = 7.0;
  CHECK_THROWS_AS(fk6(over, cfg), std::domain_error);
}

TEST_CASE("fk6 matches an independent DH composition") {
  RobotConfig cfg;
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const JointVector q = random_joints(rng);
    CHECK((fk6(q, cfg).position - oracle_fk(q, cfg)).norm() < 1e-12);
    // Whole turns leave the pose unchanged.
    JointVector turned = q;
    turned[k % 6] += turned[k % 6] > 0 ? -2 * M_PI : 2 * M_PI;
    CHECK((fk6(turned, cfg).position - fk6(q, cfg).position).norm() < 1e-12);
  }
}

TEST_CASE("ik reaches random reachable targets") {
  RobotConfig cfg;
  std::mt19937_64 rng(12);
  const Pose home = fk6(default_ik_seed(), cfg);
  CHECK((ik_dls(home.position, default_ik_seed(), cfg) - default_ik_seed()).norm() < 1e-12);

  WorkspaceMap map;
  for (int k = 0; k < 40; ++k) {
    const Eigen::Vector3d target = map.robot_box.sample();
    const JointVector q = ik_dls(target, default_ik_seed(), cfg);
    CHECK(cfg.within_limits(q));
    CHECK((fk6(q, cfg).position - target).norm() < 1e-6);
  }
  // Forward then inverse on random configurations.
  for (int k = 0; k < 20; ++k) {
    const JointVector q = random_joints(rng, 1.0);
    const Eigen::Vector3d target = fk6(q, cfg).position;
    if (!cfg.workspace_box.contains(target)) continue;
    CHECK((fk6(ik_dls(target, q + JointVector::Constant(0.05), cfg), cfg).position - target).norm() < 1e-6);
  }
}

TEST_CASE("ik rejects unreachable targets") {
  RobotConfig cfg;
  CHECK_THROWS_AS(ik_dls({5.0, 0.0, 0.0}, default_ik_seed(), cfg), std::domain_error);
  try {
    ik_dls({0.0, 0.0, 0.99}, default_ik_seed(), cfg);
    FAIL("expected IkFailure");
  } catch (const IkFailure& e) {
    CHECK(e.residual() > 1e-3);
  }
}

TEST_CASE("trapezoid triangular and cruising profiles") {
  // D = 1, vmax = amax = 1: accelerating for 1 s covers exactly half, so the
  // profile is a triangle of 2 s peaking at 1 at the midpoint.
  const Profile exact = trapezoid(0.0, 1.0, 1.0, 1.0, 0.01);
  CHECK(exact.duration == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(exact.positions.size() == 201);
  CHECK(exact.positions[100] == doctest::Approx(0.5).epsilon(1e-12));
  const double mid_velocity = (exact.positions[101] - exact.positions[99]) / 0.02;
  // The peak is a corner; a central difference of width 2h averages it to
  // 1 - a h / 2.
  CHECK(mid_velocity == doctest::Approx(1.0 - 0.5 * 0.01).epsilon(1e-9));
  double travelled = 0.0;
  for (std::size_t k = 1; k < exact.positions.size(); ++k) {
    travelled += exact.positions[k] - exact.positions[k - 1];
  }
  CHECK(std::abs(travelled - 1.0) <= 0.01 * 1.0);

  // D = 1, vmax = 2, amax = 1 never reaches vmax: T = 2 sqrt(D / a) = 2, peak 1.
  const Profile tri = trapezoid(0.0, 1.0, 2.0, 1.0, 0.01);
  CHECK(tri.duration == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(tri.positions.size() == 201);
  CHECK(tri.positions.front() == 0.0);
  CHECK(tri.positions.back() == 1.0);
  CHECK(tri.positions[100] == doctest::Approx(0.5).epsilon(1e-12));
  double peak = 0.0;
  for (std::size_t k = 1; k < tri.positions.size(); ++k) {
    peak = std::max(peak, (tri.positions[k] - tri.positions[k - 1]) / 0.01);
  }
  CHECK(peak == doctest::Approx(1.0).epsilon(0.01));

  // Cruising profile, moving backwards; check the limits sample by sample.
  const double vmax = 0.7, amax = 1.5, dt = 0.02;
  const Profile tr = trapezoid(1.0, -2.0, vmax, amax, dt);
  CHECK(tr.positions.back() == -2.0);
  CHECK(tr.duration >= 3.0 / vmax + vmax / amax - 1e-12);
  CHECK(tr.duration < 3.0 / vmax + vmax / amax + dt);
  for (std::size_t k = 1; k < tr.positions.size(); ++k) {
    const double v = (tr.positions[k] - tr.positions[k - 1]) / dt;
    CHECK(v <= 1e-12);
    CHECK(-v <= vmax + 1e-12);
    if (k >= 2) {
      const double a = (tr.positions[k] - 2 * tr.positions[k - 1] + tr.positions[k - 2]) / (dt * dt);
      CHECK(std::abs(a) <= amax + 1e-9);
    }
  }

  CHECK(trapezoid(0.3, 0.3, 1.0, 1.0, 0.1).positions.size() == 1);
  CHECK_THROWS(trapezoid(0.0, 1.0, 0.0, 1.0, 0.1));
}

TEST_CASE("joint-space baseline bends and task-space baseline does not") {
  RobotConfig cfg;
  WorkspaceMap map;
  const Eigen::Vector3d a(0.30, -0.15, 0.15), b(0.45, 0.20, 0.40);
  const JointBaseline jb = joint_space_baseline(a, b, cfg, TrapezoidLimits{}, default_ik_seed());
  REQUIRE(jb.ee.frames() == jb.joints.frames());
  CHECK((jb.ee.point(0, 0) - a).norm() < 1e-6);
  CHECK((jb.ee.point(jb.ee.frames() - 1, 0) - b).norm() < 1e-6);
  const auto pts = jb.ee.points(0);
  CHECK(max_chord_deviation(pts, pts.front(), pts.back()) > 0.0);
  CHECK(jb.joints.frame_period == 0.05);

  // Continuity: no joint moves more than vmax dt per sample, so the end
  // effector moves less than vmax dt times the arm's reach.
  double reach = 0.0;
  for (const auto& row : cfg.dh) reach += std::abs(row.a) + std::abs(row.d);
  for (std::size_t f = 1; f < jb.ee.frames(); ++f) {
    CHECK((jb.ee.point(f, 0) - jb.ee.point(f - 1, 0)).norm() < TrapezoidLimits{}.vmax * 0.05 * reach);
  }

  const JointBaseline still = joint_space_baseline(a, a, cfg, TrapezoidLimits{}, default_ik_seed());
  for (std::size_t f = 0; f < still.ee.frames(); ++f) CHECK((still.ee.point(f, 0) - a).norm() < 1e-6);
  for (std::size_t f = 1; f < still.joints.frames(); ++f) CHECK(still.joints.samples[f] == still.joints.samples[0]);

  const Trajectory ts = task_space_baseline(a, b, 25);
  CHECK(ts.frames() == 25);
  CHECK(ts.point(0, 0) == a);
  CHECK(ts.point(24, 0) == b);
  CHECK((ts.point(12, 0) - 0.5 * (a + b)).norm() < 1e-15);
  const Trajectory fixed = task_space_baseline(a, a, 5);
  for (std::size_t f = 0; f < 5; ++f) CHECK(fixed.point(f, 0) == a);
  CHECK(max_chord_deviation(ts.points(0), a, b) == 0.0);
  CHECK_THROWS(task_space_baseline(a, b, 1));
}

TEST_CASE("robot config validation") {
  RobotConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.within_limits(JointVector::Zero()));
  RobotConfig bad = cfg;
  bad.joint_limits[2] = {1.0, -1.0};
  CHECK_THROWS(bad.validate());
}
