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

#include "armgnn/robotmap.hpp"

#include <algorithm>
#include <iostream>

#include <Eigen/Dense>
#include <fmt/core.h>

namespace armgnn {

namespace {

constexpr double kClampWarnDistance = 0.01;  // m

void check_box(const Eigen::AlignedBox3d& box, const char* what) {
  const Eigen::Vector3d extent = box.max() - box.min();
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(extent[a]) || !(extent[a] > 0.0)) {
      throw std::invalid_argument(fmt::format("{} has a degenerate axis {}", what, a));
    }
  }
}

Eigen::Vector3d position(const JointVector& q, const RobotConfig& cfg) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (std::size_t j = 0; j < kRobotJoints; ++j) {
    const auto& r = cfg.dh[j];
    t = t * dh_transform(q[static_cast<Eigen::Index>(j)], r.a, r.d, r.alpha);
  }
  return t.block<3, 1>(0, 3);
}

Eigen::Matrix<double, 3, 6> numeric_jacobian(const JointVector& q, const RobotConfig& cfg,
                                             double h) {
  Eigen::Matrix<double, 3, 6> jac;
  for (Eigen::Index j = 0; j < 6; ++j) {
    JointVector qp = q, qm = q;
    qp[j] += h;
    qm[j] -= h;
    jac.col(j) = (position(qp, cfg) - position(qm, cfg)) / (2.0 * h);
  }
  return jac;
}

// Shifts each angle by whole turns so it lies within the joint limits,
// preferring the value closest to `near`.
JointVector wrap_into_limits(JointVector q, const RobotConfig& cfg, const JointVector& near) {
  for (std::size_t j = 0; j < kRobotJoints; ++j) {
    const auto [lo, hi] = cfg.joint_limits[j];
    const auto i = static_cast<Eigen::Index>(j);
    double best = q[i];
    double best_dist = std::numeric_limits<double>::infinity();
    const double base = q[i] - 2 * M_PI * std::round((q[i] - near[i]) / (2 * M_PI));
    for (int k = -2; k <= 2; ++k) {
      const double cand = base + 2 * M_PI * k;
      if (cand < lo || cand > hi) continue;
      const double dist = std::abs(cand - near[i]);
      if (dist < best_dist) {
        best = cand;
        best_dist = dist;
      }
    }
    if (!std::isfinite(best_dist)) {
      throw std::domain_error(fmt::format("joint {} cannot be placed within its limits", j + 1));
    }
    q[i] = best;
  }
  return q;
}

}  // namespace

void RobotConfig::validate() const {
  for (std::size_t j = 0; j < kRobotJoints; ++j) {
    const auto& r = dh[j];
    if (!std::isfinite(r.a) || !std::isfinite(r.d) || !std::isfinite(r.alpha)) {
      throw std::invalid_argument(fmt::format("DH row {} is not finite", j + 1));
    }
    if (!(joint_limits[j].first < joint_limits[j].second)) {
      throw std::invalid_argument(fmt::format("joint {} limits must satisfy min < max", j + 1));
    }
  }
  check_box(workspace_box, "workspace box");
}

bool RobotConfig::within_limits(const JointVector& q) const {
  for (std::size_t j = 0; j < kRobotJoints; ++j) {
    const double v = q[static_cast<Eigen::Index>(j)];
    if (!(v >= joint_limits[j].first && v <= joint_limits[j].second)) return false;
  }
  return true;
}

Eigen::Vector3d WorkspaceMap::scale() const {
  check_box(human_box, "human box");
  check_box(robot_box, "robot box");
  return (robot_box.max() - robot_box.min()).cwiseQuotient(human_box.max() - human_box.min());
}

Eigen::Vector3d WorkspaceMap::offset() const {
  return robot_box.min() - scale().cwiseProduct(human_box.min());
}

Trajectory map_workspace(const Trajectory& wrist, const WorkspaceMap& map) {
  if (wrist.joints() != 1) {
    throw std::invalid_argument("map_workspace expects a single-joint trajectory");
  }
  wrist.validate();
  const Eigen::Vector3d scale = map.scale();
  const Eigen::Vector3d offset = map.offset();
  Trajectory out(wrist.frames(), {"ee"}, wrist.frame_period());
  std::size_t warned = 0;
  double worst = 0.0;
  for (std::size_t f = 0; f < wrist.frames(); ++f) {
    const Eigen::Vector3d p = wrist.point(f, 0);
    const Eigen::Vector3d c = p.cwiseMax(map.human_box.min()).cwiseMin(map.human_box.max());
    const double outside = (p - c).norm();
    if (outside > kClampWarnDistance) {
      ++warned;
      worst = std::max(worst, outside);
    }
    out.set_point(f, 0, scale.cwiseProduct(c) + offset);
  }
  if (warned > 0) {
    std::clog << fmt::format(
        "warning: {} wrist samples lie more than {:.3f} m outside the human box (worst {:.4f} m); "
        "clamped\n",
        warned, kClampWarnDistance, worst);
  }
  return out;
}

Pose fk6(const JointVector& q, const RobotConfig& cfg) {
  if (!cfg.within_limits(q)) throw std::domain_error("fk6: joint angles outside limits");
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (std::size_t j = 0; j < kRobotJoints; ++j) {
    const auto& r = cfg.dh[j];
    t = t * dh_transform(q[static_cast<Eigen::Index>(j)], r.a, r.d, r.alpha);
  }
  return {t.block<3, 1>(0, 3), t.block<3, 3>(0, 0)};
}

JointVector ik_dls(const Eigen::Vector3d& target, const JointVector& seed, const RobotConfig& cfg,
                   const IkOptions& opts) {
  if (!cfg.workspace_box.contains(target)) {
    throw std::domain_error(fmt::format("ik_dls: target ({:.4f}, {:.4f}, {:.4f}) outside the "
                                        "workspace box",
                                        target.x(), target.y(), target.z()));
  }
  if (!cfg.within_limits(seed)) throw std::domain_error("ik_dls: seed outside joint limits");
  JointVector q = seed;
  Eigen::Vector3d err = target - position(q, cfg);
  const double lambda2 = opts.damping * opts.damping;
  for (std::size_t it = 0; it < opts.max_iterations && err.norm() >= opts.tolerance; ++it) {
    const auto jac = numeric_jacobian(q, cfg, opts.jacobian_step);
    const Eigen::Matrix3d jjt = jac * jac.transpose() + lambda2 * Eigen::Matrix3d::Identity();
    const JointVector dq = jac.transpose() * jjt.ldlt().solve(err);
    q = wrap_into_limits(q + dq, cfg, q);
    err = target - position(q, cfg);
  }
  const double residual = err.norm();
  if (!(residual < opts.tolerance)) {
    throw IkFailure(fmt::format("ik_dls: no convergence after {} iterations, residual {:.3e} m",
                                opts.max_iterations, residual),
                    residual);
  }
  return q;
}

Profile trapezoid(double q0, double q1, double vmax, double amax, double dt) {
  if (!(vmax > 0.0) || !(amax > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("trapezoid: vmax, amax and dt must be positive");
  }
  Profile p;
  p.dt = dt;
  const double dist = std::abs(q1 - q0);
  if (dist == 0.0) {
    p.positions = {q0};
    return p;
  }
  const double min_duration =
      dist >= vmax * vmax / amax ? dist / vmax + vmax / amax : 2.0 * std::sqrt(dist / amax);
  const auto steps = static_cast<std::size_t>(std::ceil(min_duration / dt - 1e-9));
  const double duration = static_cast<double>(std::max<std::size_t>(steps, 1)) * dt;
  // Peak velocity that covers `dist` in exactly `duration` with the same
  // acceleration: duration = dist / v + v / amax.
  const double disc = std::max(0.0, amax * amax * duration * duration - 4.0 * amax * dist);
  const double v = std::min(vmax, 0.5 * (amax * duration - std::sqrt(disc)));
  const double ta = v / amax;
  const double dir = q1 > q0 ? 1.0 : -1.0;
  auto travelled = [&](double t) {
    if (t <= ta) return 0.5 * amax * t * t;
    if (t <= duration - ta) return 0.5 * amax * ta * ta + v * (t - ta);
    const double r = duration - t;
    return dist - 0.5 * amax * r * r;
  };
  const std::size_t n = std::max<std::size_t>(steps, 1);
  p.positions.resize(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    p.positions[k] = q0 + dir * std::min(dist, travelled(static_cast<double>(k) * dt));
  }
  p.positions[n] = q1;
  p.duration = duration;
  return p;
}

JointBaseline joint_space_baseline(const Eigen::Vector3d& start, const Eigen::Vector3d& end,
                                   const RobotConfig& cfg, const TrapezoidLimits& limits,
                                   const JointVector& seed, const IkOptions& opts) {
  cfg.validate();
  const JointVector qa = ik_dls(start, seed, cfg, opts);
  const JointVector qb = wrap_into_limits(ik_dls(end, qa, cfg, opts), cfg, qa);

  // The joint with the largest travel sets the timing for all of them.
  const JointVector delta = qb - qa;
  Eigen::Index slowest = 0;
  delta.cwiseAbs().maxCoeff(&slowest);
  const Profile lead = trapezoid(0.0, std::abs(delta[slowest]), limits.vmax, limits.amax, limits.dt);
  const double span = std::abs(delta[slowest]);

  JointBaseline out;
  out.joints.frame_period = limits.dt;
  std::vector<Eigen::Vector3d> ee;
  for (double pos : lead.positions) {
    const double s = span > 0.0 ? pos / span : 0.0;
    const JointVector q = qa + s * delta;
    out.joints.samples.push_back(q);
    ee.push_back(fk6(q, cfg).position);
  }
  out.joints.samples.back() = qb;
  ee.back() = fk6(qb, cfg).position;
  out.ee = Trajectory::from_points(ee, "ee", limits.dt);
  return out;
}

Trajectory task_space_baseline(const Eigen::Vector3d& start, const Eigen::Vector3d& end,
                               std::size_t n, double frame_period) {
  if (n < 2) throw std::invalid_argument("task_space_baseline needs at least 2 samples");
  std::vector<Eigen::Vector3d> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    pts[i] = (1.0 - t) * start + t * end;
  }
  pts.front() = start;
  pts.back() = end;
  return Trajectory::from_points(pts, "ee", frame_period);
}

JointVector default_ik_seed() {
  JointVector q;
  q << 0.0, -M_PI / 2, M_PI / 2, -M_PI / 2, -M_PI / 2, 0.0;
  return q;
}

}  // namespace armgnn
