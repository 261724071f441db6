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

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "armgnn/kinematics.hpp"

namespace armgnn {

inline constexpr std::size_t kRobotJoints = 6;
using JointVector = Eigen::Matrix<double, 6, 1>;

struct DhRow {
  double a = 0.0;      // m
  double d = 0.0;      // m
  double alpha = 0.0;  // rad
};

/// Standard DH chain, joint limits and the region IK targets must lie in.
/// Defaults describe a UR5e-class arm.
struct RobotConfig {
  std::array<DhRow, kRobotJoints> dh{{{0.0, 0.1625, M_PI / 2},
                                      {-0.425, 0.0, 0.0},
                                      {-0.3922, 0.0, 0.0},
                                      {0.0, 0.1333, M_PI / 2},
                                      {0.0, 0.0997, -M_PI / 2},
                                      {0.0, 0.0996, 0.0}}};
  std::array<std::pair<double, double>, kRobotJoints> joint_limits{
      {{-2 * M_PI, 2 * M_PI},
       {-2 * M_PI, 2 * M_PI},
       {-2 * M_PI, 2 * M_PI},
       {-2 * M_PI, 2 * M_PI},
       {-2 * M_PI, 2 * M_PI},
       {-2 * M_PI, 2 * M_PI}}};
  Eigen::AlignedBox3d workspace_box{Eigen::Vector3d(-0.9, -0.9, -0.3),
                                    Eigen::Vector3d(0.9, 0.9, 1.0)};

  void validate() const;
  bool within_limits(const JointVector& q) const;
};

/// Per-axis affine map taking human_box corners onto robot_box corners.
struct WorkspaceMap {
  Eigen::AlignedBox3d human_box{Eigen::Vector3d(0.0, -0.30, -0.15),
                                Eigen::Vector3d(0.60, 0.30, 0.60)};
  Eigen::AlignedBox3d robot_box{Eigen::Vector3d(0.25, -0.25, 0.10),
                                Eigen::Vector3d(0.50, 0.25, 0.45)};

  /// robot extent / human extent per axis. Throws on a degenerate axis.
  Eigen::Vector3d scale() const;
  Eigen::Vector3d offset() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& human) const {
    return scale().cwiseProduct(human) + offset();
  }
};

struct JointTrajectory {
  std::vector<JointVector> samples;
  double frame_period = 0.05;

  std::size_t frames() const { return samples.size(); }
};

struct Pose {
  Eigen::Vector3d position;
  Eigen::Matrix3d rotation;
};

/// Sampled 1-D motion.
struct Profile {
  std::vector<double> positions;
  double dt = 0.0;
  double duration = 0.0;
};

struct TrapezoidLimits {
  double vmax = 1.0;  // rad/s
  double amax = 2.0;  // rad/s^2
  double dt = 0.05;   // s
};

struct IkOptions {
  double damping = 0.05;
  double tolerance = 1e-9;  // m
  std::size_t max_iterations = 500;
  double jacobian_step = 1e-6;  // rad
};

class IkFailure : public std::runtime_error {
 public:
  IkFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Standard DH link transform.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> dh_transform(Scalar theta, Scalar a, Scalar d, Scalar alpha) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 4, 4> t;
  const Scalar ct = cos(theta), st = sin(theta), ca = cos(alpha), sa = sin(alpha);
  t << ct, -st * ca, st * sa, a * ct,  //
      st, ct * ca, -ct * sa, a * st,   //
      Scalar(0), sa, ca, d,            //
      Scalar(0), Scalar(0), Scalar(0), Scalar(1);
  return t;
}

/// Clamps points into human_box and maps them to the robot box. Points more
/// than 1 cm outside the box are reported on std::clog.
Trajectory map_workspace(const Trajectory& wrist, const WorkspaceMap& map);

/// End-effector pose; throws std::domain_error outside joint limits.
Pose fk6(const JointVector& q, const RobotConfig& cfg);

/// Position-only damped least squares with a central-difference Jacobian.
/// Throws std::domain_error for targets outside workspace_box and IkFailure
/// when the residual stays above tolerance.
JointVector ik_dls(const Eigen::Vector3d& target, const JointVector& seed, const RobotConfig& cfg,
                   const IkOptions& opts = {});

/// Accelerate, cruise, decelerate. The profile is stretched to a whole
/// number of dt steps and the last sample is exactly q1.
Profile trapezoid(double q0, double q1, double vmax, double amax, double dt);

struct JointBaseline {
  JointTrajectory joints;
  Trajectory ee;
};

/// IK at both ends, then every joint follows the slowest joint's normalized
/// trapezoid. The end-effector path is recovered through fk6.
JointBaseline joint_space_baseline(const Eigen::Vector3d& start, const Eigen::Vector3d& end,
                                   const RobotConfig& cfg, const TrapezoidLimits& limits,
                                   const JointVector& seed, const IkOptions& opts = {});

/// n evenly spaced points on the segment start -> end.
Trajectory task_space_baseline(const Eigen::Vector3d& start, const Eigen::Vector3d& end,
                               std::size_t n, double frame_period = 0.05);

/// A seed configuration that places the end effector in front of the base.
JointVector default_ik_seed();

}  // namespace armgnn
