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
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "armgnn/tensor.hpp"

namespace armgnn {

/// Instrumented arm segments, in chain order.
enum class Segment { kUpperArm = 0, kForearm = 1, kHand = 2 };
inline constexpr std::size_t kSegmentCount = 3;
inline constexpr std::array<const char*, kSegmentCount> kSegmentNames = {"upper_arm", "forearm",
                                                                          "hand"};

/// Chain points produced by forward kinematics.
inline constexpr std::size_t kArmJoints = 4;
inline constexpr std::array<const char*, kArmJoints> kJointNames = {"shoulder", "elbow", "wrist",
                                                                     "hand"};
inline constexpr std::size_t kWristJoint = 2;

/// Per-segment (yaw, pitch, roll) angle streams in degrees.
struct EulerStream {
  double sample_rate = 100.0;
  /// angles[segment] is frames x 3 with columns (yaw, pitch, roll).
  std::array<Eigen::MatrixX3d, kSegmentCount> angles;

  std::size_t frames() const { return static_cast<std::size_t>(angles[0].rows()); }
  /// Throws std::invalid_argument if the invariants do not hold.
  void validate() const;
};

struct ArmModel {
  Eigen::Vector3d segment_lengths{0.30, 0.25, 0.08};
  Eigen::Vector3d shoulder_origin = Eigen::Vector3d::Zero();

  void validate() const;
};

/// frames x joints x 3 positions in meters, stored as one row per frame.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t frames, std::vector<std::string> joint_names, double frame_period);

  static Trajectory arm(std::size_t frames, double frame_period);
  /// Single-joint view of joint `joint`.
  Trajectory joint_view(std::size_t joint) const;
  static Trajectory from_points(const std::vector<Eigen::Vector3d>& points, std::string name,
                                double frame_period);

  std::size_t frames() const { return static_cast<std::size_t>(positions_.rows()); }
  std::size_t joints() const { return joint_names_.size(); }
  double frame_period() const { return frame_period_; }
  void set_frame_period(double p) { frame_period_ = p; }
  const std::vector<std::string>& joint_names() const { return joint_names_; }

  Eigen::Vector3d point(std::size_t frame, std::size_t joint) const {
    return positions_.row(static_cast<Eigen::Index>(frame))
        .segment<3>(static_cast<Eigen::Index>(3 * joint))
        .transpose();
  }
  void set_point(std::size_t frame, std::size_t joint, const Eigen::Vector3d& p) {
    positions_.row(static_cast<Eigen::Index>(frame)).segment<3>(static_cast<Eigen::Index>(3 * joint)) =
        p.transpose();
  }
  std::vector<Eigen::Vector3d> points(std::size_t joint) const;

  RowMatrix& positions() { return positions_; }
  const RowMatrix& positions() const { return positions_; }

  /// Frames [begin, end).
  Trajectory frames_range(std::size_t begin, std::size_t end) const;

  /// Throws std::invalid_argument on non-finite values or empty shape.
  void validate() const;

 private:
  RowMatrix positions_;
  std::vector<std::string> joint_names_;
  double frame_period_ = 0.01;
};

struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

struct PhaseSplit {
  FrameRange reaching;
  FrameRange drinking_returning;
};

/// Intrinsic Z-Y-X rotation: R = Rz(yaw) * Ry(pitch) * Rx(roll), radians.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> rotation_zyx(Scalar yaw, Scalar pitch, Scalar roll) {
  using Axis = Eigen::AngleAxis<Scalar>;
  using Vec = Eigen::Matrix<Scalar, 3, 1>;
  return (Axis(yaw, Vec::UnitZ()) * Axis(pitch, Vec::UnitY()) * Axis(roll, Vec::UnitX()))
      .toRotationMatrix();
}

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
  return deg * static_cast<Scalar>(M_PI) / static_cast<Scalar>(180);
}

/// Adds multiples of 360 degrees so successive samples differ by less than
/// 180 degrees. The first sample of each channel is unchanged.
EulerStream unwrap_angles(const EulerStream& raw);

/// Centered moving average per channel; edges use shrunken symmetric windows.
EulerStream smooth(const EulerStream& stream, std::size_t window = 5);

/// Chains shoulder -> elbow -> wrist -> hand from per-segment orientations.
Trajectory forward_kinematics(const EulerStream& stream, const ArmModel& arm);

/// Linear interpolation to `n` frames uniformly spaced over the original
/// duration. Endpoints are preserved exactly.
Trajectory resample(const Trajectory& traj, std::size_t n);

/// reaching = [0, t_in), drinking_returning = [t_in, frames).
PhaseSplit split_phases(const Trajectory& traj, std::size_t t_in);

}  // namespace armgnn
