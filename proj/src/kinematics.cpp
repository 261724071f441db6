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

#include "armgnn/kinematics.hpp"

#include <algorithm>
#include <stdexcept>

namespace armgnn {

void EulerStream::validate() const {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
  for (const auto& a : angles) {
    if (a.rows() != angles[0].rows()) {
      throw std::invalid_argument("all segments must have equal frame counts");
    }
  }
}

void ArmModel::validate() const {
  if ((segment_lengths.array() <= 0.0).any()) {
    throw std::invalid_argument("segment lengths must be positive");
  }
}

Trajectory::Trajectory(std::size_t frames, std::vector<std::string> joint_names, double frame_period)
    : positions_(RowMatrix::Zero(static_cast<Eigen::Index>(frames),
                                 static_cast<Eigen::Index>(3 * joint_names.size()))),
      joint_names_(std::move(joint_names)),
      frame_period_(frame_period) {}

Trajectory Trajectory::arm(std::size_t frames, double frame_period) {
  return Trajectory(frames, std::vector<std::string>(kJointNames.begin(), kJointNames.end()),
                    frame_period);
}

Trajectory Trajectory::joint_view(std::size_t joint) const {
  if (joint >= joints()) throw std::out_of_range("joint index out of range");
  Trajectory out(frames(), {joint_names_[joint]}, frame_period_);
  out.positions_ = positions_.middleCols(static_cast<Eigen::Index>(3 * joint), 3);
  return out;
}

Trajectory Trajectory::from_points(const std::vector<Eigen::Vector3d>& points, std::string name,
                                   double frame_period) {
  Trajectory out(points.size(), {std::move(name)}, frame_period);
  for (std::size_t f = 0; f < points.size(); ++f) out.set_point(f, 0, points[f]);
  return out;
}

std::vector<Eigen::Vector3d> Trajectory::points(std::size_t joint) const {
  std::vector<Eigen::Vector3d> out(frames());
  for (std::size_t f = 0; f < frames(); ++f) out[f] = point(f, joint);
  return out;
}

Trajectory Trajectory::frames_range(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > frames()) throw std::out_of_range("invalid frame range");
  Trajectory out(end - begin, joint_names_, frame_period_);
  out.positions_ = positions_.middleRows(static_cast<Eigen::Index>(begin),
                                         static_cast<Eigen::Index>(end - begin));
  return out;
}

void Trajectory::validate() const {
  if (frames() < 1 || joints() < 1) throw std::invalid_argument("trajectory is empty");
  if (!positions_.allFinite()) throw std::invalid_argument("trajectory has non-finite values");
}

EulerStream unwrap_angles(const EulerStream& raw) {
  raw.validate();
  if (raw.frames() == 0) throw std::invalid_argument("cannot unwrap an empty stream");
  EulerStream out = raw;
  for (auto& a : out.angles) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      for (Eigen::Index i = 1; i < a.rows(); ++i) {
        const double turns = std::round((a(i, c) - a(i - 1, c)) / 360.0);
        a(i, c) -= 360.0 * turns;
      }
    }
  }
  return out;
}

EulerStream smooth(const EulerStream& stream, std::size_t window) {
  stream.validate();
  if (window % 2 == 0) throw std::invalid_argument("smoothing window must be odd");
  const std::size_t n = stream.frames();
  if (window > n) throw std::invalid_argument("smoothing window exceeds frame count");
  const std::size_t half = window / 2;
  EulerStream out = stream;
  for (std::size_t s = 0; s < kSegmentCount; ++s) {
    const auto& in = stream.angles[s];
    for (std::size_t i = 0; i < n; ++i) {
      // Truncated at the ends of the stream.
      const std::size_t lo = i >= half ? i - half : 0;
      const std::size_t hi = std::min(n - 1, i + half);
      const auto rows = in.middleRows(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo + 1));
      out.angles[s].row(static_cast<Eigen::Index>(i)) = rows.colwise().mean();
    }
  }
  return out;
}

Trajectory forward_kinematics(const EulerStream& stream, const ArmModel& arm) {
  stream.validate();
  arm.validate();
  Trajectory traj = Trajectory::arm(stream.frames(), 1.0 / stream.sample_rate);
  for (std::size_t f = 0; f < stream.frames(); ++f) {
    const auto fi = static_cast<Eigen::Index>(f);
    Eigen::Vector3d p = arm.shoulder_origin;
    traj.set_point(f, 0, p);
    for (std::size_t s = 0; s < kSegmentCount; ++s) {
      const auto& a = stream.angles[s];
      const Eigen::Matrix3d r =
          rotation_zyx(deg2rad(a(fi, 0)), deg2rad(a(fi, 1)), deg2rad(a(fi, 2)));
      p += r * Eigen::Vector3d(arm.segment_lengths[static_cast<Eigen::Index>(s)], 0.0, 0.0);
      traj.set_point(f, s + 1, p);
    }
  }
  return traj;
}

Trajectory resample(const Trajectory& traj, std::size_t n) {
  if (n < 2) throw std::invalid_argument("resample target must be at least 2 frames");
  const std::size_t src = traj.frames();
  if (src < 2) throw std::invalid_argument("resample needs at least 2 source frames");
  Trajectory out(n, traj.joint_names(),
                 traj.frame_period() * static_cast<double>(src - 1) / static_cast<double>(n - 1));
  const auto& in = traj.positions();
  for (std::size_t j = 0; j < n; ++j) {
    const auto jr = static_cast<Eigen::Index>(j);
    if (j == n - 1) {
      out.positions().row(jr) = in.row(static_cast<Eigen::Index>(src - 1));
      continue;
    }
    const double s = static_cast<double>(j * (src - 1)) / static_cast<double>(n - 1);
    const auto i0 = std::min(static_cast<std::size_t>(s), src - 2);
    const double frac = s - static_cast<double>(i0);
    const auto r0 = in.row(static_cast<Eigen::Index>(i0));
    const auto r1 = in.row(static_cast<Eigen::Index>(i0 + 1));
    out.positions().row(jr) = r0 + frac * (r1 - r0);
  }
  return out;
}

PhaseSplit split_phases(const Trajectory& traj, std::size_t t_in) {
  if (traj.frames() <= t_in) {
    throw std::invalid_argument("trajectory has no frames after the reaching phase");
  }
  return PhaseSplit{{0, t_in}, {t_in, traj.frames()}};
}

}  // namespace armgnn
