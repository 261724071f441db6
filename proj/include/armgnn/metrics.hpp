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

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "armgnn/kinematics.hpp"

namespace armgnn {

struct PathMetrics {
  double path_length = 0.0;          // m
  double chord_length = 0.0;         // m
  double max_chord_deviation = 0.0;  // m
  double hysteresis_area = 0.0;      // m^2
};

/// Shape metrics of a single-joint path split into an outbound leg
/// [0, split_frame] and a return leg [split_frame, end].
///
/// chord_length is the sum of the two leg chords and deviation is measured
/// from each leg's own chord. The return leg runs from the turning point back
/// toward the start, so the frames in order close into a polygon; the
/// hysteresis area is its shoelace area projected onto the best-fit plane of
/// all points.
PathMetrics path_metrics(const Trajectory& traj, std::size_t split_frame);

/// Largest distance of any point from the segment a-b. Distances below the
/// rounding level of the chord length are reported as 0.
double max_chord_deviation(const std::vector<Eigen::Vector3d>& pts, const Eigen::Vector3d& a,
                           const Eigen::Vector3d& b);

/// Area enclosed by a closed polygon after projection onto the plane spanned
/// by the two dominant principal directions of its vertices.
double projected_area(const std::vector<Eigen::Vector3d>& polygon);

/// Frame farthest from the first sample; the natural split for out-and-back
/// motions.
std::size_t turning_frame(const Trajectory& traj);

struct ComparisonRow {
  std::string name;
  PathMetrics metrics;
};

/// One row per trajectory: gnn, joint_baseline, task_baseline. Each run is
/// split at its own turning frame. Throws if the endpoints of the runs differ
/// by more than endpoint_tolerance, or if the task baseline deviates from its
/// chord.
std::vector<ComparisonRow> compare_runs(const Trajectory& gnn, const Trajectory& joint_baseline,
                                        const Trajectory& task_baseline,
                                        double endpoint_tolerance = 0.02);

}  // namespace armgnn
