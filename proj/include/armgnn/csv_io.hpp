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

// Plain CSV readers and writers. Numbers are written with 17 significant
// digits so every file reads back to the same doubles.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "armgnn/kinematics.hpp"
#include "armgnn/metrics.hpp"
#include "armgnn/robotmap.hpp"
#include "armgnn/training.hpp"

namespace armgnn {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// frame,joint,x_m,y_m,z_m with one row per (frame, joint).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// Joint names are taken from the first frame; later frames must repeat
/// them in the same order.
Trajectory read_trajectory_csv(std::istream& in, double frame_period);

/// frame,segment,yaw_deg,pitch_deg,roll_deg with segments upper_arm,
/// forearm, hand.
void write_euler_csv(std::ostream& out, const EulerStream& stream);
EulerStream read_euler_csv(std::istream& in, double sample_rate);

/// frame,q1,...,q6 in radians.
void write_joint_csv(std::ostream& out, const JointTrajectory& traj);

/// epoch,train_mpjpe_m,test_mpjpe_m,seconds
void write_report_csv(std::ostream& out, const TrainReport& report);

/// name,path_length_m,chord_m,max_dev_m,hysteresis_area_m2
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// File-path conveniences; throw CsvError when the file cannot be opened.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path, double frame_period);

std::string format_double(double v);

}  // namespace armgnn
