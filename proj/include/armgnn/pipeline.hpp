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

// Stages shared by the command-line tool and the end-to-end tests.

#pragma once

#include <string>
#include <vector>

#include "armgnn/config.hpp"
#include "armgnn/metrics.hpp"
#include "armgnn/robotmap.hpp"
#include "armgnn/stsgnn.hpp"
#include "armgnn/synthdata.hpp"

namespace armgnn {

std::vector<CorpusEntry> make_corpus(const RunConfig& cfg);

/// demos/p<P>_pos<I>_d<D>.csv plus manifest.json listing
/// {participant, position_index, seed, file} per demo.
void write_corpus(const std::vector<CorpusEntry>& corpus, const std::string& dir);
/// Reads a corpus written by write_corpus. Only the manifest fields of each
/// DemoSpec are restored.
std::vector<CorpusEntry> read_corpus(const std::string& dir, double frame_period);

/// Runs the rollout on the first input_frames frames of `input` (all arm
/// joints). The motion is expressed relative to the first shoulder sample, as
/// in training, and shifted back afterwards.
Trajectory generate_motion(const Trajectory& input, const ModelParams& params,
                           const ModelConfig& model);

/// Distance from the generated wrist to the mouth point at the end of the
/// drinking phase.
double mouth_distance(const Trajectory& generated, const RunConfig& cfg);

struct RobotComparison {
  Trajectory gnn;             // mapped wrist path, frame period = playback
  JointTrajectory joints;     // joint baseline, out and back
  Trajectory joint_baseline;  // end-effector path of `joints`
  Trajectory task_baseline;
  std::vector<ComparisonRow> rows;
};

/// Maps a single-joint human wrist path into the robot workspace and builds
/// both baselines through the same start, turning and end points.
RobotComparison compare_in_robot_space(const Trajectory& wrist, const RunConfig& cfg);

/// Out-and-back baselines for an already mapped end-effector path.
RobotComparison baselines_for(const Trajectory& ee, const RunConfig& cfg);

}  // namespace armgnn
