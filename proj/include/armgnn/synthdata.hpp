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
#include <cstddef>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "armgnn/kinematics.hpp"

namespace armgnn {

inline constexpr std::size_t kGridPositions = 6;

/// Desk layout in the shoulder frame. Grid index i sits at
/// (grid_x[i / 3], grid_y[i % 3], desk_height).
struct TaskLayout {
  std::array<double, 2> grid_x{0.35, 0.50};
  std::array<double, 3> grid_y{-0.15, 0.0, 0.15};
  double desk_height = 0.0;
  Eigen::Vector3d mouth_point{0.10, 0.0, 0.45};
  Eigen::Vector3d rest_point{0.15, -0.20, -0.10};

  Eigen::Vector3d position(std::size_t index) const;
  Eigen::AlignedBox3d grid_box() const;
  void validate() const;
};

/// Generator constants. Phase lengths must add up to the demo length.
struct SynthConfig {
  std::size_t reach_frames = 30;
  std::size_t lift_frames = 40;
  std::size_t hold_frames = 20;
  std::size_t return_frames = 60;
  double bow_amplitude = 0.05;    // m, peak offset at scale 1
  double noise_amplitude = 0.01;  // m, bound on the per-frame noise vector norm
  double scale_min = 0.85;
  double scale_max = 1.15;
  double frame_period = 0.04;  // s

  std::size_t total_frames() const {
    return reach_frames + lift_frames + hold_frames + return_frames;
  }
  /// Frame of the demo (absolute index) at which the lift reaches the mouth
  /// and the hold ends.
  std::size_t hold_end_frame() const { return reach_frames + lift_frames + hold_frames - 1; }
  void validate() const;
};

struct DemoSpec {
  std::size_t participant_id = 0;
  std::size_t position_index = 0;
  std::size_t demo_index = 0;
  Eigen::Vector3d bottle_position = Eigen::Vector3d::Zero();
  std::uint64_t noise_seed = 0;
  double scale_factor = 1.0;
};

struct CorpusEntry {
  DemoSpec spec;
  Trajectory trajectory;
};

struct TrainingPair {
  Trajectory input;
  Trajectory label;
  /// Grid index of the demo, or -1 when unknown.
  int position_index = -1;
};

/// Quintic 10t^3 - 15t^4 + 6t^5.
inline double min_jerk_profile(double tau) {
  return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
}

/// Minimum-jerk straight path from s0 to s1 sampled at n uniform parameters.
Trajectory min_jerk(const Eigen::Vector3d& s0, const Eigen::Vector3d& s1, std::size_t n,
                    double frame_period = 0.01);

/// Elbow-down two-link solution in the plane of shoulder, wrist and gravity.
/// `wrist` is pulled radially into the reachable annulus first.
std::pair<Eigen::Vector3d, Eigen::Vector3d> elbow_for_wrist(const Eigen::Vector3d& shoulder,
                                                            const Eigen::Vector3d& wrist,
                                                            double upper, double fore);

/// One synthetic drinking demonstration: reach, lift to mouth along a bowed
/// arc, hold, return along the opposite bow. Returns a V=4 arm trajectory.
Trajectory synth_demo(const DemoSpec& spec, const TaskLayout& layout, const ArmModel& arm,
                      const SynthConfig& cfg = {});

/// participants x positions x demos, ordered by (participant, position, demo).
std::vector<CorpusEntry> synth_corpus(std::size_t participants, std::size_t demos,
                                      std::uint64_t seed, const TaskLayout& layout,
                                      const ArmModel& arm, const SynthConfig& cfg = {});

/// Splits each trajectory into its first t_in frames and the remaining
/// rollouts * k_out frames, re-centered on the shoulder position at frame 0.
std::vector<TrainingPair> make_pairs(const std::vector<Trajectory>& corpus, std::size_t t_in,
                                     std::size_t k_out, std::size_t rollouts);
std::vector<TrainingPair> make_pairs(const std::vector<CorpusEntry>& corpus, std::size_t t_in,
                                     std::size_t k_out, std::size_t rollouts);

/// Pairs at held-out grid positions go to the test set only.
std::pair<std::vector<TrainingPair>, std::vector<TrainingPair>> split_corpus(
    const std::vector<TrainingPair>& pairs, const std::set<std::size_t>& held_out_positions);

/// Deterministic 64-bit mixing of a seed with indices.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

}  // namespace armgnn
