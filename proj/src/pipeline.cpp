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

#include "armgnn/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <fmt/core.h>

#include "armgnn/csv_io.hpp"

namespace armgnn {

namespace fs = std::filesystem;

std::vector<CorpusEntry> make_corpus(const RunConfig& cfg) {
  return synth_corpus(cfg.data.participants, cfg.data.demos, cfg.corpus_seed(), cfg.layout, cfg.arm,
                      cfg.synth);
}

void write_corpus(const std::vector<CorpusEntry>& corpus, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "demos");
  Json manifest = Json::array();
  for (const auto& e : corpus) {
    const std::string file = fmt::format("demos/p{}_pos{}_d{:02}.csv", e.spec.participant_id,
                                         e.spec.position_index, e.spec.demo_index);
    write_trajectory_csv((fs::path(dir) / file).string(), e.trajectory);
    manifest.push_back({{"participant", e.spec.participant_id},
                        {"position_index", e.spec.position_index},
                        {"seed", e.spec.noise_seed},
                        {"file", file}});
  }
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << manifest.dump(1) << '\n';
}

std::vector<CorpusEntry> read_corpus(const std::string& dir, double frame_period) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw std::runtime_error("no manifest.json in " + dir);
  const Json manifest = Json::parse(in);
  std::vector<CorpusEntry> corpus;
  for (const auto& m : manifest) {
    CorpusEntry e;
    e.spec.participant_id = m.at("participant").get<std::size_t>();
    e.spec.position_index = m.at("position_index").get<std::size_t>();
    e.spec.noise_seed = m.at("seed").get<std::uint64_t>();
    e.trajectory =
        read_trajectory_csv((fs::path(dir) / m.at("file").get<std::string>()).string(), frame_period);
    corpus.push_back(std::move(e));
  }
  return corpus;
}

Trajectory generate_motion(const Trajectory& input, const ModelParams& params,
                           const ModelConfig& model) {
  if (input.frames() < model.input_frames || input.joints() != model.joints) {
    throw std::invalid_argument(fmt::format(
        "generate: input needs at least {} frames of {} joints, got {} frames of {}",
        model.input_frames, model.joints, input.frames(), input.joints()));
  }
  Trajectory window = input.frames_range(0, model.input_frames);
  const Eigen::RowVector3d origin = window.positions().row(0).head<3>();
  for (std::size_t j = 0; j < window.joints(); ++j) {
    window.positions().middleCols(static_cast<Eigen::Index>(3 * j), 3).rowwise() -= origin;
  }
  Trajectory out = from_model_tensor(rollout(to_model_tensor(window), params, model.rollouts),
                                     window.joint_names(), window.frame_period());
  for (std::size_t j = 0; j < out.joints(); ++j) {
    out.positions().middleCols(static_cast<Eigen::Index>(3 * j), 3).rowwise() += origin;
  }
  return out;
}

double mouth_distance(const Trajectory& generated, const RunConfig& cfg) {
  const std::size_t hold_end = cfg.synth.hold_end_frame();
  if (hold_end < cfg.model.input_frames ||
      hold_end - cfg.model.input_frames >= generated.frames()) {
    throw std::invalid_argument("generated motion does not cover the drinking phase");
  }
  const Eigen::Vector3d mouth = cfg.arm.shoulder_origin + cfg.layout.mouth_point;
  return (generated.point(hold_end - cfg.model.input_frames, kWristJoint) - mouth).norm();
}

RobotComparison baselines_for(const Trajectory& ee, const RunConfig& cfg) {
  RobotComparison out;
  out.gnn = ee;
  const std::size_t turn = turning_frame(ee);
  const Eigen::Vector3d a = ee.point(0, 0);
  const Eigen::Vector3d b = ee.point(turn, 0);
  const Eigen::Vector3d c = ee.point(ee.frames() - 1, 0);

  const JointVector seed = default_ik_seed();
  const auto leg1 = joint_space_baseline(a, b, cfg.robot, cfg.trapezoid, seed, cfg.ik);
  const auto leg2 =
      joint_space_baseline(b, c, cfg.robot, cfg.trapezoid, leg1.joints.samples.back(), cfg.ik);
  out.joints.frame_period = cfg.trapezoid.dt;
  out.joints.samples = leg1.joints.samples;
  out.joints.samples.insert(out.joints.samples.end(), leg2.joints.samples.begin() + 1,
                            leg2.joints.samples.end());
  std::vector<Eigen::Vector3d> jee = leg1.ee.points(0);
  const auto jee2 = leg2.ee.points(0);
  jee.insert(jee.end(), jee2.begin() + 1, jee2.end());
  out.joint_baseline = Trajectory::from_points(jee, "ee", cfg.trapezoid.dt);

  const auto t1 = task_space_baseline(a, b, turn + 1, ee.frame_period()).points(0);
  const auto t2 = task_space_baseline(b, c, ee.frames() - turn, ee.frame_period()).points(0);
  std::vector<Eigen::Vector3d> tee = t1;
  tee.insert(tee.end(), t2.begin() + 1, t2.end());
  out.task_baseline = Trajectory::from_points(tee, "ee", ee.frame_period());

  out.rows = compare_runs(out.gnn, out.joint_baseline, out.task_baseline);
  return out;
}

RobotComparison compare_in_robot_space(const Trajectory& wrist, const RunConfig& cfg) {
  Trajectory ee = map_workspace(wrist, cfg.workspace);
  ee.set_frame_period(cfg.playback_period);
  return baselines_for(ee, cfg);
}

}  // namespace armgnn
