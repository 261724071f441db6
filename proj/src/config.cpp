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

#include "armgnn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace armgnn {

namespace {

Json vec3(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json box(const Eigen::AlignedBox3d& b) { return {{"min", vec3(b.min())}, {"max", vec3(b.max())}}; }

Eigen::AlignedBox3d box(const Json& j) {
  return Eigen::AlignedBox3d(vec3(j.at("min")), vec3(j.at("max")));
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

void check_keys(const Json& base, const Json& patch, const std::string& path) {
  if (!patch.is_object() || !base.is_object()) return;
  for (const auto& [key, value] : patch.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw std::invalid_argument("unknown configuration key '" + here + "'");
    check_keys(base.at(key), value, here);
  }
}

}  // namespace

void to_json(Json& j, const ArmModel& v) {
  j = {{"segment_lengths", vec3(v.segment_lengths)}, {"shoulder_origin", vec3(v.shoulder_origin)}};
}
void from_json(const Json& j, ArmModel& v) {
  if (j.contains("segment_lengths")) v.segment_lengths = vec3(j.at("segment_lengths"));
  if (j.contains("shoulder_origin")) v.shoulder_origin = vec3(j.at("shoulder_origin"));
}

void to_json(Json& j, const TaskLayout& v) {
  j = {{"grid_x", v.grid_x},
       {"grid_y", v.grid_y},
       {"desk_height", v.desk_height},
       {"mouth_point", vec3(v.mouth_point)},
       {"rest_point", vec3(v.rest_point)}};
}
void from_json(const Json& j, TaskLayout& v) {
  read(j, "grid_x", v.grid_x);
  read(j, "grid_y", v.grid_y);
  read(j, "desk_height", v.desk_height);
  if (j.contains("mouth_point")) v.mouth_point = vec3(j.at("mouth_point"));
  if (j.contains("rest_point")) v.rest_point = vec3(j.at("rest_point"));
}

void to_json(Json& j, const SynthConfig& v) {
  j = {{"reach_frames", v.reach_frames},       {"lift_frames", v.lift_frames},
       {"hold_frames", v.hold_frames},         {"return_frames", v.return_frames},
       {"bow_amplitude", v.bow_amplitude},     {"noise_amplitude", v.noise_amplitude},
       {"scale_min", v.scale_min},             {"scale_max", v.scale_max},
       {"frame_period", v.frame_period}};
}
void from_json(const Json& j, SynthConfig& v) {
  read(j, "reach_frames", v.reach_frames);
  read(j, "lift_frames", v.lift_frames);
  read(j, "hold_frames", v.hold_frames);
  read(j, "return_frames", v.return_frames);
  read(j, "bow_amplitude", v.bow_amplitude);
  read(j, "noise_amplitude", v.noise_amplitude);
  read(j, "scale_min", v.scale_min);
  read(j, "scale_max", v.scale_max);
  read(j, "frame_period", v.frame_period);
}

void to_json(Json& j, const ModelConfig& v) {
  j = {{"input_frames", v.input_frames},
       {"output_frames", v.output_frames},
       {"joints", v.joints},
       {"coords", v.coords},
       {"encoder_channels", v.encoder_channels},
       {"decoder_layers", v.decoder_layers},
       {"rollouts", v.rollouts},
       {"prelu_init_slope", v.prelu_init_slope},
       {"adjacency_init_noise", v.adjacency_init_noise}};
}
void from_json(const Json& j, ModelConfig& v) {
  read(j, "input_frames", v.input_frames);
  read(j, "output_frames", v.output_frames);
  read(j, "joints", v.joints);
  read(j, "coords", v.coords);
  read(j, "encoder_channels", v.encoder_channels);
  read(j, "decoder_layers", v.decoder_layers);
  read(j, "rollouts", v.rollouts);
  read(j, "prelu_init_slope", v.prelu_init_slope);
  read(j, "adjacency_init_noise", v.adjacency_init_noise);
}

void to_json(Json& j, const TrainConfig& v) {
  j = {{"epochs", v.epochs},
       {"batch_size", v.batch_size},
       {"learning_rate", v.learning_rate},
       {"beta1", v.beta1},
       {"beta2", v.beta2},
       {"adam_eps", v.adam_eps},
       {"grad_clip_norm", v.grad_clip_norm},
       {"threads", v.threads},
       {"record_wall_clock", v.record_wall_clock}};
}
void from_json(const Json& j, TrainConfig& v) {
  read(j, "epochs", v.epochs);
  read(j, "batch_size", v.batch_size);
  read(j, "learning_rate", v.learning_rate);
  read(j, "beta1", v.beta1);
  read(j, "beta2", v.beta2);
  read(j, "adam_eps", v.adam_eps);
  read(j, "grad_clip_norm", v.grad_clip_norm);
  read(j, "threads", v.threads);
  read(j, "record_wall_clock", v.record_wall_clock);
}

void to_json(Json& j, const RobotConfig& v) {
  Json dh = Json::array();
  for (const auto& r : v.dh) dh.push_back({{"a", r.a}, {"d", r.d}, {"alpha", r.alpha}});
  Json limits = Json::array();
  for (const auto& [lo, hi] : v.joint_limits) limits.push_back({lo, hi});
  j = {{"dh", dh}, {"joint_limits", limits}, {"workspace_box", box(v.workspace_box)}};
}
void from_json(const Json& j, RobotConfig& v) {
  if (j.contains("dh")) {
    const auto& dh = j.at("dh");
    if (!dh.is_array() || dh.size() != kRobotJoints) {
      throw std::invalid_argument("robot.dh must hold 6 rows");
    }
    for (std::size_t i = 0; i < kRobotJoints; ++i) {
      v.dh[i] = {dh[i].at("a").get<double>(), dh[i].at("d").get<double>(),
                 dh[i].at("alpha").get<double>()};
    }
  }
  if (j.contains("joint_limits")) {
    const auto& lim = j.at("joint_limits");
    if (!lim.is_array() || lim.size() != kRobotJoints) {
      throw std::invalid_argument("robot.joint_limits must hold 6 pairs");
    }
    for (std::size_t i = 0; i < kRobotJoints; ++i) {
      v.joint_limits[i] = {lim[i].at(0).get<double>(), lim[i].at(1).get<double>()};
    }
  }
  if (j.contains("workspace_box")) v.workspace_box = box(j.at("workspace_box"));
}

void to_json(Json& j, const WorkspaceMap& v) {
  j = {{"human_box", box(v.human_box)}, {"robot_box", box(v.robot_box)}};
}
void from_json(const Json& j, WorkspaceMap& v) {
  if (j.contains("human_box")) v.human_box = box(j.at("human_box"));
  if (j.contains("robot_box")) v.robot_box = box(j.at("robot_box"));
}

void to_json(Json& j, const TrapezoidLimits& v) {
  j = {{"vmax", v.vmax}, {"amax", v.amax}, {"dt", v.dt}};
}
void from_json(const Json& j, TrapezoidLimits& v) {
  read(j, "vmax", v.vmax);
  read(j, "amax", v.amax);
  read(j, "dt", v.dt);
}

void to_json(Json& j, const IkOptions& v) {
  j = {{"damping", v.damping},
       {"tolerance", v.tolerance},
       {"max_iterations", v.max_iterations},
       {"jacobian_step", v.jacobian_step}};
}
void from_json(const Json& j, IkOptions& v) {
  read(j, "damping", v.damping);
  read(j, "tolerance", v.tolerance);
  read(j, "max_iterations", v.max_iterations);
  read(j, "jacobian_step", v.jacobian_step);
}

void to_json(Json& j, const DataConfig& v) {
  j = {{"participants", v.participants},
       {"demos", v.demos},
       {"held_out_positions", v.held_out_positions}};
}
void from_json(const Json& j, DataConfig& v) {
  read(j, "participants", v.participants);
  read(j, "demos", v.demos);
  read(j, "held_out_positions", v.held_out_positions);
}

void to_json(Json& j, const RunConfig& v) {
  j = {{"seed", v.seed},
       {"data", v.data},
       {"layout", v.layout},
       {"arm", v.arm},
       {"synth", v.synth},
       {"model", v.model},
       {"train", v.train},
       {"robot", v.robot},
       {"workspace", v.workspace},
       {"trapezoid", v.trapezoid},
       {"ik", v.ik},
       {"playback_period", v.playback_period}};
}
void from_json(const Json& j, RunConfig& v) {
  read(j, "seed", v.seed);
  read(j, "data", v.data);
  read(j, "layout", v.layout);
  read(j, "arm", v.arm);
  read(j, "synth", v.synth);
  read(j, "model", v.model);
  read(j, "train", v.train);
  read(j, "robot", v.robot);
  read(j, "workspace", v.workspace);
  read(j, "trapezoid", v.trapezoid);
  read(j, "ik", v.ik);
  read(j, "playback_period", v.playback_period);
}

void RunConfig::validate() const {
  if (data.participants < 1 || data.demos < 1) {
    throw std::invalid_argument("data.participants and data.demos must be at least 1");
  }
  for (std::size_t p : data.held_out_positions) {
    if (p >= kGridPositions) throw std::invalid_argument("held-out position index out of range");
  }
  layout.validate();
  arm.validate();
  synth.validate();
  model.validate();
  train.validate();
  robot.validate();
  workspace.scale();
  if (!(trapezoid.vmax > 0.0 && trapezoid.amax > 0.0 && trapezoid.dt > 0.0)) {
    throw std::invalid_argument("trapezoid vmax, amax and dt must be positive");
  }
  if (!(ik.damping >= 0.0 && ik.tolerance > 0.0 && ik.jacobian_step > 0.0)) {
    throw std::invalid_argument("ik damping must be non-negative; tolerance and step positive");
  }
  if (!(playback_period > 0.0)) throw std::invalid_argument("playback_period must be positive");
  const std::size_t frames = synth.total_frames();
  if (frames != model.input_frames + model.rollouts * model.output_frames) {
    throw std::invalid_argument(
        "synthetic demo length must equal input_frames + rollouts * output_frames");
  }
}

Json merge_checked(const Json& base, const Json& patch) {
  check_keys(base, patch, "");
  Json out = base;
  out.merge_patch(patch);
  return out;
}

RunConfig load_run_config(const std::optional<std::string>& path) {
  RunConfig cfg;
  if (!path) return cfg;
  std::ifstream in(*path);
  if (!in) throw std::runtime_error("cannot open config file " + *path);
  Json patch;
  try {
    patch = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("config file " + *path + " is not valid JSON: " + e.what());
  }
  Json base = cfg;
  from_json(merge_checked(base, patch), cfg);
  return cfg;
}

std::string to_pretty_json(const RunConfig& cfg) {
  Json j = cfg;
  return j.dump(2) + "\n";
}

}  // namespace armgnn
