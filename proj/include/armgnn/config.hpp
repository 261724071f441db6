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

// JSON mapping of every configuration struct, and the layered run
// configuration used by the command-line tool.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "armgnn/kinematics.hpp"
#include "armgnn/robotmap.hpp"
#include "armgnn/stsgnn.hpp"
#include "armgnn/synthdata.hpp"
#include "armgnn/training.hpp"
#include "json.hpp"

namespace armgnn {

using Json = nlohmann::json;

void to_json(Json& j, const ArmModel& v);
void from_json(const Json& j, ArmModel& v);
void to_json(Json& j, const TaskLayout& v);
void from_json(const Json& j, TaskLayout& v);
void to_json(Json& j, const SynthConfig& v);
void from_json(const Json& j, SynthConfig& v);
void to_json(Json& j, const ModelConfig& v);
void from_json(const Json& j, ModelConfig& v);
/// The shuffle seed is derived from the run seed and is not serialized.
void to_json(Json& j, const TrainConfig& v);
void from_json(const Json& j, TrainConfig& v);
void to_json(Json& j, const RobotConfig& v);
void from_json(const Json& j, RobotConfig& v);
void to_json(Json& j, const WorkspaceMap& v);
void from_json(const Json& j, WorkspaceMap& v);
void to_json(Json& j, const TrapezoidLimits& v);
void from_json(const Json& j, TrapezoidLimits& v);
void to_json(Json& j, const IkOptions& v);
void from_json(const Json& j, IkOptions& v);

struct DataConfig {
  std::size_t participants = 5;
  std::size_t demos = 10;
  std::set<std::size_t> held_out_positions{1};
};
void to_json(Json& j, const DataConfig& v);
void from_json(const Json& j, DataConfig& v);

/// Everything a pipeline run depends on. Layered as defaults, then a JSON
/// file (merge patch), then command-line overrides.
struct RunConfig {
  std::uint64_t seed = 0;
  DataConfig data;
  TaskLayout layout;
  ArmModel arm;
  SynthConfig synth;
  ModelConfig model;
  TrainConfig train;
  RobotConfig robot;
  WorkspaceMap workspace;
  TrapezoidLimits trapezoid;
  IkOptions ik;
  double playback_period = 0.05;  // s per generated frame on the robot

  std::uint64_t corpus_seed() const { return seed; }
  std::uint64_t init_seed() const { return mix_seed(seed, 0x1a17); }
  std::uint64_t shuffle_seed() const { return mix_seed(seed, 0x5e0f); }

  void validate() const;
};
void to_json(Json& j, const RunConfig& v);
void from_json(const Json& j, RunConfig& v);

/// Applies `patch` to `base` as a JSON merge patch. Keys that do not exist
/// in `base` are rejected so typos do not pass silently.
Json merge_checked(const Json& base, const Json& patch);

/// Defaults overlaid with the file at `path`, if given.
RunConfig load_run_config(const std::optional<std::string>& path);

std::string to_pretty_json(const RunConfig& cfg);

}  // namespace armgnn
