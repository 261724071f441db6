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
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "armgnn/stsgnn.hpp"
#include "armgnn/synthdata.hpp"

namespace armgnn {

struct TrainConfig {
  std::size_t epochs = 300;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip_norm = 1.0;  // <= 0 disables clipping
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  /// When false the report's seconds column is zero, keeping it reproducible.
  bool record_wall_clock = false;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_mpjpe = 0.0;  // m
  double test_mpjpe = 0.0;   // m, NaN without a test set
  double seconds = 0.0;
};

/// Row 0 is the untrained model; row e is the state after epoch e.
struct TrainReport {
  std::vector<EpochRecord> epochs;
};

struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::size_t step = 0;
};

/// Mean over frames and joints of the Euclidean joint error. Both operands
/// are 3 x frames x joints.
Var mpjpe(const Var& pred, const Var& truth);
double mpjpe(const Tensor& pred, const Tensor& truth);

/// Global-norm gradient clipping followed by a bias-corrected Adam update.
/// Every tensor must carry a gradient.
void adam_step(std::span<Tensor* const> params, AdamState& state, const TrainConfig& cfg);
void adam_step(ModelParams& params, AdamState& state, const TrainConfig& cfg);

/// Full-rollout MPJPE of one pair, differentiable through every step.
Var rollout_loss(const Var& input, const Var& label, const BoundModel& model, std::size_t rollouts);

/// Mean full-rollout MPJPE over pairs; parameters are not touched.
double evaluate(const std::vector<TrainingPair>& pairs, const ModelParams& params,
                const ModelConfig& model_cfg, std::size_t threads = 1);

struct TrainResult {
  TrainReport report;
  ModelParams params;
  AdamState optimizer;
};

using EpochCallback = std::function<void(const EpochRecord&, const ModelParams&, std::size_t step)>;

/// Minibatch training on the rollout MPJPE. Batches are drawn from a shuffle
/// seeded by cfg.seed, and per-pair gradients are reduced in pair order, so
/// results do not depend on the thread count.
TrainResult train(const std::vector<TrainingPair>& train_pairs,
                  const std::vector<TrainingPair>& test_pairs, ModelParams params,
                  const ModelConfig& model_cfg, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

}  // namespace armgnn
