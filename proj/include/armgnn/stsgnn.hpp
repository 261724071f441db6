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

// Space-time separable graph encoder with a frames-as-channels convolutional
// decoder, rolled out autoregressively.
//
// Tensors use a coordinates x frames x joints layout (C x T x V). Each
// encoder layer mixes frames per joint with a learned T x T adjacency, then
// joints per frame with a learned V x V adjacency, then channels with a dense
// weight, followed by a PReLU. The decoder views its input as T frame
// channels over the (joint, coordinate) plane and applies 3x3 convolutions:
// the first maps T -> K frames, the middle layers are residual, and the last
// is linear.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "armgnn/kinematics.hpp"
#include "armgnn/tensor.hpp"

namespace armgnn {

struct ModelConfig {
  std::size_t input_frames = 30;   // T
  std::size_t output_frames = 30;  // K
  std::size_t joints = 4;          // V
  std::size_t coords = 3;          // C
  std::vector<std::size_t> encoder_channels{3, 64, 32, 64, 3};
  std::size_t decoder_layers = 5;
  std::size_t rollouts = 4;
  double prelu_init_slope = 0.25;
  double adjacency_init_noise = 0.05;

  std::size_t encoder_layers() const { return encoder_channels.size() - 1; }
  void validate() const;
};

struct StsLayerParams {
  Tensor temporal_adj;  // V x T x T
  Tensor spatial_adj;   // T x V x V
  Tensor weight;        // C_out x C_in
  Tensor bias;          // C_out
  Tensor slope;         // 1
};

struct TcnLayerParams {
  Tensor kernels;               // F_out x F_in x 3 x 3
  Tensor bias;                  // F_out
  std::optional<Tensor> slope;  // absent on the final layer
};

struct ModelParams {
  std::vector<StsLayerParams> encoder;
  std::vector<TcnLayerParams> decoder;

  /// Identity-biased adjacencies with small uniform noise, uniform
  /// +-sqrt(1/fan_in) weights and kernels, zero biases.
  static ModelParams init(const ModelConfig& cfg, std::uint64_t seed);
  /// Parameters for which forward() is the identity map (requires T == K):
  /// identity adjacencies and channel embeddings, slope 1, delta kernels on
  /// the first and last decoder layers, zero kernels on the residual layers.
  static ModelParams identity(const ModelConfig& cfg);

  /// Stable, named view of every learnable tensor.
  std::vector<std::pair<std::string, Tensor*>> named();
  std::vector<std::pair<std::string, const Tensor*>> named() const;
  std::size_t parameter_count() const;
  void zero_grad();

  /// Throws if shapes disagree with the config or any value is non-finite.
  void validate(const ModelConfig& cfg) const;
};

/// Parameters recorded on a tape.
struct BoundModel {
  struct Sts {
    Var temporal_adj, spatial_adj, weight, bias, slope;
  };
  struct Tcn {
    Var kernels, bias;
    std::optional<Var> slope;
  };
  std::vector<Sts> encoder;
  std::vector<Tcn> decoder;
};

/// Records params as differentiable parameters; backward() accumulates into
/// their grad buffers. The const overload records read-only references.
BoundModel bind(Tape& tape, ModelParams& params);
BoundModel bind(Tape& tape, const ModelParams& params);

Var sts_layer(const Var& x, const BoundModel::Sts& p);
Var encode(const Var& x, const BoundModel& m);
Var decode(const Var& h, const BoundModel& m);
Var forward(const Var& x, const BoundModel& m);
/// s_1 = forward(x0), s_{i+1} = forward(s_i); returns s_1 .. s_n joined along
/// the frame axis.
Var rollout(const Var& x0, const BoundModel& m, std::size_t n);

/// Inference without gradient bookkeeping on the caller's side.
Tensor forward(const Tensor& x, const ModelParams& params);
Tensor rollout(const Tensor& x0, const ModelParams& params, std::size_t n);

/// Trajectory (frames x V x 3) <-> model tensor (3 x frames x V).
Tensor to_model_tensor(const Trajectory& traj);
Trajectory from_model_tensor(const Tensor& t, std::vector<std::string> joint_names,
                             double frame_period);

/// Serialized model: config, named parameter arrays, step, loss history.
struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::size_t step = 0;
  std::vector<double> loss_history;
};

std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace armgnn
