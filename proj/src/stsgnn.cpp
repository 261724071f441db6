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

#include "armgnn/stsgnn.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "armgnn/config.hpp"
#include "json.hpp"

namespace armgnn {

namespace {

Tensor uniform(Shape shape, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = u(rng);
  return t;
}

Tensor identity_stack(std::size_t batch, std::size_t n) {
  Tensor t(Shape{batch, n, n});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < n; ++i) t.at({b, i, i}) = 1.0;
  }
  return t;
}

Tensor delta_kernels(std::size_t channels) {
  Tensor k(Shape{channels, channels, 3, 3});
  for (std::size_t c = 0; c < channels; ++c) k.at({c, c, 1, 1}) = 1.0;
  return k;
}

void require_shape(const Tensor& t, const Shape& expected, const std::string& name) {
  if (t.shape() != expected) {
    throw ShapeError(name + ": expected " + shape_string(expected) + ", got " +
                     shape_string(t.shape()));
  }
}

template <typename Params, typename Binder>
BoundModel bind_with(Params& params, Binder&& bind_one) {
  BoundModel m;
  for (auto& l : params.encoder) {
    m.encoder.push_back({bind_one(l.temporal_adj), bind_one(l.spatial_adj), bind_one(l.weight),
                         bind_one(l.bias), bind_one(l.slope)});
  }
  for (auto& l : params.decoder) {
    BoundModel::Tcn t{bind_one(l.kernels), bind_one(l.bias), std::nullopt};
    if (l.slope) t.slope = bind_one(*l.slope);
    m.decoder.push_back(std::move(t));
  }
  return m;
}

}  // namespace

void ModelConfig::validate() const {
  if (input_frames == 0 || output_frames == 0 || joints == 0 || coords == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (encoder_channels.size() < 2 || encoder_channels.front() != coords ||
      encoder_channels.back() != coords) {
    throw std::invalid_argument("encoder channels must start and end at the coordinate count");
  }
  if (decoder_layers < 2) throw std::invalid_argument("decoder needs at least two layers");
  if (input_frames != output_frames) {
    throw std::invalid_argument("input and output frame counts must match for rollout");
  }
  if (rollouts == 0) throw std::invalid_argument("rollout count must be positive");
}

ModelParams ModelParams::init(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  const std::size_t t = cfg.input_frames, v = cfg.joints, k = cfg.output_frames;
  ModelParams p;
  for (std::size_t l = 0; l < cfg.encoder_layers(); ++l) {
    const std::size_t cin = cfg.encoder_channels[l], cout = cfg.encoder_channels[l + 1];
    StsLayerParams layer;
    layer.temporal_adj = uniform({v, t, t}, cfg.adjacency_init_noise, rng);
    for (std::size_t j = 0; j < v; ++j)
      for (std::size_t i = 0; i < t; ++i) layer.temporal_adj.at({j, i, i}) += 1.0;
    layer.spatial_adj = uniform({t, v, v}, cfg.adjacency_init_noise, rng);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < v; ++j) layer.spatial_adj.at({i, j, j}) += 1.0;
    layer.weight = uniform({cout, cin}, std::sqrt(1.0 / static_cast<double>(cin)), rng);
    layer.bias = Tensor({cout});
    layer.slope = Tensor::scalar(cfg.prelu_init_slope);
    p.encoder.push_back(std::move(layer));
  }
  for (std::size_t l = 0; l < cfg.decoder_layers; ++l) {
    const std::size_t fin = l == 0 ? t : k;
    TcnLayerParams layer;
    layer.kernels = uniform({k, fin, 3, 3}, std::sqrt(1.0 / static_cast<double>(fin * 9)), rng);
    layer.bias = Tensor({k});
    if (l + 1 < cfg.decoder_layers) layer.slope = Tensor::scalar(cfg.prelu_init_slope);
    p.decoder.push_back(std::move(layer));
  }
  return p;
}

ModelParams ModelParams::identity(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t t = cfg.input_frames, v = cfg.joints, k = cfg.output_frames;
  ModelParams p;
  for (std::size_t l = 0; l < cfg.encoder_layers(); ++l) {
    const std::size_t cin = cfg.encoder_channels[l], cout = cfg.encoder_channels[l + 1];
    StsLayerParams layer;
    layer.temporal_adj = identity_stack(v, t);
    layer.spatial_adj = identity_stack(t, v);
    layer.weight = Tensor({cout, cin});
    for (std::size_t c = 0; c < std::min({cin, cout, cfg.coords}); ++c) layer.weight.at({c, c}) = 1.0;
    layer.bias = Tensor({cout});
    layer.slope = Tensor::scalar(1.0);
    p.encoder.push_back(std::move(layer));
  }
  for (std::size_t l = 0; l < cfg.decoder_layers; ++l) {
    const bool last = l + 1 == cfg.decoder_layers;
    TcnLayerParams layer;
    layer.kernels = (l == 0 || last) ? delta_kernels(k) : Tensor({k, k, 3, 3});
    layer.bias = Tensor({k});
    if (!last) layer.slope = Tensor::scalar(1.0);
    p.decoder.push_back(std::move(layer));
  }
  return p;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (std::size_t l = 0; l < encoder.size(); ++l) {
    const std::string prefix = "encoder." + std::to_string(l) + ".";
    auto& e = encoder[l];
    out.emplace_back(prefix + "temporal_adj", &e.temporal_adj);
    out.emplace_back(prefix + "spatial_adj", &e.spatial_adj);
    out.emplace_back(prefix + "weight", &e.weight);
    out.emplace_back(prefix + "bias", &e.bias);
    out.emplace_back(prefix + "slope", &e.slope);
  }
  for (std::size_t l = 0; l < decoder.size(); ++l) {
    const std::string prefix = "decoder." + std::to_string(l) + ".";
    auto& d = decoder[l];
    out.emplace_back(prefix + "kernels", &d.kernels);
    out.emplace_back(prefix + "bias", &d.bias);
    if (d.slope) out.emplace_back(prefix + "slope", &*d.slope);
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<ModelParams*>(this)->named()) out.emplace_back(name, t);
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named()) n += t->size();
  return n;
}

void ModelParams::zero_grad() {
  for (auto& [name, t] : named()) t->zero_grad();
}

void ModelParams::validate(const ModelConfig& cfg) const {
  cfg.validate();
  const std::size_t t = cfg.input_frames, v = cfg.joints, k = cfg.output_frames;
  if (encoder.size() != cfg.encoder_layers() || decoder.size() != cfg.decoder_layers) {
    throw ShapeError("layer count does not match the model config");
  }
  for (std::size_t l = 0; l < encoder.size(); ++l) {
    const auto& e = encoder[l];
    const std::string name = "encoder." + std::to_string(l);
    require_shape(e.temporal_adj, {v, t, t}, name + ".temporal_adj");
    require_shape(e.spatial_adj, {t, v, v}, name + ".spatial_adj");
    require_shape(e.weight, {cfg.encoder_channels[l + 1], cfg.encoder_channels[l]}, name + ".weight");
    require_shape(e.bias, {cfg.encoder_channels[l + 1]}, name + ".bias");
    require_shape(e.slope, {1}, name + ".slope");
  }
  for (std::size_t l = 0; l < decoder.size(); ++l) {
    const auto& d = decoder[l];
    const std::string name = "decoder." + std::to_string(l);
    require_shape(d.kernels, {k, l == 0 ? t : k, 3, 3}, name + ".kernels");
    require_shape(d.bias, {k}, name + ".bias");
    const bool last = l + 1 == decoder.size();
    if (last == d.slope.has_value()) throw ShapeError(name + ": slope presence mismatch");
  }
  for (const auto& [name, tensor] : named()) {
    for (double x : tensor->values()) {
      if (!std::isfinite(x)) throw std::invalid_argument(name + " has non-finite values");
    }
  }
}

BoundModel bind(Tape& tape, ModelParams& params) {
  return bind_with(params, [&](Tensor& t) { return tape.parameter(t); });
}

BoundModel bind(Tape& tape, const ModelParams& params) {
  return bind_with(params, [&](const Tensor& t) { return tape.reference(t); });
}

Var sts_layer(const Var& x, const BoundModel::Sts& p) {
  const Var temporal = graph_mix(p.temporal_adj, x, 1);
  const Var spatial = graph_mix(p.spatial_adj, temporal, 2);
  const Var mixed = contract(p.weight, spatial, {{1, 0}});
  return prelu(add_bias(mixed, p.bias), p.slope);
}

Var encode(const Var& x, const BoundModel& m) {
  Var h = x;
  for (const auto& layer : m.encoder) h = sts_layer(h, layer);
  return h;
}

Var decode(const Var& h, const BoundModel& m) {
  if (h.value().rank() != 3) throw ShapeError("decode expects a C x T x V tensor");
  // Frames become channels over the (joint, coordinate) plane.
  Var x = permute(h, {1, 2, 0});
  for (std::size_t l = 0; l < m.decoder.size(); ++l) {
    const auto& layer = m.decoder[l];
    Var y = add_bias(conv2d(x, layer.kernels), layer.bias);
    const bool last = l + 1 == m.decoder.size();
    if (last) {
      x = y;
    } else if (l == 0) {
      x = prelu(y, *layer.slope);
    } else {
      x = prelu(y, *layer.slope) + x;
    }
  }
  return permute(x, {2, 0, 1});
}

Var forward(const Var& x, const BoundModel& m) { return decode(encode(x, m), m); }

Var rollout(const Var& x0, const BoundModel& m, std::size_t n) {
  if (n == 0) throw std::invalid_argument("rollout count must be positive");
  std::vector<Var> segments;
  Var s = x0;
  for (std::size_t i = 0; i < n; ++i) {
    s = forward(s, m);
    if (i == 0 && s.shape() != x0.shape()) {
      throw ShapeError("rollout requires output frames to equal input frames");
    }
    segments.push_back(s);
  }
  return n == 1 ? segments.front() : concat(segments, 1);
}

Tensor forward(const Tensor& x, const ModelParams& params) {
  Tape tape;
  const BoundModel m = bind(tape, params);
  return forward(tape.reference(x), m).value();
}

Tensor rollout(const Tensor& x0, const ModelParams& params, std::size_t n) {
  Tape tape;
  const BoundModel m = bind(tape, params);
  return rollout(tape.reference(x0), m, n).value();
}

Tensor to_model_tensor(const Trajectory& traj) {
  const std::size_t f = traj.frames(), v = traj.joints();
  Tensor t(Shape{3, f, v});
  for (std::size_t k = 0; k < f; ++k)
    for (std::size_t j = 0; j < v; ++j) {
      const Eigen::Vector3d p = traj.point(k, j);
      for (std::size_t c = 0; c < 3; ++c) t.at({c, k, j}) = p[static_cast<Eigen::Index>(c)];
    }
  return t;
}

Trajectory from_model_tensor(const Tensor& t, std::vector<std::string> joint_names,
                             double frame_period) {
  if (t.rank() != 3 || t.dim(0) != 3 || t.dim(2) != joint_names.size()) {
    throw ShapeError("model tensor " + shape_string(t.shape()) + " does not match " +
                     std::to_string(joint_names.size()) + " joints");
  }
  const std::size_t f = t.dim(1);
  Trajectory traj(f, std::move(joint_names), frame_period);
  for (std::size_t k = 0; k < f; ++k)
    for (std::size_t j = 0; j < traj.joints(); ++j) {
      traj.set_point(k, j, {t.at({0, k, j}), t.at({1, k, j}), t.at({2, k, j})});
    }
  return traj;
}

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  nlohmann::json j;
  j["config"] = ckpt.config;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, t] : ckpt.params.named()) {
    params[name] = {{"shape", t->shape()}, {"data", t->values()}};
  }
  j["parameters"] = std::move(params);
  j["step"] = ckpt.step;
  j["loss_history"] = ckpt.loss_history;
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Checkpoint ckpt;
  ckpt.config = j.at("config").get<ModelConfig>();
  // Shapes come from the config; the stored shapes are checked against them.
  ckpt.params = ModelParams::identity(ckpt.config);
  const auto& params = j.at("parameters");
  for (auto& [name, t] : ckpt.params.named()) {
    if (!params.contains(name)) throw std::invalid_argument("checkpoint lacks parameter " + name);
    const auto& entry = params.at(name);
    Tensor loaded(entry.at("shape").get<Shape>(), entry.at("data").get<std::vector<double>>());
    require_shape(loaded, t->shape(), name);
    *t = std::move(loaded);
  }
  if (params.size() != ckpt.params.named().size()) {
    throw std::invalid_argument("checkpoint has unexpected parameters");
  }
  ckpt.step = j.at("step").get<std::size_t>();
  ckpt.loss_history = j.at("loss_history").get<std::vector<double>>();
  ckpt.params.validate(ckpt.config);
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << checkpoint_to_string(ckpt);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace armgnn
