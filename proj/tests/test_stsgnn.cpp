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

#include <cstdio>
#include <filesystem>
#include <random>

#include "armgnn/stsgnn.hpp"
#include "armgnn/training.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace armgnn;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.input_frames = 4;
  cfg.output_frames = 4;
  cfg.joints = 2;
  cfg.encoder_channels = {3, 8, 4, 8, 3};
  return cfg;
}

double prelu_value(double x, double a) { return x > 0.0 ? x : a * x; }

// Decoder written with explicit convolution loops.
Tensor loop_decode(const Tensor& h, const ModelParams& p) {
  Tensor x = permuted(h, {1, 2, 0});
  for (std::size_t l = 0; l < p.decoder.size(); ++l) {
    const auto& layer = p.decoder[l];
    Tensor y = oracle::loop_conv2d(x, layer.kernels);
    const std::size_t plane = y.dim(1) * y.dim(2);
    for (std::size_t o = 0; o < y.dim(0); ++o)
      for (std::size_t e = 0; e < plane; ++e) y[o * plane + e] += layer.bias[o];
    if (layer.slope) {
      for (std::size_t e = 0; e < y.size(); ++e) {
        y[e] = prelu_value(y[e], (*layer.slope)[0]) + (l > 0 ? x[e] : 0.0);
      }
    }
    x = y;
  }
  return permuted(x, {2, 0, 1});
}

Tensor loop_forward(const Tensor& input, const ModelParams& p) {
  Tensor h = input;
  for (const auto& l : p.encoder) {
    h = oracle::loop_sts_layer(h, l.temporal_adj, l.spatial_adj, l.weight, l.bias, l.slope[0]);
  }
  return loop_decode(h, p);
}

}  // namespace

TEST_CASE("default model shapes and parameter count") {
  ModelConfig cfg;
  const ModelParams p = ModelParams::init(cfg, 1);
  p.validate(cfg);
  CHECK(p.encoder.size() == 4);
  CHECK(p.decoder.size() == 5);
  // Encoder: 4 x (4*30*30 + 30*4*4) adjacency entries plus 257 + 2081 + 2113
  // + 196 channel parameters. Decoder: 5 x (30*30*9 + 30) plus 4 slopes.
  CHECK(p.parameter_count() == 61621);
  CHECK(p.named().front().first == "encoder.0.temporal_adj");
  CHECK(p.named().back().first == "decoder.4.bias");

  std::mt19937_64 rng(2);
  const Tensor x = oracle::random_tensor({3, 30, 4}, rng, -0.5, 0.5);
  CHECK(forward(x, p).shape() == Shape{3, 30, 4});
}

TEST_CASE("rollout yields n times K frames") {
  ModelConfig cfg;
  const ModelParams p = ModelParams::init(cfg, 4);
  std::mt19937_64 rng(5);
  const Tensor x = oracle::random_tensor({3, 30, 4}, rng, -0.5, 0.5);
  for (std::size_t n = 1; n <= 5; ++n) CHECK(rollout(x, p, n).shape() == Shape{3, 30 * n, 4});
  CHECK_THROWS(rollout(x, p, 0));

  // Each segment is the forward pass of the previous one.
  const Tensor r = rollout(x, p, 3);
  const Tensor s1 = forward(x, p), s2 = forward(s1, p), s3 = forward(s2, p);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t f = 0; f < 30; ++f)
      for (std::size_t v = 0; v < 4; ++v) {
        CHECK(r.at({c, f, v}) == s1.at({c, f, v}));
        CHECK(r.at({c, 30 + f, v}) == s2.at({c, f, v}));
        CHECK(r.at({c, 60 + f, v}) == s3.at({c, f, v}));
      }
}

TEST_CASE("layer matches loop oracle") {
  std::mt19937_64 rng(7);
  const Tensor x = oracle::random_tensor({3, 5, 4}, rng);
  const Tensor a_t = oracle::random_tensor({4, 5, 5}, rng);
  const Tensor a_s = oracle::random_tensor({5, 4, 4}, rng);
  const Tensor w = oracle::random_tensor({6, 3}, rng);
  const Tensor b = oracle::random_tensor({6}, rng);
  Tape tape;
  const BoundModel::Sts layer{tape.reference(a_t), tape.reference(a_s), tape.reference(w),
                              tape.reference(b), tape.constant(Tensor::scalar(0.3))};
  const Tensor got = sts_layer(tape.reference(x), layer).value();
  const Tensor expect = oracle::loop_sts_layer(x, a_t, a_s, w, b, 0.3);
  REQUIRE(got.shape() == expect.shape());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("full forward matches loop oracle") {
  ModelConfig cfg = tiny_config();
  ModelParams p = ModelParams::init(cfg, 3);
  std::mt19937_64 rng(9);
  for (auto& [name, t] : p.named()) {
    if (name.find("bias") != std::string::npos) *t = oracle::random_tensor(t->shape(), rng, -0.1, 0.1);
  }
  const Tensor x = oracle::random_tensor({3, 4, 2}, rng);
  const Tensor got = forward(x, p);
  const Tensor expect = loop_forward(x, p);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("identity parameters reproduce the input") {
  ModelConfig cfg;
  const ModelParams p = ModelParams::identity(cfg);
  std::mt19937_64 rng(13);
  const Tensor x = oracle::random_tensor({3, 30, 4}, rng);
  const Tensor y = forward(x, p);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-14));
  const Tensor r = rollout(x, p, 4);
  CHECK(r.at({2, 119, 3}) == doctest::Approx(x.at({2, 29, 3})));
}

TEST_CASE("rollout gradients match finite differences") {
  ModelConfig cfg = tiny_config();
  ModelParams p = ModelParams::init(cfg, 21);
  std::mt19937_64 rng(22);
  // Zero biases leave late rollout steps near every PReLU kink; move to a
  // generic point first.
  for (auto& [name, t] : p.named()) {
    if (name.find("bias") != std::string::npos) *t = oracle::random_tensor(t->shape(), rng, -0.5, 0.5);
  }
  const Tensor x = oracle::random_tensor({3, 4, 2}, rng, -0.5, 0.5);
  const Tensor label = oracle::random_tensor({3, 16, 2}, rng, -0.5, 0.5);

  p.zero_grad();
  {
    Tape tape;
    const BoundModel m = bind(tape, p);
    tape.backward(rollout_loss(tape.reference(x), tape.reference(label), m, 4));
  }
  auto loss = [&] { return mpjpe(rollout(x, p, 4), label); };
  std::size_t checked = 0;
  for (auto& [name, t] : p.named()) {
    std::uniform_int_distribution<std::size_t> pick(0, t->size() - 1);
    for (int k = 0; k < 2; ++k) {
      const std::size_t i = pick(rng);
      const double numeric = oracle::central_difference(*t, i, loss, 1e-5);
      CHECK_MESSAGE(oracle::gradient_error(t->grad()[i], numeric) < 1e-5, name, "[", i, "] ", t->grad()[i], " ", numeric);
      ++checked;
    }
  }
  CHECK(checked == 2 * p.named().size());
}

TEST_CASE("every parameter group moves the loss") {
  ModelConfig cfg = tiny_config();
  ModelParams p = ModelParams::init(cfg, 31);
  std::mt19937_64 rng(32);
  const Tensor x = oracle::random_tensor({3, 4, 2}, rng, -0.5, 0.5);
  const Tensor label = oracle::random_tensor({3, 4, 2}, rng, -0.5, 0.5);
  auto loss = [&] { return mpjpe(forward(x, p), label); };
  for (const char* group : {"temporal_adj", "spatial_adj", "weight", "kernels", "slope"}) {
    double largest = 0.0;
    for (auto& [name, t] : p.named()) {
      if (name.find(group) == std::string::npos) continue;
      for (std::size_t i = 0; i < t->size(); ++i) {
        largest = std::max(largest, std::abs(oracle::central_difference(*t, i, loss, 1e-6)));
      }
    }
    CHECK_MESSAGE(largest > 0.0, group);
  }
}

TEST_CASE("gradient reaches the first layer through four rollouts") {
  ModelConfig cfg = tiny_config();
  ModelParams p = ModelParams::init(cfg, 33);
  std::mt19937_64 rng(34);
  const Tensor x = oracle::random_tensor({3, 4, 2}, rng, -0.5, 0.5);
  const Tensor label = oracle::random_tensor({3, 16, 2}, rng, -0.5, 0.5);
  p.zero_grad();
  Tape tape;
  const BoundModel m = bind(tape, p);
  tape.backward(rollout_loss(tape.reference(x), tape.reference(label), m, 4));
  for (const Tensor* t : {&p.encoder[0].temporal_adj, &p.encoder[0].spatial_adj, &p.encoder[0].weight}) {
    double norm = 0.0;
    for (double g : t->grad()) norm += g * g;
    CHECK(norm > 0.0);
  }
}

TEST_CASE("trajectory and model tensor layouts agree") {
  Trajectory t = Trajectory::arm(3, 0.04);
  for (Eigen::Index i = 0; i < t.positions().size(); ++i) t.positions().data()[i] = 0.1 * static_cast<double>(i);
  const Tensor m = to_model_tensor(t);
  CHECK(m.shape() == Shape{3, 3, 4});
  CHECK(m.at({1, 2, 3}) == t.point(2, 3).y());
  const Trajectory back = from_model_tensor(m, t.joint_names(), 0.04);
  CHECK(back.positions() == t.positions());
  CHECK_THROWS(from_model_tensor(m, {"a"}, 0.04));
}

TEST_CASE("checkpoint round trip is bit exact") {
  ModelConfig cfg = tiny_config();
  Checkpoint ck{cfg, ModelParams::init(cfg, 8), 17, {0.5, 0.25, 1.0 / 3.0}};
  const std::string text = checkpoint_to_string(ck);
  const Checkpoint back = checkpoint_from_string(text);
  CHECK(back.step == 17);
  CHECK(back.loss_history == ck.loss_history);
  CHECK(back.config.encoder_channels == cfg.encoder_channels);
  const auto a = ck.params.named();
  const auto b = back.params.named();
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].first == b[k].first);
    CHECK(a[k].second->values() == b[k].second->values());
  }
  CHECK(checkpoint_to_string(back) == text);

  const auto path = (std::filesystem::temp_directory_path() / "armgnn_ckpt_test.json").string();
  save_checkpoint(ck, path);
  CHECK(checkpoint_to_string(load_checkpoint(path)) == text);
  std::remove(path.c_str());
  CHECK_THROWS(checkpoint_from_string("{\"config\": {}}"));
}

TEST_CASE("config and parameter validation") {
  ModelConfig cfg;
  cfg.output_frames = 20;
  CHECK_THROWS(cfg.validate());
  ModelConfig bad_channels;
  bad_channels.encoder_channels = {3, 8, 3};
  CHECK_NOTHROW(bad_channels.validate());
  bad_channels.encoder_channels = {2, 8, 3};
  CHECK_THROWS(bad_channels.validate());

  ModelConfig ok;
  ModelParams p = ModelParams::init(ok, 1);
  p.encoder[1].weight = Tensor({5, 5});
  CHECK_THROWS_AS(p.validate(ok), ShapeError);
  ModelParams q = ModelParams::init(ok, 1);
  q.decoder[2].bias[0] = std::nan("");
  CHECK_THROWS(q.validate(ok));
}
