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

#include <cmath>
#include <random>

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

TrainingPair random_pair(const ModelConfig& cfg, std::mt19937_64& rng, int position) {
  const Tensor in = oracle::random_tensor({3, cfg.input_frames, cfg.joints}, rng, -0.3, 0.3);
  const Tensor lab =
      oracle::random_tensor({3, cfg.rollouts * cfg.output_frames, cfg.joints}, rng, -0.3, 0.3);
  std::vector<std::string> names{"a", "b"};
  return {from_model_tensor(in, names, 0.04), from_model_tensor(lab, names, 0.04), position};
}

}  // namespace

TEST_CASE("mpjpe hand cases") {
  Tensor pred(Shape{3, 1, 2}), truth(Shape{3, 1, 2});
  // Joint 0 off by (3, 4, 0), joint 1 off by (1, 0, 0): errors 5 and 1.
  pred.at({0, 0, 0}) = 3.0;
  pred.at({1, 0, 0}) = 4.0;
  pred.at({0, 0, 1}) = 1.0;
  CHECK(mpjpe(pred, truth) == 3.0);
  CHECK(mpjpe(truth, truth) == 0.0);

  Tensor one(Shape{3, 2, 1}, 0.0), zero(Shape{3, 2, 1}, 0.0);
  one.at({2, 0, 0}) = -2.0;
  one.at({1, 1, 0}) = 4.0;
  CHECK(mpjpe(one, zero) == 3.0);
  CHECK_THROWS_AS(mpjpe(Tensor(Shape{3, 2, 2}), Tensor(Shape{3, 2, 1})), ShapeError);
  CHECK_THROWS_AS(mpjpe(Tensor(Shape{2, 2, 2}), Tensor(Shape{2, 2, 2})), ShapeError);
}

TEST_CASE("mpjpe small examples and scaling") {
  Tensor d(Shape{3, 1, 1}), z(Shape{3, 1, 1});
  d.at({0, 0, 0}) = 1.0;
  d.at({1, 0, 0}) = 2.0;
  d.at({2, 0, 0}) = 2.0;
  CHECK(mpjpe(d, z) == 3.0);
  Tensor two(Shape{3, 1, 2}), zero2(Shape{3, 1, 2});
  two.at({2, 0, 0}) = 3.0;
  CHECK(mpjpe(two, zero2) == 1.5);

  std::mt19937_64 rng(30);
  const Tensor a = oracle::random_tensor({3, 6, 4}, rng), b = oracle::random_tensor({3, 6, 4}, rng);
  const double base = mpjpe(a, b);
  CHECK(base > 0.0);
  for (double s : {0.0, 0.5, 2.0, 7.25}) {
    Tensor scaled = b;
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = b[i] + s * (a[i] - b[i]);
    CHECK(mpjpe(scaled, b) == doctest::Approx(s * base).epsilon(1e-13));
  }
}

TEST_CASE("full rollout loss is the mean of the segment losses") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor a = oracle::random_tensor({3, 120, 4}, rng), b = oracle::random_tensor({3, 120, 4}, rng);
    double segments = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      Tensor pa(Shape{3, 30, 4}), pb(Shape{3, 30, 4});
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t f = 0; f < 30; ++f)
          for (std::size_t v = 0; v < 4; ++v) {
            pa.at({c, f, v}) = a.at({c, 30 * s + f, v});
            pb.at({c, f, v}) = b.at({c, 30 * s + f, v});
          }
      segments += mpjpe(pa, pb) / 4.0;
    }
    CHECK(mpjpe(a, b) == doctest::Approx(segments).epsilon(1e-14));
  }
}

TEST_CASE("mpjpe matches the loop oracle") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  for (int trial = 0; trial < 50; ++trial) {
    const Shape s{3, dim(rng), dim(rng)};
    const Tensor a = oracle::random_tensor(s, rng), b = oracle::random_tensor(s, rng);
    CHECK(std::abs(mpjpe(a, b) - oracle::loop_mpjpe(a, b)) < 1e-12);
  }
}

TEST_CASE("mpjpe gradient") {
  std::mt19937_64 rng(32);
  Tensor a = oracle::random_tensor({3, 5, 4}, rng);
  const Tensor b = oracle::random_tensor({3, 5, 4}, rng);
  a.zero_grad();
  Tape tape;
  tape.backward(mpjpe(tape.parameter(a), tape.reference(b)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double n = oracle::central_difference(a, i, [&] { return mpjpe(a, b); });
    CHECK(oracle::gradient_error(a.grad()[i], n) < 1e-7);
  }
}

TEST_CASE("adam update matches a hand computation") {
  Tensor w({2}, std::vector<double>{1.0, -2.0});
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.grad_clip_norm = 0.0;
  AdamState state;
  std::vector<Tensor*> params{&w};

  const std::vector<std::vector<double>> grads{{0.5, -1.0}, {-0.25, 2.0}};
  double m[2] = {0, 0}, v[2] = {0, 0}, x[2] = {1.0, -2.0};
  for (std::size_t step = 0; step < grads.size(); ++step) {
    w.zero_grad();
    for (std::size_t i = 0; i < 2; ++i) w.grad()[i] = grads[step][i];
    adam_step(params, state, cfg);
    const double t = static_cast<double>(step + 1);
    for (std::size_t i = 0; i < 2; ++i) {
      const double g = grads[step][i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.9, t)), vh = v[i] / (1 - std::pow(0.999, t));
      x[i] -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
      CHECK(w[i] == doctest::Approx(x[i]).epsilon(1e-14));
    }
  }
  CHECK(state.step == 2);

  Tensor bare({1});
  std::vector<Tensor*> no_grad{&bare};
  AdamState fresh;
  CHECK_THROWS(adam_step(no_grad, fresh, cfg));
}

TEST_CASE("adam with zero gradients and on quadratics") {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  Tensor w({2}, std::vector<double>{0.7, -0.4});
  std::vector<Tensor*> params{&w};
  AdamState state;
  w.zero_grad();
  adam_step(params, state, cfg);
  CHECK(w[0] == 0.7);
  CHECK(w[1] == -0.4);

  // With history, zero gradients only decay the moments.
  w.grad()[0] = 0.3;
  w.grad()[1] = -0.2;
  adam_step(params, state, cfg);
  const auto m = state.first_moment[0], v = state.second_moment[0];
  w.zero_grad();
  adam_step(params, state, cfg);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(state.first_moment[0][i] == 0.9 * m[i]);
    CHECK(state.second_moment[0][i] == 0.999 * v[i]);
  }

  // f(w) = w^2 from w = 1.
  Tensor x({1}, std::vector<double>{1.0});
  std::vector<Tensor*> xp{&x};
  AdamState xs;
  x.zero_grad();
  x.grad()[0] = 2.0;
  adam_step(xp, xs, cfg);
  CHECK(x[0] < 1.0);

  // f(w) = w0^2 + 4 w1^2 from (1, -1), lr 0.05, default clipping.
  TrainConfig q;
  q.learning_rate = 0.05;
  Tensor u({2}, std::vector<double>{1.0, -1.0});
  std::vector<Tensor*> up{&u};
  AdamState us;
  for (int step = 0; step < 200; ++step) {
    u.zero_grad();
    u.grad()[0] = 2.0 * u[0];
    u.grad()[1] = 8.0 * u[1];
    adam_step(up, us, q);
  }
  CHECK(std::hypot(u[0], u[1]) < 1e-3);
}

TEST_CASE("gradients are clipped by global norm") {
  Tensor a({1}), b({1});
  a.zero_grad();
  b.zero_grad();
  a.grad()[0] = 3.0;
  b.grad()[0] = 4.0;
  TrainConfig cfg;
  cfg.grad_clip_norm = 1.0;
  AdamState state;
  std::vector<Tensor*> params{&a, &b};
  adam_step(params, state, cfg);
  CHECK(state.first_moment[0][0] == doctest::Approx(0.1 * 0.6).epsilon(1e-14));
  CHECK(state.first_moment[1][0] == doctest::Approx(0.1 * 0.8).epsilon(1e-14));

  TrainConfig loose;
  loose.grad_clip_norm = 10.0;
  AdamState s2;
  adam_step(params, s2, loose);
  CHECK(s2.first_moment[1][0] == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("training report layout and determinism") {
  const ModelConfig mc = tiny_config();
  std::mt19937_64 rng(40);
  std::vector<TrainingPair> train_set, test_set;
  for (int i = 0; i < 7; ++i) train_set.push_back(random_pair(mc, rng, 0));
  for (int i = 0; i < 2; ++i) test_set.push_back(random_pair(mc, rng, 1));
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 3;
  tc.seed = 5;
  const ModelParams init = ModelParams::init(mc, 6);

  std::size_t calls = 0;
  const TrainResult a = train(train_set, test_set, init, mc, tc,
                              [&](const EpochRecord&, const ModelParams&, std::size_t) { ++calls; });
  CHECK(calls == 4);
  REQUIRE(a.report.epochs.size() == 4);
  CHECK(a.report.epochs[0].epoch == 0);
  CHECK(a.report.epochs[0].train_mpjpe == doctest::Approx(evaluate(train_set, init, mc)));
  CHECK(a.report.epochs[3].seconds == 0.0);
  CHECK(a.optimizer.step == 9);  // 3 batches per epoch

  TrainConfig threaded = tc;
  threaded.threads = 3;
  const TrainResult b = train(train_set, test_set, init, mc, threaded);
  const auto pa = a.params.named(), pb = b.params.named();
  for (std::size_t k = 0; k < pa.size(); ++k) CHECK(pa[k].second->values() == pb[k].second->values());
  for (std::size_t e = 0; e < 4; ++e) {
    CHECK(a.report.epochs[e].train_mpjpe == b.report.epochs[e].train_mpjpe);
    CHECK(a.report.epochs[e].test_mpjpe == b.report.epochs[e].test_mpjpe);
  }

  const TrainResult c = train(train_set, {}, init, mc, tc);
  CHECK(std::isnan(c.report.epochs[1].test_mpjpe));
  CHECK(c.report.epochs[1].train_mpjpe == a.report.epochs[1].train_mpjpe);
  const TrainResult again = train(train_set, test_set, init, mc, tc);
  for (std::size_t e = 0; e < 4; ++e) {
    CHECK(again.report.epochs[e].train_mpjpe == a.report.epochs[e].train_mpjpe);
    CHECK(again.report.epochs[e].test_mpjpe == a.report.epochs[e].test_mpjpe);
  }
  CHECK_FALSE(c.params.named()[0].second->has_grad());
}

TEST_CASE("single pair overfits") {
  const ModelConfig mc = tiny_config();
  std::mt19937_64 rng(41);
  const std::vector<TrainingPair> one{random_pair(mc, rng, 0)};
  TrainConfig tc;
  tc.epochs = 500;
  tc.batch_size = 1;
  const ModelParams init = ModelParams::init(mc, 2);
  const TrainResult r = train(one, {}, init, mc, tc);
  CHECK(r.report.epochs.back().train_mpjpe < 0.1 * r.report.epochs.front().train_mpjpe);
  // Evaluating on the training set reproduces the reported loss.
  CHECK(std::abs(evaluate(one, r.params, mc) - r.report.epochs.back().train_mpjpe) < 1e-9);
  CHECK(evaluate(one, init, mc) == mpjpe(rollout(to_model_tensor(one[0].input), init, 4),
                                         to_model_tensor(one[0].label)));
  CHECK_THROWS(evaluate({}, init, mc));

  TrainConfig frozen = tc;
  frozen.learning_rate = 0.0;
  const TrainResult f = train(one, {}, init, mc, frozen);
  const auto a = f.params.named(), b = init.named();
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].second->values() == b[k].second->values());
}

TEST_CASE("identity model error on constant trajectories") {
  const ModelConfig mc = tiny_config();
  const ModelParams id = ModelParams::identity(mc);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<TrainingPair> pairs;
  double expected = 0.0;
  for (int p = 0; p < 3; ++p) {
    Trajectory in(mc.input_frames, {"a", "b"}, 0.04), lab(16, {"a", "b"}, 0.04);
    double disp = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      const Eigen::Vector3d ci(u(rng), u(rng), u(rng)), cl(u(rng), u(rng), u(rng));
      for (std::size_t f = 0; f < in.frames(); ++f) in.set_point(f, j, ci);
      for (std::size_t f = 0; f < lab.frames(); ++f) lab.set_point(f, j, cl);
      disp += (cl - ci).norm() / 2.0;
    }
    expected += disp / 3.0;
    pairs.push_back({in, lab, 0});
  }
  CHECK(evaluate(pairs, id, mc) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("training input validation") {
  const ModelConfig mc = tiny_config();
  std::mt19937_64 rng(42);
  TrainConfig tc;
  CHECK_THROWS(train({}, {}, ModelParams::init(mc, 1), mc, tc));
  TrainingPair bad = random_pair(mc, rng, 0);
  bad.label = bad.label.frames_range(0, 8);
  CHECK_THROWS(train({bad}, {}, ModelParams::init(mc, 1), mc, tc));
  tc.batch_size = 0;
  CHECK_THROWS(tc.validate());
  TrainConfig neg;
  neg.learning_rate = -1.0;
  CHECK_THROWS(neg.validate());
}
