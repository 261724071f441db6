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

#include "armgnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace armgnn {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// handled by exactly one worker; callers write results into slot i.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_pair(const TrainingPair& p, const ModelConfig& cfg) {
  if (p.input.frames() != cfg.input_frames ||
      p.label.frames() != cfg.rollouts * cfg.output_frames || p.input.joints() != cfg.joints ||
      p.label.joints() != cfg.joints) {
    throw std::invalid_argument("training pair does not match the model configuration");
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be non-negative");
  if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
}

Var mpjpe(const Var& pred, const Var& truth) {
  if (pred.shape() != truth.shape() || pred.shape().size() != 3 || pred.shape()[0] != 3) {
    throw ShapeError("mpjpe: expected equal 3 x frames x joints shapes, got " +
                     shape_string(pred.shape()) + " and " + shape_string(truth.shape()));
  }
  return mean(norm_along(pred - truth, 0));
}

double mpjpe(const Tensor& pred, const Tensor& truth) {
  Tape tape;
  return mpjpe(tape.reference(pred), tape.reference(truth)).value()[0];
}

void adam_step(std::span<Tensor* const> params, AdamState& state, const TrainConfig& cfg) {
  for (const Tensor* p : params) {
    if (!p->has_grad()) throw std::invalid_argument("adam_step: parameter has no gradient");
  }
  if (state.first_moment.size() != params.size()) {
    state.first_moment.clear();
    state.second_moment.clear();
    for (const Tensor* p : params) {
      state.first_moment.emplace_back(p->size(), 0.0);
      state.second_moment.emplace_back(p->size(), 0.0);
    }
  }
  double sq = 0.0;
  for (const Tensor* p : params) {
    for (double g : p->grad()) sq += g * g;
  }
  const double grad_norm = std::sqrt(sq);
  const double clip = (cfg.grad_clip_norm > 0.0 && grad_norm > cfg.grad_clip_norm)
                          ? cfg.grad_clip_norm / grad_norm
                          : 1.0;

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    auto g = p.grad();
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i] * clip;
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
      const double step = cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.adam_eps);
      p[i] -= step;
    }
  }
}

void adam_step(ModelParams& params, AdamState& state, const TrainConfig& cfg) {
  std::vector<Tensor*> tensors;
  for (auto& [name, t] : params.named()) tensors.push_back(t);
  adam_step(tensors, state, cfg);
}

Var rollout_loss(const Var& input, const Var& label, const BoundModel& model, std::size_t rollouts) {
  return mpjpe(rollout(input, model, rollouts), label);
}

double evaluate(const std::vector<TrainingPair>& pairs, const ModelParams& params,
                const ModelConfig& model_cfg, std::size_t threads) {
  if (pairs.empty()) throw std::invalid_argument("evaluate: empty pair set");
  std::vector<double> losses(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    check_pair(pairs[i], model_cfg);
    const Tensor input = to_model_tensor(pairs[i].input);
    const Tensor label = to_model_tensor(pairs[i].label);
    Tape tape;
    const BoundModel m = bind(tape, params);
    losses[i] = rollout_loss(tape.reference(input), tape.reference(label), m, model_cfg.rollouts)
                    .value()[0];
  });
  double total = 0.0;
  for (double l : losses) total += l;
  return total / static_cast<double>(losses.size());
}

TrainResult train(const std::vector<TrainingPair>& train_pairs,
                  const std::vector<TrainingPair>& test_pairs, ModelParams params,
                  const ModelConfig& model_cfg, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  params.validate(model_cfg);
  if (train_pairs.empty()) throw std::invalid_argument("train: empty training set");
  for (const auto& p : train_pairs) check_pair(p, model_cfg);
  for (const auto& p : test_pairs) check_pair(p, model_cfg);

  std::vector<Tensor> inputs, labels;
  for (const auto& p : train_pairs) {
    inputs.push_back(to_model_tensor(p.input));
    labels.push_back(to_model_tensor(p.label));
  }

  const auto start = std::chrono::steady_clock::now();
  auto record = [&](std::size_t epoch) {
    EpochRecord r;
    r.epoch = epoch;
    r.train_mpjpe = evaluate(train_pairs, params, model_cfg, cfg.threads);
    r.test_mpjpe = test_pairs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : evaluate(test_pairs, params, model_cfg, cfg.threads);
    if (cfg.record_wall_clock) {
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return r;
  };

  TrainResult result;
  result.report.epochs.push_back(record(0));
  if (on_epoch) on_epoch(result.report.epochs.back(), params, 0);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_pairs.size());
  std::vector<ModelParams> workers;
  std::vector<double> losses;
  const auto named = params.named();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - begin);
      workers.assign(count, params);
      losses.assign(count, 0.0);
      parallel_for(count, cfg.threads, [&](std::size_t i) {
        ModelParams& local = workers[i];
        local.zero_grad();
        Tape tape;
        const BoundModel m = bind(tape, local);
        const std::size_t idx = order[begin + i];
        const Var loss = rollout_loss(tape.reference(inputs[idx]), tape.reference(labels[idx]), m,
                                      model_cfg.rollouts);
        tape.backward(loss);
        losses[i] = loss.value()[0];
      });
      // Fixed reduction order: batch position 0, 1, ...
      const double scale = 1.0 / static_cast<double>(count);
      for (const auto& [name, p] : named) p->zero_grad();
      for (std::size_t i = 0; i < count; ++i) {
        const auto local = workers[i].named();
        for (std::size_t k = 0; k < named.size(); ++k) {
          auto g = named[k].second->grad();
          const auto wg = local[k].second->grad();
          for (std::size_t e = 0; e < g.size(); ++e) g[e] += wg[e];
        }
      }
      for (const auto& [name, p] : named) {
        for (auto& x : p->grad()) x *= scale;
      }
      adam_step(params, result.optimizer, cfg);
    }
    result.report.epochs.push_back(record(epoch));
    if (on_epoch) on_epoch(result.report.epochs.back(), params, result.optimizer.step);
  }
  for (auto& [name, t] : params.named()) t->clear_grad();
  result.params = std::move(params);
  return result;
}

}  // namespace armgnn
