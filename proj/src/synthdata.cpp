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

#include "armgnn/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace armgnn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Offset of a circular arc with sagitta h over a chord of length c, at chord
// parameter u in [0, 1]. Zero at both ends, h at the middle.
double arc_offset(double u, double chord, double h) {
  if (h == 0.0 || chord == 0.0) return 0.0;
  const double r = (chord * chord / 4.0 + h * h) / (2.0 * h);
  const double x = chord * (u - 0.5);
  return std::sqrt(std::max(0.0, r * r - x * x)) - (r - h);
}

// Unit vector in the vertical plane through a and b, perpendicular to b - a.
Eigen::Vector3d bow_normal(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d d = (b - a).normalized();
  Eigen::Vector3d n = Eigen::Vector3d::UnitZ() - d.z() * d;
  if (n.norm() < 1e-9) n = Eigen::Vector3d::UnitX() - d.x() * d;
  return n.normalized();
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ c);
}

Eigen::Vector3d TaskLayout::position(std::size_t index) const {
  if (index >= kGridPositions) throw std::out_of_range("grid index out of range");
  return {grid_x[index / 3], grid_y[index % 3], desk_height};
}

Eigen::AlignedBox3d TaskLayout::grid_box() const {
  Eigen::AlignedBox3d box;
  for (std::size_t i = 0; i < kGridPositions; ++i) box.extend(position(i));
  return box;
}

void TaskLayout::validate() const {
  for (std::size_t i = 0; i < kGridPositions; ++i) {
    for (std::size_t j = i + 1; j < kGridPositions; ++j) {
      if ((position(i) - position(j)).norm() < 1e-12) {
        throw std::invalid_argument("grid positions must be distinct");
      }
    }
  }
}

void SynthConfig::validate() const {
  if (reach_frames < 2 || lift_frames < 1 || return_frames < 1) {
    throw std::invalid_argument("synthetic phases are too short");
  }
  if (noise_amplitude < 0.0 || bow_amplitude < 0.0) {
    throw std::invalid_argument("synthetic amplitudes must be non-negative");
  }
  if (!(scale_min > 0.0 && scale_min <= scale_max)) {
    throw std::invalid_argument("invalid participant scale range");
  }
  if (!(frame_period > 0.0)) throw std::invalid_argument("frame period must be positive");
}

Trajectory min_jerk(const Eigen::Vector3d& s0, const Eigen::Vector3d& s1, std::size_t n,
                    double frame_period) {
  if (n < 2) throw std::invalid_argument("min_jerk needs at least 2 frames");
  Trajectory out(n, {"point"}, frame_period);
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = static_cast<double>(i) / static_cast<double>(n - 1);
    out.set_point(i, 0, i == n - 1 ? s1 : Eigen::Vector3d(s0 + (s1 - s0) * min_jerk_profile(tau)));
  }
  return out;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> elbow_for_wrist(const Eigen::Vector3d& shoulder,
                                                            const Eigen::Vector3d& wrist,
                                                            double upper, double fore) {
  Eigen::Vector3d to_wrist = wrist - shoulder;
  double d = to_wrist.norm();
  const double d_max = upper + fore, d_min = std::abs(upper - fore);
  Eigen::Vector3d u = d > 1e-12 ? Eigen::Vector3d(to_wrist / d) : Eigen::Vector3d::UnitX();
  const double clamped = std::clamp(d, d_min, d_max);
  const Eigen::Vector3d w = clamped == d ? wrist : Eigen::Vector3d(shoulder + clamped * u);
  d = clamped;

  const double along = (upper * upper - fore * fore + d * d) / (2.0 * d);
  const double radius = std::sqrt(std::max(0.0, upper * upper - along * along));
  Eigen::Vector3d down = -Eigen::Vector3d::UnitZ() + u.z() * u;
  if (down.norm() < 1e-9) down = -Eigen::Vector3d::UnitX() + u.x() * u;
  down.normalize();
  return {shoulder + along * u + radius * down, w};
}

Trajectory synth_demo(const DemoSpec& spec, const TaskLayout& layout, const ArmModel& arm,
                      const SynthConfig& cfg) {
  cfg.validate();
  arm.validate();
  Eigen::AlignedBox3d box = layout.grid_box();
  const Eigen::Vector3d slack = Eigen::Vector3d::Constant(1e-9);
  box.extend(box.min() - slack);
  box.extend(box.max() + slack);
  if (!box.contains(spec.bottle_position)) {
    throw std::invalid_argument("bottle position lies outside the grid");
  }
  if (spec.scale_factor < cfg.scale_min || spec.scale_factor > cfg.scale_max) {
    throw std::invalid_argument("participant scale factor out of range");
  }

  const std::size_t n = cfg.total_frames();
  const Eigen::Vector3d& bottle = spec.bottle_position;
  const Eigen::Vector3d& mouth = layout.mouth_point;
  const Eigen::Vector3d& rest = layout.rest_point;
  const double chord = (mouth - bottle).norm();
  const double sagitta = cfg.bow_amplitude * spec.scale_factor;
  const Eigen::Vector3d normal = bow_normal(bottle, mouth);

  std::vector<Eigen::Vector3d> wrist;
  wrist.reserve(n);
  for (std::size_t i = 0; i < cfg.reach_frames; ++i) {
    const double tau = static_cast<double>(i) / static_cast<double>(cfg.reach_frames - 1);
    wrist.push_back(i + 1 == cfg.reach_frames ? bottle
                                              : Eigen::Vector3d(rest + (bottle - rest) * min_jerk_profile(tau)));
  }
  for (std::size_t i = 0; i < cfg.lift_frames; ++i) {
    const double u = min_jerk_profile(static_cast<double>(i + 1) / static_cast<double>(cfg.lift_frames));
    wrist.push_back(bottle + u * (mouth - bottle) + arc_offset(u, chord, sagitta) * normal);
  }
  for (std::size_t i = 0; i < cfg.hold_frames; ++i) wrist.push_back(mouth);
  for (std::size_t i = 0; i < cfg.return_frames; ++i) {
    const double u =
        min_jerk_profile(static_cast<double>(i + 1) / static_cast<double>(cfg.return_frames));
    wrist.push_back(mouth + u * (bottle - mouth) - arc_offset(u, chord, sagitta) * normal);
  }

  // Low-frequency sinusoidal drift; the per-frame vector norm stays within
  // noise_amplitude.
  if (cfg.noise_amplitude > 0.0) {
    std::mt19937_64 rng(spec.noise_seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> cycles(0.5, 1.5);
    const double amp = cfg.noise_amplitude / std::sqrt(3.0);
    std::array<double, 3> ph{}, cy{};
    for (std::size_t a = 0; a < 3; ++a) {
      ph[a] = phase(rng);
      cy[a] = cycles(rng);
    }
    for (std::size_t f = 0; f < n; ++f) {
      const double s = static_cast<double>(f) / static_cast<double>(n - 1);
      for (std::size_t a = 0; a < 3; ++a) {
        wrist[f][static_cast<Eigen::Index>(a)] += amp * std::sin(2.0 * M_PI * cy[a] * s + ph[a]);
      }
    }
  }

  const Eigen::Vector3d& shoulder = arm.shoulder_origin;
  const double l1 = arm.segment_lengths[0], l2 = arm.segment_lengths[1], l3 = arm.segment_lengths[2];
  Trajectory traj = Trajectory::arm(n, cfg.frame_period);
  for (std::size_t f = 0; f < n; ++f) {
    const auto [elbow, w] = elbow_for_wrist(shoulder, wrist[f], l1, l2);
    traj.set_point(f, 0, shoulder);
    traj.set_point(f, 1, elbow);
    traj.set_point(f, 2, w);
    traj.set_point(f, 3, w + l3 * (w - elbow) / l2);
  }
  return traj;
}

std::vector<CorpusEntry> synth_corpus(std::size_t participants, std::size_t demos,
                                      std::uint64_t seed, const TaskLayout& layout,
                                      const ArmModel& arm, const SynthConfig& cfg) {
  layout.validate();
  std::vector<CorpusEntry> corpus;
  corpus.reserve(participants * demos * kGridPositions);
  for (std::size_t p = 0; p < participants; ++p) {
    std::mt19937_64 rng(mix_seed(seed, p));
    const double scale = std::uniform_real_distribution<double>(cfg.scale_min, cfg.scale_max)(rng);
    for (std::size_t pos = 0; pos < kGridPositions; ++pos) {
      for (std::size_t d = 0; d < demos; ++d) {
        DemoSpec spec;
        spec.participant_id = p;
        spec.position_index = pos;
        spec.demo_index = d;
        spec.bottle_position = layout.position(pos);
        spec.noise_seed = mix_seed(seed, p, pos + 1, d + 1);
        spec.scale_factor = scale;
        corpus.push_back({spec, synth_demo(spec, layout, arm, cfg)});
      }
    }
  }
  return corpus;
}

std::vector<TrainingPair> make_pairs(const std::vector<Trajectory>& corpus, std::size_t t_in,
                                     std::size_t k_out, std::size_t rollouts) {
  const std::size_t expected = t_in + rollouts * k_out;
  std::vector<TrainingPair> pairs;
  pairs.reserve(corpus.size());
  for (const auto& traj : corpus) {
    if (traj.frames() != expected) {
      throw std::invalid_argument("trajectory has " + std::to_string(traj.frames()) +
                                  " frames, expected " + std::to_string(expected));
    }
    Trajectory centered = traj;
    const Eigen::RowVector3d origin = traj.positions().row(0).head<3>();
    for (std::size_t j = 0; j < traj.joints(); ++j) {
      centered.positions().middleCols(static_cast<Eigen::Index>(3 * j), 3).rowwise() -= origin;
    }
    pairs.push_back({centered.frames_range(0, t_in), centered.frames_range(t_in, expected), -1});
  }
  return pairs;
}

std::vector<TrainingPair> make_pairs(const std::vector<CorpusEntry>& corpus, std::size_t t_in,
                                     std::size_t k_out, std::size_t rollouts) {
  std::vector<Trajectory> trajs;
  trajs.reserve(corpus.size());
  for (const auto& e : corpus) trajs.push_back(e.trajectory);
  auto pairs = make_pairs(trajs, t_in, k_out, rollouts);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    pairs[i].position_index = static_cast<int>(corpus[i].spec.position_index);
  }
  return pairs;
}

std::pair<std::vector<TrainingPair>, std::vector<TrainingPair>> split_corpus(
    const std::vector<TrainingPair>& pairs, const std::set<std::size_t>& held_out_positions) {
  if (held_out_positions.empty()) throw std::invalid_argument("hold-out set is empty");
  std::set<std::size_t> present;
  for (const auto& p : pairs) {
    if (p.position_index < 0) throw std::invalid_argument("pair has no grid position");
    present.insert(static_cast<std::size_t>(p.position_index));
  }
  for (auto h : held_out_positions) {
    if (!present.count(h)) throw std::invalid_argument("held-out position is not in the corpus");
  }
  if (held_out_positions.size() >= present.size()) {
    throw std::invalid_argument("hold-out set covers every position");
  }
  std::vector<TrainingPair> train, test;
  for (const auto& p : pairs) {
    (held_out_positions.count(static_cast<std::size_t>(p.position_index)) ? test : train).push_back(p);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace armgnn
