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

#include "armgnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/core.h>

namespace armgnn {

namespace {

constexpr double kRoundingLevel = 1e-12;

double segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                        const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

double max_chord_deviation(const std::vector<Eigen::Vector3d>& pts, const Eigen::Vector3d& a,
                           const Eigen::Vector3d& b) {
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, segment_distance(p, a, b));
  const double floor = kRoundingLevel * (a.norm() + b.norm() + (b - a).norm());
  return worst <= floor ? 0.0 : worst;
}

double projected_area(const std::vector<Eigen::Vector3d>& polygon) {
  if (polygon.size() < 3) return 0.0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : polygon) mean += p;
  mean /= static_cast<double>(polygon.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double extent = 0.0;
  for (const auto& p : polygon) {
    const Eigen::Vector3d d = p - mean;
    cov += d * d.transpose();
    extent = std::max(extent, d.norm());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  // Eigenvalues ascend; the last two columns span the best-fit plane.
  const Eigen::Vector3d u = eig.eigenvectors().col(2);
  const Eigen::Vector3d v = eig.eigenvectors().col(1);
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Eigen::Vector3d p = polygon[i] - mean;
    const Eigen::Vector3d q = polygon[(i + 1) % polygon.size()] - mean;
    twice += p.dot(u) * q.dot(v) - q.dot(u) * p.dot(v);
  }
  const double area = 0.5 * std::abs(twice);
  const double floor = kRoundingLevel * extent * extent;
  return area <= floor ? 0.0 : area;
}

PathMetrics path_metrics(const Trajectory& traj, std::size_t split_frame) {
  if (traj.joints() != 1) throw std::invalid_argument("path_metrics expects a single-joint path");
  if (traj.frames() < 3) throw std::invalid_argument("path_metrics needs at least 3 frames");
  if (split_frame == 0 || split_frame + 1 >= traj.frames()) {
    throw std::invalid_argument(fmt::format("split frame {} is not interior to {} frames",
                                            split_frame, traj.frames()));
  }
  const auto pts = traj.points(0);
  PathMetrics m;
  for (std::size_t i = 1; i < pts.size(); ++i) m.path_length += (pts[i] - pts[i - 1]).norm();

  const Eigen::Vector3d& first = pts.front();
  const Eigen::Vector3d& turn = pts[split_frame];
  const Eigen::Vector3d& last = pts.back();
  m.chord_length = (turn - first).norm() + (last - turn).norm();

  const std::vector<Eigen::Vector3d> outbound(pts.begin(),
                                              pts.begin() + static_cast<long>(split_frame) + 1);
  const std::vector<Eigen::Vector3d> back(pts.begin() + static_cast<long>(split_frame), pts.end());
  m.max_chord_deviation =
      std::max(max_chord_deviation(outbound, first, turn), max_chord_deviation(back, turn, last));
  m.hysteresis_area = projected_area(pts);
  return m;
}

std::size_t turning_frame(const Trajectory& traj) {
  if (traj.frames() < 3) throw std::invalid_argument("turning_frame needs at least 3 frames");
  const Eigen::Vector3d start = traj.point(0, 0);
  std::size_t best = 1;
  double best_dist = -1.0;
  for (std::size_t f = 1; f + 1 < traj.frames(); ++f) {
    const double d = (traj.point(f, 0) - start).norm();
    if (d > best_dist) {
      best = f;
      best_dist = d;
    }
  }
  return best;
}

std::vector<ComparisonRow> compare_runs(const Trajectory& gnn, const Trajectory& joint_baseline,
                                        const Trajectory& task_baseline,
                                        double endpoint_tolerance) {
  const std::vector<std::pair<std::string, const Trajectory*>> runs = {
      {"gnn", &gnn}, {"joint_baseline", &joint_baseline}, {"task_baseline", &task_baseline}};
  for (const auto& [name, t] : runs) {
    if (t->joints() != 1 || t->frames() < 3) {
      throw std::invalid_argument(name + ": expected a single-joint path with at least 3 frames");
    }
  }
  const Eigen::Vector3d start = gnn.point(0, 0);
  const Eigen::Vector3d end = gnn.point(gnn.frames() - 1, 0);
  for (const auto& [name, t] : runs) {
    const double ds = (t->point(0, 0) - start).norm();
    const double de = (t->point(t->frames() - 1, 0) - end).norm();
    if (ds > endpoint_tolerance || de > endpoint_tolerance) {
      throw std::invalid_argument(fmt::format(
          "{}: endpoints differ from the gnn path by {:.4f} m and {:.4f} m (tolerance {:.4f} m)",
          name, ds, de, endpoint_tolerance));
    }
  }
  std::vector<ComparisonRow> rows;
  for (const auto& [name, t] : runs) rows.push_back({name, path_metrics(*t, turning_frame(*t))});
  if (rows[2].metrics.max_chord_deviation != 0.0) {
    throw std::logic_error(fmt::format("task baseline deviates from its chord by {:.3e} m",
                                       rows[2].metrics.max_chord_deviation));
  }
  return rows;
}

}  // namespace armgnn
