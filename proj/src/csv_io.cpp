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

#include "armgnn/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

namespace armgnn {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError(fmt::format("line {}: '{}' is not a number", line, s));
  }
  return v;
}

std::size_t parse_index(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError(fmt::format("line {}: '{}' is not a frame index", line, s));
  }
  return v;
}

// Reads the header and the data rows, checking column count.
std::vector<std::vector<std::string>> read_rows(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line) || strip(line) != header) {
    throw CsvError("expected header '" + header + "'");
  }
  const std::size_t columns = split(header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    line = strip(line);
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) {
      throw CsvError(fmt::format("line {}: expected {} columns, got {}", n, columns, cells.size()));
    }
    for (auto& c : cells) c = strip(c);
    cells.push_back(std::to_string(n));
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  return fmt::format("{:.17g}", v);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "frame,joint,x_m,y_m,z_m\n";
  for (std::size_t f = 0; f < traj.frames(); ++f) {
    for (std::size_t j = 0; j < traj.joints(); ++j) {
      const Eigen::Vector3d p = traj.point(f, j);
      out << f << ',' << traj.joint_names()[j] << ',' << format_double(p.x()) << ','
          << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
    }
  }
}

Trajectory read_trajectory_csv(std::istream& in, double frame_period) {
  const auto rows = read_rows(in, "frame,joint,x_m,y_m,z_m");
  if (rows.empty()) throw CsvError("trajectory file has no rows");
  std::vector<std::string> names;
  for (const auto& r : rows) {
    if (r[0] != rows.front()[0]) break;
    names.push_back(r[1]);
  }
  if (rows.size() % names.size() != 0) throw CsvError("ragged trajectory file");
  const std::size_t frames = rows.size() / names.size();
  Trajectory traj(frames, names, frame_period);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::size_t line = std::stoul(r[5]);
    const std::size_t f = i / names.size(), j = i % names.size();
    if (parse_index(r[0], line) != f) {
      throw CsvError(fmt::format("line {}: expected frame {}", line, f));
    }
    if (r[1] != names[j]) {
      throw CsvError(fmt::format("line {}: expected joint '{}', got '{}'", line, names[j], r[1]));
    }
    traj.set_point(f, j,
                   {parse_double(r[2], line), parse_double(r[3], line), parse_double(r[4], line)});
  }
  return traj;
}

void write_euler_csv(std::ostream& out, const EulerStream& stream) {
  out << "frame,segment,yaw_deg,pitch_deg,roll_deg\n";
  for (std::size_t f = 0; f < stream.frames(); ++f) {
    for (std::size_t s = 0; s < kSegmentCount; ++s) {
      const auto row = stream.angles[s].row(static_cast<Eigen::Index>(f));
      out << f << ',' << kSegmentNames[s] << ',' << format_double(row[0]) << ','
          << format_double(row[1]) << ',' << format_double(row[2]) << '\n';
    }
  }
}

EulerStream read_euler_csv(std::istream& in, double sample_rate) {
  const auto rows = read_rows(in, "frame,segment,yaw_deg,pitch_deg,roll_deg");
  if (rows.empty() || rows.size() % kSegmentCount != 0) {
    throw CsvError("Euler file must hold one row per frame and segment");
  }
  const std::size_t frames = rows.size() / kSegmentCount;
  EulerStream stream;
  stream.sample_rate = sample_rate;
  for (auto& a : stream.angles) a.resize(static_cast<Eigen::Index>(frames), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::size_t line = std::stoul(r[5]);
    const std::size_t f = i / kSegmentCount, s = i % kSegmentCount;
    if (parse_index(r[0], line) != f || r[1] != kSegmentNames[s]) {
      throw CsvError(fmt::format("line {}: expected frame {} segment {}", line, f, kSegmentNames[s]));
    }
    for (int c = 0; c < 3; ++c) {
      stream.angles[s](static_cast<Eigen::Index>(f), c) = parse_double(r[2 + c], line);
    }
  }
  stream.validate();
  return stream;
}

void write_joint_csv(std::ostream& out, const JointTrajectory& traj) {
  out << "frame,q1,q2,q3,q4,q5,q6\n";
  for (std::size_t f = 0; f < traj.frames(); ++f) {
    out << f;
    for (Eigen::Index j = 0; j < 6; ++j) out << ',' << format_double(traj.samples[f][j]);
    out << '\n';
  }
}

void write_report_csv(std::ostream& out, const TrainReport& report) {
  out << "epoch,train_mpjpe_m,test_mpjpe_m,seconds\n";
  for (const auto& r : report.epochs) {
    out << r.epoch << ',' << format_double(r.train_mpjpe) << ',' << format_double(r.test_mpjpe)
        << ',' << format_double(r.seconds) << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "name,path_length_m,chord_m,max_dev_m,hysteresis_area_m2\n";
  for (const auto& r : rows) {
    out << r.name << ',' << format_double(r.metrics.path_length) << ','
        << format_double(r.metrics.chord_length) << ','
        << format_double(r.metrics.max_chord_deviation) << ','
        << format_double(r.metrics.hysteresis_area) << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write " + path);
  write_trajectory_csv(out, traj);
}

Trajectory read_trajectory_csv(const std::string& path, double frame_period) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot read " + path);
  try {
    return read_trajectory_csv(in, frame_period);
  } catch (const CsvError& e) {
    throw CsvError(path + ": " + e.what());
  }
}

}  // namespace armgnn
