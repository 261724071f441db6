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

#include "armgnn/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "armgnn/config.hpp"
#include "armgnn/csv_io.hpp"
#include "armgnn/pipeline.hpp"

namespace armgnn {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> set;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON file overriding the defaults")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Run seed");
  cmd->add_option("--out", c.out, "Output directory")->required();
  cmd->add_option("--set", c.set, "Override a config key, e.g. train.epochs=50");
}

Json parse_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
    return text;
  }
}

RunConfig resolve(const Common& c, const std::function<void(RunConfig&)>& flags) {
  RunConfig cfg = load_run_config(c.config);
  if (!c.set.empty()) {
    Json patch = Json::object();
    for (const auto& kv : c.set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
      }
      Json* node = &patch;
      std::string key = kv.substr(0, eq);
      std::size_t dot;
      while ((dot = key.find('.')) != std::string::npos) {
        node = &(*node)[key.substr(0, dot)];
        key = key.substr(dot + 1);
      }
      (*node)[key] = parse_value(kv.substr(eq + 1));
    }
    Json base = cfg;
    from_json(merge_checked(base, patch), cfg);
  }
  if (c.seed) cfg.seed = *c.seed;
  if (flags) flags(cfg);
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
}

void prepare_out(const std::string& out, const RunConfig& cfg) {
  fs::create_directories(out);
  write_text(fs::path(out) / "resolved_config.json", to_pretty_json(cfg));
}

// The wrist when the file holds arm joints, otherwise the single joint it has.
Trajectory single_joint(const Trajectory& t, const std::string& joint) {
  if (t.joints() == 1) return t;
  const auto& names = t.joint_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == joint) return t.joint_view(j);
  }
  throw std::invalid_argument("trajectory has no joint named '" + joint + "'");
}

std::vector<TrainingPair> corpus_pairs(const std::string& dir, const RunConfig& cfg) {
  return make_pairs(read_corpus(dir, cfg.synth.frame_period), cfg.model.input_frames,
                    cfg.model.output_frames, cfg.model.rollouts);
}

void write_comparison(const fs::path& out, const RobotComparison& cmp) {
  write_trajectory_csv((out / "robot_ee.csv").string(), cmp.gnn);
  write_with(out / "joint_baseline_joints.csv",
             [&](std::ostream& o) { write_joint_csv(o, cmp.joints); });
  write_trajectory_csv((out / "joint_baseline_ee.csv").string(), cmp.joint_baseline);
  write_trajectory_csv((out / "task_baseline_ee.csv").string(), cmp.task_baseline);
  write_with(out / "comparison.csv", [&](std::ostream& o) { write_comparison_csv(o, cmp.rows); });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Drinking-motion generation with a space-time graph network", "armgnn"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Common common;

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic demonstration corpus");
  add_common(gen, common);
  std::optional<std::size_t> participants, demos;
  gen->add_option("--participants", participants, "Number of simulated participants");
  gen->add_option("--demos", demos, "Demos per participant and grid position");

  auto* train_cmd = app.add_subcommand("train", "Train the model on a corpus");
  add_common(train_cmd, common);
  std::string data_dir;
  std::optional<std::size_t> epochs, batch, threads, checkpoint_every;
  std::optional<double> lr;
  std::vector<std::size_t> held_out;
  train_cmd->add_option("--data", data_dir, "Corpus directory from gen-data")->required();
  train_cmd->add_option("--epochs", epochs);
  train_cmd->add_option("--batch-size", batch);
  train_cmd->add_option("--lr", lr);
  train_cmd->add_option("--threads", threads);
  train_cmd->add_option("--held-out", held_out, "Grid positions kept out of training");
  train_cmd->add_option("--checkpoint-every", checkpoint_every,
                        "Also write a checkpoint every N epochs");

  auto* generate_cmd = app.add_subcommand("generate", "Roll the model out from an input window");
  add_common(generate_cmd, common);
  std::string checkpoint, input;
  generate_cmd->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  generate_cmd->add_option("--input", input, "Arm trajectory CSV; the first frames are used")
      ->required()
      ->check(CLI::ExistingFile);

  auto* map_cmd = app.add_subcommand("map-robot", "Map a wrist path into the robot workspace");
  add_common(map_cmd, common);
  std::string joint = "wrist";
  map_cmd->add_option("--input", input)->required()->check(CLI::ExistingFile);
  map_cmd->add_option("--joint", joint, "Joint to map when the file holds several");

  auto* baseline_cmd = app.add_subcommand("baseline", "Joint-space and task-space baselines");
  add_common(baseline_cmd, common);
  baseline_cmd->add_option("--input", input, "Robot end-effector CSV from map-robot")
      ->required()
      ->check(CLI::ExistingFile);

  auto* metrics_cmd = app.add_subcommand("metrics", "Path length, deviation and hysteresis");
  add_common(metrics_cmd, common);
  std::vector<std::string> inputs;
  std::optional<std::size_t> split;
  metrics_cmd->add_option("--input", inputs, "Trajectory CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  metrics_cmd->add_option("--joint", joint, "Joint to measure when a file holds several");
  metrics_cmd->add_option("--split", split, "Outbound/return boundary frame");

  auto* eval_cmd = app.add_subcommand("eval", "Held-out evaluation and baseline comparison");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--data", data_dir)->required();
  eval_cmd->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--held-out", held_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  const fs::path out(common.out);
  try {
    if (gen->parsed()) {
      const RunConfig cfg = resolve(common, [&](RunConfig& c) {
        if (participants) c.data.participants = *participants;
        if (demos) c.data.demos = *demos;
      });
      prepare_out(common.out, cfg);
      const auto corpus = make_corpus(cfg);
      write_corpus(corpus, common.out);
      fmt::print(stderr, "wrote {} demos to {}\n", corpus.size(), common.out);
    } else if (train_cmd->parsed()) {
      const RunConfig cfg = resolve(common, [&](RunConfig& c) {
        if (epochs) c.train.epochs = *epochs;
        if (batch) c.train.batch_size = *batch;
        if (lr) c.train.learning_rate = *lr;
        if (threads) c.train.threads = *threads;
        if (!held_out.empty()) c.data.held_out_positions = {held_out.begin(), held_out.end()};
      });
      prepare_out(common.out, cfg);
      const auto [train_pairs, test_pairs] =
          split_corpus(corpus_pairs(data_dir, cfg), cfg.data.held_out_positions);
      TrainConfig tc = cfg.train;
      tc.seed = cfg.shuffle_seed();
      std::vector<double> history;
      const std::size_t every = checkpoint_every.value_or(0);
      if (every > 0) fs::create_directories(out / "checkpoints");
      auto result = train(
          train_pairs, test_pairs, ModelParams::init(cfg.model, cfg.init_seed()), cfg.model, tc,
          [&](const EpochRecord& r, const ModelParams& p, std::size_t step) {
            history.push_back(r.train_mpjpe);
            fmt::print(stderr, "epoch {:4}/{}  train {:.6f} m  test {:.6f} m\n", r.epoch,
                       tc.epochs, r.train_mpjpe, r.test_mpjpe);
            if (every > 0 && r.epoch > 0 && r.epoch % every == 0) {
              save_checkpoint({cfg.model, p, step, history},
                              (out / "checkpoints" / fmt::format("epoch_{:04}.json", r.epoch))
                                  .string());
            }
          });
      write_with(out / "report.csv",
                 [&](std::ostream& o) { write_report_csv(o, result.report); });
      save_checkpoint({cfg.model, result.params, result.optimizer.step, history},
                      (out / "checkpoint.json").string());
    } else if (generate_cmd->parsed()) {
      const Checkpoint ckpt = load_checkpoint(checkpoint);
      RunConfig cfg = resolve(common, [&](RunConfig& c) { c.model = ckpt.config; });
      prepare_out(common.out, cfg);
      const Trajectory in = read_trajectory_csv(input, cfg.synth.frame_period);
      const Trajectory gen_traj = generate_motion(in, ckpt.params, ckpt.config);
      write_trajectory_csv((out / "generated.csv").string(), gen_traj);
      fmt::print(stderr, "generated {} frames\n", gen_traj.frames());
    } else if (map_cmd->parsed()) {
      const RunConfig cfg = resolve(common, {});
      prepare_out(common.out, cfg);
      const Trajectory wrist =
          single_joint(read_trajectory_csv(input, cfg.synth.frame_period), joint);
      Trajectory ee = map_workspace(wrist, cfg.workspace);
      ee.set_frame_period(cfg.playback_period);
      write_trajectory_csv((out / "robot_ee.csv").string(), ee);
    } else if (baseline_cmd->parsed()) {
      const RunConfig cfg = resolve(common, {});
      prepare_out(common.out, cfg);
      const Trajectory ee = single_joint(read_trajectory_csv(input, cfg.playback_period), "ee");
      write_comparison(out, baselines_for(ee, cfg));
    } else if (metrics_cmd->parsed()) {
      const RunConfig cfg = resolve(common, {});
      prepare_out(common.out, cfg);
      std::vector<ComparisonRow> rows;
      for (const auto& path : inputs) {
        const Trajectory t = single_joint(read_trajectory_csv(path, cfg.synth.frame_period), joint);
        rows.push_back({fs::path(path).stem().string(), path_metrics(t, split.value_or(turning_frame(t)))});
      }
      write_with(out / "metrics.csv", [&](std::ostream& o) { write_comparison_csv(o, rows); });
      write_comparison_csv(std::cout, rows);
    } else if (eval_cmd->parsed()) {
      const Checkpoint ckpt = load_checkpoint(checkpoint);
      const RunConfig cfg = resolve(common, [&](RunConfig& c) {
        c.model = ckpt.config;
        if (!held_out.empty()) c.data.held_out_positions = {held_out.begin(), held_out.end()};
      });
      prepare_out(common.out, cfg);
      const auto corpus = read_corpus(data_dir, cfg.synth.frame_period);
      const auto pairs = make_pairs(corpus, cfg.model.input_frames, cfg.model.output_frames,
                                    cfg.model.rollouts);
      const auto [train_pairs, test_pairs] = split_corpus(pairs, cfg.data.held_out_positions);
      const double train_err = evaluate(train_pairs, ckpt.params, cfg.model, cfg.train.threads);
      const double test_err = evaluate(test_pairs, ckpt.params, cfg.model, cfg.train.threads);

      std::optional<Trajectory> first_generated;
      double worst_mouth = 0.0;
      write_with(out / "heldout.csv", [&](std::ostream& o) {
        o << "participant,position_index,seed,mpjpe_m,mouth_distance_m\n";
        for (std::size_t i = 0; i < corpus.size(); ++i) {
          if (!cfg.data.held_out_positions.count(corpus[i].spec.position_index)) continue;
          const Trajectory g = generate_motion(corpus[i].trajectory, ckpt.params, cfg.model);
          const double err = mpjpe(to_model_tensor(g), to_model_tensor(corpus[i].trajectory.frames_range(
                                                           cfg.model.input_frames,
                                                           corpus[i].trajectory.frames())));
          const double mouth = mouth_distance(g, cfg);
          worst_mouth = std::max(worst_mouth, mouth);
          o << corpus[i].spec.participant_id << ',' << corpus[i].spec.position_index << ','
            << corpus[i].spec.noise_seed << ',' << format_double(err) << ','
            << format_double(mouth) << '\n';
          if (!first_generated) first_generated = g;
        }
      });
      write_trajectory_csv((out / "gnn_generated.csv").string(), *first_generated);
      const auto cmp = compare_in_robot_space(first_generated->joint_view(kWristJoint), cfg);
      write_comparison(out, cmp);
      Json summary = {{"train_mpjpe_m", train_err},
                      {"test_mpjpe_m", test_err},
                      {"max_mouth_distance_m", worst_mouth}};
      write_text(out / "summary.json", summary.dump(2) + "\n");
      fmt::print(stderr, "train {:.6f} m  held-out {:.6f} m  worst mouth distance {:.4f} m\n",
                 train_err, test_err, worst_mouth);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"armgnn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace armgnn
