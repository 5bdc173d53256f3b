// Copyright 2026 The uwarm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uwarm/config.hpp"
#include "uwarm/error.hpp"
#include "uwarm/harness.hpp"
#include "uwarm/plots.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

uwarm::Config config_or_default(const std::string& path) {
  return path.empty() ? uwarm::Config{} : uwarm::load_config(path);
}

void print_report(const uwarm::EvaluationResult& r) {
  std::cout << uwarm::evaluation_summary(r);
}

int run_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              std::optional<int> epochs, const std::string& out) {
  uwarm::Config config = uwarm::load_config(config_path);
  if (seed) config.train.seed = *seed;
  if (epochs) config.train.epochs = *epochs;
  if (!out.empty()) config.train.checkpoint_dir = out;
  const uwarm::TrainResult result = uwarm::train(config, &std::cout);
  std::cout << "final checkpoint: " << result.final_checkpoint.string() << '\n'
            << "best checkpoint: " << result.best_checkpoint.string() << '\n';
  return kExitOk;
}

int run_eval(const std::string& scenario_path, const std::string& checkpoint,
             const std::string& out) {
  uwarm::Config config = uwarm::load_config(scenario_path);
  fs::path ckpt = checkpoint.empty() ? config.scenario.checkpoint : fs::path(checkpoint);
  auto controller = uwarm::make_controller(config, config.scenario.controller, ckpt);
  print_report(uwarm::evaluate_to_dir(config, *controller, out));
  return kExitOk;
}

int run_compare(const std::string& config_path, const std::string& checkpoint,
                const std::string& out) {
  uwarm::Config config = uwarm::load_config(config_path);
  fs::path ckpt = checkpoint.empty() ? config.compare.checkpoint : fs::path(checkpoint);
  auto rl = uwarm::make_controller(config, uwarm::ControllerKind::kRl, ckpt);
  auto mpc = uwarm::make_controller(config, uwarm::ControllerKind::kMpc, {});
  const uwarm::Comparison c = uwarm::compare_to_dir(config, *rl, *mpc, out);
  std::cout << uwarm::comparison_table(c)
            << "directional check: " << (c.directional_ok() ? "pass" : "fail") << '\n';
  if (!c.directional_ok()) {
    std::cout << "tuning report: " << (fs::path(out) / "tuning_report.md").string() << '\n';
  }
  return kExitOk;
}

int run_demo(const std::string& goal_text, const std::string& config_path,
             const std::string& checkpoint, const std::string& out) {
  uwarm::Config config = config_or_default(config_path);
  config.scenario.name = "demo";
  config.scenario.goal = uwarm::parse_vec4(goal_text);
  config.scenario.repeats = 1;
  const auto kind = checkpoint.empty() ? uwarm::ControllerKind::kMpc : uwarm::ControllerKind::kRl;
  auto controller = uwarm::make_controller(config, kind, checkpoint);
  std::cout << "controller = " << controller->name() << '\n';
  print_report(uwarm::evaluate_to_dir(config, *controller, out));
  std::cout << "plots written to " << out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned and model-predictive joint control for a simulated underwater arm"};
  app.require_subcommand(0, 1);

  bool print_config = false;
  std::string print_config_file;
  app.add_flag("--print-config", print_config, "Print the effective configuration as INI");
  app.add_option("--config", print_config_file, "Config file for --print-config");

  std::string train_config;
  std::optional<std::uint64_t> train_seed;
  std::optional<int> train_epochs;
  std::string train_out;
  auto* train = app.add_subcommand("train", "Train the actor-critic agent");
  train->add_option("--config", train_config, "Config file")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", train_seed, "Override train.seed");
  train->add_option("--epochs", train_epochs, "Override train.epochs")->check(CLI::PositiveNumber);
  train->add_option("--out", train_out, "Override train.checkpoint_dir");

  std::string eval_scenario, eval_checkpoint, eval_out;
  auto* eval = app.add_subcommand("eval", "Evaluate a controller on a scenario");
  eval->add_option("--scenario", eval_scenario, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", eval_checkpoint, "Trained checkpoint (learned controller)");
  eval->add_option("--out", eval_out, "Output directory")->required();

  std::string compare_config, compare_checkpoint, compare_out;
  auto* compare = app.add_subcommand("compare", "Paired learned-vs-MPC campaign");
  compare->add_option("--config", compare_config, "Config file")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--checkpoint", compare_checkpoint, "Override compare.checkpoint");
  compare->add_option("--out", compare_out, "Output directory")->required();

  std::string demo_goal, demo_config, demo_checkpoint, demo_out = "demo_out";
  auto* demo = app.add_subcommand("demo", "Run one episode to a goal and plot it");
  demo->add_option("--goal", demo_goal, "Joint goal a,b,c,d in rad")->required();
  demo->add_option("--config", demo_config, "Config file")->check(CLI::ExistingFile);
  demo->add_option("--checkpoint", demo_checkpoint, "Use the learned controller (default MPC)");
  demo->add_option("--out", demo_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (print_config) {
      std::cout << uwarm::config_to_ini(config_or_default(print_config_file));
      return kExitOk;
    }
    if (*train) return run_train(train_config, train_seed, train_epochs, train_out);
    if (*eval) return run_eval(eval_scenario, eval_checkpoint, eval_out);
    if (*compare) return run_compare(compare_config, compare_checkpoint, compare_out);
    if (*demo) return run_demo(demo_goal, demo_config, demo_checkpoint, demo_out);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const uwarm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_numeric_failure() ? kExitNumeric : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
