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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "uwarm/config.hpp"
#include "uwarm/environment.hpp"
#include "uwarm/metrics.hpp"
#include "uwarm/mlp.hpp"

namespace uwarm {

// Independent child seed for a named stream (splitmix64 of seed ^ hash(tag)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

// ---- controllers ----------------------------------------------------------

class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string name() const = 0;
  virtual void reset() {}
  virtual bool has_solver_trace() const { return false; }
  // Advances `env` by one control step.
  virtual EnvStep act(Environment& env, SolverTrace* trace) = 0;
};

class PolicyController final : public Controller {
 public:
  explicit PolicyController(MlpParams actor);
  std::string name() const override { return "RL"; }
  EnvStep act(Environment& env, SolverTrace* trace) override;

 private:
  MlpParams actor_;
};

// Plans on the nominal model from the sensed state; the plant may differ.
class MpcController final : public Controller {
 public:
  MpcController(MpcConfig config, ArmModel nominal);
  std::string name() const override { return "MPC"; }
  void reset() override { u_prev_.setZero(); }
  bool has_solver_trace() const override { return true; }
  EnvStep act(Environment& env, SolverTrace* trace) override;

 private:
  MpcConfig config_;
  ArmModel nominal_;
  Vec4 u_prev_ = Vec4::Zero();
};

std::unique_ptr<Controller> make_controller(const Config& config, ControllerKind kind,
                                            const std::filesystem::path& checkpoint);

// Resets `env` to `goal` and runs the controller until the episode ends.
EpisodeLog run_episode(Environment& env, Controller& controller, const Vec4& goal);

// ---- training -------------------------------------------------------------

struct EpochRecord {
  int epoch = 0;
  double episode_return = 0.0;
  double td_loss = 0.0;  // mean over the epoch's updates, 0 before warmup
  double mean_q = 0.0;
  double epsilon = 0.0;
  int violations = 0;
  double final_error = 0.0;  // max |q - q_req| at the end of the epoch
};

struct ProbeRecord {
  int epoch = 0;
  double episode_return = 0.0;
  bool violated = false;
  MetricsReport report;
};

struct TrainResult {
  std::vector<EpochRecord> curve;
  std::vector<ProbeRecord> probes;
  std::filesystem::path final_checkpoint;
  std::filesystem::path best_checkpoint;
};

// Writes into config.train.checkpoint_dir:
//   training_curve.csv, probe.csv (when eval_every > 0),
//   epoch_NNNNN.ckpt every checkpoint_every epochs, best.ckpt, final.ckpt.
// On divergence the curve so far is flushed, existing checkpoints are kept and
// kTrainingDiverged is rethrown.
TrainResult train(const Config& config, std::ostream* progress = nullptr);

std::string training_curve_csv(const std::vector<EpochRecord>& curve);

// ---- evaluation -----------------------------------------------------------

struct EpisodeResult {
  Vec4 goal;
  EpisodeLog log;
  MetricsReport report;
};

struct EvaluationResult {
  std::vector<EpisodeResult> episodes;
  MetricsReport mean;
  int violations = 0;  // episodes with a bound violation
  int settled = 0;     // episodes where every joint settled
};

// Base degradation from the config, with freshly drawn mass/damping scales for
// `index` when `randomize` is set.
Degradation trial_degradation(const Config& config, bool randomize, std::uint64_t seed,
                              std::uint64_t index);

EvaluationResult evaluate(const Config& config, Controller& controller);

// Writes episode_NN/{trace.csv,positions.svg,torques.svg,errors.svg,report.txt}
// and summary.txt under `out_dir`.
EvaluationResult evaluate_to_dir(const Config& config, Controller& controller,
                                 const std::filesystem::path& out_dir);

std::string evaluation_summary(const EvaluationResult& result);

// ---- comparison -----------------------------------------------------------

struct ComparisonRow {
  std::string name;
  MetricsReport mean;
  std::vector<EpisodeResult> trials;
  int violations = 0;
};

struct Comparison {
  std::vector<Vec4> goals;
  ComparisonRow first;
  ComparisonRow second;
  bool overshoot_ok = false;  // first.OS < second.OS
  bool msse_ok = false;       // first.MSSE < second.MSSE

  bool directional_ok() const { return overshoot_ok && msse_ok; }
};

std::vector<Vec4> comparison_goals(const Config& config);

// Goal-matched campaign: trial k uses the same goal, plant degradation and
// sensor-noise stream for both controllers.
Comparison compare(const Config& config, Controller& first, Controller& second);

std::string comparison_table(const Comparison& c);
std::string tuning_report(const Config& config, const Comparison& c);

// Writes table.txt, trials.csv, report.txt and, when the directional check
// fails, tuning_report.md.
Comparison compare_to_dir(const Config& config, Controller& first, Controller& second,
                          const std::filesystem::path& out_dir);

}  // namespace uwarm
