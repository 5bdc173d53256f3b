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

#include <filesystem>
#include <string>
#include <vector>

#include "uwarm/types.hpp"

namespace uwarm {

// Solver diagnostics for model-based controllers, one entry per control step.
struct SolverTrace {
  int iterations = 0;
  double cost = 0.0;
  bool converged = false;
};

// Row k holds the true state at t = k dt, the torque applied over
// [k dt, (k + 1) dt) and the reward earned by that step.
struct EpisodeLog {
  double dt = 0.05;
  Vec4 q_req = Vec4::Zero();
  std::vector<Vec4> q;
  std::vector<Vec4> qdot;
  std::vector<Vec4> tau_applied;
  std::vector<double> reward;
  bool violated = false;
  std::vector<SolverTrace> solver;  // empty for the learned controller

  std::size_t size() const { return q.size(); }
  bool empty() const { return q.empty(); }
  double duration() const { return dt * static_cast<double>(size()); }

  void append(const Vec4& q_t, const Vec4& qdot_t, const Vec4& tau_t, double reward_t);

  // Throws kEmptyLog or kInvalidState.
  void validate() const;
};

struct MetricsConfig {
  double msse_window = 2.0;   // s
  double settle_band = 0.02;  // fraction of the step
  double settle_floor = 0.01;  // rad
  double min_step = 0.01;      // rad; smaller steps are ignored by overshoot
};

struct MetricsReport {
  double energy = 0.0;         // J
  double rmse = 0.0;           // rad
  double mie = 0.0;            // rad s
  double msse = 0.0;           // rad
  double overshoot = 0.0;      // percent
  double settling_time = 0.0;  // s
  bool never_settled = false;
};

// sum_t sum_i |tau_i qdot_i| dt
double energy(const EpisodeLog& log);
// Root mean square over all samples and joints of q - q_req.
double rmse(const EpisodeLog& log);
// Mean over joints of the rectangle-rule integral of |q_i - q_req_i|.
double mie(const EpisodeLog& log);
// Mean over joints of mean |e_i| over the final `window` seconds.
double msse(const EpisodeLog& log, double window = 2.0);
// Largest per-joint overshoot in percent of the step, over joints whose step
// q_req - q[0] exceeds min_step in magnitude.
double overshoot(const EpisodeLog& log, double min_step = 0.01);

struct Settling {
  double time = 0.0;  // max over joints; episode duration when never settled
  bool settled = true;
  Vec4 per_joint = Vec4::Zero();
  Eigen::Matrix<bool, kJoints, 1> joint_settled = Eigen::Matrix<bool, kJoints, 1>::Constant(true);
};

// Per joint, the first sample time after which |e_i| stays within
// max(band |step_i|, floor) for the rest of the log.
Settling settling_time(const EpisodeLog& log, double band = 0.02, double floor = 0.01);

MetricsReport compute_metrics(const EpisodeLog& log, const MetricsConfig& config = {});

// Arithmetic mean of each metric; never_settled if any input never settled.
MetricsReport mean_report(const std::vector<MetricsReport>& reports);

std::string format_report(const MetricsReport& report);
MetricsReport parse_report(const std::string& text);

// CSV schema: t,q1..q4,qd1..qd4,tau1..tau4,ref1..ref4,reward
std::string log_to_csv(const EpisodeLog& log);
EpisodeLog log_from_csv(const std::string& text);
void write_log_csv(const EpisodeLog& log, const std::filesystem::path& path);
EpisodeLog read_log_csv(const std::filesystem::path& path);

}  // namespace uwarm
