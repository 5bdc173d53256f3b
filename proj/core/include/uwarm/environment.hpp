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
#include <optional>

#include "uwarm/dynamics.hpp"
#include "uwarm/types.hpp"

namespace uwarm {

// How the joint-error vector enters the Gaussian reward.
enum class RewardMode {
  kNorm,      // one Gaussian of the Euclidean error norm
  kPerJoint,  // mean of independent per-joint Gaussians
};

struct RewardParams {
  double sigma = 0.018;             // rad
  double violation_penalty = -10.0;
  Vec4 x_min = Vec4::Zero();
  Vec4 x_max = Vec4::Zero();
  RewardMode mode = RewardMode::kNorm;

  // Bounds equal to the simulator joint limits.
  static RewardParams for_model(const ArmModel& model);

  void validate() const;
};

// True when every joint lies strictly inside (x_min, x_max).
bool within_bounds(const RewardParams& params, const Vec4& q);

// -1 + exp(-0.5 (|q - q_req| / sigma)^2) inside the bounds, the violation
// penalty otherwise.
double reward(const RewardParams& params, const Vec4& q, const Vec4& q_req);

// Uniform over [position_min + margin, position_max - margin] per joint.
Vec4 sample_goal(const ArmModel& model, double margin, Rng& rng);

// What the agent sees, in physical units.
struct AgentState {
  Vec4 q_obs = Vec4::Zero();
  Vec4 qdot_obs = Vec4::Zero();
  Vec4 q_req = Vec4::Zero();
};

// Affine map to network inputs: positions and goals to [-1, 1] over the
// joint range, velocities divided by the velocity limit.
struct StateScaling {
  Vec4 center;
  Vec4 half_range;
  Vec4 velocity_scale;

  static StateScaling for_model(const ArmModel& model);

  StateVector normalize(const AgentState& state) const;
};

struct Transition {
  StateVector state;
  ActionVector action;
  double reward = 0.0;
  StateVector next_state;
  bool terminal = false;
};

struct EnvConfig {
  double dt_control = kDefaultControlStep;
  double dt_physics = kDefaultPhysicsStep;
  double episode_seconds = 20.0;
  Vec4 home_pose = Vec4::Zero();
  double goal_margin = 0.05;
  bool terminate_on_violation = false;
  RewardParams reward;

  int horizon_steps() const;
  void validate(const ArmModel& model) const;
};

struct EnvStep {
  AgentState state;
  double reward = 0.0;
  bool terminal = false;
  bool violated = false;
  Vec4 tau_applied = Vec4::Zero();
};

// Episodic wrapper around the simulator. The plant is the nominal model with
// the degradation overlay applied; actions are normalized torques scaled by
// the nominal torque limits before the (possibly reduced) saturation.
class Environment {
 public:
  Environment(ArmModel nominal, Degradation degradation, EnvConfig config, std::uint64_t seed);

  AgentState reset(std::optional<Vec4> goal = std::nullopt);
  EnvStep step(const ActionVector& action);

  StateVector normalized(const AgentState& state) const { return scaling_.normalize(state); }

  const AgentState& agent_state() const { return agent_state_; }
  const JointState& true_state() const { return state_; }
  const Vec4& goal() const { return goal_; }
  const ArmModel& nominal_model() const { return nominal_; }
  const ArmModel& plant() const { return plant_; }
  const Degradation& degradation() const { return degradation_; }
  const EnvConfig& config() const { return config_; }
  const StateScaling& scaling() const { return scaling_; }
  int steps_taken() const { return steps_; }
  bool done() const { return done_; }

  // Applies a raw torque, bypassing action normalization. Shares the episode
  // bookkeeping with step(); used by model-based controllers.
  EnvStep step_torque(const Vec4& tau);

 private:
  AgentState read_sensors();

  ArmModel nominal_;
  ArmModel plant_;
  Degradation degradation_;
  EnvConfig config_;
  StateScaling scaling_;
  Rng goal_rng_;
  Rng sensor_rng_;
  JointState state_;
  AgentState agent_state_;
  Vec4 goal_ = Vec4::Zero();
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace uwarm
