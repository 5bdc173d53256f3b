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

#include "uwarm/environment.hpp"

#include <cmath>

#include "uwarm/error.hpp"

namespace uwarm {

RewardParams RewardParams::for_model(const ArmModel& model) {
  RewardParams p;
  p.x_min = model.position_min;
  p.x_max = model.position_max;
  return p;
}

void RewardParams::validate() const {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kConfig, "reward sigma must be > 0");
  if (!(violation_penalty < -1.0)) {
    throw Error(ErrorCode::kConfig, "violation penalty must be < -1");
  }
  if (!((x_min.array() < x_max.array()).all())) {
    throw Error(ErrorCode::kConfig, "reward bounds need x_min < x_max");
  }
}

bool within_bounds(const RewardParams& params, const Vec4& q) {
  return (q.array() > params.x_min.array()).all() && (q.array() < params.x_max.array()).all();
}

double reward(const RewardParams& params, const Vec4& q, const Vec4& q_req) {
  if (!within_bounds(params, q)) return params.violation_penalty;
  const Vec4 err = (q - q_req) / params.sigma;
  if (params.mode == RewardMode::kNorm) {
    return -1.0 + std::exp(-0.5 * err.squaredNorm());
  }
  return -1.0 + (-0.5 * err.array().square()).exp().mean();
}

Vec4 sample_goal(const ArmModel& model, double margin, Rng& rng) {
  Vec4 goal;
  for (int i = 0; i < kJoints; ++i) {
    std::uniform_real_distribution<double> dist(model.position_min[i] + margin,
                                                model.position_max[i] - margin);
    goal[i] = dist(rng);
  }
  return goal;
}

StateScaling StateScaling::for_model(const ArmModel& model) {
  StateScaling s;
  s.center = 0.5 * (model.position_min + model.position_max);
  s.half_range = 0.5 * (model.position_max - model.position_min);
  s.velocity_scale = model.velocity_limit;
  return s;
}

StateVector StateScaling::normalize(const AgentState& state) const {
  StateVector x;
  x.segment<kJoints>(0) = (state.q_obs - center).cwiseQuotient(half_range);
  x.segment<kJoints>(kJoints) = state.qdot_obs.cwiseQuotient(velocity_scale);
  x.segment<kJoints>(2 * kJoints) = (state.q_req - center).cwiseQuotient(half_range);
  return x;
}

int EnvConfig::horizon_steps() const {
  return static_cast<int>(std::lround(episode_seconds / dt_control));
}

void EnvConfig::validate(const ArmModel& model) const {
  if (!(dt_control > 0.0) || !(dt_physics > 0.0) || dt_physics > dt_control) {
    throw Error(ErrorCode::kConfig, "need 0 < dt_physics <= dt_control");
  }
  const double steps = episode_seconds / dt_control;
  if (!(episode_seconds > 0.0) || std::abs(steps - std::round(steps)) > 1e-9) {
    throw Error(ErrorCode::kConfig, "episode_seconds must be a multiple of dt_control");
  }
  if (!(goal_margin >= 0.0)) throw Error(ErrorCode::kConfig, "goal_margin must be >= 0");
  for (int i = 0; i < kJoints; ++i) {
    if (model.position_max[i] - model.position_min[i] <= 2.0 * goal_margin) {
      throw Error(ErrorCode::kConfig, "goal margin leaves an empty workspace");
    }
    if (home_pose[i] < model.position_min[i] || home_pose[i] > model.position_max[i]) {
      throw Error(ErrorCode::kConfig, "home pose outside joint limits");
    }
  }
  reward.validate();
}

Environment::Environment(ArmModel nominal, Degradation degradation, EnvConfig config,
                         std::uint64_t seed)
    : nominal_(std::move(nominal)),
      degradation_(degradation),
      config_(std::move(config)),
      scaling_(StateScaling::for_model(nominal_)) {
  nominal_.validate();
  degradation_.validate();
  config_.validate(nominal_);
  plant_ = apply_degradation(nominal_, degradation_);
  std::seed_seq goal_seq{seed, std::uint64_t{0x676f616c}};
  goal_rng_.seed(goal_seq);
  std::seed_seq sensor_seq{seed, degradation_.rng_seed, std::uint64_t{0x73656e73}};
  sensor_rng_.seed(sensor_seq);
}

AgentState Environment::read_sensors() {
  const Observation obs = observe(state_, degradation_, sensor_rng_);
  agent_state_.q_obs = obs.q;
  agent_state_.qdot_obs = obs.qdot;
  agent_state_.q_req = goal_;
  return agent_state_;
}

AgentState Environment::reset(std::optional<Vec4> goal) {
  if (goal) {
    for (int i = 0; i < kJoints; ++i) {
      if ((*goal)[i] < nominal_.position_min[i] || (*goal)[i] > nominal_.position_max[i]) {
        throw Error(ErrorCode::kConfig, "goal outside joint limits");
      }
    }
    goal_ = *goal;
  } else {
    goal_ = sample_goal(nominal_, config_.goal_margin, goal_rng_);
  }
  state_ = JointState{config_.home_pose, Vec4::Zero(), 0.0};
  steps_ = 0;
  done_ = false;
  return read_sensors();
}

EnvStep Environment::step(const ActionVector& action) {
  return step_torque(action.cwiseProduct(nominal_.torque_limits));
}

EnvStep Environment::step_torque(const Vec4& tau) {
  if (done_) throw Error(ErrorCode::kEpisodeFinished, "reset the environment first");
  const StepResult res =
      uwarm::step(plant_, degradation_, state_, tau, config_.dt_control, config_.dt_physics);
  state_ = res.state;
  ++steps_;

  EnvStep out;
  out.tau_applied = res.tau_applied;
  out.violated = res.hit_limit || !within_bounds(config_.reward, res.q_unclamped);
  out.reward = out.violated ? config_.reward.violation_penalty
                            : reward(config_.reward, res.q_unclamped, goal_);
  out.terminal = steps_ >= config_.horizon_steps() ||
                 (out.violated && config_.terminate_on_violation);
  done_ = out.terminal;
  out.state = read_sensors();
  return out;
}

}  // namespace uwarm
