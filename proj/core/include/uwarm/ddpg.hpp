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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "uwarm/mlp.hpp"
#include "uwarm/ou_noise.hpp"
#include "uwarm/replay_buffer.hpp"
#include "uwarm/types.hpp"

namespace uwarm {

struct DdpgHyper {
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  double lr_decay = 0.96;
  std::int64_t lr_decay_steps = 100000;
  double gamma = 0.99;
  double tau = 0.001;
  std::size_t batch = 64;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  double epsilon_decay_fraction = 0.8;  // of the configured epochs
  std::size_t buffer_capacity = 1000000;
  std::size_t warmup = 1000;
  std::vector<int> actor_hidden = {400, 300};
  std::vector<int> critic_hidden = {400, 300};
  double final_layer_init = 3e-3;
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  double ou_dt = 1.0;  // noise time step, in control steps

  void validate() const;
};

struct LearningRates {
  double actor;
  double critic;
};

// Each rate times lr_decay^floor(step / lr_decay_steps).
LearningRates lr_schedule(const DdpgHyper& hyper, std::int64_t step_count);

// Linear from epsilon_start to epsilon_end over the first
// epsilon_decay_fraction of the epochs, constant afterwards.
double epsilon_schedule(const DdpgHyper& hyper, int epoch, int total_epochs);

// One Adam step on the online critic towards
//   y = r + gamma (1 - terminal) Q'(s', pi'(s')).
// Returns the mean squared TD error before the step.
double critic_update(MlpParams& critic, const MlpParams& actor_target,
                     const MlpParams& critic_target, const Batch& batch, double gamma, double lr);

// One Adam step on the actor ascending mean_i Q(s_i, pi(s_i)); the critic is
// read only. Returns the mean Q before the step.
double actor_update(MlpParams& actor, const MlpParams& critic, const Batch& batch, double lr);

// The actor's parameter gradient of -mean Q, chained through dQ/da.
MlpGradients actor_gradient(const MlpParams& actor, const MlpParams& critic,
                            const Eigen::MatrixXd& states);

// explore: clamp(pi(s) + epsilon * OU, -1, 1). Otherwise pi(s) and the noise
// process is not advanced.
ActionVector act(const MlpParams& actor, const StateVector& state, OuNoise& noise,
                 double epsilon, bool explore, double dt, Rng& rng);

struct UpdateStats {
  double td_loss;
  double mean_q;
};

// Online and target networks plus replay and exploration state.
class DdpgAgent {
 public:
  DdpgAgent(const DdpgHyper& hyper, std::uint64_t seed);

  ActionVector act(const StateVector& state, double epsilon, bool explore, double dt);
  void reset_noise() { noise_.reset(); }
  void remember(const Transition& t) { buffer_.push(t); }

  // One critic update, one actor update and the soft target updates, once
  // the buffer holds `warmup` transitions. Throws kTrainingDiverged on a
  // non-finite loss.
  std::optional<UpdateStats> train_step();

  const DdpgHyper& hyper() const { return hyper_; }
  const MlpParams& actor() const { return actor_; }
  const MlpParams& critic() const { return critic_; }
  const MlpParams& actor_target() const { return actor_target_; }
  const MlpParams& critic_target() const { return critic_target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::int64_t train_steps() const { return train_steps_; }

  // Used when restoring a checkpoint.
  void set_networks(MlpParams actor, MlpParams critic, MlpParams actor_target,
                    MlpParams critic_target, std::int64_t train_steps);

 private:
  DdpgHyper hyper_;
  Rng rng_;
  MlpParams actor_;
  MlpParams critic_;
  MlpParams actor_target_;
  MlpParams critic_target_;
  ReplayBuffer buffer_;
  OuNoise noise_;
  std::int64_t train_steps_ = 0;
};

std::vector<int> actor_layer_sizes(const DdpgHyper& hyper);
std::vector<int> critic_layer_sizes(const DdpgHyper& hyper);

}  // namespace uwarm
