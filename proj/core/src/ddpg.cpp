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

#include "uwarm/ddpg.hpp"

#include <algorithm>
#include <cmath>

#include "uwarm/error.hpp"

namespace uwarm {
namespace {

Eigen::MatrixXd stack(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) {
  Eigen::MatrixXd x(states.rows() + actions.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

}  // namespace

void DdpgHyper::validate() const {
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0)) throw Error(ErrorCode::kConfig, "learning rates");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0) || lr_decay_steps < 1) {
    throw Error(ErrorCode::kConfig, "learning-rate decay");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::kConfig, "gamma must be in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::kConfig, "tau must be in (0, 1]");
  if (batch < 1) throw Error(ErrorCode::kConfig, "batch must be >= 1");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 &&
        epsilon_end <= 1.0)) {
    throw Error(ErrorCode::kConfig, "epsilon must be in [0, 1]");
  }
  if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0)) {
    throw Error(ErrorCode::kConfig, "epsilon_decay_fraction must be in (0, 1]");
  }
  if (buffer_capacity < batch) throw Error(ErrorCode::kConfig, "buffer smaller than batch");
  if (warmup < batch) throw Error(ErrorCode::kConfig, "warmup smaller than batch");
  if (!(ou_theta > 0.0) || !(ou_sigma >= 0.0) || !(ou_dt > 0.0)) {
    throw Error(ErrorCode::kConfig, "OU parameters");
  }
}

LearningRates lr_schedule(const DdpgHyper& hyper, std::int64_t step_count) {
  if (step_count < 0) throw Error(ErrorCode::kConfig, "negative step count");
  const double factor =
      std::pow(hyper.lr_decay, static_cast<double>(step_count / hyper.lr_decay_steps));
  return {hyper.lr_actor * factor, hyper.lr_critic * factor};
}

double epsilon_schedule(const DdpgHyper& hyper, int epoch, int total_epochs) {
  const double span = hyper.epsilon_decay_fraction * std::max(total_epochs, 1);
  const double frac = std::clamp(static_cast<double>(epoch) / span, 0.0, 1.0);
  return hyper.epsilon_start + (hyper.epsilon_end - hyper.epsilon_start) * frac;
}

double critic_update(MlpParams& critic, const MlpParams& actor_target,
                     const MlpParams& critic_target, const Batch& batch, double gamma, double lr) {
  const Eigen::MatrixXd next_actions = forward(actor_target, batch.next_states);
  const Eigen::MatrixXd next_q = forward(critic_target, stack(batch.next_states, next_actions));
  const Eigen::RowVectorXd targets =
      batch.rewards.array() + gamma * (1.0 - batch.terminal.array()) * next_q.row(0).array();

  const ForwardCache cache = forward_cached(critic, stack(batch.states, batch.actions));
  const Eigen::RowVectorXd err = cache.output.row(0) - targets;
  const double n = static_cast<double>(batch.size());
  const double loss = err.squaredNorm() / n;
  if (!std::isfinite(loss)) throw Error(ErrorCode::kTrainingDiverged, "non-finite TD loss");

  const Eigen::MatrixXd upstream = (2.0 / n) * err;
  adam_step(critic, backprop(critic, cache, upstream, true), lr);
  return loss;
}

MlpGradients actor_gradient(const MlpParams& actor, const MlpParams& critic,
                            const Eigen::MatrixXd& states) {
  const ForwardCache actor_cache = forward_cached(actor, states);
  const ForwardCache critic_cache = forward_cached(critic, stack(states, actor_cache.output));
  const double n = static_cast<double>(states.cols());
  const Eigen::MatrixXd upstream = Eigen::MatrixXd::Constant(1, states.cols(), -1.0 / n);
  const MlpGradients dq = backprop(critic, critic_cache, upstream, false);
  return backprop(actor, actor_cache, dq.input.bottomRows(actor.output_dim()), true);
}

double actor_update(MlpParams& actor, const MlpParams& critic, const Batch& batch, double lr) {
  const ForwardCache actor_cache = forward_cached(actor, batch.states);
  const ForwardCache critic_cache =
      forward_cached(critic, stack(batch.states, actor_cache.output));
  const double n = static_cast<double>(batch.size());
  const double mean_q = critic_cache.output.mean();
  if (!std::isfinite(mean_q)) throw Error(ErrorCode::kTrainingDiverged, "non-finite Q estimate");

  const Eigen::MatrixXd upstream = Eigen::MatrixXd::Constant(1, batch.size(), -1.0 / n);
  const MlpGradients dq = backprop(critic, critic_cache, upstream, false);
  adam_step(actor, backprop(actor, actor_cache, dq.input.bottomRows(actor.output_dim()), true), lr);
  return mean_q;
}

ActionVector act(const MlpParams& actor, const StateVector& state, OuNoise& noise,
                 double epsilon, bool explore, double dt, Rng& rng) {
  const ActionVector greedy = actor_forward(actor, state);
  if (!explore) return greedy;
  const Vec4 n = noise.sample(dt, rng);
  return (greedy + epsilon * n).cwiseMax(-1.0).cwiseMin(1.0);
}

std::vector<int> actor_layer_sizes(const DdpgHyper& hyper) {
  std::vector<int> sizes{kStateDim};
  sizes.insert(sizes.end(), hyper.actor_hidden.begin(), hyper.actor_hidden.end());
  sizes.push_back(kActionDim);
  return sizes;
}

std::vector<int> critic_layer_sizes(const DdpgHyper& hyper) {
  std::vector<int> sizes{kStateDim + kActionDim};
  sizes.insert(sizes.end(), hyper.critic_hidden.begin(), hyper.critic_hidden.end());
  sizes.push_back(1);
  return sizes;
}

DdpgAgent::DdpgAgent(const DdpgHyper& hyper, std::uint64_t seed)
    : hyper_(hyper), rng_(seed), buffer_(hyper.buffer_capacity) {
  hyper_.validate();
  actor_ = make_mlp(actor_layer_sizes(hyper_), Activation::kTanh, rng_, hyper_.final_layer_init);
  critic_ =
      make_mlp(critic_layer_sizes(hyper_), Activation::kIdentity, rng_, hyper_.final_layer_init);
  actor_target_ = actor_;
  critic_target_ = critic_;
  noise_.theta = hyper_.ou_theta;
  noise_.sigma = hyper_.ou_sigma;
  noise_.reset();
}

ActionVector DdpgAgent::act(const StateVector& state, double epsilon, bool explore, double dt) {
  return uwarm::act(actor_, state, noise_, epsilon, explore, dt, rng_);
}

std::optional<UpdateStats> DdpgAgent::train_step() {
  if (buffer_.size() < hyper_.warmup) return std::nullopt;
  const Batch batch = buffer_.sample_batch(hyper_.batch, rng_);
  const LearningRates lr = lr_schedule(hyper_, train_steps_);
  UpdateStats stats{};
  stats.td_loss =
      critic_update(critic_, actor_target_, critic_target_, batch, hyper_.gamma, lr.critic);
  stats.mean_q = actor_update(actor_, critic_, batch, lr.actor);
  soft_update(critic_target_, critic_, hyper_.tau);
  soft_update(actor_target_, actor_, hyper_.tau);
  ++train_steps_;
  return stats;
}

void DdpgAgent::set_networks(MlpParams actor, MlpParams critic, MlpParams actor_target,
                             MlpParams critic_target, std::int64_t train_steps) {
  if (!actor.same_shape(actor_) || !critic.same_shape(critic_) ||
      !actor_target.same_shape(actor_) || !critic_target.same_shape(critic_)) {
    throw Error(ErrorCode::kShapeMismatch, "checkpoint networks do not match hyperparameters");
  }
  actor_ = std::move(actor);
  critic_ = std::move(critic);
  actor_target_ = std::move(actor_target);
  critic_target_ = std::move(critic_target);
  train_steps_ = train_steps;
}

}  // namespace uwarm
