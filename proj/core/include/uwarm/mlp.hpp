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
#include <vector>

#include <Eigen/Core>

#include "uwarm/types.hpp"

namespace uwarm {

enum class Activation { kIdentity, kTanh, kLeakyRelu };

inline constexpr double kLeakySlope = 0.01;

// One affine layer with its Adam moment accumulators.
struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
  Eigen::MatrixXd m_weight;
  Eigen::MatrixXd v_weight;
  Eigen::VectorXd m_bias;
  Eigen::VectorXd v_bias;
};

// Fully connected network: LeakyReLU on every hidden layer, a configurable
// activation on the output layer. Samples are stored column-wise.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<DenseLayer> layers;
  Activation output_activation = Activation::kIdentity;
  std::int64_t step_count = 0;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }

  bool same_shape(const MlpParams& other) const;
  bool all_finite() const;
};

// All parameters and moments zero.
MlpParams make_zero_mlp(const std::vector<int>& layer_sizes, Activation output);

// Fan-in uniform initialization; the output layer is drawn from
// U(-final_scale, final_scale) so tanh outputs start unsaturated.
MlpParams make_mlp(const std::vector<int>& layer_sizes, Activation output, Rng& rng,
                   double final_scale = 3e-3);

struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;           // input to each layer
  std::vector<Eigen::MatrixXd> pre_activations;  // affine output of each layer
  Eigen::MatrixXd output;
};

Eigen::MatrixXd forward(const MlpParams& params, const Eigen::MatrixXd& inputs);
ForwardCache forward_cached(const MlpParams& params, const Eigen::MatrixXd& inputs);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;
  Eigen::MatrixXd input;  // d loss / d inputs, same shape as the batch
};

// Reverse-mode pass for a scalar loss whose gradient with respect to the
// network outputs is `upstream`. Parameter gradients are skipped when only
// the input gradient is needed.
MlpGradients backprop(const MlpParams& params, const ForwardCache& cache,
                      const Eigen::MatrixXd& upstream, bool parameter_gradients = true);

MlpGradients backprop(const MlpParams& params, const Eigen::MatrixXd& inputs,
                      const Eigen::MatrixXd& upstream);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam, in place. Increments step_count.
void adam_step(MlpParams& params, const MlpGradients& grads, double lr, const AdamConfig& cfg = {});

// target <- tau * online + (1 - tau) * target for every weight and bias.
void soft_update(MlpParams& target, const MlpParams& online, double tau);

// Actor and critic forward helpers used by the agent.
ActionVector actor_forward(const MlpParams& actor, const StateVector& state);
double critic_forward(const MlpParams& critic, const StateVector& state, const ActionVector& action);

}  // namespace uwarm
