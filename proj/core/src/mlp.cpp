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

#include "uwarm/mlp.hpp"

#include <cmath>
#include <string>

#include "uwarm/error.hpp"

namespace uwarm {
namespace {

void activate(Activation act, const Eigen::MatrixXd& z, Eigen::MatrixXd& out) {
  switch (act) {
    case Activation::kIdentity:
      out = z;
      break;
    case Activation::kTanh:
      out = z.array().tanh();
      break;
    case Activation::kLeakyRelu:
      out = z.array().max(kLeakySlope * z.array());
      break;
  }
}

// Multiplies `grad` in place by the activation derivative at `z`.
void activation_backward(Activation act, const Eigen::MatrixXd& z, Eigen::MatrixXd& grad) {
  switch (act) {
    case Activation::kIdentity:
      break;
    case Activation::kTanh:
      grad.array() *= 1.0 - z.array().tanh().square();
      break;
    case Activation::kLeakyRelu:
      grad.array() *= (z.array() > 0.0).select(1.0, Eigen::ArrayXXd::Constant(z.rows(), z.cols(), kLeakySlope));
      break;
  }
}

Activation layer_activation(const MlpParams& p, std::size_t layer) {
  return layer + 1 == p.layers.size() ? p.output_activation : Activation::kLeakyRelu;
}

void check_input(const MlpParams& p, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != p.input_dim()) {
    throw Error(ErrorCode::kDimension, "expected " + std::to_string(p.input_dim()) +
                                           " inputs, got " + std::to_string(inputs.rows()));
  }
  if (!inputs.allFinite()) throw Error(ErrorCode::kNumeric, "non-finite network input");
}

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw Error(ErrorCode::kDimension, "need at least input and output size");
  for (int s : sizes) {
    if (s < 1) throw Error(ErrorCode::kDimension, "layer sizes must be positive");
  }
}

}  // namespace

bool MlpParams::same_shape(const MlpParams& other) const {
  return layer_sizes == other.layer_sizes && output_activation == other.output_activation;
}

bool MlpParams::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite() || !l.m_weight.allFinite() ||
        !l.v_weight.allFinite() || !l.m_bias.allFinite() || !l.v_bias.allFinite()) {
      return false;
    }
  }
  return true;
}

MlpParams make_zero_mlp(const std::vector<int>& layer_sizes, Activation output) {
  check_sizes(layer_sizes);
  MlpParams p;
  p.layer_sizes = layer_sizes;
  p.output_activation = output;
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    const int in = layer_sizes[i];
    const int out = layer_sizes[i + 1];
    DenseLayer l;
    l.weight = Eigen::MatrixXd::Zero(out, in);
    l.bias = Eigen::VectorXd::Zero(out);
    l.m_weight = l.weight;
    l.v_weight = l.weight;
    l.m_bias = l.bias;
    l.v_bias = l.bias;
    p.layers.push_back(std::move(l));
  }
  return p;
}

MlpParams make_mlp(const std::vector<int>& layer_sizes, Activation output, Rng& rng,
                   double final_scale) {
  MlpParams p = make_zero_mlp(layer_sizes, output);
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    const bool last = i + 1 == p.layers.size();
    const double bound = last ? final_scale : 1.0 / std::sqrt(static_cast<double>(layer_sizes[i]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer& l = p.layers[i];
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = dist(rng);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = dist(rng);
  }
  return p;
}

ForwardCache forward_cached(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  check_input(params, inputs);
  ForwardCache cache;
  cache.inputs.reserve(params.layers.size());
  cache.pre_activations.reserve(params.layers.size());
  Eigen::MatrixXd x = inputs;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const DenseLayer& l = params.layers[i];
    Eigen::MatrixXd z(l.weight.rows(), x.cols());
    z.noalias() = l.weight * x;
    z.colwise() += l.bias;
    cache.inputs.push_back(std::move(x));
    activate(layer_activation(params, i), z, x);
    cache.pre_activations.push_back(std::move(z));
  }
  cache.output = std::move(x);
  return cache;
}

Eigen::MatrixXd forward(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  check_input(params, inputs);
  Eigen::MatrixXd x = inputs;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const DenseLayer& l = params.layers[i];
    Eigen::MatrixXd z(l.weight.rows(), x.cols());
    z.noalias() = l.weight * x;
    z.colwise() += l.bias;
    activate(layer_activation(params, i), z, x);
  }
  return x;
}

MlpGradients backprop(const MlpParams& params, const ForwardCache& cache,
                      const Eigen::MatrixXd& upstream, bool parameter_gradients) {
  if (upstream.rows() != params.output_dim() || upstream.cols() != cache.output.cols()) {
    throw Error(ErrorCode::kDimension, "upstream gradient shape does not match outputs");
  }
  if (!upstream.allFinite()) throw Error(ErrorCode::kNumeric, "non-finite upstream gradient");

  const std::size_t n = params.layers.size();
  MlpGradients g;
  if (parameter_gradients) {
    g.weight.resize(n);
    g.bias.resize(n);
  }
  Eigen::MatrixXd grad = upstream;
  for (std::size_t k = n; k-- > 0;) {
    activation_backward(layer_activation(params, k), cache.pre_activations[k], grad);
    if (parameter_gradients) {
      g.weight[k].noalias() = grad * cache.inputs[k].transpose();
      g.bias[k] = grad.rowwise().sum();
    }
    Eigen::MatrixXd below(params.layers[k].weight.cols(), grad.cols());
    below.noalias() = params.layers[k].weight.transpose() * grad;
    grad = std::move(below);
  }
  g.input = std::move(grad);
  return g;
}

MlpGradients backprop(const MlpParams& params, const Eigen::MatrixXd& inputs,
                      const Eigen::MatrixXd& upstream) {
  return backprop(params, forward_cached(params, inputs), upstream, true);
}

void adam_step(MlpParams& params, const MlpGradients& grads, double lr, const AdamConfig& cfg) {
  if (grads.weight.size() != params.layers.size() || grads.bias.size() != params.layers.size()) {
    throw Error(ErrorCode::kShapeMismatch, "gradient layer count");
  }
  ++params.step_count;
  const double t = static_cast<double>(params.step_count);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  const auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    DenseLayer& l = params.layers[i];
    if (grads.weight[i].rows() != l.weight.rows() || grads.weight[i].cols() != l.weight.cols() ||
        grads.bias[i].size() != l.bias.size()) {
      throw Error(ErrorCode::kShapeMismatch, "gradient shape for layer " + std::to_string(i));
    }
    update(l.weight, l.m_weight, l.v_weight, grads.weight[i]);
    update(l.bias, l.m_bias, l.v_bias, grads.bias[i]);
  }
}

void soft_update(MlpParams& target, const MlpParams& online, double tau) {
  if (!target.same_shape(online)) throw Error(ErrorCode::kShapeMismatch, "soft update");
  for (std::size_t i = 0; i < target.layers.size(); ++i) {
    DenseLayer& t = target.layers[i];
    const DenseLayer& o = online.layers[i];
    t.weight = tau * o.weight + (1.0 - tau) * t.weight;
    t.bias = tau * o.bias + (1.0 - tau) * t.bias;
  }
}

ActionVector actor_forward(const MlpParams& actor, const StateVector& state) {
  if (actor.output_dim() != kActionDim) throw Error(ErrorCode::kDimension, "actor output size");
  return forward(actor, state);
}

double critic_forward(const MlpParams& critic, const StateVector& state,
                      const ActionVector& action) {
  Eigen::VectorXd x(kStateDim + kActionDim);
  x << state, action;
  const Eigen::MatrixXd q = forward(critic, x);
  if (q.rows() != 1) throw Error(ErrorCode::kDimension, "critic output size");
  return q(0, 0);
}

}  // namespace uwarm
