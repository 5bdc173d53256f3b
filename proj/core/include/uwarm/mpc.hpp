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

#include <vector>

#include <Eigen/Core>

#include "uwarm/dynamics.hpp"
#include "uwarm/types.hpp"

namespace uwarm {

struct MpcConfig {
  int horizon = 10;
  Vec8 q_weight = (Vec8() << 50.0, 50.0, 50.0, 50.0, 1.0, 1.0, 1.0, 1.0).finished();
  Vec4 r_weight = Vec4::Constant(0.01);
  int max_iters = 5000;
  double step_tolerance = 1e-6;  // N m, infinity norm of the last move
  double dt = kDefaultControlStep;
  double dt_physics = kDefaultPhysicsStep;

  void validate() const;
};

// Discrete affine model x' = A x + B u + c with x = (q, qdot).
struct AffineModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::VectorXd c;
};

// Central finite differences of one unconstrained control interval around
// (state, tau).
AffineModel linearize(const ArmModel& model, const JointState& state, const Vec4& tau, double dt,
                      double dt_physics = kDefaultPhysicsStep, double perturbation = 1e-6);

// Box-constrained condensed tracking problem over an affine model:
//   J = sum_{k=1..N} |x_k - x_ref|^2_Q + sum_{k=0..N-1} |u_k - u_{k-1}|^2_R
// with u_{-1} = u_prev and u_min <= u_k <= u_max.
struct HorizonProblem {
  AffineModel model;
  Eigen::VectorXd x0;
  Eigen::VectorXd x_ref;
  Eigen::VectorXd u_prev;
  Eigen::VectorXd q_diag;
  Eigen::VectorXd r_diag;
  Eigen::VectorXd u_min;
  Eigen::VectorXd u_max;
  int horizon = 1;
};

// Dense quadratic form of a HorizonProblem: J(U) = 0.5 U'HU + g'U + constant.
struct CondensedQp {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  double constant = 0.0;

  double cost(const Eigen::VectorXd& u) const;
};

CondensedQp condense(const HorizonProblem& problem);

struct HorizonSolution {
  Eigen::MatrixXd u;  // inputs x horizon, column k is u_k
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;  // one entry per iterate, starting point included
};

// Projected gradient descent with step 1/L, L the largest Hessian eigenvalue.
// Starts from u_prev held over the horizon. Iterates stay feasible and the
// cost never increases.
HorizonSolution solve_condensed(const HorizonProblem& problem, int max_iters, double tolerance,
                                bool record_history = false);

// Linearizes the nominal model at the measured state and u_prev, then
// solves for the torque sequence. x_ref holds joint positions; the velocity
// reference is zero.
HorizonSolution solve_horizon(const MpcConfig& config, const ArmModel& model,
                              const JointState& state, const Vec4& x_ref, const Vec4& u_prev,
                              bool record_history = false);

struct MpcStep {
  Vec4 tau;
  int iterations = 0;
  double cost = 0.0;
  bool converged = false;
};

// Receding horizon: the first move of solve_horizon.
MpcStep mpc_step(const MpcConfig& config, const ArmModel& model, const JointState& state,
                 const Vec4& x_ref, const Vec4& u_prev);

}  // namespace uwarm
