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

#include "uwarm/mpc.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "uwarm/error.hpp"

namespace uwarm {
namespace {

Vec8 pack(const JointState& s) {
  Vec8 x;
  x << s.q, s.qdot;
  return x;
}

JointState unpack(const Eigen::VectorXd& x, double t) {
  return JointState{x.head<kJoints>(), x.segment<kJoints>(kJoints), t};
}

}  // namespace

void MpcConfig::validate() const {
  if (horizon < 1) throw Error(ErrorCode::kConfig, "MPC horizon must be >= 1");
  if ((q_weight.array() < 0.0).any() || (r_weight.array() < 0.0).any()) {
    throw Error(ErrorCode::kConfig, "MPC weights must be >= 0");
  }
  if (!(q_weight.array() > 0.0).any()) {
    throw Error(ErrorCode::kConfig, "MPC needs at least one positive state weight");
  }
  if (max_iters < 1 || !(step_tolerance > 0.0)) throw Error(ErrorCode::kConfig, "MPC solver");
  if (!(dt > 0.0) || !(dt_physics > 0.0)) throw Error(ErrorCode::kConfig, "MPC time step");
}

AffineModel linearize(const ArmModel& model, const JointState& state, const Vec4& tau, double dt,
                      double dt_physics, double perturbation) {
  const Vec8 x0 = pack(state);
  const auto propagate = [&](const Eigen::VectorXd& x, const Vec4& u) -> Vec8 {
    return pack(integrate(model, unpack(x, state.t), u, dt, dt_physics));
  };

  AffineModel lin;
  lin.a.resize(2 * kJoints, 2 * kJoints);
  lin.b.resize(2 * kJoints, kJoints);
  const double h = perturbation;
  for (int j = 0; j < 2 * kJoints; ++j) {
    Eigen::VectorXd xp = x0, xm = x0;
    xp[j] += h;
    xm[j] -= h;
    lin.a.col(j) = (propagate(xp, tau) - propagate(xm, tau)) / (2.0 * h);
  }
  for (int j = 0; j < kJoints; ++j) {
    Vec4 up = tau, um = tau;
    up[j] += h;
    um[j] -= h;
    lin.b.col(j) = (propagate(x0, up) - propagate(x0, um)) / (2.0 * h);
  }
  lin.c = propagate(x0, tau) - lin.a * x0 - lin.b * tau;
  if (!lin.a.allFinite() || !lin.b.allFinite() || !lin.c.allFinite()) {
    throw Error(ErrorCode::kLinearizationFailed, "non-finite Jacobian");
  }
  return lin;
}

double CondensedQp::cost(const Eigen::VectorXd& u) const {
  return 0.5 * u.dot(hessian * u) + gradient.dot(u) + constant;
}

CondensedQp condense(const HorizonProblem& p) {
  const Eigen::Index n = p.model.a.rows();
  const Eigen::Index m = p.model.b.cols();
  const int horizon = p.horizon;
  if (horizon < 1) throw Error(ErrorCode::kConfig, "horizon must be >= 1");
  if (p.model.a.cols() != n || p.model.b.rows() != n || p.model.c.size() != n ||
      p.x0.size() != n || p.x_ref.size() != n || p.q_diag.size() != n || p.u_prev.size() != m ||
      p.r_diag.size() != m || p.u_min.size() != m || p.u_max.size() != m) {
    throw Error(ErrorCode::kDimension, "inconsistent horizon problem");
  }

  // Stacked predictions X = free + gamma * U.
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n * horizon, m * horizon);
  Eigen::VectorXd free(n * horizon);
  Eigen::VectorXd x = p.x0;
  std::vector<Eigen::MatrixXd> a_pow_b;  // A^i B
  a_pow_b.push_back(p.model.b);
  for (int k = 0; k < horizon; ++k) {
    x = p.model.a * x + p.model.c;
    free.segment(n * k, n) = x;
    if (k > 0) a_pow_b.push_back(p.model.a * a_pow_b.back());
    for (int j = 0; j <= k; ++j) gamma.block(n * k, m * j, n, m) = a_pow_b[k - j];
  }

  // Input increments D U - d.
  Eigen::MatrixXd diff = Eigen::MatrixXd::Identity(m * horizon, m * horizon);
  for (int k = 1; k < horizon; ++k) {
    diff.block(m * k, m * (k - 1), m, m) = -Eigen::MatrixXd::Identity(m, m);
  }
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m * horizon);
  d.head(m) = p.u_prev;

  const Eigen::VectorXd qbar = p.q_diag.replicate(horizon, 1);
  const Eigen::VectorXd rbar = p.r_diag.replicate(horizon, 1);
  const Eigen::VectorXd e0 = free - p.x_ref.replicate(horizon, 1);

  CondensedQp qp;
  qp.hessian = 2.0 * (gamma.transpose() * qbar.asDiagonal() * gamma +
                      diff.transpose() * rbar.asDiagonal() * diff);
  qp.hessian = 0.5 * (qp.hessian + qp.hessian.transpose());
  qp.gradient = 2.0 * (gamma.transpose() * qbar.asDiagonal() * e0 -
                       diff.transpose() * rbar.asDiagonal() * d);
  qp.constant = e0.dot(qbar.asDiagonal() * e0) + d.dot(rbar.asDiagonal() * d);
  return qp;
}

HorizonSolution solve_condensed(const HorizonProblem& problem, int max_iters, double tolerance,
                                bool record_history) {
  const CondensedQp qp = condense(problem);
  const Eigen::Index m = problem.model.b.cols();
  const Eigen::VectorXd lo = problem.u_min.replicate(problem.horizon, 1);
  const Eigen::VectorXd hi = problem.u_max.replicate(problem.horizon, 1);
  if ((lo.array() > hi.array()).any()) throw Error(ErrorCode::kConfig, "empty input box");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qp.hessian, Eigen::EigenvaluesOnly);
  const double lipschitz = eig.eigenvalues().maxCoeff();
  if (!std::isfinite(lipschitz)) throw Error(ErrorCode::kNumeric, "MPC Hessian not finite");

  Eigen::VectorXd u = problem.u_prev.replicate(problem.horizon, 1).cwiseMax(lo).cwiseMin(hi);
  HorizonSolution sol;
  if (record_history) sol.cost_history.push_back(qp.cost(u));
  if (lipschitz > 0.0) {
    const double step = 1.0 / lipschitz;
    for (int it = 0; it < max_iters; ++it) {
      const Eigen::VectorXd next =
          (u - step * (qp.hessian * u + qp.gradient)).cwiseMax(lo).cwiseMin(hi);
      const double moved = (next - u).cwiseAbs().maxCoeff();
      u = next;
      sol.iterations = it + 1;
      if (record_history) sol.cost_history.push_back(qp.cost(u));
      if (moved < tolerance) {
        sol.converged = true;
        break;
      }
    }
  } else {
    sol.converged = true;  // constant cost
  }
  sol.cost = qp.cost(u);
  sol.u = Eigen::Map<const Eigen::MatrixXd>(u.data(), m, problem.horizon);
  return sol;
}

HorizonSolution solve_horizon(const MpcConfig& config, const ArmModel& model,
                              const JointState& state, const Vec4& x_ref, const Vec4& u_prev,
                              bool record_history) {
  config.validate();
  if (!state.q.allFinite() || !state.qdot.allFinite()) {
    throw Error(ErrorCode::kInvalidState, "non-finite MPC state");
  }
  HorizonProblem p;
  p.model = linearize(model, state, u_prev, config.dt, config.dt_physics);
  p.x0 = pack(state);
  Vec8 ref = Vec8::Zero();
  ref.head<kJoints>() = x_ref;
  p.x_ref = ref;
  p.u_prev = u_prev;
  p.q_diag = config.q_weight;
  p.r_diag = config.r_weight;
  p.u_min = -model.torque_limits;
  p.u_max = model.torque_limits;
  p.horizon = config.horizon;
  return solve_condensed(p, config.max_iters, config.step_tolerance, record_history);
}

MpcStep mpc_step(const MpcConfig& config, const ArmModel& model, const JointState& state,
                 const Vec4& x_ref, const Vec4& u_prev) {
  const HorizonSolution sol = solve_horizon(config, model, state, x_ref, u_prev);
  MpcStep out;
  out.tau = sol.u.col(0);
  out.iterations = sol.iterations;
  out.cost = sol.cost;
  out.converged = sol.converged;
  return out;
}

}  // namespace uwarm
