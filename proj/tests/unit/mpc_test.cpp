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

#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "uwarm/dynamics.hpp"
#include "uwarm/mpc.hpp"

namespace uwarm {
namespace {

// Unit-inertia, force-free arm: each joint is a double integrator.
ArmModel double_integrator_arm() {
  ArmModel m = ArmModel::reach_alpha_defaults();
  m.link_masses.setZero();
  m.rotor_inertia.setOnes();
  m.damping_linear.setZero();
  m.damping_quadratic.setZero();
  m.gravity_accel = 0.0;
  return m;
}

HorizonProblem scalar_double_integrator(double dt, int horizon) {
  HorizonProblem p;
  p.model.a = (Eigen::Matrix2d() << 1.0, dt, 0.0, 1.0).finished();
  p.model.b = (Eigen::Vector2d() << 0.5 * dt * dt, dt).finished();
  p.model.c = Eigen::Vector2d::Zero();
  p.x0 = Eigen::Vector2d(0.3, -0.2);
  p.x_ref = Eigen::Vector2d(1.0, 0.0);
  p.u_prev = Eigen::VectorXd::Constant(1, 0.5);
  p.q_diag = Eigen::Vector2d(50.0, 1.0);
  p.r_diag = Eigen::VectorXd::Constant(1, 0.01);
  p.u_min = Eigen::VectorXd::Constant(1, -1e6);
  p.u_max = Eigen::VectorXd::Constant(1, 1e6);
  p.horizon = horizon;
  return p;
}

// Rolls the affine model forward and sums the tracking and increment costs.
double rollout_cost(const HorizonProblem& p, const Eigen::MatrixXd& u) {
  Eigen::VectorXd x = p.x0;
  Eigen::VectorXd prev = p.u_prev;
  double j = 0.0;
  for (int k = 0; k < p.horizon; ++k) {
    x = p.model.a * x + p.model.b * u.col(k) + p.model.c;
    const Eigen::VectorXd e = x - p.x_ref;
    const Eigen::VectorXd du = u.col(k) - prev;
    j += e.dot(p.q_diag.asDiagonal() * e) + du.dot(p.r_diag.asDiagonal() * du);
    prev = u.col(k);
  }
  return j;
}

TEST(Linearize, DoubleIntegratorMatchesExactDiscretization) {
  const double dt = 0.05;
  const AffineModel lin = linearize(double_integrator_arm(), {}, Vec4::Zero(), dt);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(8, 8);
  a.topRightCorner(4, 4) = dt * Eigen::MatrixXd::Identity(4, 4);
  Eigen::MatrixXd b(8, 4);
  b << 0.5 * dt * dt * Eigen::MatrixXd::Identity(4, 4), dt * Eigen::MatrixXd::Identity(4, 4);
  EXPECT_LT((lin.a - a).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((lin.b - b).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(lin.c.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Linearize, InputMatrixScalesWithStep) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  const JointState s{Vec4(0.2, -0.3, 0.4, 0.1), Vec4(0.1, 0.0, -0.1, 0.2), 0.0};
  // Well below the damping time constants (about 10 ms).
  const double dt = 0.001;
  const AffineModel full = linearize(m, s, Vec4::Zero(), dt, 1e-4);
  const AffineModel half = linearize(m, s, Vec4::Zero(), dt / 2, 1e-4);
  const Eigen::MatrixXd ratio =
      full.b.bottomRows(4).diagonal().cwiseQuotient(half.b.bottomRows(4).diagonal());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ratio(i), 2.0, 0.25) << "joint " << i;
}

TEST(Linearize, GravityEquilibriumIsAFixedPoint) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  const JointState s{Vec4(0.5, 0.3, -0.6, 0.4), Vec4::Zero(), 0.0};
  const Vec4 tau = gravity_torques(m, s.q);
  const AffineModel lin = linearize(m, s, tau, 0.05);
  Eigen::VectorXd x(8);
  x << s.q, s.qdot;
  EXPECT_LT((lin.a * x + lin.b * tau + lin.c - x).norm(), 1e-8);
}

TEST(SolveCondensed, SingleStepMatchesClosedForm) {
  const HorizonProblem p = scalar_double_integrator(0.1, 1);
  const HorizonSolution sol = solve_condensed(p, 100000, 1e-12);
  const Eigen::Vector2d b = p.model.b;
  const Eigen::Matrix2d q = p.q_diag.asDiagonal();
  const double r = p.r_diag(0);
  const Eigen::Vector2d free = p.model.a * p.x0;
  const double u_star = (b.dot(q * (p.x_ref - free)) + r * p.u_prev(0)) / (b.dot(q * b) + r);
  EXPECT_NEAR(sol.u(0, 0), u_star, 1e-6);
  EXPECT_TRUE(sol.converged);
}

TEST(SolveCondensed, MatchesNormalEquationsOnLongerHorizon) {
  const HorizonProblem p = scalar_double_integrator(0.1, 6);
  // Stack the rollout as a least-squares problem, solved directly.
  const int n = 2;
  const int horizon = p.horizon;
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n * horizon, horizon);
  Eigen::VectorXd free(n * horizon);
  Eigen::VectorXd x = p.x0;
  for (int k = 0; k < horizon; ++k) {
    x = p.model.a * x;
    free.segment(n * k, n) = x;
    for (int j = 0; j <= k; ++j) {
      Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(n, n);
      for (int s = 0; s < k - j; ++s) pw = p.model.a * pw;
      gamma.block(n * k, j, n, 1) = pw * p.model.b;
    }
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n * horizon, n * horizon);
  for (int k = 0; k < horizon; ++k) w.block(n * k, n * k, n, n) = p.q_diag.cwiseSqrt().asDiagonal();
  Eigen::MatrixXd diff = Eigen::MatrixXd::Identity(horizon, horizon);
  for (int k = 1; k < horizon; ++k) diff(k, k - 1) = -1.0;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(horizon);
  d(0) = p.u_prev(0);
  const double sr = std::sqrt(p.r_diag(0));
  Eigen::MatrixXd lhs(n * horizon + horizon, horizon);
  lhs << w * gamma, sr * diff;
  Eigen::VectorXd rhs(n * horizon + horizon);
  rhs << w * (p.x_ref.replicate(horizon, 1) - free), sr * d;
  const Eigen::VectorXd direct = lhs.colPivHouseholderQr().solve(rhs);

  const HorizonSolution sol = solve_condensed(p, 200000, 1e-13);
  const double j_direct = rollout_cost(p, direct.transpose());
  const double j_solver = rollout_cost(p, sol.u);
  EXPECT_LT(std::abs(j_solver - j_direct) / j_direct, 1e-5);
  EXPECT_NEAR(sol.cost, j_solver, 1e-9 * std::max(1.0, j_solver));
}

TEST(SolveCondensed, CostNeverIncreases) {
  HorizonProblem p = scalar_double_integrator(0.1, 8);
  p.u_min(0) = -2.0;
  p.u_max(0) = 2.0;
  const HorizonSolution sol = solve_condensed(p, 500, 1e-12, true);
  ASSERT_GE(sol.cost_history.size(), 2u);
  for (std::size_t k = 1; k < sol.cost_history.size(); ++k) {
    ASSERT_LE(sol.cost_history[k], sol.cost_history[k - 1] + 1e-12 * std::abs(sol.cost_history[k - 1]));
  }
}

TEST(SolveCondensed, IterationLimitFlagsNotConverged) {
  const HorizonProblem p = scalar_double_integrator(0.1, 8);
  const HorizonSolution sol = solve_condensed(p, 2, 1e-14);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 2);
}

TEST(SolveHorizon, AtReferenceReturnsZeroTorque) {
  MpcConfig cfg;
  ArmModel m = ArmModel::reach_alpha_defaults();
  m.gravity_accel = 0.0;
  const JointState s{Vec4(0.4, -0.2, 0.1, 0.3), Vec4::Zero(), 0.0};
  const HorizonSolution sol = solve_horizon(cfg, m, s, s.q, Vec4::Zero());
  EXPECT_LT(sol.u.cwiseAbs().maxCoeff(), cfg.step_tolerance);
}

TEST(SolveHorizon, TorquesRespectBoxes) {
  MpcConfig cfg;
  ArmModel m = ArmModel::reach_alpha_defaults();
  m.torque_limits << 0.5, 0.5, 0.3, 0.1;
  const HorizonSolution sol =
      solve_horizon(cfg, m, {}, Vec4(2.5, -1.2, -2.0, 2.0), Vec4::Zero());
  for (int k = 0; k < sol.u.cols(); ++k) {
    for (int i = 0; i < 4; ++i) {
      ASSERT_LE(std::abs(sol.u(i, k)), m.torque_limits[i]);
    }
  }
}

TEST(MpcStep, Deterministic) {
  const MpcConfig cfg;
  const ArmModel m = ArmModel::reach_alpha_defaults();
  const JointState s{Vec4(0.1, 0.2, -0.3, 0.4), Vec4(0.0, 0.1, 0.0, -0.1), 0.0};
  const MpcStep a = mpc_step(cfg, m, s, Vec4(1.0, 0.5, -1.0, 0.0), Vec4::Constant(0.2));
  const MpcStep b = mpc_step(cfg, m, s, Vec4(1.0, 0.5, -1.0, 0.0), Vec4::Constant(0.2));
  EXPECT_EQ(a.tau, b.tau);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(MpcStep, FirstMoveFollowsErrorSign) {
  const MpcConfig cfg;
  ArmModel m = ArmModel::reach_alpha_defaults();
  m.gravity_accel = 0.0;
  for (double target : {-1.0, 1.0}) {
    const Vec4 ref(target, 0.0, 0.0, 0.0);
    const MpcStep step = mpc_step(cfg, m, {}, ref, Vec4::Zero());
    EXPECT_GT(step.tau[0] * target, 0.0);
    // Brute force over constant joint-1 torques on the nonlinear model.
    double best_cost = INFINITY;
    double best_tau = 0.0;
    for (int g = -8; g <= 8; ++g) {
      JointState s;
      double cost = 0.0;
      for (int k = 0; k < cfg.horizon; ++k) {
        s = integrate(m, s, Vec4(g, 0.0, 0.0, 0.0), cfg.dt);
        cost += 50.0 * (s.q - ref).squaredNorm() + s.qdot.squaredNorm();
      }
      if (cost < best_cost) {
        best_cost = cost;
        best_tau = g;
      }
    }
    EXPECT_GT(best_tau * step.tau[0], 0.0);
  }
}

TEST(MpcStep, HeavierMovePenaltyShrinksFirstIncrement) {
  MpcConfig light;
  MpcConfig heavy;
  heavy.r_weight *= 100.0;
  const ArmModel m = ArmModel::reach_alpha_defaults();
  const JointState s{Vec4(0.2, 0.1, -0.2, 0.1), Vec4::Zero(), 0.0};
  const Vec4 ref(0.6, -0.3, 0.2, 0.5);
  const Vec4 u_prev = gravity_torques(m, s.q);
  const double a = (mpc_step(light, m, s, ref, u_prev).tau - u_prev).norm();
  const double b = (mpc_step(heavy, m, s, ref, u_prev).tau - u_prev).norm();
  EXPECT_LT(b, a);
}

}  // namespace
}  // namespace uwarm
