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
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "uwarm/dynamics.hpp"
#include "uwarm/error.hpp"

namespace uwarm {
namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

ArmModel gravity_free(ArmModel m) {
  m.gravity_accel = 0.0;
  return m;
}

ArmModel undamped(ArmModel m) {
  m.damping_linear.setZero();
  m.damping_quadratic.setZero();
  return m;
}

Vec4 random_pose(const ArmModel& m, Rng& rng) {
  Vec4 q;
  for (int i = 0; i < kJoints; ++i) {
    q[i] = std::uniform_real_distribution<double>(m.position_min[i], m.position_max[i])(rng);
  }
  return q;
}

// Kinetic energy assembled link by link: translational energy from a
// finite-difference COM Jacobian, rotational energy from the chain's angular
// velocity and a slender-rod inertia, plus rotor inertia.
double reference_kinetic_energy(const ArmModel& m, const Vec4& q, const Vec4& qd) {
  constexpr double h = 1e-3;
  std::array<Eigen::Matrix<double, 3, kJoints>, kJoints> jac;
  for (int j = 0; j < kJoints; ++j) {
    // Fourth-order central stencil.
    const auto p1 = link_com_positions(m, q + h * Vec4::Unit(j));
    const auto m1 = link_com_positions(m, q - h * Vec4::Unit(j));
    const auto p2 = link_com_positions(m, q + 2.0 * h * Vec4::Unit(j));
    const auto m2 = link_com_positions(m, q - 2.0 * h * Vec4::Unit(j));
    for (int i = 0; i < kJoints; ++i) {
      jac[i].col(j) = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h);
    }
  }
  Mat3 rot = Mat3::Identity();
  Vec3 omega = Vec3::Zero();
  double t = 0.0;
  for (int i = 0; i < kJoints; ++i) {
    const Vec3 axis_local = i == 0 ? Vec3::UnitZ() : Vec3::UnitY();
    rot = rot * Eigen::AngleAxisd(q[i], axis_local).toRotationMatrix();
    omega += rot * axis_local * qd[i];
    const double f = m.added_mass_factor[i];
    const double transverse = m.link_masses[i] * m.link_lengths[i] * m.link_lengths[i] / 12.0;
    const Vec3 diag = i == 0 ? Vec3(transverse, transverse, 0.0) : Vec3(0.0, transverse, transverse);
    const Mat3 inertia = rot * diag.asDiagonal() * rot.transpose();
    const Vec3 v = jac[i] * qd;
    t += 0.5 * f * m.link_masses[i] * v.squaredNorm() + 0.5 * f * omega.dot(inertia * omega);
    t += 0.5 * m.rotor_inertia[i] * qd[i] * qd[i];
  }
  return t;
}

TEST(MassMatrix, SymmetricPositiveDefiniteAtHome) {
  const Mat4 mass = mass_matrix(ArmModel::reach_alpha_defaults(), Vec4::Zero());
  EXPECT_LE((mass - mass.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat4> eig(mass);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(MassMatrix, SymmetricPositiveDefiniteOnRandomPoses) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const Mat4 mass = mass_matrix(m, random_pose(m, rng));
    ASSERT_LE((mass - mass.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_GT(Eigen::SelfAdjointEigenSolver<Mat4>(mass).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(MassMatrix, MatchesKineticEnergyHessian) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  const Vec4 q(0.3, -0.5, 0.7, 0.1);
  const Mat4 mass = mass_matrix(m, q);
  // T is quadratic in qdot, so the unit-step central second difference is exact.
  for (int i = 0; i < kJoints; ++i) {
    for (int j = 0; j < kJoints; ++j) {
      const Vec4 ei = Vec4::Unit(i);
      const Vec4 ej = Vec4::Unit(j);
      const double hij = (reference_kinetic_energy(m, q, ei + ej) -
                          reference_kinetic_energy(m, q, ei - ej) -
                          reference_kinetic_energy(m, q, -ei + ej) +
                          reference_kinetic_energy(m, q, -ei - ej)) /
                         4.0;
      const double scale = std::max(std::abs(hij), 1e-6);
      EXPECT_LT(std::abs(mass(i, j) - hij) / scale, 1e-6) << "entry " << i << "," << j;
    }
  }
}

TEST(MassMatrix, RejectsNonFinitePose) {
  const Vec4 q(0.0, std::nan(""), 0.0, 0.0);
  try {
    mass_matrix(ArmModel::reach_alpha_defaults(), q);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidState);
  }
}

TEST(BiasForces, ZeroAtRestWithoutGravity) {
  const ArmModel m = gravity_free(ArmModel::reach_alpha_defaults());
  const JointState s{Vec4(0.2, -0.4, 0.3, 1.0), Vec4::Zero(), 0.0};
  EXPECT_LE(bias_forces(m, s).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BiasForces, GravityMatchesPotentialGradient) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  const Vec4 q(0.3, -0.5, 0.7, 0.1);
  const auto potential = [&](const Vec4& p) {
    const auto com = link_com_positions(m, p);
    double v = 0.0;
    for (int i = 0; i < kJoints; ++i) v += m.link_masses[i] * m.gravity_accel * com[i].z();
    return v;
  };
  const Vec4 bias = bias_forces(m, {q, Vec4::Zero(), 0.0});
  constexpr double h = 1e-5;
  for (int i = 0; i < kJoints; ++i) {
    const double grad = (potential(q + h * Vec4::Unit(i)) - potential(q - h * Vec4::Unit(i))) / (2 * h);
    const double scale = std::max(std::abs(grad), 1e-9);
    EXPECT_LT(std::abs(bias[i] - grad) / scale, 1e-6) << "joint " << i;
  }
}

TEST(BiasForces, DampingOnBaseJoint) {
  const ArmModel m = gravity_free(ArmModel::reach_alpha_defaults());
  const JointState s{Vec4(0.1, 0.2, -0.3, 0.4), Vec4(1.0, 0.0, 0.0, 0.0), 0.0};
  EXPECT_NEAR(bias_forces(m, s)[0], m.damping_linear[0] + m.damping_quadratic[0], 1e-12);
}

TEST(Step, EquilibriumWithoutInputs) {
  const ArmModel m = gravity_free(ArmModel::reach_alpha_defaults());
  const JointState s{Vec4(0.1, 0.2, -0.3, 0.4), Vec4::Zero(), 1.0};
  const StepResult r = step(m, Degradation::nominal(), s, Vec4::Zero(), 0.05);
  EXPECT_EQ(r.state.q, s.q);
  EXPECT_EQ(r.state.qdot, s.qdot);
  EXPECT_DOUBLE_EQ(r.state.t, 1.05);
}

TEST(Step, SaturatesCommandedTorque) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  const StepResult r = step(m, Degradation::nominal(), {}, 2.0 * m.torque_limits, 0.05);
  EXPECT_EQ(r.tau_applied, m.torque_limits);
  const StepResult neg = step(m, Degradation::nominal(), {}, -2.0 * m.torque_limits, 0.05);
  EXPECT_EQ(neg.tau_applied, (-m.torque_limits).eval());
}

TEST(Step, TorqueScaleReducesLimit) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  Degradation d;
  d.torque_scale << 0.25, 1.0, 1.0, 1.0;
  const StepResult r = step(m, d, {}, m.torque_limits, 0.05);
  EXPECT_DOUBLE_EQ(r.tau_applied[0], 0.25 * m.torque_limits[0]);
  EXPECT_DOUBLE_EQ(r.tau_applied[1], m.torque_limits[1]);
}

TEST(Step, ClampsAtJointStops) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  JointState s;
  bool hit = false;
  for (int k = 0; k < 200; ++k) {
    const StepResult r = step(m, Degradation::nominal(), s, m.torque_limits, 0.05);
    s = r.state;
    hit = hit || r.hit_limit;
    ASSERT_TRUE(((s.q - m.position_max).array() <= 1e-9).all());
    ASSERT_TRUE(((m.position_min - s.q).array() <= 1e-9).all());
    ASSERT_TRUE((s.qdot.cwiseAbs().array() <= m.velocity_limit.array()).all());
  }
  EXPECT_TRUE(hit);
  EXPECT_DOUBLE_EQ(s.q[0], m.position_max[0]);
}

TEST(Step, RejectsNonFiniteTorque) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  EXPECT_THROW(step(m, Degradation::nominal(), {}, Vec4::Constant(std::nan("")), 0.05), Error);
}

TEST(Step, EnergyConservedWithoutDampingOrGravity) {
  const ArmModel m = undamped(gravity_free(ArmModel::reach_alpha_defaults()));
  JointState s{Vec4(0.0, 0.1, -0.2, 0.3), Vec4(0.4, -0.3, 0.5, -0.6), 0.0};
  const double e0 = kinetic_energy(m, s);
  double worst = 0.0;
  for (int k = 0; k < 400; ++k) {
    s = integrate(m, s, Vec4::Zero(), 0.05);
    worst = std::max(worst, std::abs(kinetic_energy(m, s) - e0) / e0);
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Step, DampingIsPassive) {
  const ArmModel m = gravity_free(ArmModel::reach_alpha_defaults());
  JointState s{Vec4(0.0, 0.1, -0.2, 0.3), Vec4(1.0, -0.8, 0.9, -1.2), 0.0};
  double previous = kinetic_energy(m, s);
  for (int k = 0; k < 100; ++k) {
    s = step(m, Degradation::nominal(), s, Vec4::Zero(), 0.05).state;
    const double now = kinetic_energy(m, s);
    ASSERT_LE(now, previous + 1e-15);
    previous = now;
  }
}

TEST(Step, SubstepHalvingConverges) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  const auto run = [&](double dt_physics) {
    JointState s;
    for (int k = 0; k < 400; ++k) {
      const double t = 0.05 * k;
      const Vec4 tau(1.5 * std::sin(0.7 * t), 1.2 + 0.8 * std::cos(0.5 * t),
                     0.4 * std::sin(1.1 * t), 0.2 * std::cos(0.9 * t));
      s = step(m, Degradation::nominal(), s, tau, 0.05, dt_physics).state;
    }
    return s.q;
  };
  const Vec4 coarse = run(0.005);
  const Vec4 fine = run(0.0025);
  EXPECT_LT((coarse - fine).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Observe, NoiselessReadingIsExact) {
  const JointState s{Vec4(0.1, 0.2, 0.3, 0.4), Vec4(-0.1, 0.0, 0.2, 0.5), 0.0};
  Rng rng(1);
  const Observation o = observe(s, Degradation::nominal(), rng);
  EXPECT_EQ(o.q, s.q);
  EXPECT_EQ(o.qdot, s.qdot);
}

TEST(Observe, NoiseStandardDeviation) {
  Degradation d;
  d.sensor_pos_sigma = 0.001;
  Rng rng(5);
  const JointState s;
  double sum = 0.0;
  double sq = 0.0;
  constexpr int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double x = observe(s, d, rng).q[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(sd, 0.001, 0.05 * 0.001);
}

TEST(Observe, SeededSequencesRepeat) {
  Degradation d;
  d.sensor_pos_sigma = 0.001;
  d.sensor_vel_sigma = 0.01;
  Rng a(9);
  Rng b(9);
  for (int k = 0; k < 100; ++k) {
    const Observation x = observe({}, d, a);
    const Observation y = observe({}, d, b);
    ASSERT_EQ(x.q, y.q);
    ASSERT_EQ(x.qdot, y.qdot);
  }
}

TEST(Degradation, IdentityScalesLeaveModelUnchanged) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  const ArmModel out = apply_degradation(m, Degradation::nominal());
  EXPECT_EQ(out.link_masses, m.link_masses);
  EXPECT_EQ(out.damping_linear, m.damping_linear);
  EXPECT_EQ(out.damping_quadratic, m.damping_quadratic);
}

TEST(Degradation, ScalesMassExactly) {
  const ArmModel m = ArmModel::reach_alpha_defaults();
  Degradation d;
  d.mass_scale << 1.1, 1.0, 1.0, 1.0;
  const ArmModel out = apply_degradation(m, d);
  EXPECT_EQ(out.link_masses[0], m.link_masses[0] * 1.1);
  EXPECT_EQ(out.link_masses[1], m.link_masses[1]);
}

TEST(Degradation, RandomScalesReproducibleAndInRange) {
  const Degradation a = Degradation::random_scales(42);
  const Degradation b = Degradation::random_scales(42);
  EXPECT_EQ(a.mass_scale, b.mass_scale);
  EXPECT_EQ(a.damping_scale, b.damping_scale);
  EXPECT_TRUE((a.mass_scale.array() >= 0.9).all() && (a.mass_scale.array() <= 1.1).all());
  EXPECT_NE(Degradation::random_scales(43).mass_scale, a.mass_scale);
}

}  // namespace
}  // namespace uwarm
