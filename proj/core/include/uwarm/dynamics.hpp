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

#include <array>
#include <cstdint>

#include <Eigen/Core>

#include "uwarm/types.hpp"

namespace uwarm {

// Lumped underwater model of a 4-DOF serial arm: a base yaw joint followed by
// three parallel pitch joints. Link inertia is scaled by an added-mass factor,
// gravity is the buoyancy-reduced effective value, and every joint carries
// linear plus quadratic hydrodynamic damping and a reflected rotor inertia.
//
// The numbers from reach_alpha_defaults() are plausible values for a
// 2 kg-payload electric arm, not identified parameters of any real device.
struct ArmModel {
  Vec4 link_masses;         // kg
  Vec4 link_lengths;        // m
  Vec4 link_com_offsets;    // m, along the link from its joint
  double gravity_accel = 0.0;  // m/s^2, effective (weight minus buoyancy)
  Vec4 added_mass_factor;   // >= 1, scales link inertia only
  Vec4 rotor_inertia;       // kg m^2, reflected motor inertia
  Vec4 damping_linear;      // N m s/rad
  Vec4 damping_quadratic;   // N m s^2/rad^2
  Vec4 torque_limits;       // N m
  Vec4 position_min;        // rad
  Vec4 position_max;        // rad
  Vec4 velocity_limit;      // rad/s

  static ArmModel reach_alpha_defaults();

  // Throws Error(kConfig) on violated invariants.
  void validate() const;
};

struct JointState {
  Vec4 q = Vec4::Zero();
  Vec4 qdot = Vec4::Zero();
  double t = 0.0;
};

// Plant perturbation overlay and sensor noise settings for one scenario.
struct Degradation {
  Vec4 mass_scale = Vec4::Ones();
  Vec4 damping_scale = Vec4::Ones();
  Vec4 torque_scale = Vec4::Ones();
  double sensor_pos_sigma = 0.0;  // rad
  double sensor_vel_sigma = 0.0;  // rad/s
  std::uint64_t rng_seed = 0;

  static Degradation nominal() { return {}; }

  // Mass and damping scales drawn independently from U(lo, hi). Torque scale
  // stays at one; sensor noise is left at zero.
  static Degradation random_scales(std::uint64_t seed, double lo = 0.9, double hi = 1.1);

  void validate() const;
};

struct Observation {
  Vec4 q;
  Vec4 qdot;
};

struct StepResult {
  JointState state;
  Vec4 tau_applied;
  // Most extreme position reached before clamping, per joint. Equal to
  // state.q unless a joint ran into a stop during the interval.
  Vec4 q_unclamped;
  bool hit_limit = false;
};

inline constexpr double kDefaultPhysicsStep = 0.005;
inline constexpr double kDefaultControlStep = 0.05;

// Joint-space inertia including added mass and rotor inertia.
Mat4 mass_matrix(const ArmModel& model, const Vec4& q);

// C(q, qdot) qdot + g(q) + damping; forward dynamics is qddot = M^-1 (tau - bias).
Vec4 bias_forces(const ArmModel& model, const JointState& state);

Vec4 gravity_torques(const ArmModel& model, const Vec4& q);

Vec4 forward_dynamics(const ArmModel& model, const JointState& state, const Vec4& tau);

double kinetic_energy(const ArmModel& model, const JointState& state);
double potential_energy(const ArmModel& model, const Vec4& q);

// World-frame centre of mass of each link (z axis up, base at origin).
std::array<Eigen::Vector3d, kJoints> link_com_positions(const ArmModel& model, const Vec4& q);

// Unconstrained RK4 integration over `duration` with fixed substeps: no
// torque saturation, no joint stops. Used directly by linearization.
JointState integrate(const ArmModel& model, const JointState& state, const Vec4& tau,
                     double duration, double dt_physics = kDefaultPhysicsStep);

// One control interval of the plant: saturates the command at
// torque_limits * torque_scale, integrates with RK4 substeps, and applies
// inelastic joint stops and the velocity guard after every substep.
StepResult step(const ArmModel& model, const Degradation& degradation, const JointState& state,
                const Vec4& tau_cmd, double dt_control = kDefaultControlStep,
                double dt_physics = kDefaultPhysicsStep);

// Noisy sensor reading; the true state is never touched.
Observation observe(const JointState& state, const Degradation& degradation, Rng& rng);

ArmModel apply_degradation(const ArmModel& model, const Degradation& degradation);

}  // namespace uwarm
