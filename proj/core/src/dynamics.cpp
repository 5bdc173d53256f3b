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

#include "uwarm/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include "uwarm/error.hpp"

namespace uwarm {
namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

Mat3 rot_z(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
}

Mat3 rot_y(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix();
}

struct Kinematics {
  std::array<Mat3, kJoints> rotation;
  std::array<Vec3, kJoints> axis;
  std::array<Vec3, kJoints> origin;
  std::array<Vec3, kJoints> com;
};

// Link 0 is the vertical base column turned by the yaw joint; links 1..3
// extend along their local x axis and pitch about local y.
Kinematics kinematics(const ArmModel& model, const Vec4& q) {
  Kinematics k;
  k.rotation[0] = rot_z(q[0]);
  for (int i = 1; i < kJoints; ++i) k.rotation[i] = k.rotation[i - 1] * rot_y(q[i]);

  k.axis[0] = Vec3::UnitZ();
  for (int i = 1; i < kJoints; ++i) k.axis[i] = k.rotation[i] * Vec3::UnitY();

  k.origin[0] = Vec3::Zero();
  k.origin[1] = Vec3(0.0, 0.0, model.link_lengths[0]);
  for (int i = 2; i < kJoints; ++i) {
    k.origin[i] = k.origin[i - 1] + k.rotation[i - 1] * Vec3(model.link_lengths[i - 1], 0.0, 0.0);
  }

  k.com[0] = Vec3(0.0, 0.0, model.link_com_offsets[0]);
  for (int i = 1; i < kJoints; ++i) {
    k.com[i] = k.origin[i] + k.rotation[i] * Vec3(model.link_com_offsets[i], 0.0, 0.0);
  }
  return k;
}

// Slender rod about its centre of mass, in the link frame.
Mat3 rod_inertia(int link, double mass, double length) {
  const double transverse = mass * length * length / 12.0;
  return link == 0 ? Vec3(transverse, transverse, 0.0).asDiagonal().toDenseMatrix()
                   : Vec3(0.0, transverse, transverse).asDiagonal().toDenseMatrix();
}

// Recursive Newton-Euler in the world frame. Inertial terms use the
// added-mass-scaled link inertia, gravity acts on the physical mass.
Vec4 inverse_dynamics(const ArmModel& model, const Kinematics& kin, const Vec4& qd,
                      const Vec4& qdd, bool with_gravity) {
  const Vec3 gravity(0.0, 0.0, with_gravity ? -model.gravity_accel : 0.0);

  std::array<Vec3, kJoints> force;
  std::array<Vec3, kJoints> moment;

  Vec3 omega_prev = Vec3::Zero();
  Vec3 alpha_prev = Vec3::Zero();
  Vec3 accel_origin = Vec3::Zero();
  for (int i = 0; i < kJoints; ++i) {
    if (i > 0) {
      const Vec3 d = kin.origin[i] - kin.origin[i - 1];
      accel_origin += alpha_prev.cross(d) + omega_prev.cross(omega_prev.cross(d));
    }
    const Vec3 spin = kin.axis[i] * qd[i];
    const Vec3 omega = omega_prev + spin;
    const Vec3 alpha = alpha_prev + kin.axis[i] * qdd[i] + omega_prev.cross(spin);
    const Vec3 r = kin.com[i] - kin.origin[i];
    const Vec3 accel_com = accel_origin + alpha.cross(r) + omega.cross(omega.cross(r));

    const double factor = model.added_mass_factor[i];
    const double mass = model.link_masses[i];
    const Mat3& rot = kin.rotation[i];
    const Mat3 inertia =
        factor * rot * rod_inertia(i, mass, model.link_lengths[i]) * rot.transpose();

    force[i] = factor * mass * accel_com - mass * gravity;
    moment[i] = inertia * alpha + omega.cross(inertia * omega);

    omega_prev = omega;
    alpha_prev = alpha;
  }

  Vec4 tau;
  Vec3 f_next = Vec3::Zero();
  Vec3 n_next = Vec3::Zero();
  for (int i = kJoints - 1; i >= 0; --i) {
    const Vec3 r = kin.com[i] - kin.origin[i];
    Vec3 n = moment[i] + n_next + r.cross(force[i]);
    if (i + 1 < kJoints) n += (kin.origin[i + 1] - kin.origin[i]).cross(f_next);
    const Vec3 f = force[i] + f_next;
    tau[i] = kin.axis[i].dot(n) + model.rotor_inertia[i] * qdd[i];
    f_next = f;
    n_next = n;
  }
  return tau;
}

Vec4 damping_torques(const ArmModel& model, const Vec4& qd) {
  return model.damping_linear.cwiseProduct(qd) +
         model.damping_quadratic.cwiseProduct(qd.cwiseProduct(qd.cwiseAbs()));
}

bool finite(const Vec4& v) { return v.allFinite(); }

void require_finite_state(const JointState& s) {
  if (!finite(s.q) || !finite(s.qdot) || !std::isfinite(s.t)) {
    throw Error(ErrorCode::kInvalidState, "non-finite joint state");
  }
}

struct Derivative {
  Vec4 qd;
  Vec4 qdd;
};

using JointMask = std::array<bool, kJoints>;

constexpr JointMask kNoLocks{};

// Joints flagged in `locked` rest on a stop: their velocity and acceleration
// are held at zero and the remaining joints follow the reduced dynamics.
Derivative derivative(const ArmModel& model, const Vec4& q, Vec4 qd, const Vec4& tau,
                      const JointMask& locked = kNoLocks) {
  const Kinematics kin = kinematics(model, q);
  Mat4 mass;
  for (int j = 0; j < kJoints; ++j) {
    mass.col(j) = inverse_dynamics(model, kin, Vec4::Zero(), Vec4::Unit(j), false);
  }
  std::vector<int> free;
  for (int j = 0; j < kJoints; ++j) {
    if (locked[j]) qd[j] = 0.0;
    else free.push_back(j);
  }
  const Vec4 bias = inverse_dynamics(model, kin, qd, Vec4::Zero(), true) + damping_torques(model, qd);
  if (free.size() == kJoints) return {qd, mass.llt().solve(tau - bias)};

  Vec4 qdd = Vec4::Zero();
  if (!free.empty()) {
    const auto n = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd reduced(n, n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      rhs[a] = tau[free[a]] - bias[free[a]];
      for (Eigen::Index b = 0; b < n; ++b) reduced(a, b) = mass(free[a], free[b]);
    }
    const Eigen::VectorXd x = reduced.llt().solve(rhs);
    for (Eigen::Index a = 0; a < n; ++a) qdd[free[a]] = x[a];
  }
  return {qd, qdd};
}

JointState rk4(const ArmModel& model, const JointState& s, const Vec4& tau, double h,
               const JointMask& locked = kNoLocks) {
  const Derivative k1 = derivative(model, s.q, s.qdot, tau, locked);
  const Derivative k2 =
      derivative(model, s.q + 0.5 * h * k1.qd, s.qdot + 0.5 * h * k1.qdd, tau, locked);
  const Derivative k3 =
      derivative(model, s.q + 0.5 * h * k2.qd, s.qdot + 0.5 * h * k2.qdd, tau, locked);
  const Derivative k4 = derivative(model, s.q + h * k3.qd, s.qdot + h * k3.qdd, tau, locked);
  JointState out;
  out.q = s.q + (h / 6.0) * (k1.qd + 2.0 * k2.qd + 2.0 * k3.qd + k4.qd);
  out.qdot = s.qdot + (h / 6.0) * (k1.qdd + 2.0 * k2.qdd + 2.0 * k3.qdd + k4.qdd);
  out.t = s.t + h;
  return out;
}

int substep_count(double duration, double dt_physics) {
  if (!(duration > 0.0) || !(dt_physics > 0.0)) {
    throw Error(ErrorCode::kInvalidState, "time steps must be positive");
  }
  return std::max(1, static_cast<int>(std::lround(duration / dt_physics)));
}

void check_vec(const Vec4& v, bool (*pred)(double), const char* what) {
  for (int i = 0; i < kJoints; ++i) {
    if (!pred(v[i])) throw Error(ErrorCode::kConfig, std::string("arm model: ") + what);
  }
}

}  // namespace

ArmModel ArmModel::reach_alpha_defaults() {
  ArmModel m;
  m.link_masses << 0.35, 0.40, 0.35, 0.25;
  m.link_lengths << 0.10, 0.15, 0.15, 0.12;
  m.link_com_offsets << 0.05, 0.075, 0.075, 0.06;
  m.gravity_accel = 9.81 * 0.4;
  m.added_mass_factor << 1.2, 1.5, 1.5, 1.4;
  m.rotor_inertia << 0.02, 0.02, 0.015, 0.01;
  m.damping_linear << 3.0, 3.0, 2.0, 1.0;
  m.damping_quadratic << 0.5, 0.5, 0.3, 0.2;
  m.torque_limits << 8.0, 8.0, 5.0, 2.5;
  m.position_min << -3.0, -1.6, -2.6, -2.8;
  m.position_max << 3.0, 1.6, 0.8, 2.8;
  m.velocity_limit << 5.0, 5.0, 5.0, 5.0;
  return m;
}

void ArmModel::validate() const {
  check_vec(link_masses, [](double v) { return v >= 0.0; }, "link_masses must be >= 0");
  check_vec(link_lengths, [](double v) { return v >= 0.0; }, "link_lengths must be >= 0");
  check_vec(link_com_offsets, [](double v) { return std::isfinite(v); },
            "link_com_offsets must be finite");
  check_vec(added_mass_factor, [](double v) { return v >= 1.0; }, "added_mass_factor must be >= 1");
  check_vec(rotor_inertia, [](double v) { return v >= 0.0; }, "rotor_inertia must be >= 0");
  check_vec(damping_linear, [](double v) { return v >= 0.0; }, "damping_linear must be >= 0");
  check_vec(damping_quadratic, [](double v) { return v >= 0.0; },
            "damping_quadratic must be >= 0");
  check_vec(torque_limits, [](double v) { return v > 0.0; }, "torque_limits must be > 0");
  check_vec(velocity_limit, [](double v) { return v > 0.0; }, "velocity_limit must be > 0");
  if (!std::isfinite(gravity_accel)) throw Error(ErrorCode::kConfig, "gravity_accel not finite");
  for (int i = 0; i < kJoints; ++i) {
    if (!(position_min[i] < position_max[i])) {
      throw Error(ErrorCode::kConfig, "position_min must be < position_max");
    }
  }
}

Degradation Degradation::random_scales(std::uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Degradation d;
  for (int i = 0; i < kJoints; ++i) d.mass_scale[i] = dist(rng);
  for (int i = 0; i < kJoints; ++i) d.damping_scale[i] = dist(rng);
  d.rng_seed = seed;
  return d;
}

void Degradation::validate() const {
  const auto positive = [](const Vec4& v) { return (v.array() > 0.0).all(); };
  if (!positive(mass_scale) || !positive(damping_scale) || !positive(torque_scale)) {
    throw Error(ErrorCode::kConfig, "degradation scales must be > 0");
  }
  if (!(sensor_pos_sigma >= 0.0) || !(sensor_vel_sigma >= 0.0)) {
    throw Error(ErrorCode::kConfig, "sensor sigmas must be >= 0");
  }
}

Mat4 mass_matrix(const ArmModel& model, const Vec4& q) {
  if (!finite(q)) throw Error(ErrorCode::kInvalidState, "non-finite joint position");
  const Kinematics kin = kinematics(model, q);
  Mat4 mass;
  for (int j = 0; j < kJoints; ++j) {
    mass.col(j) = inverse_dynamics(model, kin, Vec4::Zero(), Vec4::Unit(j), false);
  }
  // Symmetric up to rounding; make it exact.
  return 0.5 * (mass + mass.transpose());
}

Vec4 bias_forces(const ArmModel& model, const JointState& state) {
  require_finite_state(state);
  const Kinematics kin = kinematics(model, state.q);
  return inverse_dynamics(model, kin, state.qdot, Vec4::Zero(), true) +
         damping_torques(model, state.qdot);
}

Vec4 gravity_torques(const ArmModel& model, const Vec4& q) {
  if (!finite(q)) throw Error(ErrorCode::kInvalidState, "non-finite joint position");
  return inverse_dynamics(model, kinematics(model, q), Vec4::Zero(), Vec4::Zero(), true);
}

Vec4 forward_dynamics(const ArmModel& model, const JointState& state, const Vec4& tau) {
  require_finite_state(state);
  return derivative(model, state.q, state.qdot, tau).qdd;
}

double kinetic_energy(const ArmModel& model, const JointState& state) {
  return 0.5 * state.qdot.dot(mass_matrix(model, state.q) * state.qdot);
}

double potential_energy(const ArmModel& model, const Vec4& q) {
  const auto com = link_com_positions(model, q);
  double v = 0.0;
  for (int i = 0; i < kJoints; ++i) v += model.link_masses[i] * model.gravity_accel * com[i].z();
  return v;
}

std::array<Eigen::Vector3d, kJoints> link_com_positions(const ArmModel& model, const Vec4& q) {
  return kinematics(model, q).com;
}

JointState integrate(const ArmModel& model, const JointState& state, const Vec4& tau,
                     double duration, double dt_physics) {
  require_finite_state(state);
  const int n = substep_count(duration, dt_physics);
  const double h = duration / n;
  JointState s = state;
  for (int i = 0; i < n; ++i) s = rk4(model, s, tau, h);
  s.t = state.t + duration;
  return s;
}

StepResult step(const ArmModel& model, const Degradation& degradation, const JointState& state,
                const Vec4& tau_cmd, double dt_control, double dt_physics) {
  require_finite_state(state);
  if (!finite(tau_cmd)) throw Error(ErrorCode::kInvalidState, "non-finite torque command");
  const int n = substep_count(dt_control, dt_physics);
  const double h = dt_control / n;

  const Vec4 limit = model.torque_limits.cwiseProduct(degradation.torque_scale);
  StepResult out;
  out.tau_applied = tau_cmd.cwiseMax(-limit).cwiseMin(limit);

  Vec4 extreme = Vec4::Constant(std::numeric_limits<double>::quiet_NaN());
  JointState s = state;
  for (int i = 0; i < n; ++i) {
    // A joint at its stop with zero velocity stays locked while the
    // unconstrained acceleration pushes it into the stop.
    JointMask locked{};
    bool any_locked = false;
    const Vec4 qdd_free = derivative(model, s.q, s.qdot, out.tau_applied).qdd;
    for (int j = 0; j < kJoints; ++j) {
      const bool at_max = s.q[j] >= model.position_max[j] && s.qdot[j] >= 0.0 && qdd_free[j] > 0.0;
      const bool at_min = s.q[j] <= model.position_min[j] && s.qdot[j] <= 0.0 && qdd_free[j] < 0.0;
      locked[j] = at_max || at_min;
      if (at_max) extreme[j] = std::isnan(extreme[j]) ? s.q[j] : std::max(extreme[j], s.q[j]);
      if (at_min) extreme[j] = std::isnan(extreme[j]) ? s.q[j] : std::min(extreme[j], s.q[j]);
      any_locked = any_locked || locked[j];
    }
    if (any_locked) out.hit_limit = true;
    s = rk4(model, s, out.tau_applied, h, locked);
    if (!finite(s.q) || !finite(s.qdot)) {
      throw Error(ErrorCode::kDynamicsDiverged, "non-finite state after substep");
    }
    for (int j = 0; j < kJoints; ++j) {
      if (s.q[j] >= model.position_max[j]) {
        extreme[j] = std::isnan(extreme[j]) ? s.q[j] : std::max(extreme[j], s.q[j]);
        s.q[j] = model.position_max[j];
        s.qdot[j] = std::min(s.qdot[j], 0.0);
        out.hit_limit = true;
      } else if (s.q[j] <= model.position_min[j]) {
        extreme[j] = std::isnan(extreme[j]) ? s.q[j] : std::min(extreme[j], s.q[j]);
        s.q[j] = model.position_min[j];
        s.qdot[j] = std::max(s.qdot[j], 0.0);
        out.hit_limit = true;
      }
    }
    s.qdot = s.qdot.cwiseMax(-model.velocity_limit).cwiseMin(model.velocity_limit);
  }
  s.t = state.t + dt_control;
  out.state = s;
  out.q_unclamped = s.q;
  for (int j = 0; j < kJoints; ++j) {
    if (!std::isnan(extreme[j])) out.q_unclamped[j] = extreme[j];
  }
  return out;
}

Observation observe(const JointState& state, const Degradation& degradation, Rng& rng) {
  Observation obs{state.q, state.qdot};
  if (degradation.sensor_pos_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, degradation.sensor_pos_sigma);
    for (int i = 0; i < kJoints; ++i) obs.q[i] += noise(rng);
  }
  if (degradation.sensor_vel_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, degradation.sensor_vel_sigma);
    for (int i = 0; i < kJoints; ++i) obs.qdot[i] += noise(rng);
  }
  return obs;
}

ArmModel apply_degradation(const ArmModel& model, const Degradation& degradation) {
  ArmModel out = model;
  out.link_masses = model.link_masses.cwiseProduct(degradation.mass_scale);
  out.damping_linear = model.damping_linear.cwiseProduct(degradation.damping_scale);
  out.damping_quadratic = model.damping_quadratic.cwiseProduct(degradation.damping_scale);
  return out;
}

}  // namespace uwarm
