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

#include "uwarm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "uwarm/error.hpp"

namespace uwarm {
namespace {

using boost::property_tree::ptree;

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kConfig, key + ": expected a number, got '" + raw + "'");
  }
  return v;
}

std::int64_t parse_integer(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kConfig, key + ": expected an integer, got '" + raw + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(ErrorCode::kConfig, key + ": expected a boolean, got '" + raw + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& raw) {
  std::vector<int> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_integer(key, item)));
  return out;
}

std::string format_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

// Reads key `section.name` into `target` when present.
class Reader {
 public:
  Reader(const ptree& tree, std::filesystem::path base) : tree_(tree), base_(std::move(base)) {}

  template <typename Fn>
  void get(const std::string& path, Fn&& assign) const {
    if (auto v = tree_.get_optional<std::string>(ptree::path_type(path, '.'))) {
      assign(path, *v);
    }
  }

  void number(const std::string& path, double& target) const {
    get(path, [&](const std::string& k, const std::string& v) { target = parse_number(k, v); });
  }
  void vec(const std::string& path, Vec4& target) const {
    get(path, [&](const std::string& k, const std::string& v) {
      try {
        target = parse_vec4(v);
      } catch (const Error& e) {
        throw Error(ErrorCode::kConfig, k + ": " + e.what());
      }
    });
  }
  template <typename Int>
  void integer(const std::string& path, Int& target) const {
    get(path, [&](const std::string& k, const std::string& v) {
      const std::int64_t n = parse_integer(k, v);
      if constexpr (std::is_unsigned_v<Int>) {
        if (n < 0) throw Error(ErrorCode::kConfig, k + " must be non-negative");
      }
      target = static_cast<Int>(n);
    });
  }
  void boolean(const std::string& path, bool& target) const {
    get(path, [&](const std::string& k, const std::string& v) { target = parse_bool(k, v); });
  }
  void path(const std::string& key, std::filesystem::path& target) const {
    get(key, [&](const std::string&, const std::string& v) {
      const std::filesystem::path p = trim(v);
      target = p.empty() || p.is_absolute() || base_.empty() ? p : base_ / p;
    });
  }

 private:
  const ptree& tree_;
  std::filesystem::path base_;
};

void put(ptree& t, const std::string& path, const std::string& value) {
  t.put(ptree::path_type(path, '.'), value);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Vec4 parse_vec4(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_number("vector", item));
  if (values.size() != kJoints) {
    throw Error(ErrorCode::kConfig, "expected " + std::to_string(kJoints) +
                                        " comma-separated values, got '" + text + "'");
  }
  return Vec4(values[0], values[1], values[2], values[3]);
}

std::string format_vec4(const Vec4& v) {
  std::string out;
  for (int i = 0; i < kJoints; ++i) {
    if (i) out += ',';
    out += format_number(v[i]);
  }
  return out;
}

Config::Config() { env.reward = RewardParams::for_model(arm); }

void Config::validate() const {
  arm.validate();
  degradation.validate();
  env.validate(arm);
  ddpg.validate();
  mpc.validate();
  if (train.epochs < 1) throw Error(ErrorCode::kConfig, "train.epochs must be >= 1");
  if (train.eval_every < 0) throw Error(ErrorCode::kConfig, "train.eval_every must be >= 0");
  if (train.checkpoint_every < 1) throw Error(ErrorCode::kConfig, "train.checkpoint_every");
  if (scenario.repeats < 1) throw Error(ErrorCode::kConfig, "scenario.repeats must be >= 1");
  if (compare.trials < 1) throw Error(ErrorCode::kConfig, "compare.trials must be >= 1");
  if (!(metrics.msse_window > 0.0) || !(metrics.settle_band > 0.0) ||
      !(metrics.settle_floor >= 0.0)) {
    throw Error(ErrorCode::kConfig, "metrics settings");
  }
  const auto in_limits = [&](const Vec4& g) {
    return (g.array() >= arm.position_min.array()).all() &&
           (g.array() <= arm.position_max.array()).all();
  };
  if (scenario.goal && !in_limits(*scenario.goal)) {
    throw Error(ErrorCode::kConfig, "scenario.goal outside joint limits");
  }
  if (!in_limits(train.eval_goal)) throw Error(ErrorCode::kConfig, "train.eval_goal outside limits");
}

Config parse_config(const std::string& ini_text, const std::filesystem::path& base_dir) {
  ptree tree;
  std::istringstream in(ini_text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }

  static const std::vector<std::string> kSections = {
      "arm", "degradation", "reward", "env", "ddpg", "train", "mpc", "metrics", "scenario", "compare"};
  for (const auto& [section, body] : tree) {
    if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
      throw Error(ErrorCode::kConfig, "unknown section [" + section + "]");
    }
    (void)body;
  }

  Config c;
  const Reader r(tree, base_dir);

  r.vec("arm.link_masses", c.arm.link_masses);
  r.vec("arm.link_lengths", c.arm.link_lengths);
  r.vec("arm.link_com_offsets", c.arm.link_com_offsets);
  r.number("arm.gravity_accel", c.arm.gravity_accel);
  r.vec("arm.added_mass_factor", c.arm.added_mass_factor);
  r.vec("arm.rotor_inertia", c.arm.rotor_inertia);
  r.vec("arm.damping_linear", c.arm.damping_linear);
  r.vec("arm.damping_quadratic", c.arm.damping_quadratic);
  r.vec("arm.torque_limits", c.arm.torque_limits);
  r.vec("arm.position_min", c.arm.position_min);
  r.vec("arm.position_max", c.arm.position_max);
  r.vec("arm.velocity_limit", c.arm.velocity_limit);

  r.vec("degradation.mass_scale", c.degradation.mass_scale);
  r.vec("degradation.damping_scale", c.degradation.damping_scale);
  r.vec("degradation.torque_scale", c.degradation.torque_scale);
  r.number("degradation.sensor_pos_sigma", c.degradation.sensor_pos_sigma);
  r.number("degradation.sensor_vel_sigma", c.degradation.sensor_vel_sigma);
  r.integer("degradation.rng_seed", c.degradation.rng_seed);

  // Reward bounds follow the (possibly overridden) joint limits unless set.
  c.env.reward = RewardParams::for_model(c.arm);
  r.number("reward.sigma", c.env.reward.sigma);
  r.number("reward.violation_penalty", c.env.reward.violation_penalty);
  r.vec("reward.x_min", c.env.reward.x_min);
  r.vec("reward.x_max", c.env.reward.x_max);
  r.get("reward.mode", [&](const std::string& k, const std::string& v) {
    const std::string s = trim(v);
    if (s == "norm") c.env.reward.mode = RewardMode::kNorm;
    else if (s == "per_joint") c.env.reward.mode = RewardMode::kPerJoint;
    else throw Error(ErrorCode::kConfig, k + ": expected norm or per_joint");
  });

  r.number("env.dt_control", c.env.dt_control);
  r.number("env.dt_physics", c.env.dt_physics);
  r.number("env.episode_seconds", c.env.episode_seconds);
  r.vec("env.home_pose", c.env.home_pose);
  r.number("env.goal_margin", c.env.goal_margin);
  r.boolean("env.terminate_on_violation", c.env.terminate_on_violation);

  r.number("ddpg.lr_actor", c.ddpg.lr_actor);
  r.number("ddpg.lr_critic", c.ddpg.lr_critic);
  r.number("ddpg.lr_decay", c.ddpg.lr_decay);
  r.integer("ddpg.lr_decay_steps", c.ddpg.lr_decay_steps);
  r.number("ddpg.gamma", c.ddpg.gamma);
  r.number("ddpg.tau", c.ddpg.tau);
  r.integer("ddpg.batch", c.ddpg.batch);
  r.number("ddpg.epsilon_start", c.ddpg.epsilon_start);
  r.number("ddpg.epsilon_end", c.ddpg.epsilon_end);
  r.number("ddpg.epsilon_decay_fraction", c.ddpg.epsilon_decay_fraction);
  r.integer("ddpg.buffer_capacity", c.ddpg.buffer_capacity);
  r.integer("ddpg.warmup", c.ddpg.warmup);
  r.get("ddpg.actor_hidden", [&](const std::string& k, const std::string& v) {
    c.ddpg.actor_hidden = parse_int_list(k, v);
  });
  r.get("ddpg.critic_hidden", [&](const std::string& k, const std::string& v) {
    c.ddpg.critic_hidden = parse_int_list(k, v);
  });
  r.number("ddpg.final_layer_init", c.ddpg.final_layer_init);
  r.number("ddpg.ou_theta", c.ddpg.ou_theta);
  r.number("ddpg.ou_sigma", c.ddpg.ou_sigma);
  r.number("ddpg.ou_dt", c.ddpg.ou_dt);

  r.integer("train.epochs", c.train.epochs);
  r.integer("train.seed", c.train.seed);
  r.integer("train.eval_every", c.train.eval_every);
  r.vec("train.eval_goal", c.train.eval_goal);
  r.integer("train.checkpoint_every", c.train.checkpoint_every);
  r.path("train.checkpoint_dir", c.train.checkpoint_dir);

  r.integer("mpc.horizon", c.mpc.horizon);
  r.get("mpc.q_weight", [&](const std::string& k, const std::string& v) {
    std::vector<double> w;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) w.push_back(parse_number(k, item));
    if (w.size() != 2 * kJoints) throw Error(ErrorCode::kConfig, k + ": expected 8 values");
    for (int i = 0; i < 2 * kJoints; ++i) c.mpc.q_weight[i] = w[static_cast<std::size_t>(i)];
  });
  r.vec("mpc.r_weight", c.mpc.r_weight);
  r.integer("mpc.max_iters", c.mpc.max_iters);
  r.number("mpc.step_tolerance", c.mpc.step_tolerance);
  c.mpc.dt = c.env.dt_control;
  c.mpc.dt_physics = c.env.dt_physics;

  r.number("metrics.msse_window", c.metrics.msse_window);
  r.number("metrics.settle_band", c.metrics.settle_band);
  r.number("metrics.settle_floor", c.metrics.settle_floor);
  r.number("metrics.min_step", c.metrics.min_step);

  r.get("scenario.name", [&](const std::string&, const std::string& v) { c.scenario.name = trim(v); });
  r.get("scenario.goal", [&](const std::string& k, const std::string& v) {
    if (trim(v) == "random") {
      c.scenario.goal.reset();
    } else {
      try {
        c.scenario.goal = parse_vec4(v);
      } catch (const Error& e) {
        throw Error(ErrorCode::kConfig, k + ": " + e.what());
      }
    }
  });
  r.get("scenario.controller", [&](const std::string& k, const std::string& v) {
    const std::string s = trim(v);
    if (s == "rl") c.scenario.controller = ControllerKind::kRl;
    else if (s == "mpc") c.scenario.controller = ControllerKind::kMpc;
    else throw Error(ErrorCode::kConfig, k + ": expected rl or mpc");
  });
  r.path("scenario.checkpoint", c.scenario.checkpoint);
  r.integer("scenario.repeats", c.scenario.repeats);
  r.integer("scenario.seed", c.scenario.seed);
  r.boolean("scenario.random_degradation", c.scenario.random_degradation);

  r.integer("compare.trials", c.compare.trials);
  r.integer("compare.seed", c.compare.seed);
  r.path("compare.checkpoint", c.compare.checkpoint);
  r.boolean("compare.random_degradation", c.compare.random_degradation);

  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kArtifactNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string config_to_ini(const Config& c) {
  ptree t;
  put(t, "arm.link_masses", format_vec4(c.arm.link_masses));
  put(t, "arm.link_lengths", format_vec4(c.arm.link_lengths));
  put(t, "arm.link_com_offsets", format_vec4(c.arm.link_com_offsets));
  put(t, "arm.gravity_accel", format_number(c.arm.gravity_accel));
  put(t, "arm.added_mass_factor", format_vec4(c.arm.added_mass_factor));
  put(t, "arm.rotor_inertia", format_vec4(c.arm.rotor_inertia));
  put(t, "arm.damping_linear", format_vec4(c.arm.damping_linear));
  put(t, "arm.damping_quadratic", format_vec4(c.arm.damping_quadratic));
  put(t, "arm.torque_limits", format_vec4(c.arm.torque_limits));
  put(t, "arm.position_min", format_vec4(c.arm.position_min));
  put(t, "arm.position_max", format_vec4(c.arm.position_max));
  put(t, "arm.velocity_limit", format_vec4(c.arm.velocity_limit));

  put(t, "degradation.mass_scale", format_vec4(c.degradation.mass_scale));
  put(t, "degradation.damping_scale", format_vec4(c.degradation.damping_scale));
  put(t, "degradation.torque_scale", format_vec4(c.degradation.torque_scale));
  put(t, "degradation.sensor_pos_sigma", format_number(c.degradation.sensor_pos_sigma));
  put(t, "degradation.sensor_vel_sigma", format_number(c.degradation.sensor_vel_sigma));
  put(t, "degradation.rng_seed", std::to_string(c.degradation.rng_seed));

  put(t, "reward.sigma", format_number(c.env.reward.sigma));
  put(t, "reward.violation_penalty", format_number(c.env.reward.violation_penalty));
  put(t, "reward.x_min", format_vec4(c.env.reward.x_min));
  put(t, "reward.x_max", format_vec4(c.env.reward.x_max));
  put(t, "reward.mode", c.env.reward.mode == RewardMode::kNorm ? "norm" : "per_joint");

  put(t, "env.dt_control", format_number(c.env.dt_control));
  put(t, "env.dt_physics", format_number(c.env.dt_physics));
  put(t, "env.episode_seconds", format_number(c.env.episode_seconds));
  put(t, "env.home_pose", format_vec4(c.env.home_pose));
  put(t, "env.goal_margin", format_number(c.env.goal_margin));
  put(t, "env.terminate_on_violation", c.env.terminate_on_violation ? "true" : "false");

  put(t, "ddpg.lr_actor", format_number(c.ddpg.lr_actor));
  put(t, "ddpg.lr_critic", format_number(c.ddpg.lr_critic));
  put(t, "ddpg.lr_decay", format_number(c.ddpg.lr_decay));
  put(t, "ddpg.lr_decay_steps", std::to_string(c.ddpg.lr_decay_steps));
  put(t, "ddpg.gamma", format_number(c.ddpg.gamma));
  put(t, "ddpg.tau", format_number(c.ddpg.tau));
  put(t, "ddpg.batch", std::to_string(c.ddpg.batch));
  put(t, "ddpg.epsilon_start", format_number(c.ddpg.epsilon_start));
  put(t, "ddpg.epsilon_end", format_number(c.ddpg.epsilon_end));
  put(t, "ddpg.epsilon_decay_fraction", format_number(c.ddpg.epsilon_decay_fraction));
  put(t, "ddpg.buffer_capacity", std::to_string(c.ddpg.buffer_capacity));
  put(t, "ddpg.warmup", std::to_string(c.ddpg.warmup));
  put(t, "ddpg.actor_hidden", format_int_list(c.ddpg.actor_hidden));
  put(t, "ddpg.critic_hidden", format_int_list(c.ddpg.critic_hidden));
  put(t, "ddpg.final_layer_init", format_number(c.ddpg.final_layer_init));
  put(t, "ddpg.ou_theta", format_number(c.ddpg.ou_theta));
  put(t, "ddpg.ou_sigma", format_number(c.ddpg.ou_sigma));
  put(t, "ddpg.ou_dt", format_number(c.ddpg.ou_dt));

  put(t, "train.epochs", std::to_string(c.train.epochs));
  put(t, "train.seed", std::to_string(c.train.seed));
  put(t, "train.eval_every", std::to_string(c.train.eval_every));
  put(t, "train.eval_goal", format_vec4(c.train.eval_goal));
  put(t, "train.checkpoint_every", std::to_string(c.train.checkpoint_every));
  put(t, "train.checkpoint_dir", c.train.checkpoint_dir.string());

  std::string qw;
  for (int i = 0; i < 2 * kJoints; ++i) {
    if (i) qw += ',';
    qw += format_number(c.mpc.q_weight[i]);
  }
  put(t, "mpc.horizon", std::to_string(c.mpc.horizon));
  put(t, "mpc.q_weight", qw);
  put(t, "mpc.r_weight", format_vec4(c.mpc.r_weight));
  put(t, "mpc.max_iters", std::to_string(c.mpc.max_iters));
  put(t, "mpc.step_tolerance", format_number(c.mpc.step_tolerance));

  put(t, "metrics.msse_window", format_number(c.metrics.msse_window));
  put(t, "metrics.settle_band", format_number(c.metrics.settle_band));
  put(t, "metrics.settle_floor", format_number(c.metrics.settle_floor));
  put(t, "metrics.min_step", format_number(c.metrics.min_step));

  put(t, "scenario.name", c.scenario.name);
  put(t, "scenario.goal", c.scenario.goal ? format_vec4(*c.scenario.goal) : "random");
  put(t, "scenario.controller", c.scenario.controller == ControllerKind::kRl ? "rl" : "mpc");
  put(t, "scenario.checkpoint", c.scenario.checkpoint.string());
  put(t, "scenario.repeats", std::to_string(c.scenario.repeats));
  put(t, "scenario.seed", std::to_string(c.scenario.seed));
  put(t, "scenario.random_degradation", c.scenario.random_degradation ? "true" : "false");

  put(t, "compare.trials", std::to_string(c.compare.trials));
  put(t, "compare.seed", std::to_string(c.compare.seed));
  put(t, "compare.checkpoint", c.compare.checkpoint.string());
  put(t, "compare.random_degradation", c.compare.random_degradation ? "true" : "false");

  std::ostringstream out;
  boost::property_tree::ini_parser::write_ini(out, t);
  return out.str();
}

std::uint64_t config_hash(const Config& config) {
  Config c = config;
  c.train.checkpoint_dir.clear();
  c.scenario.checkpoint.clear();
  c.compare.checkpoint.clear();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : config_to_ini(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace uwarm
