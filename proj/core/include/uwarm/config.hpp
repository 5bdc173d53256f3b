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
#include <filesystem>
#include <optional>
#include <string>

#include "uwarm/ddpg.hpp"
#include "uwarm/dynamics.hpp"
#include "uwarm/environment.hpp"
#include "uwarm/metrics.hpp"
#include "uwarm/mpc.hpp"

namespace uwarm {

struct TrainConfig {
  int epochs = 2000;
  std::uint64_t seed = 1;
  int eval_every = 0;        // epochs; 0 disables the probe evaluation
  Vec4 eval_goal = (Vec4() << 2.64, 0.26, -1.47, 0.82).finished();
  int checkpoint_every = 100;
  std::filesystem::path checkpoint_dir = "runs/train";
};

enum class ControllerKind { kRl, kMpc };

// Evaluation setup. `goal` empty means a fresh random goal per repeat.
struct ScenarioConfig {
  std::string name = "normal";
  std::optional<Vec4> goal;
  ControllerKind controller = ControllerKind::kRl;
  std::filesystem::path checkpoint;
  int repeats = 1;
  std::uint64_t seed = 7;
  // Draw mass/damping scales from U(0.9, 1.1) per repeat on top of the
  // [degradation] section.
  bool random_degradation = false;
};

struct CompareConfig {
  int trials = 20;
  std::uint64_t seed = 2024;
  std::filesystem::path checkpoint;
  bool random_degradation = true;
};

// Everything a run needs, loaded from a flat-section INI file. Keys missing
// from the file keep their defaults.
struct Config {
  ArmModel arm = ArmModel::reach_alpha_defaults();
  Degradation degradation;
  EnvConfig env;
  DdpgHyper ddpg;
  TrainConfig train;
  MpcConfig mpc;
  MetricsConfig metrics;
  ScenarioConfig scenario;
  CompareConfig compare;

  Config();

  void validate() const;
};

Config parse_config(const std::string& ini_text, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);
std::string config_to_ini(const Config& config);

// FNV-1a over the canonical INI rendering, with file locations blanked.
std::uint64_t config_hash(const Config& config);

Vec4 parse_vec4(const std::string& text);
std::string format_vec4(const Vec4& v);
std::string format_number(double v);

}  // namespace uwarm
