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
#include <string>
#include <vector>

#include "uwarm/ddpg.hpp"
#include "uwarm/mlp.hpp"

namespace uwarm {

// Binary layout (all integers and reals little-endian):
//
//   char[8]  magic "UWDDPGCK"
//   u32      format version (1)
//   f64      lr_actor, lr_critic, lr_decay
//   i64      lr_decay_steps
//   f64      gamma, tau
//   u64      batch
//   i64      train_steps
//   u32      network count (4: actor, critic, actor target, critic target)
//   per network:
//     u32    output activation (0 identity, 1 tanh, 2 leaky relu)
//     u32    number of layer sizes, then u32 per size
//     i64    Adam step count
//     per layer, in order: weight (row-major, out x in), bias,
//            m_weight, v_weight, m_bias, v_bias as flat f64 arrays
//
// A human-readable sidecar "<file>.meta" carries seed, config hash and epoch.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  int epoch = 0;
};

struct Checkpoint {
  DdpgHyper hyper;
  std::int64_t train_steps = 0;
  MlpParams actor;
  MlpParams critic;
  MlpParams actor_target;
  MlpParams critic_target;
};

Checkpoint snapshot(const DdpgAgent& agent);

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const CheckpointMeta& meta,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);
CheckpointMeta load_checkpoint_meta(const std::filesystem::path& path);

// Throws kShapeMismatch unless every network matches the agent's layout.
void restore(DdpgAgent& agent, const Checkpoint& ckpt);

// Actor only, checked against the expected layer sizes.
MlpParams load_actor(const std::filesystem::path& path, const std::vector<int>& expected_sizes);

}  // namespace uwarm
