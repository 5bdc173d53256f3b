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

#include "uwarm/replay_buffer.hpp"

#include <string>

#include "uwarm/error.hpp"

namespace uwarm {

Batch Batch::from(const std::vector<Transition>& items) {
  const auto n = static_cast<Eigen::Index>(items.size());
  Batch b;
  b.states.resize(kStateDim, n);
  b.actions.resize(kActionDim, n);
  b.rewards.resize(n);
  b.next_states.resize(kStateDim, n);
  b.terminal.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = items[static_cast<std::size_t>(i)];
    b.states.col(i) = t.state;
    b.actions.col(i) = t.action;
    b.rewards[i] = t.reward;
    b.next_states.col(i) = t.next_state;
    b.terminal[i] = t.terminal ? 1.0 : 0.0;
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorCode::kConfig, "replay capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(t);
  } else {
    storage_[head_] = t;
  }
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t logical_index) const {
  if (logical_index >= size_) throw Error(ErrorCode::kInsufficientData, "index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return storage_[(oldest + logical_index) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
  if (batch == 0 || size_ < batch) {
    throw Error(ErrorCode::kInsufficientData,
                "have " + std::to_string(size_) + " transitions, need " + std::to_string(batch));
  }
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(batch);
  for (std::size_t i : sample_indices(batch, rng)) out.push_back(at(i));
  return out;
}

Batch ReplayBuffer::sample_batch(std::size_t batch, Rng& rng) const {
  return Batch::from(sample(batch, rng));
}

}  // namespace uwarm
