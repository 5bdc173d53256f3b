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

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "uwarm/environment.hpp"
#include "uwarm/types.hpp"

namespace uwarm {

// Column-major minibatch: one transition per column.
struct Batch {
  Eigen::MatrixXd states;       // kStateDim x B
  Eigen::MatrixXd actions;      // kActionDim x B
  Eigen::RowVectorXd rewards;   // 1 x B
  Eigen::MatrixXd next_states;  // kStateDim x B
  Eigen::RowVectorXd terminal;  // 1 x B, 1.0 where no bootstrap

  Eigen::Index size() const { return states.cols(); }
  static Batch from(const std::vector<Transition>& items);
};

// FIFO ring of transitions with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }

  // 0 is the oldest stored transition.
  const Transition& at(std::size_t logical_index) const;

  // Throws kInsufficientData when fewer than `batch` items are stored.
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;
  std::vector<Transition> sample(std::size_t batch, Rng& rng) const;
  Batch sample_batch(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace uwarm
