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

#include "uwarm/types.hpp"

namespace uwarm {

// Ornstein-Uhlenbeck exploration process, Euler-Maruyama discretized:
//   x <- x + theta (mu - x) dt + sigma sqrt(dt) N(0, I)
// Stationary standard deviation is sigma / sqrt(2 theta).
struct OuNoise {
  double theta = 0.15;
  double sigma = 0.2;
  Vec4 mu = Vec4::Zero();
  Vec4 x = Vec4::Zero();

  void reset() { x = mu; }
  Vec4 sample(double dt, Rng& rng);
};

}  // namespace uwarm
