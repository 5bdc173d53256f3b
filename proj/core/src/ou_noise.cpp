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

#include "uwarm/ou_noise.hpp"

#include <cmath>

#include "uwarm/error.hpp"

namespace uwarm {

Vec4 OuNoise::sample(double dt, Rng& rng) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kConfig, "OU dt must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double diffusion = sigma * std::sqrt(dt);
  for (int i = 0; i < kJoints; ++i) {
    // Draw unconditionally so the stream does not depend on sigma.
    const double w = normal(rng);
    x[i] += theta * (mu[i] - x[i]) * dt + diffusion * w;
  }
  return x;
}

}  // namespace uwarm
