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
#include <random>

#include <Eigen/Core>

namespace uwarm {

inline constexpr int kJoints = 4;
inline constexpr int kStateDim = 3 * kJoints;   // q, qdot, q_req
inline constexpr int kActionDim = kJoints;

using Vec4 = Eigen::Matrix<double, kJoints, 1>;
using Mat4 = Eigen::Matrix<double, kJoints, kJoints>;
using Vec8 = Eigen::Matrix<double, 2 * kJoints, 1>;
using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using ActionVector = Eigen::Matrix<double, kActionDim, 1>;

// Every stochastic component takes this engine so seeded runs are bit-reproducible.
using Rng = std::mt19937_64;

}  // namespace uwarm
