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

#include "uwarm/error.hpp"

namespace uwarm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidState: return "invalid state";
    case ErrorCode::kDynamicsDiverged: return "dynamics diverged";
    case ErrorCode::kDimension: return "dimension error";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kTrainingDiverged: return "training diverged";
    case ErrorCode::kInsufficientData: return "insufficient data";
    case ErrorCode::kEpisodeFinished: return "episode finished";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kLinearizationFailed: return "linearization failed";
    case ErrorCode::kArtifactNotFound: return "artifact not found";
    case ErrorCode::kEmptyLog: return "empty log";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kConfig: return "config error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(detail.empty() ? std::string(to_string(code))
                                        : std::string(to_string(code)) + ": " + detail),
      code_(code) {}

bool Error::is_numeric_failure() const noexcept {
  return code_ == ErrorCode::kDynamicsDiverged || code_ == ErrorCode::kNumeric ||
         code_ == ErrorCode::kTrainingDiverged || code_ == ErrorCode::kLinearizationFailed;
}

}  // namespace uwarm
