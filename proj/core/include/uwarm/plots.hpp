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

#include <filesystem>
#include <string>
#include <vector>

#include "uwarm/metrics.hpp"

namespace uwarm {

struct PlotFiles {
  std::filesystem::path positions;
  std::filesystem::path torques;
  std::filesystem::path errors;
  std::filesystem::path trace;
};

// Writes positions.svg (with reference lines), torques.svg (with the
// saturation limits), errors.svg and trace.csv into `dir`. The log is
// checked before anything is written.
PlotFiles render_plots(const EpisodeLog& log, const Vec4& torque_limits,
                       const std::filesystem::path& dir);

// Individual SVG documents, exposed for testing.
std::string position_plot_svg(const EpisodeLog& log);
std::string torque_plot_svg(const EpisodeLog& log, const Vec4& torque_limits);
std::string error_plot_svg(const EpisodeLog& log);

}  // namespace uwarm
