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

#include "uwarm/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "uwarm/error.hpp"

namespace uwarm {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 110.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr const char* kColors[kJoints] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

struct Series {
  std::vector<double> values;
  int joint = 0;
  bool dashed = false;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

class Chart {
 public:
  Chart(std::string title, std::string y_label, double t_end, double y_min, double y_max)
      : title_(std::move(title)), y_label_(std::move(y_label)), t_end_(t_end) {
    if (y_max - y_min < 1e-9) {
      y_min -= 0.5;
      y_max += 0.5;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min_ = y_min - pad;
    y_max_ = y_max + pad;
  }

  void add(const Series& s) { series_.push_back(s); }

  std::string svg(double dt) const {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
           num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           title_ + "</text>\n";
    axes(out);
    for (const Series& s : series_) polyline(out, s, dt);
    legend(out);
    out += "</svg>\n";
    return out;
  }

  double x(double t) const { return kLeft + (kWidth - kLeft - kRight) * t / t_end_; }
  double y(double v) const {
    return kTop + (kHeight - kTop - kBottom) * (y_max_ - v) / (y_max_ - y_min_);
  }

 private:
  void axes(std::string& out) const {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;
    out += "<g stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n";
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(x1 - x0) +
           "\" height=\"" + num(y1 - y0) + "\"/>\n</g>\n";
    out += "<g font-size=\"11\" fill=\"#222\">\n";
    for (int k = 0; k <= 5; ++k) {
      const double t = t_end_ * k / 5.0;
      const double v = y_min_ + (y_max_ - y_min_) * k / 5.0;
      out += "<text x=\"" + num(x(t)) + "\" y=\"" + num(y1 + 16) + "\" text-anchor=\"middle\">" +
             num(t) + "</text>\n";
      out += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(y(v) + 4) + "\" text-anchor=\"end\">" +
             num(v) + "</text>\n";
      out += "<line x1=\"" + num(x0) + "\" x2=\"" + num(x1) + "\" y1=\"" + num(y(v)) + "\" y2=\"" +
             num(y(v)) + "\" stroke=\"#ddd\"/>\n";
    }
    out += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 10) +
           "\" text-anchor=\"middle\">time [s]</text>\n";
    out += "<text x=\"16\" y=\"" + num((y0 + y1) / 2) + "\" transform=\"rotate(-90 16 " +
           num((y0 + y1) / 2) + ")\" text-anchor=\"middle\">" + y_label_ + "</text>\n";
    out += "</g>\n";
  }

  void polyline(std::string& out, const Series& s, double dt) const {
    out += "<polyline fill=\"none\" stroke=\"" + std::string(kColors[s.joint]) +
           "\" stroke-width=\"" + (s.dashed ? "1" : "1.6") + "\"";
    if (s.dashed) out += " stroke-dasharray=\"6 4\"";
    out += " points=\"";
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      const double t = s.values.size() == 2 ? (k == 0 ? 0.0 : t_end_) : static_cast<double>(k) * dt;
      out += num(x(t)) + "," + num(y(s.values[k])) + " ";
    }
    out += "\"/>\n";
  }

  void legend(std::string& out) const {
    const double lx = kWidth - kRight + 12;
    for (int j = 0; j < kJoints; ++j) {
      const double ly = kTop + 14 + 20 * j;
      out += "<line x1=\"" + num(lx) + "\" x2=\"" + num(lx + 22) + "\" y1=\"" + num(ly) + "\" y2=\"" +
             num(ly) + "\" stroke=\"" + kColors[j] + "\" stroke-width=\"2\"/>\n";
      out += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(ly + 4) + "\" font-size=\"12\">Joint " +
             std::to_string(j + 1) + "</text>\n";
    }
  }

  std::string title_;
  std::string y_label_;
  double t_end_;
  double y_min_;
  double y_max_;
  std::vector<Series> series_;
};

std::vector<double> column(const std::vector<Vec4>& rows, int joint) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const Vec4& r : rows) out.push_back(r[joint]);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

std::string position_plot_svg(const EpisodeLog& log) {
  log.validate();
  double lo = log.q_req.minCoeff(), hi = log.q_req.maxCoeff();
  for (const Vec4& q : log.q) {
    lo = std::min(lo, q.minCoeff());
    hi = std::max(hi, q.maxCoeff());
  }
  Chart chart("Joint Position", "position [rad]", log.duration(), lo, hi);
  for (int j = 0; j < kJoints; ++j) {
    chart.add({column(log.q, j), j, false});
    chart.add({{log.q_req[j], log.q_req[j]}, j, true});
  }
  return chart.svg(log.dt);
}

std::string torque_plot_svg(const EpisodeLog& log, const Vec4& torque_limits) {
  log.validate();
  const double bound = torque_limits.maxCoeff();
  Chart chart("Torque Output", "torque [N m]", log.duration(), -bound, bound);
  for (int j = 0; j < kJoints; ++j) {
    chart.add({column(log.tau_applied, j), j, false});
    chart.add({{torque_limits[j], torque_limits[j]}, j, true});
    chart.add({{-torque_limits[j], -torque_limits[j]}, j, true});
  }
  return chart.svg(log.dt);
}

std::string error_plot_svg(const EpisodeLog& log) {
  log.validate();
  std::vector<Vec4> err;
  err.reserve(log.size());
  double lo = 0.0, hi = 0.0;
  for (const Vec4& q : log.q) {
    err.push_back(q - log.q_req);
    lo = std::min(lo, err.back().minCoeff());
    hi = std::max(hi, err.back().maxCoeff());
  }
  Chart chart("Joint Errors", "error [rad]", log.duration(), lo, hi);
  for (int j = 0; j < kJoints; ++j) chart.add({column(err, j), j, false});
  return chart.svg(log.dt);
}

PlotFiles render_plots(const EpisodeLog& log, const Vec4& torque_limits,
                       const std::filesystem::path& dir) {
  // Build every document before touching the filesystem.
  const std::string positions = position_plot_svg(log);
  const std::string torques = torque_plot_svg(log, torque_limits);
  const std::string errors = error_plot_svg(log);
  const std::string trace = log_to_csv(log);

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());
  PlotFiles files{dir / "positions.svg", dir / "torques.svg", dir / "errors.svg", dir / "trace.csv"};
  write_text(files.positions, positions);
  write_text(files.torques, torques);
  write_text(files.errors, errors);
  write_text(files.trace, trace);
  return files;
}

}  // namespace uwarm
