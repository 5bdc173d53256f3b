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

#include "uwarm/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "uwarm/error.hpp"

namespace uwarm {
namespace {

void require_nonempty(const EpisodeLog& log) {
  if (log.empty()) throw Error(ErrorCode::kEmptyLog, "episode log has no samples");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kIo, "cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

Vec4 steps(const EpisodeLog& log) { return log.q_req - log.q.front(); }

}  // namespace

void EpisodeLog::append(const Vec4& q_t, const Vec4& qdot_t, const Vec4& tau_t, double reward_t) {
  q.push_back(q_t);
  qdot.push_back(qdot_t);
  tau_applied.push_back(tau_t);
  reward.push_back(reward_t);
}

void EpisodeLog::validate() const {
  require_nonempty(*this);
  if (qdot.size() != q.size() || tau_applied.size() != q.size() || reward.size() != q.size()) {
    throw Error(ErrorCode::kInvalidState, "episode log series have different lengths");
  }
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidState, "episode log dt must be positive");
  if (!solver.empty() && solver.size() != q.size()) {
    throw Error(ErrorCode::kInvalidState, "solver trace length");
  }
}

double energy(const EpisodeLog& log) {
  require_nonempty(log);
  double e = 0.0;
  for (std::size_t t = 0; t < log.size(); ++t) {
    e += log.tau_applied[t].cwiseProduct(log.qdot[t]).cwiseAbs().sum();
  }
  return e * log.dt;
}

double rmse(const EpisodeLog& log) {
  require_nonempty(log);
  double sq = 0.0;
  for (const Vec4& q : log.q) sq += (q - log.q_req).squaredNorm();
  return std::sqrt(sq / static_cast<double>(log.size() * kJoints));
}

double mie(const EpisodeLog& log) {
  require_nonempty(log);
  Vec4 integral = Vec4::Zero();
  for (const Vec4& q : log.q) integral += (q - log.q_req).cwiseAbs();
  return integral.mean() * log.dt;
}

double msse(const EpisodeLog& log, double window) {
  require_nonempty(log);
  const auto rows = static_cast<std::size_t>(std::lround(window / log.dt));
  const std::size_t n = std::clamp<std::size_t>(rows, 1, log.size());
  Vec4 sum = Vec4::Zero();
  for (std::size_t t = log.size() - n; t < log.size(); ++t) sum += (log.q[t] - log.q_req).cwiseAbs();
  return sum.mean() / static_cast<double>(n);
}

double overshoot(const EpisodeLog& log, double min_step) {
  require_nonempty(log);
  const Vec4 step = steps(log);
  double worst = 0.0;
  for (int i = 0; i < kJoints; ++i) {
    if (std::abs(step[i]) <= min_step) continue;
    const double dir = step[i] > 0.0 ? 1.0 : -1.0;
    double peak = 0.0;
    for (const Vec4& q : log.q) peak = std::max(peak, dir * (q[i] - log.q_req[i]));
    worst = std::max(worst, 100.0 * peak / std::abs(step[i]));
  }
  return worst;
}

Settling settling_time(const EpisodeLog& log, double band, double floor) {
  require_nonempty(log);
  const Vec4 step = steps(log);
  Settling out;
  for (int i = 0; i < kJoints; ++i) {
    const double tol = std::max(band * std::abs(step[i]), floor);
    std::size_t first_inside = 0;  // index after the last excursion
    for (std::size_t t = 0; t < log.size(); ++t) {
      if (std::abs(log.q[t][i] - log.q_req[i]) > tol) first_inside = t + 1;
    }
    if (first_inside == log.size()) {
      out.joint_settled[i] = false;
      out.settled = false;
      out.per_joint[i] = log.duration();
    } else {
      out.per_joint[i] = static_cast<double>(first_inside) * log.dt;
    }
  }
  out.time = out.per_joint.maxCoeff();
  return out;
}

MetricsReport compute_metrics(const EpisodeLog& log, const MetricsConfig& config) {
  log.validate();
  MetricsReport r;
  r.energy = energy(log);
  r.rmse = rmse(log);
  r.mie = mie(log);
  r.msse = msse(log, config.msse_window);
  r.overshoot = overshoot(log, config.min_step);
  const Settling s = settling_time(log, config.settle_band, config.settle_floor);
  r.settling_time = s.time;
  r.never_settled = !s.settled;
  return r;
}

MetricsReport mean_report(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyLog, "no reports to average");
  MetricsReport m;
  for (const auto& r : reports) {
    m.energy += r.energy;
    m.rmse += r.rmse;
    m.mie += r.mie;
    m.msse += r.msse;
    m.overshoot += r.overshoot;
    m.settling_time += r.settling_time;
    m.never_settled = m.never_settled || r.never_settled;
  }
  const double n = static_cast<double>(reports.size());
  m.energy /= n;
  m.rmse /= n;
  m.mie /= n;
  m.msse /= n;
  m.overshoot /= n;
  m.settling_time /= n;
  return m;
}

std::string format_report(const MetricsReport& r) {
  std::ostringstream out;
  out << "E = " << format_double(r.energy) << '\n'
      << "RMSE = " << format_double(r.rmse) << '\n'
      << "MIE = " << format_double(r.mie) << '\n'
      << "MSSE = " << format_double(r.msse) << '\n'
      << "OS = " << format_double(r.overshoot) << '\n'
      << "ST = " << format_double(r.settling_time) << '\n'
      << "never_settled = " << (r.never_settled ? 1 : 0) << '\n';
  return out.str();
}

MetricsReport parse_report(const std::string& text) {
  MetricsReport r;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    const double v = parse_double(std::string_view(line).substr(eq + 1));
    if (key == "E") r.energy = v;
    else if (key == "RMSE") r.rmse = v;
    else if (key == "MIE") r.mie = v;
    else if (key == "MSSE") r.msse = v;
    else if (key == "OS") r.overshoot = v;
    else if (key == "ST") r.settling_time = v;
    else if (key == "never_settled") r.never_settled = v != 0.0;
  }
  return r;
}

std::string log_to_csv(const EpisodeLog& log) {
  log.validate();
  std::string out = "t,q1,q2,q3,q4,qd1,qd2,qd3,qd4,tau1,tau2,tau3,tau4,ref1,ref2,ref3,ref4,reward\n";
  for (std::size_t t = 0; t < log.size(); ++t) {
    out += format_double(static_cast<double>(t) * log.dt);
    for (const Vec4* v : {&log.q[t], &log.qdot[t], &log.tau_applied[t], &log.q_req}) {
      for (int i = 0; i < kJoints; ++i) {
        out += ',';
        out += format_double((*v)[i]);
      }
    }
    out += ',';
    out += format_double(log.reward[t]);
    out += '\n';
  }
  return out;
}

EpisodeLog log_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,q1", 0) != 0) {
    throw Error(ErrorCode::kIo, "missing CSV header");
  }
  constexpr int kColumns = 2 + 4 * kJoints;
  EpisodeLog log;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    double row[kColumns];
    int col = 0;
    std::size_t start = 0;
    while (col < kColumns) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      row[col++] = parse_double(std::string_view(line).substr(start, end - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (col != kColumns) throw Error(ErrorCode::kIo, "CSV row has wrong column count");
    times.push_back(row[0]);
    const auto vec = [&](int offset) {
      return Vec4(row[offset], row[offset + 1], row[offset + 2], row[offset + 3]);
    };
    log.append(vec(1), vec(1 + kJoints), vec(1 + 2 * kJoints), row[kColumns - 1]);
    log.q_req = vec(1 + 3 * kJoints);
  }
  if (log.empty()) throw Error(ErrorCode::kEmptyLog, "CSV has no rows");
  if (times.size() >= 2) log.dt = times[1] - times[0];
  // In-bounds rewards lie in (-1, 0]; anything lower is the violation penalty.
  log.violated = std::any_of(log.reward.begin(), log.reward.end(), [](double r) { return r < -1.0; });
  return log;
}

void write_log_csv(const EpisodeLog& log, const std::filesystem::path& path) {
  const std::string text = log_to_csv(log);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

EpisodeLog read_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kArtifactNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return log_from_csv(buf.str());
}

}  // namespace uwarm
