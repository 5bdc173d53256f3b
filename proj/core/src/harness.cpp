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

#include "uwarm/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "uwarm/checkpoint.hpp"
#include "uwarm/ddpg.hpp"
#include "uwarm/error.hpp"
#include "uwarm/mpc.hpp"
#include "uwarm/plots.hpp"

namespace uwarm {
namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string two_digits(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02zu", k);
  return buf;
}

std::string metrics_csv_fields(const MetricsReport& r) {
  return format_number(r.energy) + ',' + format_number(r.rmse) + ',' + format_number(r.mie) +
         ',' + format_number(r.msse) + ',' + format_number(r.overshoot) + ',' +
         format_number(r.settling_time) + ',' + (r.never_settled ? "1" : "0");
}

std::string probe_csv(const std::vector<ProbeRecord>& probes) {
  std::string out = "epoch,return,violated,E,RMSE,MIE,MSSE,OS,ST,never_settled\n";
  for (const auto& p : probes) {
    out += std::to_string(p.epoch) + ',' + format_number(p.episode_return) + ',' +
           (p.violated ? "1" : "0") + ',' + metrics_csv_fields(p.report) + '\n';
  }
  return out;
}

double episode_return(const EpisodeLog& log) {
  double sum = 0.0;
  for (double r : log.reward) sum += r;
  return sum;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return splitmix64(splitmix64(seed ^ h) + index);
}

PolicyController::PolicyController(MlpParams actor) : actor_(std::move(actor)) {}

EnvStep PolicyController::act(Environment& env, SolverTrace*) {
  return env.step(actor_forward(actor_, env.normalized(env.agent_state())));
}

MpcController::MpcController(MpcConfig config, ArmModel nominal)
    : config_(std::move(config)), nominal_(std::move(nominal)) {}

EnvStep MpcController::act(Environment& env, SolverTrace* trace) {
  const AgentState& sensed = env.agent_state();
  const JointState state{sensed.q_obs, sensed.qdot_obs, 0.0};
  const MpcStep step = mpc_step(config_, nominal_, state, sensed.q_req, u_prev_);
  u_prev_ = step.tau;
  if (trace) *trace = {step.iterations, step.cost, step.converged};
  return env.step_torque(step.tau);
}

std::unique_ptr<Controller> make_controller(const Config& config, ControllerKind kind,
                                            const fs::path& checkpoint) {
  if (kind == ControllerKind::kMpc) {
    return std::make_unique<MpcController>(config.mpc, config.arm);
  }
  if (checkpoint.empty()) throw Error(ErrorCode::kArtifactNotFound, "no checkpoint given");
  if (!fs::exists(checkpoint)) throw Error(ErrorCode::kArtifactNotFound, checkpoint.string());
  return std::make_unique<PolicyController>(
      load_actor(checkpoint, actor_layer_sizes(config.ddpg)));
}

EpisodeLog run_episode(Environment& env, Controller& controller, const Vec4& goal) {
  controller.reset();
  env.reset(goal);
  EpisodeLog log;
  log.dt = env.config().dt_control;
  log.q_req = goal;
  const bool traced = controller.has_solver_trace();
  while (!env.done()) {
    const JointState before = env.true_state();
    SolverTrace trace;
    const EnvStep step = controller.act(env, traced ? &trace : nullptr);
    log.append(before.q, before.qdot, step.tau_applied, step.reward);
    if (traced) log.solver.push_back(trace);
    log.violated = log.violated || step.violated;
  }
  return log;
}

// ---- training ---------------------------------------------------------------

std::string training_curve_csv(const std::vector<EpochRecord>& curve) {
  std::string out = "epoch,return,td_loss,mean_q,epsilon,violations,final_error\n";
  for (const auto& e : curve) {
    out += std::to_string(e.epoch) + ',' + format_number(e.episode_return) + ',' +
           format_number(e.td_loss) + ',' + format_number(e.mean_q) + ',' +
           format_number(e.epsilon) + ',' + std::to_string(e.violations) + ',' +
           format_number(e.final_error) + '\n';
  }
  return out;
}

TrainResult train(const Config& config, std::ostream* progress) {
  config.validate();
  const TrainConfig& tc = config.train;
  const fs::path dir = tc.checkpoint_dir;
  fs::create_directories(dir);

  Environment env(config.arm, config.degradation, config.env, derive_seed(tc.seed, "env"));
  DdpgAgent agent(config.ddpg, derive_seed(tc.seed, "agent"));

  Degradation probe_degradation = config.degradation;
  probe_degradation.sensor_pos_sigma = 0.0;
  probe_degradation.sensor_vel_sigma = 0.0;

  CheckpointMeta meta{tc.seed, config_hash(config), 0};
  TrainResult result;
  result.best_checkpoint = dir / "best.ckpt";
  result.final_checkpoint = dir / "final.ckpt";
  double best_return = -std::numeric_limits<double>::infinity();

  const auto flush = [&] {
    write_text(dir / "training_curve.csv", training_curve_csv(result.curve));
    if (tc.eval_every > 0) write_text(dir / "probe.csv", probe_csv(result.probes));
  };

  const double noise_dt = config.ddpg.ou_dt;
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.epsilon = epsilon_schedule(config.ddpg, epoch - 1, tc.epochs);
    int updates = 0;
    try {
      env.reset();
      agent.reset_noise();
      StateVector s = env.normalized(env.agent_state());
      while (!env.done()) {
        const ActionVector a = agent.act(s, rec.epsilon, true, noise_dt);
        const EnvStep step = env.step(a);
        const StateVector s2 = env.normalized(step.state);
        agent.remember({s, a, step.reward, s2, step.terminal});
        if (const auto stats = agent.train_step()) {
          rec.td_loss += stats->td_loss;
          rec.mean_q += stats->mean_q;
          ++updates;
        }
        rec.episode_return += step.reward;
        rec.violations += step.violated ? 1 : 0;
        s = s2;
      }
    } catch (const Error& e) {
      if (progress) *progress << "epoch " << epoch << ": " << e.what() << '\n';
      flush();
      if (e.is_numeric_failure()) throw Error(ErrorCode::kTrainingDiverged, e.what());
      throw;
    }
    if (updates > 0) {
      rec.td_loss /= updates;
      rec.mean_q /= updates;
    }
    rec.final_error = (env.true_state().q - env.goal()).cwiseAbs().maxCoeff();
    result.curve.push_back(rec);
    meta.epoch = epoch;

    if (rec.episode_return > best_return) {
      best_return = rec.episode_return;
      save_checkpoint(snapshot(agent), meta, result.best_checkpoint);
    }
    if (epoch % tc.checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%05d.ckpt", epoch);
      save_checkpoint(snapshot(agent), meta, dir / name);
    }
    if (tc.eval_every > 0 && epoch % tc.eval_every == 0) {
      Environment probe_env(config.arm, probe_degradation, config.env,
                            derive_seed(tc.seed, "probe"));
      PolicyController policy(agent.actor());
      const EpisodeLog log = run_episode(probe_env, policy, tc.eval_goal);
      result.probes.push_back(
          {epoch, episode_return(log), log.violated, compute_metrics(log, config.metrics)});
    }
    if (progress) {
      *progress << "epoch " << epoch << '/' << tc.epochs << " return "
                << fixed(rec.episode_return, 2) << " td_loss " << fixed(rec.td_loss, 4)
                << " eps " << fixed(rec.epsilon, 3) << " violations " << rec.violations
                << " final_error " << fixed(rec.final_error, 4) << '\n';
    }
  }
  save_checkpoint(snapshot(agent), meta, result.final_checkpoint);
  flush();
  return result;
}

// ---- evaluation -------------------------------------------------------------

Degradation trial_degradation(const Config& config, bool randomize, std::uint64_t seed,
                              std::uint64_t index) {
  Degradation d = config.degradation;
  if (randomize) {
    const Degradation r = Degradation::random_scales(derive_seed(seed, "degradation", index));
    d.mass_scale = d.mass_scale.cwiseProduct(r.mass_scale);
    d.damping_scale = d.damping_scale.cwiseProduct(r.damping_scale);
    d.rng_seed = r.rng_seed;
  }
  return d;
}

namespace {

EvaluationResult summarize(std::vector<EpisodeResult> episodes) {
  EvaluationResult out;
  std::vector<MetricsReport> reports;
  for (const auto& e : episodes) {
    reports.push_back(e.report);
    out.violations += e.log.violated ? 1 : 0;
    out.settled += e.report.never_settled ? 0 : 1;
  }
  out.mean = mean_report(reports);
  out.episodes = std::move(episodes);
  return out;
}

}  // namespace

EvaluationResult evaluate(const Config& config, Controller& controller) {
  config.validate();
  const ScenarioConfig& sc = config.scenario;
  Rng goal_rng(derive_seed(sc.seed, "goals"));
  std::vector<EpisodeResult> episodes;
  for (int k = 0; k < sc.repeats; ++k) {
    const auto idx = static_cast<std::uint64_t>(k);
    const Vec4 goal = sc.goal ? *sc.goal : sample_goal(config.arm, config.env.goal_margin, goal_rng);
    Environment env(config.arm, trial_degradation(config, sc.random_degradation, sc.seed, idx),
                    config.env, derive_seed(sc.seed, "episode", idx));
    EpisodeLog log = run_episode(env, controller, goal);
    MetricsReport report = compute_metrics(log, config.metrics);
    episodes.push_back({goal, std::move(log), report});
  }
  return summarize(std::move(episodes));
}

std::string evaluation_summary(const EvaluationResult& r) {
  std::ostringstream out;
  out << "episodes = " << r.episodes.size() << '\n'
      << "violations = " << r.violations << '\n'
      << "settled = " << r.settled << '\n'
      << format_report(r.mean);
  return out.str();
}

EvaluationResult evaluate_to_dir(const Config& config, Controller& controller,
                                 const fs::path& out_dir) {
  EvaluationResult result = evaluate(config, controller);
  const Vec4 limits = config.arm.torque_limits.cwiseProduct(config.degradation.torque_scale);
  for (std::size_t k = 0; k < result.episodes.size(); ++k) {
    const fs::path dir = out_dir / ("episode_" + two_digits(k));
    const EpisodeResult& e = result.episodes[k];
    render_plots(e.log, limits, dir);
    write_text(dir / "report.txt", "goal = " + format_vec4(e.goal) + '\n' +
                                       "violated = " + (e.log.violated ? "1" : "0") + '\n' +
                                       format_report(e.report));
  }
  write_text(out_dir / "summary.txt", "scenario = " + config.scenario.name + '\n' +
                                          "controller = " + controller.name() + '\n' +
                                          evaluation_summary(result));
  return result;
}

// ---- comparison -------------------------------------------------------------

std::vector<Vec4> comparison_goals(const Config& config) {
  Rng rng(derive_seed(config.compare.seed, "goals"));
  std::vector<Vec4> goals;
  for (int k = 0; k < config.compare.trials; ++k) {
    goals.push_back(sample_goal(config.arm, config.env.goal_margin, rng));
  }
  return goals;
}

Comparison compare(const Config& config, Controller& first, Controller& second) {
  config.validate();
  const CompareConfig& cc = config.compare;
  Comparison c;
  c.goals = comparison_goals(config);
  const auto run_all = [&](Controller& controller) {
    std::vector<EpisodeResult> trials;
    for (std::size_t k = 0; k < c.goals.size(); ++k) {
      Environment env(config.arm, trial_degradation(config, cc.random_degradation, cc.seed, k),
                      config.env, derive_seed(cc.seed, "episode", k));
      EpisodeLog log = run_episode(env, controller, c.goals[k]);
      MetricsReport report = compute_metrics(log, config.metrics);
      trials.push_back({c.goals[k], std::move(log), report});
    }
    EvaluationResult summary = summarize(std::move(trials));
    return ComparisonRow{controller.name(), summary.mean, std::move(summary.episodes),
                         summary.violations};
  };
  c.first = run_all(first);
  c.second = run_all(second);
  c.overshoot_ok = c.first.mean.overshoot < c.second.mean.overshoot;
  c.msse_ok = c.first.mean.msse < c.second.mean.msse;
  return c;
}

std::string comparison_table(const Comparison& c) {
  std::ostringstream out;
  out << "| Controller | E [J] | RMSE | MIE | MSSE | OS [%] | ST [s] |\n"
      << "|---|---|---|---|---|---|---|\n";
  for (const ComparisonRow* row : {&c.first, &c.second}) {
    const MetricsReport& m = row->mean;
    out << "| " << row->name << " | " << fixed(m.energy, 2) << " | " << fixed(m.rmse, 4) << " | "
        << fixed(m.mie, 2) << " | " << fixed(m.msse, 4) << " | " << fixed(m.overshoot, 2)
        << " | " << fixed(m.settling_time, 2) << " |\n";
  }
  return out.str();
}

std::string tuning_report(const Config& config, const Comparison& c) {
  const auto verdict = [](bool ok) { return ok ? "holds" : "FAILS"; };
  std::ostringstream out;
  out << "# Tuning report\n\n"
      << "The directional check expects " << c.first.name << " to beat " << c.second.name
      << " on mean overshoot and mean steady-state error over the shared goal set.\n\n"
      << "| Check | " << c.first.name << " | " << c.second.name << " | Result |\n"
      << "|---|---|---|---|\n"
      << "| OS [%] | " << fixed(c.first.mean.overshoot, 3) << " | "
      << fixed(c.second.mean.overshoot, 3) << " | " << verdict(c.overshoot_ok) << " |\n"
      << "| MSSE [rad] | " << fixed(c.first.mean.msse, 5) << " | " << fixed(c.second.mean.msse, 5)
      << " | " << verdict(c.msse_ok) << " |\n\n"
      << "## Per-trial breakdown\n\n"
      << "| Trial | Goal | OS " << c.first.name << " | OS " << c.second.name << " | MSSE "
      << c.first.name << " | MSSE " << c.second.name << " |\n"
      << "|---|---|---|---|---|---|\n";
  for (std::size_t k = 0; k < c.goals.size(); ++k) {
    const MetricsReport& a = c.first.trials[k].report;
    const MetricsReport& b = c.second.trials[k].report;
    out << "| " << k << " | " << format_vec4(c.goals[k]) << " | " << fixed(a.overshoot, 2)
        << " | " << fixed(b.overshoot, 2) << " | " << fixed(a.msse, 5) << " | "
        << fixed(b.msse, 5) << " |\n";
  }
  out << "\n## Settings in effect\n\n"
      << "- training epochs: " << config.train.epochs << " (seed " << config.train.seed << ")\n"
      << "- MPC horizon: " << config.mpc.horizon << ", position weight "
      << format_number(config.mpc.q_weight[0]) << ", velocity weight "
      << format_number(config.mpc.q_weight[4]) << ", move weight "
      << format_number(config.mpc.r_weight[0]) << '\n'
      << "- random plant degradation: " << (config.compare.random_degradation ? "on" : "off")
      << ", sensor noise " << format_number(config.degradation.sensor_pos_sigma) << " rad / "
      << format_number(config.degradation.sensor_vel_sigma) << " rad/s\n\n"
      << "## Knobs\n\n"
      << "- Learned policy: more training epochs, a different training seed, or the per-joint "
         "reward aggregation (`reward.mode = per_joint`).\n"
      << "- MPC: a shorter horizon or a larger position weight makes it more aggressive "
         "(more overshoot); a larger move weight damps it (less overshoot, slower).\n"
      << "- Sensor noise and plant degradation affect both controllers; rerun with them off to "
         "separate model mismatch from controller quality.\n";
  return out.str();
}

Comparison compare_to_dir(const Config& config, Controller& first, Controller& second,
                          const fs::path& out_dir) {
  Comparison c = compare(config, first, second);
  fs::create_directories(out_dir);
  write_text(out_dir / "table.txt", comparison_table(c));

  std::string trials = "trial,controller,g1,g2,g3,g4,E,RMSE,MIE,MSSE,OS,ST,never_settled,violated\n";
  for (const ComparisonRow* row : {&c.first, &c.second}) {
    for (std::size_t k = 0; k < row->trials.size(); ++k) {
      const EpisodeResult& e = row->trials[k];
      trials += std::to_string(k) + ',' + row->name + ',' + format_vec4(e.goal) + ',' +
                metrics_csv_fields(e.report) + ',' + (e.log.violated ? "1" : "0") + '\n';
    }
  }
  write_text(out_dir / "trials.csv", trials);

  std::ostringstream report;
  report << "trials = " << c.goals.size() << '\n'
         << "seed = " << config.compare.seed << '\n'
         << "first = " << c.first.name << '\n'
         << "second = " << c.second.name << '\n'
         << "first_violations = " << c.first.violations << '\n'
         << "second_violations = " << c.second.violations << '\n'
         << "overshoot_check = " << (c.overshoot_ok ? "pass" : "fail") << '\n'
         << "msse_check = " << (c.msse_ok ? "pass" : "fail") << '\n'
         << "directional_check = " << (c.directional_ok() ? "pass" : "fail") << '\n';
  write_text(out_dir / "report.txt", report.str());

  const fs::path tuning = out_dir / "tuning_report.md";
  if (!c.directional_ok()) {
    write_text(tuning, tuning_report(config, c));
  } else if (fs::exists(tuning)) {
    fs::remove(tuning);
  }
  return c;
}

}  // namespace uwarm
