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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "uwarm/checkpoint.hpp"
#include "uwarm/config.hpp"
#include "uwarm/error.hpp"
#include "uwarm/harness.hpp"

namespace uwarm {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

MlpParams random_actor(std::uint64_t seed) {
  Rng rng(seed);
  return make_mlp(actor_layer_sizes(DdpgHyper{}), Activation::kTanh, rng, 0.5);
}

Config small_config(const fs::path& dir, int epochs) {
  Config c;
  c.train.epochs = epochs;
  c.train.seed = 3;
  c.train.checkpoint_dir = dir;
  c.train.checkpoint_every = 1;
  c.ddpg.warmup = 200;
  c.ddpg.actor_hidden = {32, 32};
  c.ddpg.critic_hidden = {32, 32};
  c.compare.trials = 3;
  return c;
}

TEST(DeriveSeed, StableAndDistinct) {
  EXPECT_EQ(derive_seed(1, "env"), derive_seed(1, "env"));
  EXPECT_NE(derive_seed(1, "env"), derive_seed(1, "agent"));
  EXPECT_NE(derive_seed(1, "env", 0), derive_seed(1, "env", 1));
  EXPECT_NE(derive_seed(1, "env"), derive_seed(2, "env"));
}

TEST(Harness, OneEpochLogsFullEpisode) {
  const fs::path dir = fs::temp_directory_path() / "uwarm_harness_one";
  fs::remove_all(dir);
  const TrainResult r = train(small_config(dir, 1));
  ASSERT_EQ(r.curve.size(), 1u);
  EXPECT_TRUE(fs::exists(r.final_checkpoint));
  EXPECT_TRUE(fs::exists(dir / "training_curve.csv"));

  Config c = small_config(dir, 1);
  Environment env(c.arm, c.degradation, c.env, 4);
  auto controller = make_controller(c, ControllerKind::kRl, r.final_checkpoint);
  const EpisodeLog log = run_episode(env, *controller, c.train.eval_goal);
  EXPECT_EQ(log.size(), 400u);
  EXPECT_EQ(log.tau_applied.size(), 400u);
  EXPECT_EQ(log.reward.size(), 400u);
  fs::remove_all(dir);
}

TEST(Harness, SameSeedSameCurve) {
  const fs::path a = fs::temp_directory_path() / "uwarm_harness_a";
  const fs::path b = fs::temp_directory_path() / "uwarm_harness_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const TrainResult ra = train(small_config(a, 2));
  const TrainResult rb = train(small_config(b, 2));
  EXPECT_EQ(training_curve_csv(ra.curve), training_curve_csv(rb.curve));
  EXPECT_EQ(slurp(ra.final_checkpoint), slurp(rb.final_checkpoint));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Harness, IdenticalControllersIdenticalRows) {
  const Config c = small_config({}, 1);
  PolicyController p1(random_actor(1));
  PolicyController p2(random_actor(1));
  const Comparison cmp = compare(c, p1, p2);
  EXPECT_EQ(format_report(cmp.first.mean), format_report(cmp.second.mean));
  EXPECT_EQ(cmp.first.violations, cmp.second.violations);
  EXPECT_EQ(cmp.goals.size(), 3u);
}

TEST(Harness, SwappingControllersSwapsRows) {
  const Config c = small_config({}, 1);
  PolicyController p1(random_actor(1));
  PolicyController p2(random_actor(2));
  const Comparison ab = compare(c, p1, p2);
  const Comparison ba = compare(c, p2, p1);
  EXPECT_EQ(format_report(ab.first.mean), format_report(ba.second.mean));
  EXPECT_EQ(format_report(ab.second.mean), format_report(ba.first.mean));
  EXPECT_EQ(ab.goals, ba.goals);
}

TEST(Harness, SmokeRunReturnImproves) {
  double first = 0.0;
  double last = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const fs::path dir = fs::temp_directory_path() / ("uwarm_harness_smoke_" + std::to_string(seed));
    fs::remove_all(dir);
    Config c;
    c.train.epochs = 50;
    c.train.seed = seed;
    c.train.checkpoint_every = 50;
    c.train.checkpoint_dir = dir;
    const TrainResult r = train(c);
    for (int k = 0; k < 10; ++k) {
      first += r.curve[static_cast<std::size_t>(k)].episode_return / 30.0;
      last += r.curve[r.curve.size() - 10 + static_cast<std::size_t>(k)].episode_return / 30.0;
    }
    fs::remove_all(dir);
  }
  EXPECT_GT(last, first) << "first-10 mean " << first << ", last-10 mean " << last;
}

TEST(Harness, MissingCheckpoint) {
  const Config c;
  for (const fs::path& p : {fs::path{}, fs::path{"/nonexistent/final.ckpt"}}) {
    try {
      make_controller(c, ControllerKind::kRl, p);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kArtifactNotFound);
    }
  }
  EXPECT_NE(make_controller(c, ControllerKind::kMpc, {}), nullptr);
}

TEST(Harness, EvaluateToDirWritesArtifacts) {
  const fs::path dir = fs::temp_directory_path() / "uwarm_harness_eval";
  fs::remove_all(dir);
  Config c;
  c.scenario.goal = Vec4(0.5, 0.5, 0.0, 0.0);
  c.scenario.repeats = 2;
  PolicyController p(random_actor(3));
  const EvaluationResult r = evaluate_to_dir(c, p, dir);
  EXPECT_EQ(r.episodes.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
  for (const char* ep : {"episode_00", "episode_01"}) {
    for (const char* f : {"positions.svg", "torques.svg", "errors.svg", "trace.csv", "report.txt"}) {
      EXPECT_TRUE(fs::exists(dir / ep / f)) << ep << "/" << f;
    }
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace uwarm
