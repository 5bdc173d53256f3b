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

#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "uwarm/ddpg.hpp"
#include "uwarm/error.hpp"
#include "uwarm/ou_noise.hpp"
#include "uwarm/replay_buffer.hpp"

namespace uwarm {
namespace {

Transition numbered(double k) {
  Transition t;
  t.state = StateVector::Constant(k);
  t.action = ActionVector::Zero();
  t.reward = -k;
  t.next_state = StateVector::Constant(k + 1);
  return t;
}

TEST(ReplayBuffer, RingOverwritesOldest) {
  ReplayBuffer buffer(5);
  for (int k = 0; k < 6; ++k) buffer.push(numbered(k));
  EXPECT_EQ(buffer.size(), 5u);
  EXPECT_EQ(buffer.at(0).reward, -1.0);
  EXPECT_EQ(buffer.at(4).reward, -5.0);
  for (std::size_t k = 0; k < buffer.size(); ++k) EXPECT_NE(buffer.at(k).reward, 0.0);
}

TEST(ReplayBuffer, UndersizedSampleFails) {
  ReplayBuffer buffer(100);
  for (int k = 0; k < 10; ++k) buffer.push(numbered(k));
  Rng rng(1);
  try {
    buffer.sample(64, rng);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
}

TEST(ReplayBuffer, UniformSamplingPassesChiSquare) {
  constexpr std::size_t cells = 200;
  ReplayBuffer buffer(cells);
  for (std::size_t k = 0; k < cells + 17; ++k) buffer.push(numbered(static_cast<double>(k)));
  Rng rng(2);
  std::vector<double> counts(cells, 0.0);
  constexpr int draws = 100000;
  for (int k = 0; k < draws / 64; ++k) {
    for (std::size_t i : buffer.sample_indices(64, rng)) counts[i] += 1.0;
  }
  double total = 0.0;
  for (double c : counts) total += c;
  const double expected = total / cells;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(cells - 1);
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.99));
}

TEST(ReplayBuffer, SeededSamplingRepeats) {
  ReplayBuffer buffer(200);
  for (int k = 0; k < 200; ++k) buffer.push(numbered(k));
  Rng a(3);
  Rng b(3);
  EXPECT_EQ(buffer.sample_indices(64, a), buffer.sample_indices(64, b));
}

TEST(ReplayBuffer, BatchColumnsFollowSamples) {
  std::vector<Transition> items{numbered(1), numbered(2)};
  items[1].terminal = true;
  const Batch b = Batch::from(items);
  EXPECT_EQ(b.size(), 2);
  EXPECT_EQ(b.states(0, 1), 2.0);
  EXPECT_EQ(b.next_states(3, 0), 2.0);
  EXPECT_EQ(b.rewards(1), -2.0);
  EXPECT_EQ(b.terminal(0), 0.0);
  EXPECT_EQ(b.terminal(1), 1.0);
}

TEST(OuNoise, StaysAtMeanWithoutDiffusion) {
  OuNoise n;
  n.sigma = 0.0;
  n.reset();
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(n.sample(0.05, rng), Vec4::Zero());
}

TEST(OuNoise, DecaysTowardMeanAtRateTheta) {
  OuNoise n;
  n.sigma = 0.0;
  n.x = Vec4::Constant(1.0);
  Rng rng(1);
  constexpr double dt = 0.05;
  const double exact_factor = std::exp(-n.theta * dt);
  double previous = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double x = n.sample(dt, rng)[0];
    ASSERT_LT(std::abs(x / previous - exact_factor) / exact_factor, 1e-3) << "step " << k;
    previous = x;
  }
}

TEST(OuNoise, StationaryStandardDeviation) {
  OuNoise n;
  n.reset();
  Rng rng(7);
  constexpr double dt = 0.05;
  for (int k = 0; k < 10000; ++k) n.sample(dt, rng);
  double sum = 0.0;
  double sq = 0.0;
  constexpr int count = 1000000;
  for (int k = 0; k < count; ++k) {
    const double x = n.sample(dt, rng)[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / count;
  const double sd = std::sqrt(sq / count - mean * mean);
  const double expected = n.sigma / std::sqrt(2.0 * n.theta);
  EXPECT_LT(std::abs(sd - expected) / expected, 0.05);
}

TEST(Schedules, LearningRateDecaysEveryInterval) {
  const DdpgHyper h;
  EXPECT_DOUBLE_EQ(lr_schedule(h, 0).actor, 1e-4);
  EXPECT_DOUBLE_EQ(lr_schedule(h, 99999).critic, 1e-3);
  EXPECT_DOUBLE_EQ(lr_schedule(h, 100000).critic, 1e-3 * 0.96);
  EXPECT_DOUBLE_EQ(lr_schedule(h, 250000).actor, 1e-4 * 0.96 * 0.96);
}

TEST(Schedules, EpsilonLinearThenFloor) {
  const DdpgHyper h;
  EXPECT_DOUBLE_EQ(epsilon_schedule(h, 0, 100), 1.0);
  EXPECT_NEAR(epsilon_schedule(h, 40, 100), 1.0 - 0.9 * 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(epsilon_schedule(h, 80, 100), 0.1);
  EXPECT_DOUBLE_EQ(epsilon_schedule(h, 99, 100), 0.1);
}

TEST(Act, GreedyIgnoresNoise) {
  Rng rng(1);
  const MlpParams actor = make_mlp({kStateDim, 16, 8, kActionDim}, Activation::kTanh, rng, 1.0);
  const StateVector s = StateVector::Constant(0.3);
  OuNoise noise;
  noise.x = Vec4::Constant(5.0);
  EXPECT_EQ(act(actor, s, noise, 1.0, false, 0.05, rng), actor_forward(actor, s));
  EXPECT_EQ(act(actor, s, noise, 0.0, true, 0.05, rng), actor_forward(actor, s));
}

TEST(Act, ExplorationStaysInActionBox) {
  Rng rng(2);
  const MlpParams actor = make_mlp({kStateDim, 16, 8, kActionDim}, Activation::kTanh, rng, 1.0);
  OuNoise noise;
  noise.sigma = 50.0;
  for (int k = 0; k < 1000; ++k) {
    const ActionVector a = act(actor, StateVector::Constant(0.1), noise, 1.0, true, 0.05, rng);
    ASSERT_LE(a.cwiseAbs().maxCoeff(), 1.0);
  }
}

Batch fixed_batch(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Transition> items;
  for (int k = 0; k < 64; ++k) {
    Transition t;
    for (int i = 0; i < kStateDim; ++i) {
      t.state[i] = u(rng);
      t.next_state[i] = u(rng);
    }
    for (int i = 0; i < kActionDim; ++i) t.action[i] = u(rng);
    t.reward = -1.0 + 0.5 * t.state[0];
    t.terminal = k % 8 == 0;
    items.push_back(t);
  }
  return Batch::from(items);
}

TEST(CriticUpdate, ReducesTdLossOnFixedBatch) {
  Rng rng(3);
  MlpParams critic = make_mlp(critic_layer_sizes({}), Activation::kIdentity, rng);
  const MlpParams critic_target = critic;
  const MlpParams actor_target = make_mlp(actor_layer_sizes({}), Activation::kTanh, rng);
  const Batch batch = fixed_batch(rng);
  const double first = critic_update(critic, actor_target, critic_target, batch, 0.99, 1e-3);
  double last = first;
  for (int k = 0; k < 200; ++k) last = critic_update(critic, actor_target, critic_target, batch, 0.99, 1e-3);
  EXPECT_LT(last, 0.1 * first);
}

TEST(CriticUpdate, TerminalTransitionsDoNotBootstrap) {
  // Targets are exact rewards when every transition is terminal, so a zero
  // critic sees a loss equal to the mean squared reward.
  Rng rng(4);
  MlpParams critic = make_zero_mlp(critic_layer_sizes({}), Activation::kIdentity);
  MlpParams target = make_mlp(critic_layer_sizes({}), Activation::kIdentity, rng, 10.0);
  const MlpParams actor_target = make_mlp(actor_layer_sizes({}), Activation::kTanh, rng);
  Batch batch = fixed_batch(rng);
  batch.terminal.setOnes();
  const double loss = critic_update(critic, actor_target, target, batch, 0.99, 1e-3);
  EXPECT_NEAR(loss, batch.rewards.squaredNorm() / 64.0, 1e-12);
}

TEST(ActorUpdate, IncreasesCriticValue) {
  Rng rng(5);
  MlpParams actor = make_mlp(actor_layer_sizes({}), Activation::kTanh, rng);
  const MlpParams critic = make_mlp(critic_layer_sizes({}), Activation::kIdentity, rng, 1.0);
  const Batch batch = fixed_batch(rng);
  const double before = actor_update(actor, critic, batch, 1e-3);
  double after = before;
  for (int k = 0; k < 50; ++k) after = actor_update(actor, critic, batch, 1e-3);
  EXPECT_GT(after, before);
}

TEST(Agent, WaitsForWarmupThenUpdates) {
  DdpgHyper h;
  h.warmup = 100;
  h.actor_hidden = {16, 8};
  h.critic_hidden = {16, 8};
  DdpgAgent agent(h, 1);
  Rng rng(6);
  const Batch b = fixed_batch(rng);
  for (int k = 0; k < 99; ++k) {
    Transition t;
    t.state = b.states.col(k % 64);
    t.action = b.actions.col(k % 64);
    t.reward = -1.0;
    t.next_state = b.next_states.col(k % 64);
    agent.remember(t);
    EXPECT_FALSE(agent.train_step().has_value());
  }
  agent.remember(numbered(0.1));
  EXPECT_TRUE(agent.train_step().has_value());
  EXPECT_EQ(agent.train_steps(), 1);
}

TEST(Agent, SameSeedSameNetworks) {
  DdpgHyper h;
  h.actor_hidden = {16, 8};
  h.critic_hidden = {16, 8};
  const DdpgAgent a(h, 9);
  const DdpgAgent b(h, 9);
  EXPECT_EQ(a.actor().layers[0].weight, b.actor().layers[0].weight);
  EXPECT_EQ(a.critic().layers[2].weight, b.critic().layers[2].weight);
  EXPECT_EQ(a.actor_target().layers[0].weight, a.actor().layers[0].weight);
}

}  // namespace
}  // namespace uwarm
