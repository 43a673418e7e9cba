// Copyright 2026 The vqerl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vqerl/agent.hpp"

using namespace vqerl;

namespace {

Transition make(double tag, int action = 0, double g = 0.0, bool done = true) {
  return {{tag, 0.0}, action, g, {tag, 1.0}, done};
}

std::vector<double> random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void randomize(QNetwork& net, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 0.7);
  for (Eigen::Index i = 0; i < net.parameters().size(); ++i) net.parameters()(i) = d(rng);
}

}  // namespace

TEST(Epsilon, ScheduleClosedForm) {
  AgentConfig cfg;
  double running = 1.0;
  for (std::uint64_t k = 0; k < 80000; ++k) {
    const double want = std::max(0.05, std::pow(0.99995, static_cast<double>(k)));
    ASSERT_EQ(epsilon_at(cfg, k), want) << k;
    ASSERT_NEAR(epsilon_at(cfg, k), std::max(0.05, running), 1e-9) << k;
    running *= 0.99995;
  }
  // The floor takes over at k = ceil(ln 0.05 / ln 0.99995) = 59914.
  EXPECT_GT(epsilon_at(cfg, 59913), 0.05);
  EXPECT_EQ(epsilon_at(cfg, 59914), 0.05);
}

TEST(Epsilon, AgentAdvancesPerAction) {
  AgentConfig cfg;
  cfg.hidden = {4};
  DdqnAgent agent(3, 2, cfg, 1);
  const std::vector<double> s{0.1, 0.2, 0.3};
  for (int k = 0; k < 1000; ++k) {
    ASSERT_EQ(agent.epsilon(), std::max(0.05, std::pow(0.99995, double(k))));
    agent.act(s);
  }
  agent.greedy(s);
  EXPECT_EQ(agent.actions_taken(), 1000u);
}

TEST(Replay, FifoAtCapacity) {
  ReplayBuffer buf(20000);
  for (int i = 0; i < 20000; ++i) buf.push(make(i));
  EXPECT_EQ(buf.size(), 20000u);
  EXPECT_EQ(buf.at(0).state[0], 0.0);
  for (int i = 20000; i < 20123; ++i) buf.push(make(i));
  EXPECT_EQ(buf.size(), 20000u);
  for (std::size_t i = 0; i < buf.size(); ++i) ASSERT_EQ(buf.at(i).state[0], 123.0 + double(i));
}

TEST(Replay, UniformSampling) {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push(make(i));
  std::mt19937_64 rng(1);
  std::vector<int> hits(10, 0);
  for (const auto* t : buf.sample(20000, rng)) ++hits[static_cast<int>(t->state[0])];
  // Binomial(20000, 0.1): sigma = sqrt(1800) ~ 42.4.
  for (int h : hits) EXPECT_NEAR(h, 2000, 4 * 42.4);
  EXPECT_THROW(ReplayBuffer(1).sample(1, rng), std::logic_error);
}

TEST(NStep, SingleStepReturnIsReward) {
  NStepAccumulator acc(1, 0.88);
  auto out = acc.push({1.0}, 3, 0.25, {2.0}, false);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].n_step_return, 0.25);
  EXPECT_EQ(out[0].bootstrap_state, std::vector<double>{2.0});
  EXPECT_EQ(out[0].action, 3);
  EXPECT_FALSE(out[0].done);
}

TEST(NStep, DiscountedSumAndTerminalTruncation) {
  const double g = 0.88;
  NStepAccumulator acc(3, g);
  EXPECT_TRUE(acc.push({0}, 0, 1.0, {1}, false).empty());
  EXPECT_TRUE(acc.push({1}, 1, 2.0, {2}, false).empty());
  auto a = acc.push({2}, 2, 3.0, {3}, false);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_NEAR(a[0].n_step_return, 1 + g * 2 + g * g * 3, 1e-15);
  EXPECT_EQ(a[0].bootstrap_state, std::vector<double>{3});
  auto b = acc.push({3}, 3, -5.0, {4}, true);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_NEAR(b[0].n_step_return, 2 + g * 3 + g * g * -5, 1e-15);
  EXPECT_NEAR(b[1].n_step_return, 3 + g * -5, 1e-15);
  EXPECT_NEAR(b[2].n_step_return, -5, 1e-15);
  for (const auto& t : b) EXPECT_TRUE(t.done);
  EXPECT_EQ(acc.pending(), 0u);
}

TEST(TargetSync, EveryFiveHundredActions) {
  AgentConfig cfg;
  cfg.hidden = {8};
  cfg.warmup = 16;
  cfg.batch_size = 8;
  DdqnAgent agent(2, 3, cfg, 5);
  std::mt19937_64 rng(2);
  std::uint64_t last_target = agent.target().weights_hash();
  for (int k = 1; k <= 1600; ++k) {
    const auto s = random_vec(2, rng);
    const int a = agent.act(s);
    agent.remember({s, a, 0.1 * a, random_vec(2, rng), k % 4 == 0});
    const std::uint64_t online_before = agent.online().weights_hash();
    const std::uint64_t target_now = agent.target().weights_hash();
    if (k % 500 == 0) {
      ASSERT_EQ(target_now, online_before) << k;
      ASSERT_NE(target_now, last_target) << k;
    } else {
      ASSERT_EQ(target_now, last_target) << k;
    }
    last_target = target_now;
    agent.learn();
  }
  EXPECT_EQ(agent.target_syncs(), 3u);
}

TEST(Network, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  for (const auto& sizes : std::vector<std::vector<int>>{{2, 1, 2}, {3, 5, 4, 3}}) {
    QNetwork net(sizes, rng);
    randomize(net, rng);
    QNetwork target(sizes, rng);
    randomize(target, rng);
    std::vector<Transition> store;
    for (int i = 0; i < 4; ++i)
      store.push_back({random_vec(sizes[0], rng), i % sizes.back(), 0.3 * i,
                       random_vec(sizes[0], rng), i == 3});
    std::vector<const Transition*> batch;
    for (const auto& t : store) batch.push_back(&t);
    const auto y = ddqn_targets(net, target, batch, 0.88, 6);
    const auto [loss, grad] = td_loss_and_gradient(net, batch, y);
    const double h = 1e-6;
    for (Eigen::Index p = 0; p < net.parameters().size(); ++p) {
      QNetwork plus = net, minus = net;
      plus.parameters()(p) += h;
      minus.parameters()(p) -= h;
      const double fd =
          (td_loss_and_gradient(plus, batch, y).first - td_loss_and_gradient(minus, batch, y).first) /
          (2 * h);
      EXPECT_NEAR(grad(p), fd, 1e-5 * std::max(1.0, std::abs(fd))) << "param " << p;
    }
  }
}

TEST(Network, DeterministicAndFinite) {
  std::mt19937_64 a(3), b(3);
  QNetwork n1({5, 16, 16, 4}, a), n2({5, 16, 16, 4}, b);
  EXPECT_EQ(n1.weights_hash(), n2.weights_hash());
  const std::vector<double> s{0.1, -2, 3, 4, 1e3};
  const auto q = n1.forward(s);
  EXPECT_TRUE(q.allFinite());
  EXPECT_EQ(q, n1.forward(s));
  const auto back = QNetwork::from_json(n1.to_json());
  EXPECT_EQ(back.weights_hash(), n1.weights_hash());
}

TEST(SelectAction, GreedyAndUniformLimits) {
  std::mt19937_64 rng(21);
  QNetwork net({3, 8, 6}, rng);
  randomize(net, rng);
  const std::vector<double> s{0.5, -0.2, 1.0};
  const auto q = net.forward(s);
  Eigen::Index best;
  q.maxCoeff(&best);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(select_action(net, s, 0.0, rng), best);

  std::vector<int> hits(6, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++hits[select_action(net, s, 1.0, rng)];
  const double p = 1.0 / 6, sigma = std::sqrt(draws * p * (1 - p));
  for (int h : hits) EXPECT_NEAR(h, draws * p, 3 * sigma);
}

TEST(SelectAction, ArgmaxTiesPickLowestIndex) {
  const std::vector<double> q{1.0, 3.0, 3.0, 2.0};
  EXPECT_EQ(argmax(q), 1);
}

TEST(Targets, TerminalAndZeroDiscount) {
  std::mt19937_64 rng(4);
  QNetwork online({2, 4, 3}, rng), target({2, 4, 3}, rng);
  randomize(online, rng);
  randomize(target, rng);
  std::vector<Transition> store{make(0.1, 0, 1.5), make(0.2, 1, -2.0), make(0.3, 2, 0.25)};
  std::vector<const Transition*> batch;
  for (const auto& t : store) batch.push_back(&t);
  EXPECT_EQ(ddqn_targets(online, target, batch, 0.88, 6), (std::vector<double>{1.5, -2.0, 0.25}));
  for (auto& t : store) t.done = false;
  EXPECT_EQ(ddqn_targets(online, target, batch, 0.0, 6), (std::vector<double>{1.5, -2.0, 0.25}));
}

TEST(Targets, DoubleDqnBootstrap) {
  std::mt19937_64 rng(6);
  QNetwork online({2, 4, 3}, rng), target({2, 4, 3}, rng);
  randomize(online, rng);
  randomize(target, rng);
  Transition t{{0.0, 0.0}, 0, 0.7, {0.4, -0.9}, false};
  const auto y = ddqn_targets(online, target, {&t}, 0.9, 2);
  const auto qo = online.forward(t.bootstrap_state);
  const auto qt = target.forward(t.bootstrap_state);
  Eigen::Index a;
  qo.maxCoeff(&a);
  EXPECT_NEAR(y[0], 0.7 + 0.81 * qt(a), 1e-12);
}

TEST(Agent, TrainingReducesLossOnFixedBatch) {
  std::mt19937_64 rng(8);
  QNetwork online({2, 16, 2}, rng);
  const QNetwork target = online;
  Adam adam(1e-2);
  std::vector<Transition> store;
  for (int i = 0; i < 16; ++i) store.push_back({random_vec(2, rng), i % 2, 0.1 * i, {0, 0}, true});
  std::vector<const Transition*> batch;
  for (const auto& t : store) batch.push_back(&t);
  const double first = train_step(online, target, adam, batch, 0.88, 1);
  double last = first;
  for (int i = 0; i < 300; ++i) last = train_step(online, target, adam, batch, 0.88, 1);
  EXPECT_LT(last, 0.1 * first);
}

TEST(Agent, CheckpointRoundTripAndConfigGuard) {
  AgentConfig cfg;
  cfg.hidden = {8};
  DdqnAgent a(4, 3, cfg, 9);
  for (int i = 0; i < 7; ++i) a.act(std::vector<double>{1, 2, 3, 4});
  DdqnAgent b(4, 3, cfg, 10);
  b.restore(a.checkpoint());
  EXPECT_EQ(b.online().weights_hash(), a.online().weights_hash());
  EXPECT_EQ(b.actions_taken(), 7u);
  AgentConfig other = cfg;
  other.gamma = 0.5;
  DdqnAgent c(4, 3, other, 9);
  EXPECT_THROW(c.restore(a.checkpoint()), std::invalid_argument);
}

TEST(Agent, ConfigValidation) {
  AgentConfig c;
  c.gamma = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.epsilon_min = 0.5;
  c.epsilon_initial = 0.2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  const nlohmann::json j = c;
  EXPECT_EQ(j.get<AgentConfig>().replay_capacity, 20000u);
}
