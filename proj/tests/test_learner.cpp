// Copyright 2026 The CPRL Authors. All rights reserved.
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

#include "doctest.h"

#include <cmath>
#include <sstream>

#include "cprl/learner.hpp"

using namespace cprl;
using doctest::Approx;

namespace {

Transition make_transition(std::size_t d, double r, bool done, Action a, Rng& rng) {
  Transition t;
  t.s.resize(d);
  t.s_next.resize(d);
  for (double& v : t.s) v = gaussian(rng, 1.0);
  for (double& v : t.s_next) v = gaussian(rng, 1.0);
  t.r = r;
  t.done = done;
  t.a = a;
  return t;
}

}  // namespace

TEST_CASE("epsilon schedule") {
  const LearnerConfig cfg;
  CHECK(epsilon_schedule(0, cfg) == Approx(0.9));
  CHECK(epsilon_schedule(25'000, cfg) == Approx(0.5));
  CHECK(epsilon_schedule(50'000, cfg) == Approx(0.1));
  CHECK(epsilon_schedule(1'000'000, cfg) == Approx(0.1));
  for (std::uint64_t s = 0; s < 60'000; s += 997) {
    CHECK(epsilon_schedule(s + 997, cfg) <= epsilon_schedule(s, cfg));
  }
}

TEST_CASE("greedy selection and tie-break") {
  Rng rng(0);
  std::vector<double> q(10, 0.0);
  CHECK(select_action(q, 0.0, rng) == Action::EmpathicValidation);
  q[4] = 1.0;
  CHECK(select_action(q, 0.0, rng) == Action::DeCatastrophizing);
  q[7] = 1.0;
  CHECK(argmax(q) == 4);
}

TEST_CASE("uniform exploration at epsilon 1") {
  Rng rng(31);
  std::vector<double> q(10, 0.0);
  q[3] = 5.0;
  std::array<int, 10> counts{};
  constexpr int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[index_of(select_action(q, 1.0, rng))];
  for (int c : counts) CHECK(std::abs(c / double(n) - 0.1) <= 0.01);
}

TEST_CASE("double DQN target") {
  QNetwork online({2, 3}, 0.0), target({2, 3}, 0.0);
  // online prefers action 2; target values it at 2.
  online.biases(0)[2] = 10.0;
  target.biases(0)[0] = 100.0;
  target.biases(0)[2] = 2.0;
  Transition t;
  t.s = t.s_next = {0.0, 0.0};
  t.r = 1.0;
  CHECK(ddqn_target(t, online, target, 0.8) == Approx(2.6));
  t.done = true;
  t.r = 2.5;
  CHECK(ddqn_target(t, online, target, 0.8) == 2.5);
}

TEST_CASE("softmax and KL values") {
  const std::vector<double> a{std::log(3.0), 0.0};
  const auto p = softmax(a, 1.0);
  CHECK(p[0] == Approx(0.75));
  CHECK(p[1] == Approx(0.25));
  const std::vector<double> ref{0.0, 0.0};
  CHECK(kl_regularizer(a, ref, 1.0) == Approx(0.75 * std::log(1.5) + 0.25 * std::log(0.5)));
  CHECK(kl_regularizer(a, a, 1.0) == 0.0);
  CHECK(kl_regularizer(a, ref, 1.0) == Approx(0.130812).epsilon(1e-5));
}

TEST_CASE("KL is non-negative and its gradient matches finite differences") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(10), r(10);
    for (double& v : q) v = gaussian(rng, 3.0);
    for (double& v : r) v = gaussian(rng, 3.0);
    const double tau = 0.3 + uniform01(rng) * 2.0;
    CHECK(kl_regularizer(q, r, tau) >= 0.0);
    const auto g = kl_gradient(q, r, tau);
    const double h = 1e-6;
    for (std::size_t i = 0; i < q.size(); ++i) {
      auto up = q, down = q;
      up[i] += h;
      down[i] -= h;
      const double numeric = (kl_regularizer(up, r, tau) - kl_regularizer(down, r, tau)) / (2 * h);
      CHECK(g[i] == Approx(numeric).epsilon(1e-5).scale(1e-3));
    }
  }
}

TEST_CASE("replay buffer is a bounded FIFO") {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) {
    Transition t;
    t.r = i;
    buf.push(t);
  }
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).r == 2);
  CHECK(buf.at(2).r == 4);
  CHECK_THROWS_AS(buf.at(3), Error);
  Rng rng(0);
  for (const Transition* t : buf.sample(50, rng)) CHECK(t->r >= 2);
  CHECK_THROWS_AS(ReplayBuffer(1).sample(1, rng), Error);
}

TEST_CASE("loss gradient matches central differences with dropout and KL") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Rng rng(seed);
    auto online = QNetwork::initialized({6, 8, 10}, 0.2, rng);
    for (double& w : online.weights(1)) w = gaussian(rng, 0.3);
    auto target = online;
    for (double& p : target.parameters()) p += gaussian(rng, 0.05);
    std::vector<Transition> data;
    for (int i = 0; i < 4; ++i) {
      data.push_back(make_transition(6, gaussian(rng, 1.0), i == 3,
                                     action_from_index(rng() % kNumActions), rng));
    }
    std::vector<const Transition*> batch;
    for (const auto& t : data) batch.push_back(&t);
    LearnerConfig cfg;
    cfg.kl_beta = 0.5;
    cfg.temperature = 0.7;

    const Rng coins(seed * 100);
    std::vector<double> grads;
    Rng r0 = coins;
    const auto loss = loss_and_gradient(batch, online, target, cfg, r0, grads);
    CHECK(loss.total == Approx(loss.q_loss + 0.5 * loss.kl_loss));

    std::vector<double> scratch;
    const double h = 1e-6;
    for (std::size_t i = 0; i < online.num_parameters(); i += 3) {
      const double keep = online.parameters()[i];
      online.parameters()[i] = keep + h;
      Rng ru = coins;
      const double up = loss_and_gradient(batch, online, target, cfg, ru, scratch).total;
      online.parameters()[i] = keep - h;
      Rng rd = coins;
      const double down = loss_and_gradient(batch, online, target, cfg, rd, scratch).total;
      online.parameters()[i] = keep;
      CHECK(grads[i] == Approx((up - down) / (2 * h)).epsilon(1e-5).scale(1e-3));
    }
  }
}

TEST_CASE("zero KL weight leaves the gradient to the TD term") {
  Rng rng(5);
  const auto online = QNetwork::initialized({4, 5, 10}, 0.0, rng);
  auto target = online;
  for (double& p : target.parameters()) p += 0.1;
  const Transition t = make_transition(4, 1.0, false, Action::RealityTesting, rng);
  const std::vector<const Transition*> batch{&t};
  LearnerConfig cfg;
  cfg.kl_beta = 0.0;
  std::vector<double> grads;
  const auto loss = loss_and_gradient(batch, online, target, cfg, rng, grads);
  CHECK(loss.kl_loss > 0.0);
  CHECK(loss.total == loss.q_loss);
  const auto td = td_gradient(online, t.s, 3, ddqn_target(t, online, target, cfg.gamma));
  for (std::size_t i = 0; i < td.size(); ++i) CHECK(grads[i] == Approx(td[i]));
}

TEST_CASE("config validation") {
  LearnerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.warmup = 8;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.temperature = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

namespace {

LearnerConfig small_config() {
  LearnerConfig cfg;
  cfg.total_episodes = 300;
  cfg.num_actors = 3;
  cfg.hidden = {16};
  cfg.warmup = 64;
  cfg.train_every = 2;
  cfg.metrics_interval = 50;
  cfg.decay_steps = 1000;
  cfg.seed = 21;
  return cfg;
}

Environment small_spec() {
  Environment world;
  world.encoder = {16, 0.1, 3};
  world.env.seed = 21;
  return world;
}

}  // namespace

TEST_CASE("training is deterministic for a fixed seed") {
  const auto a = train(small_spec(), small_config());
  const auto b = train(small_spec(), small_config());
  std::ostringstream ca, cb;
  write_metrics_csv(ca, a.trace);
  write_metrics_csv(cb, b.trace);
  CHECK(ca.str() == cb.str());
  CHECK(std::equal(a.policy.parameters().begin(), a.policy.parameters().end(),
                   b.policy.parameters().begin()));
  CHECK(a.counters == b.counters);
  CHECK(a.counters.episodes == 300);
  CHECK(a.counters.learner_steps == a.losses.size());
  CHECK_NOTHROW(a.trace.validate());
}

TEST_CASE("snapshot acting changes nothing about the contract") {
  auto cfg = small_config();
  cfg.snapshot_interval = 25;
  const auto a = train(small_spec(), cfg);
  const auto b = train(small_spec(), cfg);
  CHECK(std::equal(a.policy.parameters().begin(), a.policy.parameters().end(),
                   b.policy.parameters().begin()));
  CHECK(a.counters.episodes == 300);
}

TEST_CASE("divergence raises a training error") {
  auto cfg = small_config();
  cfg.learning_rate = 1e300;
  cfg.weight_decay = 0.0;
  CHECK_THROWS_AS(train(small_spec(), cfg), TrainingError);
}

TEST_CASE("metrics rows cover the run") {
  const auto r = train(small_spec(), small_config());
  REQUIRE_FALSE(r.trace.rows.empty());
  CHECK(r.trace.rows.back().step == r.counters.env_steps);
  CHECK(r.trace.rows.back().episodes == 300);
  CHECK_FALSE(r.trace.rows.front().q_loss.has_value());  // still warming up
  for (const auto& row : r.trace.rows) {
    CHECK(row.epsilon <= 0.9);
    CHECK(row.epsilon >= 0.1);
  }
}
