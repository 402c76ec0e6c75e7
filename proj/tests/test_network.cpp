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

#include "cprl/domain.hpp"
#include "cprl/network.hpp"

using namespace cprl;
using doctest::Approx;

namespace {

std::vector<double> random_input(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (double& v : x) v = gaussian(rng, 1.0);
  return x;
}

// 0.5 * sum_k c_k * q_k for fixed coefficients, differentiated numerically.
double probe_objective(const QNetwork& net, std::span<const double> s, std::span<const double> c) {
  const auto q = net.forward(s);
  double acc = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) acc += c[k] * q[k];
  return acc;
}

}  // namespace

TEST_CASE("zero network outputs zeros") {
  const QNetwork net(QNetwork::default_dims(16), 0.1);
  const auto q = net.forward(std::vector<double>(16, 1.0));
  REQUIRE(q.size() == 10);
  for (double v : q) CHECK(v == 0.0);
}

TEST_CASE("hand-traced forward through a one-unit hidden layer") {
  QNetwork net({1, 1, 2}, 0.0);
  for (double& p : net.parameters()) p = 1.0;
  // h = relu(1*2 + 1) = 3; q = 1*3 + 1 = 4 for both outputs.
  const auto q = net.forward(std::vector<double>{2.0});
  CHECK(q[0] == 4.0);
  CHECK(q[1] == 4.0);
  // Negative pre-activation is clipped: h = relu(-3 + 1) = 0, q = bias = 1.
  CHECK(net.forward(std::vector<double>{-3.0})[0] == 1.0);
}

TEST_CASE("parameter layout") {
  QNetwork net({3, 4, 2}, 0.0);
  CHECK(net.num_parameters() == 3 * 4 + 4 + 4 * 2 + 2);
  CHECK(net.weight_offset(0) == 0);
  CHECK(net.bias_offset(0) == 12);
  CHECK(net.weight_offset(1) == 16);
  CHECK(net.bias_offset(1) == 24);
  net.weights(1)[4 * 1 + 2] = 5.0;  // row 1, col 2
  net.biases(1)[1] = 1.0;
  std::vector<double> x{0, 0, 0};
  net.biases(0)[2] = 2.0;  // hidden unit 2 = relu(2) = 2
  CHECK(net.forward(x)[1] == 11.0);
}

TEST_CASE("initialization ranges") {
  Rng rng(4);
  const auto net = QNetwork::initialized(QNetwork::default_dims(64), 0.1, rng);
  const double he0 = std::sqrt(6.0 / 64.0);
  for (double w : net.weights(0)) CHECK(std::abs(w) <= he0);
  for (double w : net.weights(2)) CHECK(std::abs(w) <= 1e-3);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    for (double b : net.biases(l)) CHECK(b == 0.0);
  }
}

TEST_CASE("scalar linear TD gradient") {
  QNetwork net({1, 1}, 0.0);
  net.weights(0)[0] = 1.0;
  // Q = w*s = 2, y = 5: d/dw (y - Q)^2 = 2(Q - y) * s = -12.
  const auto g = td_gradient(net, std::vector<double>{2.0}, 0, 5.0);
  CHECK(g[0] == Approx(-12.0));
  CHECK(g[1] == Approx(-6.0));
}

TEST_CASE("matching target gives zero gradient") {
  Rng rng(8);
  const auto net = QNetwork::initialized({6, 5, 3}, 0.0, rng);
  const auto s = random_input(6, rng);
  const auto g = td_gradient(net, s, 1, net.forward(s)[1]);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("backward matches central differences on every parameter") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Rng rng(seed);
    auto net = QNetwork::initialized({5, 7, 6, 4}, 0.0, rng);
    // Move the output layer off its tiny init so every path carries signal.
    for (double& w : net.weights(2)) w = gaussian(rng, 0.5);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      for (double& b : net.biases(l)) b = gaussian(rng, 0.1);
    }
    const auto s = random_input(5, rng);
    const auto c = random_input(4, rng);
    ForwardCache cache;
    net.forward(s, Mode::Eval, nullptr, cache);
    std::vector<double> grads(net.num_parameters(), 0.0);
    net.backward(cache, c, grads);
    const double h = 1e-6;
    for (std::size_t i = 0; i < net.num_parameters(); ++i) {
      const double keep = net.parameters()[i];
      net.parameters()[i] = keep + h;
      const double up = probe_objective(net, s, c);
      net.parameters()[i] = keep - h;
      const double down = probe_objective(net, s, c);
      net.parameters()[i] = keep;
      const double numeric = (up - down) / (2 * h);
      CHECK(grads[i] == Approx(numeric).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("train mode dropout is reproducible and eval mode is not stochastic") {
  Rng init(3);
  const auto net = QNetwork::initialized({8, 32, 16, 4}, 0.5, init);
  const auto s = random_input(8, init);
  ForwardCache a, b;
  Rng r1(77), r2(77);
  net.forward(s, Mode::Train, &r1, a);
  net.forward(s, Mode::Train, &r2, b);
  CHECK(a.activations.back() == b.activations.back());
  ForwardCache e;
  net.forward(s, Mode::Eval, nullptr, e);
  CHECK(e.activations.back() == net.forward(s));
  CHECK_THROWS_AS(net.forward(s, Mode::Train, nullptr, a), Error);
}

TEST_CASE("dropout keeps activations unbiased in expectation") {
  QNetwork net({1, 200, 1}, 0.25);
  for (double& w : net.weights(0)) w = 1.0;
  for (double& w : net.weights(1)) w = 1.0 / 200.0;
  Rng rng(5);
  double acc = 0.0;
  constexpr int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    ForwardCache cache;
    net.forward(std::vector<double>{1.0}, Mode::Train, &rng, cache);
    acc += cache.output()[0];
  }
  CHECK(acc / trials == Approx(1.0).epsilon(0.01));
}

TEST_CASE("adamw first step moves by about the learning rate") {
  QNetwork net({1, 1}, 0.0);
  OptimizerState opt;
  opt.lr = 0.1;
  opt.weight_decay = 0.0;
  opt.reset_for(net);
  adamw_step(net, std::vector<double>{1.0, 0.0}, opt);
  CHECK(net.weights(0)[0] == Approx(-0.1).epsilon(1e-6));
  CHECK(net.biases(0)[0] == 0.0);
  CHECK(opt.step == 1);
}

TEST_CASE("adamw fixed point and decoupled decay") {
  QNetwork net({2, 1}, 0.0);
  net.parameters()[0] = 1.0;
  net.parameters()[1] = -2.0;
  OptimizerState opt;
  opt.weight_decay = 0.0;
  opt.reset_for(net);
  const std::vector<double> zero(3, 0.0);
  adamw_step(net, zero, opt);
  CHECK(net.parameters()[0] == 1.0);
  CHECK(net.parameters()[1] == -2.0);

  opt.weight_decay = 0.5;
  opt.lr = 0.1;
  adamw_step(net, zero, opt);
  CHECK(net.parameters()[0] == Approx(1.0 * (1 - 0.1 * 0.5)));
  CHECK(net.parameters()[1] == Approx(-2.0 * (1 - 0.1 * 0.5)));
}

TEST_CASE("hard update copies and checks the architecture") {
  Rng rng(1);
  const auto online = QNetwork::initialized({4, 3, 2}, 0.0, rng);
  QNetwork target({4, 3, 2}, 0.0);
  hard_update(target, online);
  CHECK(std::equal(online.parameters().begin(), online.parameters().end(),
                   target.parameters().begin()));
  QNetwork other({4, 5, 2}, 0.0);
  CHECK_THROWS_AS(hard_update(other, online), Error);
}

TEST_CASE("checkpoint round trip is exact") {
  Rng rng(12);
  auto net = QNetwork::initialized({16, 8, 10}, 0.1, rng);
  OptimizerState opt;
  opt.reset_for(net);
  std::vector<double> g(net.num_parameters());
  for (double& v : g) v = gaussian(rng, 1.0);
  adamw_step(net, g, opt);
  const LearnerFooter footer{1234, 56, 78, 0.42};

  std::stringstream buf;
  write_checkpoint(buf, net, opt, footer);
  const auto ck = read_checkpoint(buf);
  CHECK(ck.net.dims() == net.dims());
  CHECK(ck.net.dropout_p() == net.dropout_p());
  CHECK(std::equal(net.parameters().begin(), net.parameters().end(), ck.net.parameters().begin()));
  CHECK(ck.opt.m == opt.m);
  CHECK(ck.opt.v == opt.v);
  CHECK(ck.opt.step == 1);
  REQUIRE(ck.learner.has_value());
  CHECK(*ck.learner == footer);

  std::stringstream plain;
  write_checkpoint(plain, net, opt);
  CHECK_FALSE(read_checkpoint(plain).learner.has_value());
}

TEST_CASE("corrupt checkpoints are rejected") {
  std::stringstream bad("NOPE1 and then some");
  CHECK_THROWS_WITH_AS(read_checkpoint(bad), doctest::Contains("bad magic"), Error);

  Rng rng(2);
  const auto net = QNetwork::initialized({4, 2}, 0.0, rng);
  OptimizerState opt;
  opt.reset_for(net);
  std::stringstream buf;
  write_checkpoint(buf, net, opt);
  std::string bytes = buf.str();
  bytes.resize(bytes.size() / 2);
  std::stringstream truncated(bytes);
  CHECK_THROWS_AS(read_checkpoint(truncated), Error);
}

TEST_CASE("dimension mismatch is rejected") {
  const QNetwork net({4, 2}, 0.0);
  CHECK_THROWS_AS(net.forward(std::vector<double>(5, 0.0)), Error);
  CHECK_THROWS_AS(QNetwork({4}, 0.0), Error);
  CHECK_THROWS_AS(QNetwork({4, 2}, 1.0), Error);
}
