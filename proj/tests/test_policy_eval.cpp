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

#include "cprl/policy_eval.hpp"

using namespace cprl;
using doctest::Approx;

TEST_CASE("combined metric") {
  CHECK(combined_hit_rate(0.6, 0.2) == Approx(0.75));
  CHECK(kSilverWeight == 0.75);
}

TEST_CASE("grids") {
  const auto b = balanced_eval_grid(2);
  CHECK(b.size() == 2 * 8 * 3 * 2);
  for (const auto& l : b) CHECK(l.risk != RiskLevel::High);
  const auto f = full_label_grid(1);
  CHECK(f.size() == 72);
  CHECK(std::count_if(f.begin(), f.end(), [](const auto& l) { return l.risk == RiskLevel::High; }) == 24);
}

TEST_CASE("oracle policy scores perfectly on noise-free states") {
  Rng rng(0);
  const auto report = evaluate_hit_rates(oracle_gold_policy(), balanced_eval_grid(1), {64, 0.0, 0}, rng);
  CHECK(report.gold_rate == 1.0);
  CHECK(report.silver_rate == 0.0);
  CHECK(report.combined == 1.0);
  for (const auto& t : report.per_type) {
    CHECK(t.n == 6);
    CHECK(t.gold_rate == 1.0);
  }
  const auto full = evaluate_hit_rates(oracle_gold_policy(), full_label_grid(1), {64, 0.0, 0}, rng);
  CHECK(full.n_crisis == 24);
  CHECK(full.crisis_action_rate == 1.0);
  CHECK(full.n_matchable == 48);
}

TEST_CASE("silver-only policy") {
  // Always answer with Empathic Validation: silver for every type but All-or-Nothing.
  const QFunction validate = [](std::span<const double>) {
    std::vector<double> q(10, 0.0);
    q[0] = 1.0;
    return q;
  };
  std::vector<LabeledState> states;
  Rng rng(0);
  for (const auto& l : balanced_eval_grid(1)) states.push_back({l, encode_state(l, {16, 0.0, 0}, rng)});
  const auto r = evaluate_hit_rates(validate, states);
  CHECK(r.gold_rate == 0.0);
  CHECK(r.silver_rate == Approx(7.0 / 8.0));
  CHECK(r.per_type[index_of(DistortionType::AllOrNothing)].silver_rate == 0.0);
  CHECK(r.combined == Approx(0.75 * 7.0 / 8.0));
  CHECK(r.gold_plus_silver_rate == Approx(7.0 / 8.0));
}

TEST_CASE("control scenarios are counted but not scored") {
  std::vector<CognitiveLabels> s{{std::nullopt, Intensity::Mild, RiskLevel::Low}};
  Rng rng(0);
  const auto r = evaluate_hit_rates(oracle_gold_policy(), s, {16, 0.0, 0}, rng);
  CHECK(r.n_control == 1);
  CHECK(r.n_matchable == 0);
  CHECK_FALSE(r.crisis_action_rate.has_value());
}

TEST_CASE("natural scenarios follow the prior") {
  Rng a(5), b(5);
  const auto dist = default_scenario_distribution();
  CHECK(natural_eval_scenarios(dist, 50, a) == natural_eval_scenarios(dist, 50, b));
}

namespace {

MetricsTrace constant_trace(double q, double kl, double beta, std::size_t n) {
  MetricsTrace t;
  t.kl_beta = beta;
  for (std::size_t i = 0; i < n; ++i) {
    MetricsRow r;
    r.step = (i + 1) * 10;
    r.q_loss = q;
    r.kl_loss = kl;
    r.total_loss = q + beta * kl;
    r.avg_reward = static_cast<double>(i);
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("loss decomposition") {
  const auto no_kl = loss_decomposition(constant_trace(0.7, 0.3, 0.0, 20));
  CHECK(no_kl.q_share == 1.0);
  CHECK(no_kl.kl_share == 0.0);
  const auto mixed = loss_decomposition(constant_trace(0.9, 1.0, 0.1, 20));
  CHECK(mixed.q_share == Approx(0.9));
  CHECK(mixed.kl_share == Approx(0.1));
  MetricsTrace empty;
  CHECK_THROWS_AS(loss_decomposition(empty), Error);
}

TEST_CASE("phase summary") {
  const auto rising = phase_summary(constant_trace(1, 1, 0.1, 9));
  CHECK(rising[0] < rising[1]);
  CHECK(rising[1] < rising[2]);
  CHECK(rising[0] == Approx(1.0));
  auto flat = constant_trace(1, 1, 0.1, 9);
  for (auto& r : flat.rows) r.avg_reward = 2.0;
  const auto f = phase_summary(flat);
  CHECK(f[0] == f[1]);
  CHECK(f[1] == f[2]);
  CHECK_THROWS_AS(phase_summary(constant_trace(1, 1, 0.1, 2)), Error);
}
