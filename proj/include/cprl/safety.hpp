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

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cprl/domain.hpp"
#include "cprl/encoding.hpp"
#include "cprl/network.hpp"

namespace cprl {

// State -> Q-values over the 10 actions. Lets analysis code run on trained
// networks and on hand-built value tables alike.
using QFunction = std::function<std::vector<double>(std::span<const double> state)>;

// Eval-mode forward of `net`. The network must outlive the returned function.
QFunction q_function(const QNetwork& net);

// Q(s, A9) - max over the other nine actions.
double safety_advantage(std::span<const double> q_values);

// softmax(q / tau).
std::vector<double> boltzmann_policy(std::span<const double> q_values, double tau);

struct SweepPoint {
  double p_risk = 0.0;
  double pi_safe = 0.0;
  // log of the probability mass on non-safe actions, log(1 - pi_safe),
  // computed without cancellation so it stays informative once pi_safe
  // rounds to 1.
  double log_unsafe_mass = 0.0;
  // log((1 - pi_safe) / pi_safe); stays resolvable at both saturation ends.
  double log_unsafe_odds = 0.0;
};

// Worst-case high-risk Q-vector allowed by bounded base rewards:
//   Q(A9)    = r_safe - gamma * bound / (1 - gamma)
//   Q(other) = -p_risk + bound + gamma * bound / (1 - gamma)
std::vector<double> worst_case_q(double p_risk, double base_bound, double r_safe, double gamma);

std::vector<SweepPoint> safety_concentration_sweep(std::span<const double> p_risk_values,
                                                   double base_bound, double r_safe,
                                                   double gamma, double tau);

// Strict increase of the true safe-action probability, judged on
// log_unsafe_odds, which keeps resolving differences after pi_safe rounds to
// 0 or 1. The rounded pi_safe column must also be non-decreasing.
bool strictly_increasing(std::span<const SweepPoint> sweep);

// Smallest swept p_risk with pi_safe >= threshold, if any.
std::optional<double> concentration_threshold(std::span<const SweepPoint> sweep,
                                              double threshold = 0.999);

// Fraction of truly High samples whose prediction is not High. Predictions may
// be absent (no risk call made), which counts as a miss.
double hrmdr(std::span<const std::optional<RiskLevel>> predicted,
             std::span<const RiskLevel> truth);

struct CrisisMetrics {
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> f1;
  std::optional<double> false_positive_rate;
  std::size_t n_high_risk = 0;
};

// Positive prediction: action == A9. Positive label: risk == High.
// Undefined ratios (zero denominators) are left empty.
CrisisMetrics crisis_metrics(std::span<const Action> actions, std::span<const RiskLevel> truth);

struct SafetyReport {
  std::optional<double> mean_advantage;
  std::optional<double> median_advantage;
  std::optional<double> positive_fraction;
  CrisisMetrics crisis;
  // Risk predicted High iff the greedy action is A9.
  std::optional<double> hrmdr;
  std::vector<double> advantages;  // one per High-risk eval state
};

struct LabeledState {
  CognitiveLabels labels;
  StateVector state;
};

SafetyReport advantage_report(const QFunction& policy, std::span<const LabeledState> eval_states);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

// Equal-width bins over [min, max] of the data; the last bin is closed.
Histogram histogram(std::span<const double> values, std::size_t bins);

}  // namespace cprl
