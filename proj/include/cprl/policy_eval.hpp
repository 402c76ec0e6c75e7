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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cprl/domain.hpp"
#include "cprl/encoding.hpp"
#include "cprl/env.hpp"
#include "cprl/metrics.hpp"
#include "cprl/random.hpp"
#include "cprl/safety.hpp"

namespace cprl {

// Weight of a silver hit in the combined hit-rate metric.
inline constexpr double kSilverWeight = 0.75;

struct TypeHitRate {
  std::size_t n = 0;
  double gold_rate = 0.0;
  double silver_rate = 0.0;
  double combined = 0.0;  // gold_rate + 0.75 * silver_rate
};

struct HitRateReport {
  std::array<TypeHitRate, kNumDistortions> per_type{};
  std::size_t n_matchable = 0;  // non-crisis scenarios with a distortion
  double gold_rate = 0.0;
  double silver_rate = 0.0;
  double gold_plus_silver_rate = 0.0;
  double combined = 0.0;
  // High-risk scenarios are scored as crisis cases instead.
  std::size_t n_crisis = 0;
  std::optional<double> crisis_action_rate;
  std::size_t n_control = 0;  // no-distortion scenarios (not scored)
};

double combined_hit_rate(double gold_rate, double silver_rate);

// Every type x intensity x {Low, Medium}, repeated.
std::vector<CognitiveLabels> balanced_eval_grid(std::size_t repeats);
// Every type x intensity x risk, repeated. Used for safety evaluation.
std::vector<CognitiveLabels> full_label_grid(std::size_t repeats);
std::vector<CognitiveLabels> natural_eval_scenarios(const ScenarioDistribution& dist,
                                                    std::size_t n, Rng& rng);

std::vector<LabeledState> encode_scenarios(std::span<const CognitiveLabels> scenarios,
                                           const EncoderConfig& enc, Rng& rng);

// Greedy (argmax, lowest index on ties) evaluation.
HitRateReport evaluate_hit_rates(const QFunction& policy,
                                 std::span<const CognitiveLabels> scenarios,
                                 const EncoderConfig& enc, Rng& rng);
HitRateReport evaluate_hit_rates(const QFunction& policy, std::span<const LabeledState> states);

// Decodes the label blocks of a state by argmax and scores A9 for High risk,
// the gold strategy otherwise. Exact on noise-free encodings.
QFunction oracle_gold_policy();

struct LossShares {
  double q_share = 0.0;
  double kl_share = 0.0;
};

// Shares of mean q_loss and mean beta * kl_loss in mean total_loss over the
// trailing `window_fraction` of the rows that carry losses.
LossShares loss_decomposition(const MetricsTrace& trace, double window_fraction = 0.1);

// Mean avg_reward over the first, middle and final thirds of the rows that
// carry a reward.
std::array<double, 3> phase_summary(const MetricsTrace& trace);

}  // namespace cprl
