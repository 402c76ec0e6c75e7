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

#include "cprl/policy_eval.hpp"

#include <algorithm>
#include <cmath>

#include "cprl/learner.hpp"

namespace cprl {

double combined_hit_rate(double gold_rate, double silver_rate) {
  return gold_rate + kSilverWeight * silver_rate;
}

std::vector<CognitiveLabels> balanced_eval_grid(std::size_t repeats) {
  std::vector<CognitiveLabels> out;
  out.reserve(repeats * kNumDistortions * kNumIntensities * 2);
  for (std::size_t r = 0; r < repeats; ++r) {
    for (DistortionType d : kAllDistortions) {
      for (Intensity i : kAllIntensities) {
        for (RiskLevel risk : {RiskLevel::Low, RiskLevel::Medium}) out.push_back({d, i, risk});
      }
    }
  }
  return out;
}

std::vector<CognitiveLabels> full_label_grid(std::size_t repeats) {
  std::vector<CognitiveLabels> out;
  out.reserve(repeats * kNumDistortions * kNumIntensities * kNumRiskLevels);
  for (std::size_t r = 0; r < repeats; ++r) {
    for (DistortionType d : kAllDistortions) {
      for (Intensity i : kAllIntensities) {
        for (RiskLevel risk : kAllRiskLevels) out.push_back({d, i, risk});
      }
    }
  }
  return out;
}

std::vector<CognitiveLabels> natural_eval_scenarios(const ScenarioDistribution& dist,
                                                    std::size_t n, Rng& rng) {
  dist.validate();
  std::vector<CognitiveLabels> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(sample_labels(dist, rng));
  return out;
}

std::vector<LabeledState> encode_scenarios(std::span<const CognitiveLabels> scenarios,
                                           const EncoderConfig& enc, Rng& rng) {
  std::vector<LabeledState> out;
  out.reserve(scenarios.size());
  for (const auto& labels : scenarios) out.push_back({labels, encode_state(labels, enc, rng)});
  return out;
}

HitRateReport evaluate_hit_rates(const QFunction& policy,
                                 std::span<const CognitiveLabels> scenarios,
                                 const EncoderConfig& enc, Rng& rng) {
  const auto states = encode_scenarios(scenarios, enc, rng);
  return evaluate_hit_rates(policy, states);
}

HitRateReport evaluate_hit_rates(const QFunction& policy, std::span<const LabeledState> states) {
  HitRateReport report;
  std::array<std::size_t, kNumDistortions> gold{}, silver{};
  std::size_t crisis_hits = 0;
  for (const auto& es : states) {
    const Action a = action_from_index(argmax(policy(es.state)));
    if (es.labels.risk == RiskLevel::High) {
      ++report.n_crisis;
      if (a == kSafeAction) ++crisis_hits;
      continue;
    }
    if (!es.labels.distortion) {
      ++report.n_control;
      continue;
    }
    const std::size_t d = index_of(*es.labels.distortion);
    ++report.per_type[d].n;
    switch (classify_action(*es.labels.distortion, a)) {
      case MatchKind::Gold: ++gold[d]; break;
      case MatchKind::Silver: ++silver[d]; break;
      case MatchKind::Mismatch: break;
    }
  }
  std::size_t gold_total = 0, silver_total = 0;
  for (std::size_t d = 0; d < kNumDistortions; ++d) {
    auto& t = report.per_type[d];
    report.n_matchable += t.n;
    gold_total += gold[d];
    silver_total += silver[d];
    if (t.n == 0) continue;
    t.gold_rate = static_cast<double>(gold[d]) / static_cast<double>(t.n);
    t.silver_rate = static_cast<double>(silver[d]) / static_cast<double>(t.n);
    t.combined = combined_hit_rate(t.gold_rate, t.silver_rate);
  }
  if (report.n_matchable > 0) {
    const double n = static_cast<double>(report.n_matchable);
    report.gold_rate = static_cast<double>(gold_total) / n;
    report.silver_rate = static_cast<double>(silver_total) / n;
    report.gold_plus_silver_rate = static_cast<double>(gold_total + silver_total) / n;
    report.combined = combined_hit_rate(report.gold_rate, report.silver_rate);
  }
  if (report.n_crisis > 0) {
    report.crisis_action_rate =
        static_cast<double>(crisis_hits) / static_cast<double>(report.n_crisis);
  }
  return report;
}

QFunction oracle_gold_policy() {
  return [](std::span<const double> s) {
    if (s.size() < kMinStateDim) throw Error("oracle policy: state too short");
    std::vector<double> q(kNumActions, 0.0);
    const auto risk_block = s.subspan(kRiskOffset, kNumRiskLevels);
    if (argmax(risk_block) == index_of(RiskLevel::High)) {
      q[index_of(kSafeAction)] = 1.0;
      return q;
    }
    if (s[kPresenceIndex] < 0.5) {
      q[index_of(Action::EmpathicValidation)] = 1.0;
      return q;
    }
    const auto type = distortion_from_index(argmax(s.subspan(kDistortionOffset, kNumDistortions)));
    q[index_of(gold_strategy(type))] = 1.0;
    return q;
  };
}

LossShares loss_decomposition(const MetricsTrace& trace, double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw Error("loss_decomposition: window fraction must be in (0,1]");
  }
  std::vector<const MetricsRow*> rows;
  for (const auto& r : trace.rows) {
    if (r.q_loss && r.kl_loss && r.total_loss) rows.push_back(&r);
  }
  if (rows.empty()) throw Error("loss_decomposition: trace has no loss rows");
  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(rows.size()))));
  double q = 0.0, kl = 0.0, total = 0.0;
  for (std::size_t i = rows.size() - window; i < rows.size(); ++i) {
    q += *rows[i]->q_loss;
    kl += trace.kl_beta * *rows[i]->kl_loss;
    total += *rows[i]->total_loss;
  }
  if (!(total > 0.0)) throw Error("loss_decomposition: total loss is zero");
  return {q / total, kl / total};
}

std::array<double, 3> phase_summary(const MetricsTrace& trace) {
  std::vector<double> rewards;
  for (const auto& r : trace.rows) {
    if (r.avg_reward) rewards.push_back(*r.avg_reward);
  }
  if (rewards.size() < 3) throw Error("phase_summary: need at least 3 reward intervals");
  std::array<double, 3> out{};
  const std::size_t n = rewards.size();
  for (std::size_t phase = 0; phase < 3; ++phase) {
    const std::size_t begin = phase * n / 3;
    const std::size_t end = (phase + 1) * n / 3;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += rewards[i];
    out[phase] = sum / static_cast<double>(end - begin);
  }
  return out;
}

}  // namespace cprl
