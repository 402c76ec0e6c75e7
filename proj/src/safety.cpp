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

#include "cprl/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cprl/learner.hpp"

namespace cprl {

QFunction q_function(const QNetwork& net) {
  return [&net](std::span<const double> s) { return net.forward(s); };
}

double safety_advantage(std::span<const double> q_values) {
  if (q_values.size() != kNumActions) throw Error("safety_advantage: expected 10 q-values");
  const std::size_t safe = index_of(kSafeAction);
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    if (i != safe) best_other = std::max(best_other, q_values[i]);
  }
  return q_values[safe] - best_other;
}

std::vector<double> boltzmann_policy(std::span<const double> q_values, double tau) {
  return softmax(q_values, tau);
}

std::vector<double> worst_case_q(double p_risk, double base_bound, double r_safe, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error("gamma must satisfy 0 <= gamma < 1 so that future value is bounded by "
                "R_max / (1 - gamma)");
  }
  const double future = gamma * base_bound / (1.0 - gamma);
  std::vector<double> q(kNumActions, -p_risk + base_bound + future);
  q[index_of(kSafeAction)] = r_safe - future;
  return q;
}

std::vector<SweepPoint> safety_concentration_sweep(std::span<const double> p_risk_values,
                                                   double base_bound, double r_safe,
                                                   double gamma, double tau) {
  if (!(tau > 0.0)) throw Error("safety sweep: tau must be > 0");
  if (p_risk_values.empty()) throw Error("safety sweep: need at least one p_risk value");
  std::vector<SweepPoint> out;
  out.reserve(p_risk_values.size());
  const std::size_t safe = index_of(kSafeAction);
  for (double p : p_risk_values) {
    const auto q = worst_case_q(p, base_bound, r_safe, gamma);
    const auto pi = boltzmann_policy(q, tau);
    // log sum_{j != safe} exp((q_j - q_safe)/tau) - log(1 + that sum)
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (j != safe) mx = std::max(mx, (q[j] - q[safe]) / tau);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (j != safe) acc += std::exp((q[j] - q[safe]) / tau - mx);
    }
    const double log_others = mx + std::log(acc);
    // log(1 + e^x) evaluated stably.
    const double log_norm = log_others > 0.0 ? log_others + std::log1p(std::exp(-log_others))
                                             : std::log1p(std::exp(log_others));
    out.push_back({p, pi[safe], log_others - log_norm, log_others});
  }
  return out;
}

bool strictly_increasing(std::span<const SweepPoint> sweep) {
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i].pi_safe < sweep[i - 1].pi_safe) return false;
    if (!(sweep[i].log_unsafe_odds < sweep[i - 1].log_unsafe_odds)) return false;
  }
  return true;
}

std::optional<double> concentration_threshold(std::span<const SweepPoint> sweep,
                                              double threshold) {
  std::optional<double> best;
  for (const auto& pt : sweep) {
    if (pt.pi_safe >= threshold && (!best || pt.p_risk < *best)) best = pt.p_risk;
  }
  return best;
}

double hrmdr(std::span<const std::optional<RiskLevel>> predicted,
             std::span<const RiskLevel> truth) {
  if (predicted.size() != truth.size()) throw Error("hrmdr: length mismatch");
  std::size_t high = 0;
  std::size_t missed = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != RiskLevel::High) continue;
    ++high;
    if (predicted[i] != RiskLevel::High) ++missed;
  }
  if (high == 0) throw Error("hrmdr: no High-risk samples");
  return static_cast<double>(missed) / static_cast<double>(high);
}

CrisisMetrics crisis_metrics(std::span<const Action> actions, std::span<const RiskLevel> truth) {
  if (actions.size() != truth.size()) throw Error("crisis_metrics: length mismatch");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const bool predicted = actions[i] == kSafeAction;
    const bool positive = truth[i] == RiskLevel::High;
    if (predicted && positive) ++tp;
    else if (predicted) ++fp;
    else if (positive) ++fn;
    else ++tn;
  }
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  CrisisMetrics m;
  m.n_high_risk = tp + fn;
  m.recall = ratio(tp, tp + fn);
  m.precision = ratio(tp, tp + fp);
  m.false_positive_rate = ratio(fp, fp + tn);
  if (m.recall && m.precision && *m.recall + *m.precision > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

SafetyReport advantage_report(const QFunction& policy, std::span<const LabeledState> eval_states) {
  SafetyReport report;
  std::vector<Action> actions;
  std::vector<RiskLevel> truth;
  actions.reserve(eval_states.size());
  truth.reserve(eval_states.size());
  for (const auto& es : eval_states) {
    const auto q = policy(es.state);
    actions.push_back(action_from_index(argmax(q)));
    truth.push_back(es.labels.risk);
    if (es.labels.risk == RiskLevel::High) report.advantages.push_back(safety_advantage(q));
  }
  report.crisis = crisis_metrics(actions, truth);
  if (report.crisis.n_high_risk > 0) {
    std::vector<std::optional<RiskLevel>> predicted(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (actions[i] == kSafeAction) predicted[i] = RiskLevel::High;
    }
    report.hrmdr = hrmdr(predicted, truth);
  }
  const auto& adv = report.advantages;
  if (!adv.empty()) {
    const double n = static_cast<double>(adv.size());
    report.mean_advantage = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
    std::vector<double> sorted = adv;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    report.median_advantage =
        sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    report.positive_fraction =
        static_cast<double>(std::count_if(adv.begin(), adv.end(), [](double a) { return a > 0.0; })) / n;
  }
  return report;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw Error("histogram: need at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) {
    h.edges.assign(bins + 1, 0.0);
    return h;
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

}  // namespace cprl
