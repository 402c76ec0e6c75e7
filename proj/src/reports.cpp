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

#include "cprl/reports.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "cprl/metrics.hpp"

namespace cprl {

using ojson = nlohmann::ordered_json;

namespace {

ojson optional_number(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

}  // namespace

std::string hit_rates_to_json(const HitRateReport& r) {
  ojson j;
  j["overall"] = {{"n", r.n_matchable},
                  {"gold_rate", r.gold_rate},
                  {"silver_rate", r.silver_rate},
                  {"gold_plus_silver_rate", r.gold_plus_silver_rate},
                  {"combined", r.combined}};
  ojson per_type = ojson::object();
  for (DistortionType d : kAllDistortions) {
    const auto& t = r.per_type[index_of(d)];
    per_type[std::string(name_of(d))] = {{"n", t.n},
                                         {"gold_rate", t.gold_rate},
                                         {"silver_rate", t.silver_rate},
                                         {"combined", t.combined}};
  }
  j["per_type"] = per_type;
  j["crisis"] = {{"n", r.n_crisis}, {"a9_rate", optional_number(r.crisis_action_rate)}};
  j["n_control"] = r.n_control;
  return j.dump(2);
}

void write_hit_rates_csv(std::ostream& out, const HitRateReport& r) {
  std::vector<std::size_t> order(kNumDistortions);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r.per_type[a].combined > r.per_type[b].combined;
  });
  out << "distortion,n,gold_rate,silver_rate,combined\n";
  for (std::size_t d : order) {
    const auto& t = r.per_type[d];
    out << name_of(distortion_from_index(d)) << ',' << t.n << ',' << format_real(t.gold_rate)
        << ',' << format_real(t.silver_rate) << ',' << format_real(t.combined) << '\n';
  }
}

std::string safety_report_to_json(const SafetyReport& r) {
  ojson j;
  j["n_high_risk"] = r.advantages.size();
  j["mean_advantage"] = optional_number(r.mean_advantage);
  j["median_advantage"] = optional_number(r.median_advantage);
  j["positive_fraction"] = optional_number(r.positive_fraction);
  j["crisis_recall"] = optional_number(r.crisis.recall);
  j["crisis_precision"] = optional_number(r.crisis.precision);
  j["crisis_f1"] = optional_number(r.crisis.f1);
  j["false_positive_rate"] = optional_number(r.crisis.false_positive_rate);
  j["hrmdr"] = optional_number(r.hrmdr);
  return j.dump(2);
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << format_real(h.edges[i]) << ',' << format_real(h.edges[i + 1]) << ',' << h.counts[i]
        << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> sweep) {
  out << "p_risk,pi_safe,log_unsafe_mass,log_unsafe_odds\n";
  for (const auto& p : sweep) {
    out << format_real(p.p_risk) << ',' << format_real(p.pi_safe) << ','
        << format_real(p.log_unsafe_mass) << ',' << format_real(p.log_unsafe_odds) << '\n';
  }
}

}  // namespace cprl
