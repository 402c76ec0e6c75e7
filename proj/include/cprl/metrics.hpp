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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cprl {

// One row per metrics interval. Cells without data for the interval (no
// learner step yet, no finished episode, no High-risk turn) are empty.
struct MetricsRow {
  std::uint64_t step = 0;
  std::uint64_t episodes = 0;
  double epsilon = 0.0;
  std::optional<double> avg_reward;
  std::optional<double> q_loss;
  std::optional<double> kl_loss;
  std::optional<double> total_loss;
  std::optional<double> gold_hit_rate;
  std::optional<double> silver_hit_rate;
  std::optional<double> crisis_recall;
};

struct MetricsTrace {
  std::vector<MetricsRow> rows;
  // The KL weight the losses were recorded with.
  double kl_beta = 0.0;

  // Throws if the step column is not strictly increasing.
  void validate() const;
};

inline constexpr const char* kMetricsHeader =
    "step,episodes,epsilon,avg_reward,q_loss,kl_loss,total_loss,gold_hit_rate,silver_hit_rate,"
    "crisis_recall";

void write_metrics_csv(std::ostream& out, const MetricsTrace& trace);
MetricsTrace read_metrics_csv(std::istream& in, double kl_beta);

// Shortest round-trip decimal text for a double ("." separator).
std::string format_real(double v);

}  // namespace cprl
