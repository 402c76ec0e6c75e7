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

#include <optional>

#include "cprl/domain.hpp"

namespace cprl {

// Scalar values of the three reward layers and the hybrid-reward weights.
struct RewardConfig {
  // Safety fuse.
  double r_crisis_hit = 4.0;
  double r_crisis_miss = -1.0;
  double r_false_positive = -2.0;
  // Strategy matrix.
  double r_gold = 1.8;
  double r_silver = 0.2;
  double r_mismatch = -0.5;
  // Intensity modifier, added on top of r_gold.
  double r_severe_bonus = 1.2;
  double r_mild_penalty = -0.8;
  // Weights on improvement, match and safety.
  double w_imp = 1.0;
  double w_match = 1.0;
  double w_safe = 1.0;
  // When set, a missed crisis costs -p_risk_override instead of r_crisis_miss.
  std::optional<double> p_risk_override;

  void validate() const;
  // The penalty P_risk actually charged for a missed crisis (positive number).
  double risk_penalty() const;
};

struct RewardBreakdown {
  double safety = 0.0;
  double match = 0.0;
  double improvement = 0.0;
  double total = 0.0;
  bool fused = false;
};

// Top-priority safety layer. Empty when neither High risk nor A9 is involved.
std::optional<double> safety_fuse(RiskLevel risk, Action action, const RewardConfig& cfg);

// Strategy-matrix layer plus intensity modifier. Only meaningful when the fuse
// did not fire.
double match_reward(std::optional<DistortionType> distortion, Intensity intensity, Action action,
                    const RewardConfig& cfg);

RewardBreakdown hybrid_reward(const CognitiveLabels& labels, Action action,
                              ImprovementSignal improvement, const RewardConfig& cfg);

}  // namespace cprl
