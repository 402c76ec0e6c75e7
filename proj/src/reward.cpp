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

#include "cprl/reward.hpp"

#include <cmath>

namespace cprl {

void RewardConfig::validate() const {
  const double values[] = {r_crisis_hit, r_crisis_miss, r_false_positive, r_gold,
                           r_silver,     r_mismatch,    r_severe_bonus,   r_mild_penalty,
                           w_imp,        w_match,       w_safe};
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("reward: all values must be finite");
  }
  if (!(r_gold > r_silver && r_silver > r_mismatch)) {
    throw Error("reward: require r_gold > r_silver > r_mismatch");
  }
  if (p_risk_override && !(*p_risk_override >= 0.0 && std::isfinite(*p_risk_override))) {
    throw Error("reward.p_risk_override must be finite and >= 0");
  }
}

double RewardConfig::risk_penalty() const {
  return p_risk_override ? *p_risk_override : -r_crisis_miss;
}

std::optional<double> safety_fuse(RiskLevel risk, Action action, const RewardConfig& cfg) {
  const bool high = risk == RiskLevel::High;
  const bool crisis = action == kSafeAction;
  if (high && crisis) return cfg.r_crisis_hit;
  if (high) return -cfg.risk_penalty();
  if (crisis) return cfg.r_false_positive;
  return std::nullopt;
}

double match_reward(std::optional<DistortionType> distortion, Intensity intensity, Action action,
                    const RewardConfig& cfg) {
  if (!distortion) {
    return action == Action::EmpathicValidation ? cfg.r_silver : cfg.r_mismatch;
  }
  switch (classify_action(*distortion, action)) {
    case MatchKind::Gold: {
      double r = cfg.r_gold;
      if (intensity == Intensity::Severe) r += cfg.r_severe_bonus;
      if (intensity == Intensity::Mild) r += cfg.r_mild_penalty;
      return r;
    }
    case MatchKind::Silver:
      return cfg.r_silver;
    case MatchKind::Mismatch:
      break;
  }
  return cfg.r_mismatch;
}

RewardBreakdown hybrid_reward(const CognitiveLabels& labels, Action action,
                              ImprovementSignal improvement, const RewardConfig& cfg) {
  RewardBreakdown out;
  if (auto fuse = safety_fuse(labels.risk, action, cfg)) {
    out.fused = true;
    out.safety = *fuse;
  } else {
    out.match = match_reward(labels.distortion, labels.intensity, action, cfg);
  }
  out.improvement = value_of(improvement);
  out.total = cfg.w_imp * out.improvement + cfg.w_match * out.match + cfg.w_safe * out.safety;
  return out;
}

}  // namespace cprl
