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

#include "cprl/domain.hpp"

#include <algorithm>
#include <string>

namespace cprl {
namespace {

constexpr std::array<std::string_view, kNumDistortions> kDistortionNames = {
    "EmotionalReasoning", "Catastrophizing",    "AllOrNothing", "Personalization",
    "Labeling",           "Overgeneralization", "MindReading",  "ShouldStatements",
};
constexpr std::array<std::string_view, kNumIntensities> kIntensityNames = {"Mild", "Moderate",
                                                                            "Severe"};
constexpr std::array<std::string_view, kNumRiskLevels> kRiskNames = {"Low", "Medium", "High"};
constexpr std::array<std::string_view, kNumActions> kActionIds = {"A0", "A1", "A2", "A3", "A4",
                                                                  "A5", "A6", "A7", "A8", "A9"};
constexpr std::array<std::string_view, kNumActions> kStrategyNames = {
    "EmpathicValidation",  "FindingTheGray", "ExamineTheEvidence", "RealityTesting",
    "DeCatastrophizing",   "CostBenefitAnalysis", "Reattribution", "BehaviorVsIdentity",
    "FeelingsVsFacts",     "CrisisIntervention",
};

using A = Action;
// Rows in DistortionType order.
constexpr std::array<StrategyEntry, kNumDistortions> kMatrix = {{
    {A::FeelingsVsFacts, {A::EmpathicValidation, A::RealityTesting}},          // EmotionalReasoning
    {A::DeCatastrophizing, {A::EmpathicValidation, A::ExamineTheEvidence}},    // Catastrophizing
    {A::FindingTheGray, {A::FeelingsVsFacts, A::ExamineTheEvidence}},          // AllOrNothing
    {A::Reattribution, {A::EmpathicValidation, A::RealityTesting}},            // Personalization
    {A::BehaviorVsIdentity, {A::EmpathicValidation, A::CostBenefitAnalysis}},  // Labeling
    {A::ExamineTheEvidence, {A::EmpathicValidation, A::FindingTheGray}},       // Overgeneralization
    {A::RealityTesting, {A::EmpathicValidation, A::FeelingsVsFacts}},          // MindReading
    {A::CostBenefitAnalysis, {A::EmpathicValidation, A::BehaviorVsIdentity}},  // ShouldStatements
}};

template <typename Enum, std::size_t N>
Enum parse_name(const std::array<std::string_view, N>& names, std::string_view name,
                std::string_view what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error("unknown " + std::string(what) + " name '" + std::string(name) + "'");
  }
  return static_cast<Enum>(it - names.begin());
}

void check_index(std::size_t index, std::size_t bound, std::string_view what) {
  if (index >= bound) {
    throw Error(std::string(what) + " index " + std::to_string(index) + " out of range");
  }
}

}  // namespace

DistortionType distortion_from_index(std::size_t index) {
  check_index(index, kNumDistortions, "distortion");
  return static_cast<DistortionType>(index);
}
Intensity intensity_from_index(std::size_t index) {
  check_index(index, kNumIntensities, "intensity");
  return static_cast<Intensity>(index);
}
RiskLevel risk_from_index(std::size_t index) {
  check_index(index, kNumRiskLevels, "risk");
  return static_cast<RiskLevel>(index);
}
Action action_from_index(std::size_t index) {
  check_index(index, kNumActions, "action");
  return static_cast<Action>(index);
}

std::string_view name_of(DistortionType d) { return kDistortionNames.at(index_of(d)); }
std::string_view name_of(Intensity i) { return kIntensityNames.at(index_of(i)); }
std::string_view name_of(RiskLevel r) { return kRiskNames.at(index_of(r)); }
std::string_view name_of(Action a) { return kActionIds.at(index_of(a)); }
std::string_view strategy_name(Action a) { return kStrategyNames.at(index_of(a)); }

DistortionType parse_distortion(std::string_view name) {
  return parse_name<DistortionType>(kDistortionNames, name, "distortion");
}
Intensity parse_intensity(std::string_view name) {
  return parse_name<Intensity>(kIntensityNames, name, "intensity");
}
RiskLevel parse_risk(std::string_view name) {
  return parse_name<RiskLevel>(kRiskNames, name, "risk level");
}
Action parse_action(std::string_view name) {
  if (auto it = std::find(kActionIds.begin(), kActionIds.end(), name); it != kActionIds.end()) {
    return static_cast<Action>(it - kActionIds.begin());
  }
  return parse_name<Action>(kStrategyNames, name, "action");
}

const StrategyEntry& strategy_entry(DistortionType d) { return kMatrix.at(index_of(d)); }
Action gold_strategy(DistortionType d) { return strategy_entry(d).gold; }
std::array<Action, 2> silver_strategies(DistortionType d) { return strategy_entry(d).silvers; }

MatchKind classify_action(DistortionType d, Action a) {
  const auto& entry = strategy_entry(d);
  if (a == entry.gold) return MatchKind::Gold;
  if (a == entry.silvers[0] || a == entry.silvers[1]) return MatchKind::Silver;
  return MatchKind::Mismatch;
}

}  // namespace cprl
