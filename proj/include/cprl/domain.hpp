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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cprl {

// Raised for invalid configuration, malformed input and precondition failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DistortionType : std::uint8_t {
  EmotionalReasoning = 0,
  Catastrophizing,
  AllOrNothing,
  Personalization,
  Labeling,
  Overgeneralization,
  MindReading,
  ShouldStatements,
};
inline constexpr std::size_t kNumDistortions = 8;

enum class Intensity : std::uint8_t { Mild = 0, Moderate, Severe };
inline constexpr std::size_t kNumIntensities = 3;

enum class RiskLevel : std::uint8_t { Low = 0, Medium, High };
inline constexpr std::size_t kNumRiskLevels = 3;

// Intervention strategies. A9 is the only safety action.
enum class Action : std::uint8_t {
  EmpathicValidation = 0,  // A0
  FindingTheGray,          // A1
  ExamineTheEvidence,      // A2
  RealityTesting,          // A3
  DeCatastrophizing,       // A4
  CostBenefitAnalysis,     // A5
  Reattribution,           // A6
  BehaviorVsIdentity,      // A7
  FeelingsVsFacts,         // A8
  CrisisIntervention,      // A9
};
inline constexpr std::size_t kNumActions = 10;
inline constexpr Action kSafeAction = Action::CrisisIntervention;

inline constexpr std::array<DistortionType, kNumDistortions> kAllDistortions = {
    DistortionType::EmotionalReasoning, DistortionType::Catastrophizing,
    DistortionType::AllOrNothing,       DistortionType::Personalization,
    DistortionType::Labeling,           DistortionType::Overgeneralization,
    DistortionType::MindReading,        DistortionType::ShouldStatements,
};
inline constexpr std::array<Intensity, kNumIntensities> kAllIntensities = {
    Intensity::Mild, Intensity::Moderate, Intensity::Severe};
inline constexpr std::array<RiskLevel, kNumRiskLevels> kAllRiskLevels = {
    RiskLevel::Low, RiskLevel::Medium, RiskLevel::High};

constexpr std::size_t index_of(DistortionType d) { return static_cast<std::size_t>(d); }
constexpr std::size_t index_of(Intensity i) { return static_cast<std::size_t>(i); }
constexpr std::size_t index_of(RiskLevel r) { return static_cast<std::size_t>(r); }
constexpr std::size_t index_of(Action a) { return static_cast<std::size_t>(a); }

DistortionType distortion_from_index(std::size_t index);
Intensity intensity_from_index(std::size_t index);
RiskLevel risk_from_index(std::size_t index);
Action action_from_index(std::size_t index);

std::string_view name_of(DistortionType d);
std::string_view name_of(Intensity i);
std::string_view name_of(RiskLevel r);
// "A0".."A9".
std::string_view name_of(Action a);
// Human-readable strategy name, e.g. "FindingTheGray".
std::string_view strategy_name(Action a);

// Case-sensitive parsers for the names above; throw Error on unknown names.
DistortionType parse_distortion(std::string_view name);
Intensity parse_intensity(std::string_view name);
RiskLevel parse_risk(std::string_view name);
// Accepts both "A4" and "DeCatastrophizing".
Action parse_action(std::string_view name);

// Seeker state labels. An absent distortion is the no-distortion control case,
// in which `intensity` carries no meaning.
struct CognitiveLabels {
  std::optional<DistortionType> distortion;
  Intensity intensity = Intensity::Mild;
  RiskLevel risk = RiskLevel::Low;

  friend bool operator==(const CognitiveLabels& a, const CognitiveLabels& b) {
    if (a.distortion != b.distortion || a.risk != b.risk) return false;
    return !a.distortion.has_value() || a.intensity == b.intensity;
  }
};

// Direction of the seeker's intensity change after one turn.
enum class ImprovementSignal : std::int8_t { Worsened = -1, Unchanged = 0, Improved = 1 };

constexpr double value_of(ImprovementSignal s) { return static_cast<double>(static_cast<int>(s)); }

struct StrategyEntry {
  Action gold;
  std::array<Action, 2> silvers;
};

enum class MatchKind : std::uint8_t { Gold, Silver, Mismatch };

const StrategyEntry& strategy_entry(DistortionType d);
Action gold_strategy(DistortionType d);
std::array<Action, 2> silver_strategies(DistortionType d);
MatchKind classify_action(DistortionType d, Action a);

}  // namespace cprl
