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
#include <functional>
#include <span>
#include <vector>

#include "cprl/domain.hpp"
#include "cprl/encoding.hpp"
#include "cprl/random.hpp"
#include "cprl/reward.hpp"
#include "cprl/transition.hpp"

namespace cprl {

// Prior over initial seeker labels. The distortion probabilities together with
// p_no_distortion form one group summing to 1.
struct ScenarioDistribution {
  std::array<double, kNumDistortions> distortion{};
  double p_no_distortion = 0.0;
  std::array<double, kNumIntensities> intensity{};
  std::array<double, kNumRiskLevels> risk{};

  double probability(DistortionType d) const { return distortion[index_of(d)]; }
  void validate() const;
};

// Published head of the type distribution with the remaining 0.353 mass spread
// over the other five types proportionally to `tail_weights` (in
// DistortionType order: AllOrNothing, Labeling, Overgeneralization,
// MindReading, ShouldStatements). Intensity and risk priors are uniform.
ScenarioDistribution default_scenario_distribution(
    const std::array<double, 5>& tail_weights = {1.0, 1.0, 1.0, 1.0, 1.0});

// Degenerate distribution placing all mass on one label triple.
ScenarioDistribution point_distribution(const CognitiveLabels& labels);

struct EnvConfig {
  std::size_t max_turns = 8;
  double p_improve_gold = 0.8;
  double p_improve_silver = 0.4;
  double p_improve_mismatch = 0.05;
  double p_worsen_mismatch = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpisodeState {
  CognitiveLabels labels;
  std::size_t turn = 0;
  bool resolved = false;
  bool done = false;
};

struct StepResult {
  EpisodeState next;
  ImprovementSignal signal = ImprovementSignal::Unchanged;
  bool done = false;
};

CognitiveLabels sample_labels(const ScenarioDistribution& dist, Rng& rng);
EpisodeState reset(const ScenarioDistribution& dist, Rng& rng);

// Seeker response to one counselor action. Consumes exactly one uniform draw.
StepResult step(const EpisodeState& state, Action action, const EnvConfig& cfg, Rng& rng);

// Everything an actor needs to turn actions into transitions.
struct Environment {
  ScenarioDistribution scenarios = default_scenario_distribution();
  EnvConfig env;
  EncoderConfig encoder;
  RewardConfig reward;
};

// Behaviour policy: encoded state -> action. May draw from the actor's stream.
using ActingPolicy = std::function<Action(std::span<const double> state, Rng& rng)>;

// One environment instance with its own random stream.
class Actor {
 public:
  struct Outcome {
    Transition transition;
    RewardBreakdown reward;
    bool episode_done = false;
    double episode_return = 0.0;  // valid when episode_done
  };

  Actor(const Environment& world, std::size_t index);

  bool in_episode() const { return in_episode_; }
  std::size_t index() const { return index_; }
  const EpisodeState& state() const { return episode_; }
  const StateVector& observation() const { return observation_; }

  void begin_episode();
  Outcome act(const ActingPolicy& policy);

 private:
  const Environment* spec_;
  std::size_t index_;
  Rng rng_;
  EpisodeState episode_;
  StateVector observation_;
  double return_ = 0.0;
  bool in_episode_ = false;
};

// Runs `n` independent actors for `episodes_per_actor` episodes each. Output
// order is actor 0's transitions, then actor 1's, and so on, whether or not
// the actors ran on separate threads, so results do not depend on scheduling.
// With `parallel` set, `policy` is invoked concurrently and must be read-only.
std::vector<Transition> run_actors(std::size_t n, const ActingPolicy& policy,
                                   std::size_t episodes_per_actor, const Environment& world,
                                   bool parallel = false);

}  // namespace cprl
