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

#include "cprl/env.hpp"

#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

namespace cprl {
namespace {

constexpr double kSumTolerance = 1e-9;

template <std::size_t N>
void check_group(const std::array<double, N>& probs, double extra, const char* what) {
  double total = extra;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string(what) + ": probabilities must be in [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw Error(std::string(what) + ": probabilities sum to " + std::to_string(total) +
                ", expected 1");
  }
}

template <std::size_t N>
std::size_t sample_index(const std::array<double, N>& probs, double u) {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  // Rounding slack: fall back to the last index with nonzero mass.
  for (std::size_t i = N; i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return N - 1;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string("env.") + name + " must be in [0,1]");
}

}  // namespace

void ScenarioDistribution::validate() const {
  if (!(p_no_distortion >= 0.0 && p_no_distortion <= 1.0)) {
    throw Error("scenario: p_no_distortion must be in [0,1]");
  }
  check_group(distortion, p_no_distortion, "scenario distortion");
  check_group(intensity, 0.0, "scenario intensity");
  check_group(risk, 0.0, "scenario risk");
}

ScenarioDistribution default_scenario_distribution(const std::array<double, 5>& tail_weights) {
  const double weight_sum = std::accumulate(tail_weights.begin(), tail_weights.end(), 0.0);
  if (!(weight_sum > 0.0)) throw Error("scenario tail weights must have positive sum");
  for (double w : tail_weights) {
    if (!(w >= 0.0)) throw Error("scenario tail weights must be nonnegative");
  }
  ScenarioDistribution dist;
  dist.distortion[index_of(DistortionType::EmotionalReasoning)] = 0.369;
  dist.distortion[index_of(DistortionType::Personalization)] = 0.150;
  dist.distortion[index_of(DistortionType::Catastrophizing)] = 0.128;
  constexpr double kTailMass = 1.0 - 0.369 - 0.150 - 0.128;
  constexpr std::array<DistortionType, 5> kTail = {
      DistortionType::AllOrNothing, DistortionType::Labeling, DistortionType::Overgeneralization,
      DistortionType::MindReading, DistortionType::ShouldStatements};
  for (std::size_t i = 0; i < kTail.size(); ++i) {
    dist.distortion[index_of(kTail[i])] = kTailMass * tail_weights[i] / weight_sum;
  }
  dist.intensity.fill(1.0 / 3.0);
  dist.risk.fill(1.0 / 3.0);
  return dist;
}

ScenarioDistribution point_distribution(const CognitiveLabels& labels) {
  ScenarioDistribution dist;
  if (labels.distortion) {
    dist.distortion[index_of(*labels.distortion)] = 1.0;
  } else {
    dist.p_no_distortion = 1.0;
  }
  dist.intensity[index_of(labels.intensity)] = 1.0;
  dist.risk[index_of(labels.risk)] = 1.0;
  return dist;
}

void EnvConfig::validate() const {
  if (max_turns == 0) throw Error("env.max_turns must be positive");
  check_probability(p_improve_gold, "p_improve_gold");
  check_probability(p_improve_silver, "p_improve_silver");
  check_probability(p_improve_mismatch, "p_improve_mismatch");
  check_probability(p_worsen_mismatch, "p_worsen_mismatch");
  if (p_improve_mismatch + p_worsen_mismatch > 1.0) {
    throw Error("env: p_improve_mismatch + p_worsen_mismatch must be <= 1");
  }
}

CognitiveLabels sample_labels(const ScenarioDistribution& dist, Rng& rng) {
  CognitiveLabels labels;
  const double u = uniform01(rng);
  if (u >= dist.p_no_distortion) {
    // Rescale so the remaining draw stays uniform over the distortion mass.
    std::array<double, kNumDistortions> scaled = dist.distortion;
    const double mass = 1.0 - dist.p_no_distortion;
    for (double& p : scaled) p /= mass;
    labels.distortion = distortion_from_index(sample_index(scaled, (u - dist.p_no_distortion) / mass));
  }
  labels.intensity = intensity_from_index(sample_index(dist.intensity, uniform01(rng)));
  labels.risk = risk_from_index(sample_index(dist.risk, uniform01(rng)));
  return labels;
}

EpisodeState reset(const ScenarioDistribution& dist, Rng& rng) {
  EpisodeState state;
  state.labels = sample_labels(dist, rng);
  return state;
}

StepResult step(const EpisodeState& state, Action action, const EnvConfig& cfg, Rng& rng) {
  if (state.done) throw Error("step called on a finished episode");
  if (state.turn >= cfg.max_turns) throw Error("step called past the episode horizon");

  StepResult out;
  out.next = state;
  const double u = uniform01(rng);

  if (state.labels.distortion) {
    bool improve = false;
    bool worsen = false;
    switch (classify_action(*state.labels.distortion, action)) {
      case MatchKind::Gold:
        improve = u < cfg.p_improve_gold;
        break;
      case MatchKind::Silver:
        improve = u < cfg.p_improve_silver;
        break;
      case MatchKind::Mismatch:
        improve = u < cfg.p_improve_mismatch;
        worsen = !improve && u < cfg.p_improve_mismatch + cfg.p_worsen_mismatch;
        break;
    }
    Intensity& intensity = out.next.labels.intensity;
    if (improve) {
      out.signal = ImprovementSignal::Improved;
      if (intensity == Intensity::Mild) {
        out.next.resolved = true;
      } else {
        intensity = intensity_from_index(index_of(intensity) - 1);
      }
    } else if (worsen && intensity != Intensity::Severe) {
      out.signal = ImprovementSignal::Worsened;
      intensity = intensity_from_index(index_of(intensity) + 1);
    }
  }

  out.next.turn = state.turn + 1;
  const bool crisis_handoff = state.labels.risk == RiskLevel::High && action == kSafeAction;
  out.done = out.next.resolved || out.next.turn == cfg.max_turns || crisis_handoff;
  out.next.done = out.done;
  return out;
}

Actor::Actor(const Environment& world, std::size_t index)
    : spec_(&world), index_(index), rng_(derive_stream(world.env.seed, index)) {}

void Actor::begin_episode() {
  episode_ = reset(spec_->scenarios, rng_);
  observation_ = encode_state(episode_.labels, spec_->encoder, rng_);
  return_ = 0.0;
  in_episode_ = true;
}

Actor::Outcome Actor::act(const ActingPolicy& policy) {
  if (!in_episode_) throw Error("actor has no active episode");
  const Action action = policy(observation_, rng_);
  StepResult result = step(episode_, action, spec_->env, rng_);
  Outcome out;
  out.reward = hybrid_reward(episode_.labels, action, result.signal, spec_->reward);
  StateVector next_obs = encode_state(result.next.labels, spec_->encoder, rng_);
  out.transition = Transition{observation_, action, out.reward.total, next_obs, result.done,
                              episode_.labels};
  return_ += out.reward.total;
  episode_ = result.next;
  observation_ = std::move(next_obs);
  if (result.done) {
    out.episode_done = true;
    out.episode_return = return_;
    in_episode_ = false;
  }
  return out;
}

std::vector<Transition> run_actors(std::size_t n, const ActingPolicy& policy,
                                   std::size_t episodes_per_actor, const Environment& world,
                                   bool parallel) {
  if (n == 0) throw Error("run_actors: need at least one actor");
  world.scenarios.validate();
  world.env.validate();
  world.encoder.validate();
  world.reward.validate();

  std::vector<std::vector<Transition>> per_actor(n);
  std::vector<std::exception_ptr> failures(n);
  auto run_one = [&](std::size_t i) {
    try {
      Actor actor(world, i);
      for (std::size_t e = 0; e < episodes_per_actor; ++e) {
        actor.begin_episode();
        while (actor.in_episode()) per_actor[i].push_back(actor.act(policy).transition);
      }
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  if (parallel && n > 1) {
    std::vector<std::jthread> threads;
    threads.reserve(n);
    for (std::size_t i = 0; i < n; ++i) threads.emplace_back(run_one, i);
  } else {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<Transition> out;
  for (auto& chunk : per_actor) {
    out.insert(out.end(), std::make_move_iterator(chunk.begin()),
               std::make_move_iterator(chunk.end()));
  }
  return out;
}

}  // namespace cprl
