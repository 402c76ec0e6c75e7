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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cprl/env.hpp"
#include "cprl/metrics.hpp"
#include "cprl/network.hpp"
#include "cprl/random.hpp"
#include "cprl/transition.hpp"

namespace cprl {

struct LearnerConfig {
  double gamma = 0.8;
  std::size_t batch_size = 32;
  double epsilon_start = 0.9;
  double epsilon_end = 0.1;
  std::uint64_t decay_steps = 50'000;
  double kl_beta = 0.1;
  double temperature = 1.0;
  std::uint64_t target_update_every = 10;  // learner batches
  std::uint64_t total_episodes = 100'000;
  std::uint64_t seed = 0;

  std::size_t replay_capacity = 100'000;
  std::size_t warmup = 1'000;          // transitions held before learning starts
  std::uint64_t train_every = 1;       // env steps per learner batch
  std::size_t num_actors = 32;
  std::uint64_t snapshot_interval = 0; // env steps between acting-network refreshes; 0 = live
  std::uint64_t metrics_interval = 100;
  std::vector<std::size_t> hidden = {256, 128};
  double dropout = 0.1;
  double learning_rate = 1e-4;
  double weight_decay = 0.01;
  double grad_clip = 0.0;              // global-norm clip; 0 disables

  void validate() const;
};

// Bounded FIFO of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;
  // Uniform with replacement.
  std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // index of the oldest element once full
  std::vector<Transition> items_;
};

struct LossBreakdown {
  double q_loss = 0.0;
  double kl_loss = 0.0;
  double total = 0.0;
};

// Linear ramp from epsilon_start at 0 to epsilon_end at decay_steps.
double epsilon_schedule(std::uint64_t step, const LearnerConfig& cfg);

// Lowest index wins ties. Always draws one uniform; draws a second one only
// when exploring.
std::size_t select_action_index(std::span<const double> q_values, double epsilon, Rng& rng);
Action select_action(std::span<const double> q_values, double epsilon, Rng& rng);
std::size_t argmax(std::span<const double> values);

// r if done, else r + gamma * Q_target(s', argmax_a Q_online(s', a)).
double ddqn_target(const Transition& t, const QNetwork& online, const QNetwork& target,
                   double gamma);

// softmax(x / tau) with max subtraction.
std::vector<double> softmax(std::span<const double> x, double tau);
// KL(softmax(q_online/tau) || softmax(q_ref/tau)).
double kl_regularizer(std::span<const double> q_online, std::span<const double> q_ref,
                      double tau);
// d KL / d q_online.
std::vector<double> kl_gradient(std::span<const double> q_online, std::span<const double> q_ref,
                                double tau);

// Loss of one batch and its gradient w.r.t. the online parameters (written to
// `grads`, which is resized and zeroed). The online forward runs in train mode
// with dropout coins from `rng`; targets and the KL reference use eval mode.
LossBreakdown loss_and_gradient(std::span<const Transition* const> batch, const QNetwork& online,
                                const QNetwork& target, const LearnerConfig& cfg, Rng& rng,
                                std::vector<double>& grads);

LossBreakdown train_step(std::span<const Transition* const> batch, QNetwork& online,
                         const QNetwork& target, OptimizerState& opt, const LearnerConfig& cfg,
                         Rng& rng);

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::uint64_t step) : Error(what), step_(step) {}
  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t step_;
};

struct TrainResult {
  QNetwork policy;
  QNetwork target;
  OptimizerState opt;
  MetricsTrace trace;
  std::vector<LossBreakdown> losses;  // one per learner step
  LearnerFooter counters;
};

// Called after every metrics row; may be empty.
using ProgressFn = std::function<void(const MetricsRow&)>;

// Single-threaded KL-DDQN training. All actors are stepped round-robin in
// index order, so a fixed seed gives bit-identical results.
TrainResult train(const Environment& world, const LearnerConfig& cfg,
                  const ProgressFn& progress = {});

}  // namespace cprl
