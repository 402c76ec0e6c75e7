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

#include "cprl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cprl {
namespace {

constexpr std::uint64_t kInitStream = 0x1'0000'0001ULL;
constexpr std::uint64_t kLearnerStream = 0x1'0000'0002ULL;

void require(bool ok, const char* message) {
  if (!ok) throw Error(message);
}

}  // namespace

void LearnerConfig::validate() const {
  require(gamma >= 0.0 && gamma < 1.0, "learner.gamma must be in [0,1)");
  require(batch_size > 0, "learner.batch_size must be positive");
  require(epsilon_end > 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0,
          "learner: require 0 < epsilon_end <= epsilon_start <= 1");
  require(kl_beta >= 0.0 && std::isfinite(kl_beta), "learner.kl_beta must be >= 0");
  require(temperature > 0.0 && std::isfinite(temperature), "learner.temperature must be > 0");
  require(target_update_every > 0, "learner.target_update_every must be positive");
  require(total_episodes > 0, "learner.total_episodes must be positive");
  require(replay_capacity >= batch_size, "learner.replay_capacity must be >= batch_size");
  require(warmup >= batch_size && warmup <= replay_capacity,
          "learner.warmup must be in [batch_size, replay_capacity]");
  require(train_every > 0, "learner.train_every must be positive");
  require(num_actors > 0, "learner.num_actors must be positive");
  require(metrics_interval > 0, "learner.metrics_interval must be positive");
  require(dropout >= 0.0 && dropout < 1.0, "learner.dropout must be in [0,1)");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learner.learning_rate must be > 0");
  require(weight_decay >= 0.0, "learner.weight_decay must be >= 0");
  require(grad_clip >= 0.0, "learner.grad_clip must be >= 0");
  for (std::size_t h : hidden) require(h > 0, "learner.hidden widths must be positive");
}

// ---------------------------------------------------------------------------

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw Error("replay index out of range");
  return items_[(head_ + i) % items_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (items_.empty()) throw Error("cannot sample from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<const Transition*> out(batch_size);
  for (auto& p : out) p = &items_[pick(rng)];
  return out;
}

// ---------------------------------------------------------------------------

double epsilon_schedule(std::uint64_t step, const LearnerConfig& cfg) {
  if (cfg.decay_steps == 0 || step >= cfg.decay_steps) return cfg.epsilon_end;
  const double frac = static_cast<double>(step) / static_cast<double>(cfg.decay_steps);
  return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start);
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw Error("argmax of an empty vector");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) -
                                  values.begin());
}

std::size_t select_action_index(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (q_values.empty()) throw Error("select_action: empty q-values");
  if (uniform01(rng) < epsilon) {
    return std::uniform_int_distribution<std::size_t>(0, q_values.size() - 1)(rng);
  }
  return argmax(q_values);
}

Action select_action(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (q_values.size() != kNumActions) throw Error("select_action: expected 10 q-values");
  return action_from_index(select_action_index(q_values, epsilon, rng));
}

double ddqn_target(const Transition& t, const QNetwork& online, const QNetwork& target,
                   double gamma) {
  if (t.done) return t.r;
  if (!online.same_architecture(target)) throw Error("ddqn_target: architecture mismatch");
  const std::size_t best = argmax(online.forward(t.s_next));
  return t.r + gamma * target.forward(t.s_next)[best];
}

std::vector<double> softmax(std::span<const double> x, double tau) {
  if (!(tau > 0.0)) throw Error("softmax temperature must be > 0");
  if (x.empty()) return {};
  const double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> p(x.size());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += p[i] = std::exp((x[i] - mx) / tau);
  for (double& v : p) v /= z;
  return p;
}

namespace {

// log softmax(x / tau), stable.
std::vector<double> log_softmax(std::span<const double> x, double tau) {
  const double mx = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (double v : x) z += std::exp((v - mx) / tau);
  const double log_z = std::log(z);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mx) / tau - log_z;
  return out;
}

void check_kl_inputs(std::span<const double> a, std::span<const double> b, double tau) {
  if (a.size() != b.size() || a.empty()) throw Error("kl_regularizer: size mismatch");
  if (!(tau > 0.0)) throw Error("kl_regularizer: temperature must be > 0");
}

}  // namespace

double kl_regularizer(std::span<const double> q_online, std::span<const double> q_ref,
                      double tau) {
  check_kl_inputs(q_online, q_ref, tau);
  const auto lp = log_softmax(q_online, tau);
  const auto lr = log_softmax(q_ref, tau);
  double kl = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) kl += std::exp(lp[i]) * (lp[i] - lr[i]);
  return std::max(kl, 0.0);
}

std::vector<double> kl_gradient(std::span<const double> q_online, std::span<const double> q_ref,
                                double tau) {
  check_kl_inputs(q_online, q_ref, tau);
  const auto lp = log_softmax(q_online, tau);
  const auto lr = log_softmax(q_ref, tau);
  double kl = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) kl += std::exp(lp[i]) * (lp[i] - lr[i]);
  std::vector<double> g(lp.size());
  for (std::size_t i = 0; i < lp.size(); ++i) {
    g[i] = std::exp(lp[i]) * (lp[i] - lr[i] - kl) / tau;
  }
  return g;
}

LossBreakdown loss_and_gradient(std::span<const Transition* const> batch, const QNetwork& online,
                                const QNetwork& target, const LearnerConfig& cfg, Rng& rng,
                                std::vector<double>& grads) {
  if (batch.empty()) throw Error("loss_and_gradient: empty batch");
  if (!online.same_architecture(target)) throw Error("online/target architecture mismatch");
  grads.assign(online.num_parameters(), 0.0);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const bool use_kl = cfg.kl_beta > 0.0;

  LossBreakdown loss;
  ForwardCache cache;
  std::vector<double> out_grad(online.output_dim());
  for (const Transition* t : batch) {
    const double y = ddqn_target(*t, online, target, cfg.gamma);
    online.forward(t->s, Mode::Train, &rng, cache);
    const auto q = cache.output();
    const std::size_t a = index_of(t->a);
    if (a >= q.size()) throw Error("transition action outside the network's action space");
    const double residual = q[a] - y;
    loss.q_loss += residual * residual * inv_b;

    std::fill(out_grad.begin(), out_grad.end(), 0.0);
    out_grad[a] = 2.0 * residual * inv_b;
    const auto q_ref = target.forward(t->s);
    const double kl = kl_regularizer(q, q_ref, cfg.temperature);
    loss.kl_loss += kl * inv_b;
    if (use_kl) {
      const auto g = kl_gradient(q, q_ref, cfg.temperature);
      for (std::size_t i = 0; i < g.size(); ++i) out_grad[i] += cfg.kl_beta * inv_b * g[i];
    }
    online.backward(cache, out_grad, grads);
  }
  loss.total = loss.q_loss + cfg.kl_beta * loss.kl_loss;
  return loss;
}

LossBreakdown train_step(std::span<const Transition* const> batch, QNetwork& online,
                         const QNetwork& target, OptimizerState& opt, const LearnerConfig& cfg,
                         Rng& rng) {
  if (batch.size() != cfg.batch_size) throw Error("train_step: batch size does not match config");
  std::vector<double> grads;
  const LossBreakdown loss = loss_and_gradient(batch, online, target, cfg, rng, grads);
  if (cfg.grad_clip > 0.0) {
    const double norm = std::sqrt(std::inner_product(grads.begin(), grads.end(), grads.begin(), 0.0));
    if (norm > cfg.grad_clip) {
      const double scale = cfg.grad_clip / norm;
      for (double& g : grads) g *= scale;
    }
  }
  adamw_step(online, grads, opt);
  return loss;
}

// ---------------------------------------------------------------------------

namespace {

// Accumulates behaviour statistics between metrics rows.
struct IntervalStats {
  double return_sum = 0.0;
  std::uint64_t returns = 0;
  double q_loss = 0.0, kl_loss = 0.0, total_loss = 0.0;
  std::uint64_t learner_steps = 0;
  std::uint64_t matchable = 0, gold = 0, silver = 0;
  std::uint64_t high_risk = 0, crisis_hits = 0;

  void record(const Transition& t) {
    if (t.labels.risk == RiskLevel::High) {
      ++high_risk;
      if (t.a == kSafeAction) ++crisis_hits;
    } else if (t.labels.distortion) {
      ++matchable;
      switch (classify_action(*t.labels.distortion, t.a)) {
        case MatchKind::Gold: ++gold; break;
        case MatchKind::Silver: ++silver; break;
        case MatchKind::Mismatch: break;
      }
    }
  }

  static std::optional<double> ratio(double num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    return num / static_cast<double>(den);
  }

  MetricsRow row(std::uint64_t step, std::uint64_t episodes, double epsilon) const {
    MetricsRow r;
    r.step = step;
    r.episodes = episodes;
    r.epsilon = epsilon;
    r.avg_reward = ratio(return_sum, returns);
    r.q_loss = ratio(q_loss, learner_steps);
    r.kl_loss = ratio(kl_loss, learner_steps);
    r.total_loss = ratio(total_loss, learner_steps);
    r.gold_hit_rate = ratio(static_cast<double>(gold), matchable);
    r.silver_hit_rate = ratio(static_cast<double>(silver), matchable);
    r.crisis_recall = ratio(static_cast<double>(crisis_hits), high_risk);
    return r;
  }
};

}  // namespace

TrainResult train(const Environment& world, const LearnerConfig& cfg,
                  const ProgressFn& progress) {
  cfg.validate();
  world.scenarios.validate();
  world.env.validate();
  world.encoder.validate();
  world.reward.validate();

  std::vector<std::size_t> dims{world.encoder.dim};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(kNumActions);

  Rng init_rng = derive_stream(cfg.seed, kInitStream);
  Rng learner_rng = derive_stream(cfg.seed, kLearnerStream);

  TrainResult result;
  result.policy = QNetwork::initialized(dims, cfg.dropout, init_rng);
  result.target = result.policy;
  result.opt.lr = cfg.learning_rate;
  result.opt.weight_decay = cfg.weight_decay;
  result.opt.reset_for(result.policy);
  result.trace.kl_beta = cfg.kl_beta;

  QNetwork& online = result.policy;
  QNetwork& target = result.target;
  QNetwork snapshot;
  if (cfg.snapshot_interval > 0) snapshot = online;

  ReplayBuffer buffer(cfg.replay_capacity);
  std::vector<Actor> actors;
  actors.reserve(cfg.num_actors);
  for (std::size_t i = 0; i < cfg.num_actors; ++i) actors.emplace_back(world, i);

  std::uint64_t env_steps = 0;
  std::uint64_t learner_steps = 0;
  std::uint64_t started = 0;
  std::uint64_t finished = 0;
  double epsilon = epsilon_schedule(0, cfg);
  IntervalStats stats;

  const ActingPolicy behaviour = [&](std::span<const double> s, Rng& rng) {
    const QNetwork& acting = cfg.snapshot_interval > 0 ? snapshot : online;
    return select_action(acting.forward(s), epsilon, rng);
  };

  auto emit_row = [&] {
    MetricsRow row = stats.row(env_steps, finished, epsilon);
    result.trace.rows.push_back(row);
    if (progress) progress(row);
    stats = IntervalStats{};
  };

  bool any_active = true;
  while (any_active) {
    any_active = false;
    for (Actor& actor : actors) {
      if (!actor.in_episode()) {
        if (started >= cfg.total_episodes) continue;
        actor.begin_episode();
        ++started;
      }
      any_active = true;

      epsilon = epsilon_schedule(env_steps, cfg);
      Actor::Outcome outcome = actor.act(behaviour);
      stats.record(outcome.transition);
      if (outcome.episode_done) {
        ++finished;
        stats.return_sum += outcome.episode_return;
        ++stats.returns;
      }
      buffer.push(std::move(outcome.transition));
      ++env_steps;

      if (buffer.size() >= cfg.warmup && env_steps % cfg.train_every == 0) {
        const auto batch = buffer.sample(cfg.batch_size, learner_rng);
        const LossBreakdown loss = train_step(batch, online, target, result.opt, cfg, learner_rng);
        if (!std::isfinite(loss.total) || !online.all_finite()) {
          throw TrainingError("non-finite loss at learner step " + std::to_string(learner_steps) +
                                  " (env step " + std::to_string(env_steps) + ")",
                              learner_steps);
        }
        ++learner_steps;
        result.losses.push_back(loss);
        stats.q_loss += loss.q_loss;
        stats.kl_loss += loss.kl_loss;
        stats.total_loss += loss.total;
        ++stats.learner_steps;
        if (learner_steps % cfg.target_update_every == 0) hard_update(target, online);
      }
      if (cfg.snapshot_interval > 0 && env_steps % cfg.snapshot_interval == 0) {
        hard_update(snapshot, online);
      }
      if (env_steps % cfg.metrics_interval == 0) emit_row();
    }
  }
  if (result.trace.rows.empty() || result.trace.rows.back().step != env_steps) emit_row();

  result.counters = LearnerFooter{env_steps, learner_steps, finished, epsilon};
  return result;
}

}  // namespace cprl
