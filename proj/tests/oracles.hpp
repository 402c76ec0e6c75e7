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

// Independent reference implementations used by the property tests and the
// acceptance gate. They deliberately avoid the library's own helpers: counts
// are recomputed with naive loops and the strategy table is restated here.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cprl/dataset.hpp"
#include "cprl/dsco.hpp"
#include "cprl/learner.hpp"
#include "cprl/network.hpp"
#include "cprl/random.hpp"

namespace cprl::oracle {

// gold, silver, silver by distortion index.
inline constexpr int kTable[8][3] = {
    {8, 0, 3}, {4, 0, 2}, {1, 8, 2}, {6, 0, 3}, {7, 0, 5}, {2, 0, 1}, {3, 0, 8}, {5, 0, 7},
};

inline double hrmdr(const std::vector<std::optional<RiskLevel>>& pred,
                    const std::vector<RiskLevel>& truth) {
  int high = 0, missed = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (static_cast<int>(truth[i]) == 2) {
      ++high;
      if (!pred[i].has_value() || static_cast<int>(*pred[i]) != 2) ++missed;
    }
  }
  return static_cast<double>(missed) / high;
}

struct Confusion {
  int tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Confusion confusion(const std::vector<Action>& actions, const std::vector<RiskLevel>& truth) {
  Confusion c;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const bool pred = static_cast<int>(actions[i]) == 9;
    const bool pos = static_cast<int>(truth[i]) == 2;
    c.tp += pred && pos;
    c.fp += pred && !pos;
    c.fn += !pred && pos;
    c.tn += !pred && !pos;
  }
  return c;
}

// Gold/silver counts over non-High scenarios with a distortion.
struct HitCounts {
  int n = 0, gold = 0, silver = 0;
};

inline HitCounts hit_counts(const std::vector<CognitiveLabels>& labels,
                            const std::vector<Action>& actions) {
  HitCounts h;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (static_cast<int>(labels[i].risk) == 2 || !labels[i].distortion) continue;
    const auto& row = kTable[static_cast<int>(*labels[i].distortion)];
    const int a = static_cast<int>(actions[i]);
    ++h.n;
    if (a == row[0]) ++h.gold;
    else if (a == row[1] || a == row[2]) ++h.silver;
  }
  return h;
}

inline DatasetSummary summarize(const std::vector<AnnotationRecord>& recs) {
  DatasetSummary s;
  s.n_segments = recs.size();
  std::vector<std::string> dialogues;
  for (const auto& r : recs) {
    if (std::find(dialogues.begin(), dialogues.end(), r.dialogue_id) == dialogues.end()) {
      dialogues.push_back(r.dialogue_id);
    }
  }
  s.n_dialogues = dialogues.size();
  // An utterance is first seen at index i if no earlier record shares its key.
  auto same_utterance = [](const AnnotationRecord& a, const AnnotationRecord& b) {
    if (a.dialogue_id != b.dialogue_id) return false;
    if (a.utterance_id.has_value() != b.utterance_id.has_value()) return false;
    return a.utterance_id ? *a.utterance_id == *b.utterance_id : a.segment_id == b.segment_id;
  };
  for (std::size_t i = 0; i < recs.size(); ++i) {
    bool first = true;
    for (std::size_t j = 0; j < i && first; ++j) first = !same_utterance(recs[i], recs[j]);
    if (!first) continue;
    ++s.n_utterances;
    if (recs[i].speaker == Speaker::Seeker) ++s.n_seeker;
    else ++s.n_counselor;
  }
  std::size_t distinct = 0;
  for (const auto& d : dialogues) {
    for (int t = 0; t < 8; ++t) {
      bool seen = false;
      for (const auto& r : recs) {
        seen = seen || (r.dialogue_id == d && r.labels && r.labels->distortion &&
                        static_cast<int>(*r.labels->distortion) == t);
      }
      distinct += seen;
    }
  }
  for (const auto& r : recs) {
    if (r.labels && r.labels->distortion) {
      ++s.n_labels;
      ++s.type_counts[static_cast<int>(*r.labels->distortion)];
    }
  }
  if (s.n_dialogues > 0) {
    s.avg_turns = static_cast<double>(s.n_utterances) / s.n_dialogues;
    s.avg_labels_per_dialogue = static_cast<double>(s.n_labels) / s.n_dialogues;
    s.avg_distinct_types_per_dialogue = static_cast<double>(distinct) / s.n_dialogues;
  }
  if (s.n_labels > 0) {
    std::array<double, 8> dist{};
    for (int t = 0; t < 8; ++t) dist[t] = static_cast<double>(s.type_counts[t]) / s.n_labels;
    s.type_distribution = dist;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Random small inputs.

inline CognitiveLabels random_labels(Rng& rng, bool allow_control = true) {
  CognitiveLabels l;
  if (!allow_control || rng() % 5 != 0) l.distortion = distortion_from_index(rng() % 8);
  l.intensity = intensity_from_index(rng() % 3);
  l.risk = risk_from_index(rng() % 3);
  return l;
}

inline std::vector<AnnotationRecord> random_records(Rng& rng) {
  std::vector<AnnotationRecord> out(rng() % 30);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& r = out[i];
    r.dialogue_id = "d" + std::to_string(rng() % 4);
    r.segment_id = "s" + std::to_string(i);
    if (rng() % 3 != 0) r.utterance_id = "u" + std::to_string(rng() % 6);
    r.speaker = rng() % 2 == 0 ? Speaker::Seeker : Speaker::Counselor;
    if (r.speaker == Speaker::Seeker && rng() % 4 != 0) r.labels = random_labels(rng);
  }
  return out;
}

inline TokenSequence random_sequence(Rng& rng) {
  TokenSequence seq;
  const std::size_t n = 1 + rng() % 40;
  for (std::size_t t = 0; t < n; ++t) {
    seq.log_probs.push_back(-uniform01(rng) * 8.0);
    seq.roles.push_back(static_cast<TokenRole>(rng() % 3));
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Tabular MDP: 4 states, 3 actions.
//   a0: s -> s+1 (mod 4)
//   a1: s -> 0 with probability 0.6, else 3
//   a2: s -> s+2 from states 0 and 1; terminates from states 2 and 3

struct TabularMdp {
  static constexpr int kStates = 4;
  static constexpr int kActions = 3;
  static constexpr double kReward[4][3] = {
      {0.0, 1.0, -1.0}, {2.0, 0.0, 0.5}, {-0.5, 3.0, 0.0}, {1.0, -2.0, 4.0}};

  struct Outcome {
    int next;
    bool done;
  };

  static Outcome sample(int s, int a, Rng& rng) {
    switch (a) {
      case 0: return {(s + 1) % 4, false};
      case 1: return {uniform01(rng) < 0.6 ? 0 : 3, false};
      default: return s < 2 ? Outcome{s + 2, false} : Outcome{s, true};
    }
  }

  // Brute-force value iteration to machine precision.
  static std::array<std::array<double, 3>, 4> optimal_q(double gamma) {
    std::array<std::array<double, 3>, 4> q{};
    for (int it = 0; it < 5000; ++it) {
      std::array<double, 4> v{};
      for (int s = 0; s < 4; ++s) v[s] = *std::max_element(q[s].begin(), q[s].end());
      for (int s = 0; s < 4; ++s) {
        q[s][0] = kReward[s][0] + gamma * v[(s + 1) % 4];
        q[s][1] = kReward[s][1] + gamma * (0.6 * v[0] + 0.4 * v[3]);
        q[s][2] = kReward[s][2] + (s < 2 ? gamma * v[s + 2] : 0.0);
      }
    }
    return q;
  }
};

inline std::vector<double> one_hot(int s) {
  std::vector<double> x(TabularMdp::kStates, 0.0);
  x[s] = 1.0;
  return x;
}

// Double DQN with beta = 0 on one-hot states and a linear (tabular) Q-network,
// uniformly random behaviour. Returns the max-norm error against value iteration.
inline double tabular_ddqn_error(std::uint64_t steps, std::uint64_t seed) {
  LearnerConfig cfg;
  cfg.gamma = 0.8;
  cfg.kl_beta = 0.0;
  cfg.batch_size = 32;
  cfg.target_update_every = 10;
  cfg.dropout = 0.0;

  QNetwork online({TabularMdp::kStates, TabularMdp::kActions}, 0.0);
  QNetwork target = online;
  OptimizerState opt;
  opt.weight_decay = 0.0;
  opt.reset_for(online);

  Rng env_rng = derive_stream(seed, 1);
  Rng learn_rng = derive_stream(seed, 2);
  ReplayBuffer buffer(static_cast<std::size_t>(steps));
  int s = static_cast<int>(env_rng() % TabularMdp::kStates);
  std::uint64_t updates = 0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    const int a = static_cast<int>(env_rng() % TabularMdp::kActions);
    const auto out = TabularMdp::sample(s, a, env_rng);
    Transition tr;
    tr.s = one_hot(s);
    tr.a = action_from_index(a);
    tr.r = TabularMdp::kReward[s][a];
    tr.s_next = one_hot(out.next);
    tr.done = out.done;
    buffer.push(std::move(tr));
    s = out.done ? static_cast<int>(env_rng() % TabularMdp::kStates) : out.next;

    if (buffer.size() < 256) continue;
    // Step size annealed so the final estimates settle on the fixed point.
    opt.lr = t < steps / 2 ? 1e-2 : (t < 4 * steps / 5 ? 2e-3 : 2e-4);
    const auto batch = buffer.sample(cfg.batch_size, learn_rng);
    train_step(batch, online, target, opt, cfg, learn_rng);
    if (++updates % cfg.target_update_every == 0) hard_update(target, online);
  }

  const auto q_star = TabularMdp::optimal_q(cfg.gamma);
  double err = 0.0;
  for (int st = 0; st < TabularMdp::kStates; ++st) {
    const auto q = online.forward(one_hot(st));
    for (int a = 0; a < TabularMdp::kActions; ++a) err = std::max(err, std::abs(q[a] - q_star[st][a]));
  }
  return err;
}

// ---------------------------------------------------------------------------
// Finite-difference check of q_loss + beta * kl_loss on a d=16 network.

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

inline GradCheck gradient_check(std::uint64_t seed, double h = 1e-5) {
  Rng rng = derive_stream(seed, 7);
  auto online = QNetwork::initialized(QNetwork::default_dims(16), 0.1, rng);
  // The default output init is tiny; widen it so hidden-layer gradients are
  // well above finite-difference round-off.
  const double scale = std::sqrt(6.0 / 128.0);
  for (double& w : online.weights(2)) w = (2.0 * uniform01(rng) - 1.0) * scale;
  for (std::size_t l = 0; l < online.num_layers(); ++l) {
    for (double& b : online.biases(l)) b = 0.05 * gaussian(rng, 1.0);
  }
  QNetwork target = online;
  for (double& p : target.parameters()) p += 0.02 * gaussian(rng, 1.0);

  std::vector<Transition> data(4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto& t = data[i];
    t.s.resize(16);
    t.s_next.resize(16);
    for (double& v : t.s) v = gaussian(rng, 1.0);
    for (double& v : t.s_next) v = gaussian(rng, 1.0);
    t.a = action_from_index(rng() % kNumActions);
    t.r = gaussian(rng, 2.0);
    t.done = i == 0;
  }
  std::vector<const Transition*> batch;
  for (const auto& t : data) batch.push_back(&t);

  LearnerConfig cfg;
  cfg.kl_beta = 0.1;
  const Rng coins = derive_stream(seed, 8);
  std::vector<double> grads, scratch;
  Rng r0 = coins;
  loss_and_gradient(batch, online, target, cfg, r0, grads);

  // Every bias and a strided sample of weights from each layer.
  std::vector<std::size_t> idx;
  for (std::size_t l = 0; l < online.num_layers(); ++l) {
    const std::size_t w0 = online.weight_offset(l), b0 = online.bias_offset(l);
    const std::size_t nb = online.dims()[l + 1];
    for (std::size_t k = 0; k < 60; ++k) idx.push_back(w0 + (rng() % (b0 - w0)));
    for (std::size_t k = 0; k < std::min<std::size_t>(nb, 40); ++k) idx.push_back(b0 + k);
  }

  GradCheck out;
  for (std::size_t i : idx) {
    const double keep = online.parameters()[i];
    online.parameters()[i] = keep + h;
    Rng ru = coins;
    const double up = loss_and_gradient(batch, online, target, cfg, ru, scratch).total;
    online.parameters()[i] = keep - h;
    Rng rd = coins;
    const double down = loss_and_gradient(batch, online, target, cfg, rd, scratch).total;
    online.parameters()[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(grads[i]), 1e-6});
    out.max_rel_error = std::max(out.max_rel_error, std::abs(numeric - grads[i]) / denom);
    ++out.checked;
  }
  return out;
}

}  // namespace cprl::oracle
