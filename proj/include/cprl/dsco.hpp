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
#include <span>
#include <string>
#include <vector>

#include "cprl/domain.hpp"
#include "cprl/encoding.hpp"
#include "cprl/random.hpp"
#include "cprl/safety.hpp"

namespace cprl {

enum class TokenRole : std::uint8_t { Context, DiagnosisTarget, InterventionTarget };
enum class Stream : std::uint8_t { Diagnosis, Intervention };

// Per-token model log-probabilities with the role each position plays.
struct TokenSequence {
  std::vector<double> log_probs;
  std::vector<TokenRole> roles;

  void validate() const;
};

// 1 where the role belongs to the requested stream, 0 elsewhere.
std::vector<std::uint8_t> build_mask(std::span<const TokenRole> roles, Stream stream);

// -(sum mask * log_prob) / (sum mask). Throws on an all-zero mask.
double masked_loss(std::span<const double> log_probs, std::span<const std::uint8_t> mask);
double masked_loss(const TokenSequence& seq, std::span<const std::uint8_t> mask);

// A stream without target tokens is reported empty and left out of `total`.
struct DualStreamLoss {
  std::optional<double> diagnosis;
  std::optional<double> intervention;
  double total = 0.0;
};

DualStreamLoss dual_stream_loss(const TokenSequence& seq);

enum class TargetKind : std::uint8_t { Diagnosis, Intervention };

std::string_view name_of(TargetKind k);

struct TrainingPair {
  std::string context_id;
  CognitiveLabels labels;
  Action policy_action = Action::EmpathicValidation;
  TargetKind target_kind = TargetKind::Diagnosis;
};

// One Diagnosis and one Intervention record per scenario, both carrying the
// policy's greedy action on the encoded labels.
std::vector<TrainingPair> build_training_pairs(const QFunction& policy,
                                               std::span<const CognitiveLabels> scenarios,
                                               const EncoderConfig& enc, Rng& rng);

// {"context_id","distortion","intensity","risk","policy_action","target_kind"}
// one object per line. distortion and intensity are null for control cases.
void write_training_pairs_jsonl(std::ostream& out, std::span<const TrainingPair> pairs);
std::vector<TrainingPair> read_training_pairs_jsonl(std::istream& in);

}  // namespace cprl
