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

#include "cprl/dsco.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "cprl/learner.hpp"

namespace cprl {

void TokenSequence::validate() const {
  if (log_probs.size() != roles.size()) throw Error("token sequence: length mismatch");
  for (double lp : log_probs) {
    if (!(lp <= 0.0)) throw Error("token sequence: log-probabilities must be <= 0");
  }
}

std::vector<std::uint8_t> build_mask(std::span<const TokenRole> roles, Stream stream) {
  if (roles.empty()) throw Error("build_mask: empty role sequence");
  const TokenRole wanted =
      stream == Stream::Diagnosis ? TokenRole::DiagnosisTarget : TokenRole::InterventionTarget;
  std::vector<std::uint8_t> mask(roles.size());
  for (std::size_t t = 0; t < roles.size(); ++t) mask[t] = roles[t] == wanted ? 1 : 0;
  return mask;
}

double masked_loss(std::span<const double> log_probs, std::span<const std::uint8_t> mask) {
  if (log_probs.size() != mask.size()) throw Error("masked_loss: length mismatch");
  double num = 0.0;
  std::size_t den = 0;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (mask[t] == 0) continue;
    num += log_probs[t];
    ++den;
  }
  if (den == 0) throw Error("masked_loss: mask selects no target tokens");
  return -num / static_cast<double>(den);
}

double masked_loss(const TokenSequence& seq, std::span<const std::uint8_t> mask) {
  seq.validate();
  return masked_loss(seq.log_probs, mask);
}

DualStreamLoss dual_stream_loss(const TokenSequence& seq) {
  seq.validate();
  DualStreamLoss out;
  for (Stream stream : {Stream::Diagnosis, Stream::Intervention}) {
    const auto mask = build_mask(seq.roles, stream);
    const bool has_targets = std::any_of(mask.begin(), mask.end(), [](auto m) { return m != 0; });
    const char* name = stream == Stream::Diagnosis ? "diagnosis" : "intervention";
    if (!has_targets) {
      std::fprintf(stderr, "warning: %s stream has no target tokens; excluded from loss\n", name);
      continue;
    }
    const double loss = masked_loss(seq.log_probs, mask);
    (stream == Stream::Diagnosis ? out.diagnosis : out.intervention) = loss;
  }
  if (!out.diagnosis && !out.intervention) {
    throw Error("dual_stream_loss: neither stream has target tokens");
  }
  out.total = out.diagnosis.value_or(0.0) + out.intervention.value_or(0.0);
  return out;
}

std::string_view name_of(TargetKind k) {
  return k == TargetKind::Diagnosis ? "Diagnosis" : "Intervention";
}

std::vector<TrainingPair> build_training_pairs(const QFunction& policy,
                                               std::span<const CognitiveLabels> scenarios,
                                               const EncoderConfig& enc, Rng& rng) {
  std::vector<TrainingPair> out;
  out.reserve(2 * scenarios.size());
  char id[32];
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const auto state = encode_state(scenarios[k], enc, rng);
    const Action best = action_from_index(argmax(policy(state)));
    std::snprintf(id, sizeof id, "ctx-%06zu", k);
    for (TargetKind kind : {TargetKind::Diagnosis, TargetKind::Intervention}) {
      out.push_back({id, scenarios[k], best, kind});
    }
  }
  return out;
}

void write_training_pairs_jsonl(std::ostream& out, std::span<const TrainingPair> pairs) {
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["context_id"] = p.context_id;
    if (p.labels.distortion) {
      j["distortion"] = name_of(*p.labels.distortion);
      j["intensity"] = name_of(p.labels.intensity);
    } else {
      j["distortion"] = nullptr;
      j["intensity"] = nullptr;
    }
    j["risk"] = name_of(p.labels.risk);
    j["policy_action"] = name_of(p.policy_action);
    j["target_kind"] = name_of(p.target_kind);
    out << j.dump() << '\n';
  }
}

std::vector<TrainingPair> read_training_pairs_jsonl(std::istream& in) {
  std::vector<TrainingPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TrainingPair p;
      p.context_id = j.at("context_id").get<std::string>();
      if (!j.at("distortion").is_null()) {
        p.labels.distortion = parse_distortion(j.at("distortion").get<std::string>());
        p.labels.intensity = parse_intensity(j.at("intensity").get<std::string>());
      }
      p.labels.risk = parse_risk(j.at("risk").get<std::string>());
      p.policy_action = parse_action(j.at("policy_action").get<std::string>());
      const auto kind = j.at("target_kind").get<std::string>();
      if (kind == "Diagnosis") p.target_kind = TargetKind::Diagnosis;
      else if (kind == "Intervention") p.target_kind = TargetKind::Intervention;
      else throw Error("unknown target_kind '" + kind + "'");
      out.push_back(std::move(p));
    } catch (const std::exception& e) {
      throw Error("training pairs line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cprl
