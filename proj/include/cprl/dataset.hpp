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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cprl/domain.hpp"

namespace cprl {

enum class Speaker : std::uint8_t { Seeker, Counselor };

// One annotated dialogue segment. Several segments may share an utterance_id;
// when it is missing every segment counts as its own utterance.
struct AnnotationRecord {
  std::string dialogue_id;
  std::string segment_id;
  std::optional<std::string> utterance_id;
  Speaker speaker = Speaker::Seeker;
  std::optional<CognitiveLabels> labels;  // Seeker segments only
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParsedAnnotations {
  std::vector<AnnotationRecord> records;
  std::vector<ParseIssue> issues;
};

// One JSON object per line:
//   {"dialogue_id": "...", "segment_id": "...", "utterance_id": "..." (optional),
//    "speaker": "Seeker"|"Counselor",
//    "labels": {"distortion": "<type>"|null, "intensity": "...", "risk": "..."} (optional)}
// Blank lines are skipped; bad lines are collected as issues.
ParsedAnnotations parse_annotations(std::istream& in);
AnnotationRecord parse_annotation_line(const std::string& line);

struct DatasetSummary {
  std::size_t n_dialogues = 0;
  std::size_t n_utterances = 0;
  std::size_t n_seeker = 0;
  std::size_t n_counselor = 0;
  std::size_t n_segments = 0;
  std::size_t n_labels = 0;  // segments labelled with a distortion type
  double avg_turns = 0.0;    // utterances per dialogue
  double avg_labels_per_dialogue = 0.0;
  // Distinct distortion types per dialogue, averaged over dialogues.
  double avg_distinct_types_per_dialogue = 0.0;
  std::array<std::size_t, kNumDistortions> type_counts{};
  // Present iff n_labels > 0.
  std::optional<std::array<double, kNumDistortions>> type_distribution;

  friend bool operator==(const DatasetSummary&, const DatasetSummary&) = default;
};

DatasetSummary summarize(std::span<const AnnotationRecord> records);

std::string summary_to_json(const DatasetSummary& summary);
DatasetSummary summary_from_json(const std::string& text);

}  // namespace cprl
