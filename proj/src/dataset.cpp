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

#include "cprl/dataset.hpp"

#include <istream>
#include <map>
#include <set>
#include <utility>

#include <json.hpp>

namespace cprl {

using nlohmann::json;

AnnotationRecord parse_annotation_line(const std::string& line) {
  const json j = json::parse(line);
  if (!j.is_object()) throw Error("record is not a JSON object");
  AnnotationRecord rec;
  rec.dialogue_id = j.at("dialogue_id").get<std::string>();
  rec.segment_id = j.at("segment_id").get<std::string>();
  if (auto it = j.find("utterance_id"); it != j.end() && !it->is_null()) {
    rec.utterance_id = it->get<std::string>();
  }
  const auto speaker = j.at("speaker").get<std::string>();
  if (speaker == "Seeker") rec.speaker = Speaker::Seeker;
  else if (speaker == "Counselor") rec.speaker = Speaker::Counselor;
  else throw Error("unknown speaker '" + speaker + "'");

  if (auto it = j.find("labels"); it != j.end() && !it->is_null()) {
    if (rec.speaker == Speaker::Counselor) throw Error("Counselor records carry no labels");
    const json& l = *it;
    CognitiveLabels labels;
    if (auto d = l.find("distortion"); d != l.end() && !d->is_null()) {
      labels.distortion = parse_distortion(d->get<std::string>());
      labels.intensity = parse_intensity(l.at("intensity").get<std::string>());
    }
    labels.risk = parse_risk(l.at("risk").get<std::string>());
    rec.labels = labels;
  }
  return rec;
}

ParsedAnnotations parse_annotations(std::istream& in) {
  ParsedAnnotations out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.records.push_back(parse_annotation_line(line));
    } catch (const std::exception& e) {
      out.issues.push_back({line_no, e.what()});
    }
  }
  return out;
}

DatasetSummary summarize(std::span<const AnnotationRecord> records) {
  DatasetSummary s;
  std::set<std::string> dialogues;
  std::map<std::pair<std::string, std::string>, Speaker> utterances;
  std::map<std::string, std::set<std::size_t>> types_per_dialogue;
  for (const auto& r : records) {
    ++s.n_segments;
    dialogues.insert(r.dialogue_id);
    const std::string& utt = r.utterance_id ? *r.utterance_id : r.segment_id;
    // Segment-keyed utterances are namespaced apart from explicit ids.
    utterances.emplace(std::make_pair(r.dialogue_id, (r.utterance_id ? "u:" : "s:") + utt),
                       r.speaker);
    if (r.labels && r.labels->distortion) {
      ++s.n_labels;
      const std::size_t d = index_of(*r.labels->distortion);
      ++s.type_counts[d];
      types_per_dialogue[r.dialogue_id].insert(d);
    }
  }
  s.n_dialogues = dialogues.size();
  s.n_utterances = utterances.size();
  for (const auto& [key, speaker] : utterances) {
    (speaker == Speaker::Seeker ? s.n_seeker : s.n_counselor)++;
  }
  if (s.n_dialogues > 0) {
    const double n = static_cast<double>(s.n_dialogues);
    s.avg_turns = static_cast<double>(s.n_utterances) / n;
    s.avg_labels_per_dialogue = static_cast<double>(s.n_labels) / n;
    std::size_t distinct = 0;
    for (const auto& [id, types] : types_per_dialogue) distinct += types.size();
    s.avg_distinct_types_per_dialogue = static_cast<double>(distinct) / n;
  }
  if (s.n_labels > 0) {
    std::array<double, kNumDistortions> dist{};
    for (std::size_t d = 0; d < kNumDistortions; ++d) {
      dist[d] = static_cast<double>(s.type_counts[d]) / static_cast<double>(s.n_labels);
    }
    s.type_distribution = dist;
  }
  return s;
}

std::string summary_to_json(const DatasetSummary& s) {
  nlohmann::ordered_json j;
  j["n_dialogues"] = s.n_dialogues;
  j["n_utterances"] = s.n_utterances;
  j["n_seeker"] = s.n_seeker;
  j["n_counselor"] = s.n_counselor;
  j["n_segments"] = s.n_segments;
  j["n_labels"] = s.n_labels;
  j["avg_turns"] = s.avg_turns;
  j["avg_labels_per_dialogue"] = s.avg_labels_per_dialogue;
  j["avg_distinct_types_per_dialogue"] = s.avg_distinct_types_per_dialogue;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (DistortionType d : kAllDistortions) counts[std::string(name_of(d))] = s.type_counts[index_of(d)];
  j["type_counts"] = counts;
  if (s.type_distribution) {
    nlohmann::ordered_json dist = nlohmann::ordered_json::object();
    for (DistortionType d : kAllDistortions) {
      dist[std::string(name_of(d))] = (*s.type_distribution)[index_of(d)];
    }
    j["type_distribution"] = dist;
  }
  return j.dump(2);
}

DatasetSummary summary_from_json(const std::string& text) {
  const json j = json::parse(text);
  DatasetSummary s;
  s.n_dialogues = j.at("n_dialogues").get<std::size_t>();
  s.n_utterances = j.at("n_utterances").get<std::size_t>();
  s.n_seeker = j.at("n_seeker").get<std::size_t>();
  s.n_counselor = j.at("n_counselor").get<std::size_t>();
  s.n_segments = j.at("n_segments").get<std::size_t>();
  s.n_labels = j.at("n_labels").get<std::size_t>();
  s.avg_turns = j.at("avg_turns").get<double>();
  s.avg_labels_per_dialogue = j.at("avg_labels_per_dialogue").get<double>();
  s.avg_distinct_types_per_dialogue = j.at("avg_distinct_types_per_dialogue").get<double>();
  for (const auto& [name, count] : j.at("type_counts").items()) {
    s.type_counts[index_of(parse_distortion(name))] = count.get<std::size_t>();
  }
  if (auto it = j.find("type_distribution"); it != j.end()) {
    std::array<double, kNumDistortions> dist{};
    for (const auto& [name, frac] : it->items()) {
      dist[index_of(parse_distortion(name))] = frac.get<double>();
    }
    s.type_distribution = dist;
  }
  return s;
}

}  // namespace cprl
