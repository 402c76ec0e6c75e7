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
#include <array>
#include <iosfwd>
#include <optional>
#include <string>

#include "cprl/env.hpp"
#include "cprl/learner.hpp"

namespace cprl {

struct EvalConfig {
  std::size_t grid_repeats = 20;     // fresh noise draws per grid cell
  bool natural = false;              // sample scenarios from the training prior instead
  std::size_t natural_samples = 2000;
  std::size_t histogram_bins = 30;

  void validate() const;
};

// Scenario prior as configured; turned into world.scenarios by finalize().
struct ScenarioSettings {
  std::optional<std::array<double, kNumDistortions>> distortion;  // replaces the default head/tail
  std::array<double, 5> tail_weights{1.0, 1.0, 1.0, 1.0, 1.0};
  double p_no_distortion = 0.0;  // distortion probabilities are scaled by 1 - this
  std::optional<std::array<double, kNumIntensities>> intensity;
  std::optional<std::array<double, kNumRiskLevels>> risk;

  ScenarioDistribution build() const;
};

struct RunConfig {
  ScenarioSettings scenarios;
  Environment world;
  LearnerConfig learner;
  EvalConfig eval;
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";

  // Builds world.scenarios, derives the per-component seeds from `seed` and
  // validates every section.
  void finalize();
};

// Thrown for invalid config text; `field` is the dotted key path (may be
// empty for syntax errors).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// `section.key = value` lines; '#' starts a comment. Unknown keys are
// rejected, missing keys keep their defaults. Lists are comma separated.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
// Applies one `key = value` assignment.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace cprl
