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

// cprl: train, evaluate and inspect cognitive-pattern policies.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cprl/kernels.hpp"
#include "cprl/run.hpp"

namespace {

std::optional<bool> natural_flag(bool natural, bool balanced) {
  if (natural) return true;
  if (balanced) return false;
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognitive-pattern RL: training, evaluation and analysis"};
  app.require_subcommand(1);
  std::string kernels = "auto";
  app.add_option("--kernels", kernels, "Numeric kernels: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  std::string config;
  std::optional<std::string> out_dir;

  auto* train = app.add_subcommand("train", "Train a policy and write metrics, checkpoint and reports");
  train->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  train->add_option("--output-dir", out_dir, "Output directory (overrides $CPRL_OUTPUT_DIR)");

  std::string checkpoint;
  bool natural = false;
  bool balanced = false;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  eval->add_option("--config", config)->required()->check(CLI::ExistingFile);
  eval->add_option("--output-dir", out_dir);
  eval->add_flag("--natural", natural, "Sample scenarios from the training distribution");
  eval->add_flag("--balanced", balanced, "Use the balanced type x intensity grid");

  cprl::SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("safety-sweep", "Worst-case safe-action concentration vs p_risk");
  sweep_cmd->add_option("--p-risk", sweep.p_risk, "Penalty values to sweep")->delimiter(',');
  sweep_cmd->add_option("--r-safe", sweep.r_safe);
  sweep_cmd->add_option("--base-bound", sweep.base_bound, "Bound on |non-safety reward| per step");
  sweep_cmd->add_option("--gamma", sweep.gamma);
  sweep_cmd->add_option("--tau", sweep.tau);
  sweep_cmd->add_option("--threshold", sweep.threshold);
  sweep_cmd->add_option("--output", sweep.output);

  std::string input;
  std::string output;
  bool lenient = false;
  auto* stats = app.add_subcommand("dataset-stats", "Summarize an annotation JSONL file");
  stats->add_option("--input", input)->required()->check(CLI::ExistingFile);
  stats->add_option("--output", output)->default_val("dataset_stats.json");
  stats->add_flag("--lenient", lenient, "Skip malformed lines instead of failing");

  auto* pairs = app.add_subcommand("build-pairs", "Emit diagnosis/intervention training records");
  pairs->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  pairs->add_option("--config", config)->required()->check(CLI::ExistingFile);
  pairs->add_option("--output", output)->default_val("training_pairs.jsonl");
  pairs->add_flag("--natural", natural);
  pairs->add_flag("--balanced", balanced);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cprl::kExitConfig;
  }

  try {
    cprl::simd::select(kernels);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return cprl::kExitConfig;
  }

  if (*train) return cprl::cli_train(config, out_dir, std::cerr);
  if (*eval) {
    return cprl::cli_eval(checkpoint, config, natural_flag(natural, balanced), out_dir, std::cerr);
  }
  if (*sweep_cmd) return cprl::cli_safety_sweep(sweep, std::cerr);
  if (*stats) return cprl::cli_dataset_stats(input, output, lenient, std::cerr);
  if (*pairs) {
    return cprl::cli_build_pairs(checkpoint, config, output, natural_flag(natural, balanced),
                                 std::cerr);
  }
  return cprl::kExitConfig;
}
