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

// Command implementations behind the `cprl` tool. Each returns a process exit
// status and writes human-readable progress to `log`.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cprl/config.hpp"
#include "cprl/learner.hpp"
#include "cprl/policy_eval.hpp"
#include "cprl/safety.hpp"

namespace cprl {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,       // I/O, format or parse errors
  kExitConfig = 2,        // invalid configuration or arguments
  kExitNonFinite = 3,     // training diverged
  kExitCheck = 4,         // a command's built-in assertion failed
};

// Output directory precedence: explicit argument, then $CPRL_OUTPUT_DIR,
// then run.output_dir.
std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag);

struct PolicyReports {
  HitRateReport hits;
  SafetyReport safety;
};

// Greedy evaluation on fixed-seed scenarios derived from cfg.seed, so the
// same network and config always produce identical reports.
PolicyReports evaluate_policy(const QNetwork& net, const RunConfig& cfg);
void write_reports(const std::string& dir, const PolicyReports& reports, const RunConfig& cfg);

struct TrainingRun {
  TrainResult result;
  PolicyReports reports;
};

// Trains, then writes metrics.csv, checkpoint.bin and the reports to `dir`.
TrainingRun run_training(const RunConfig& cfg, const std::string& dir,
                         const ProgressFn& progress = {});

int cli_train(const std::string& config_path, const std::optional<std::string>& output_dir,
              std::ostream& log);
int cli_eval(const std::string& checkpoint_path, const std::string& config_path,
             std::optional<bool> natural, const std::optional<std::string>& output_dir,
             std::ostream& log);

struct SweepArgs {
  std::vector<double> p_risk = {0.0, 1.0, 10.0, 100.0, 1000.0};
  double r_safe = 4.0;
  double base_bound = 2.0;
  double gamma = 0.8;
  double tau = 1.0;
  double threshold = 0.999;
  std::string output = "safety_sweep.csv";
};
int cli_safety_sweep(const SweepArgs& args, std::ostream& log);

int cli_dataset_stats(const std::string& input, const std::string& output, bool lenient,
                      std::ostream& log);
int cli_build_pairs(const std::string& checkpoint_path, const std::string& config_path,
                    const std::string& output, std::optional<bool> natural, std::ostream& log);

}  // namespace cprl
