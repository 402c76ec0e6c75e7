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

#include "cprl/run.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "cprl/dataset.hpp"
#include "cprl/dsco.hpp"
#include "cprl/metrics.hpp"
#include "cprl/reports.hpp"

namespace cprl {
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kEvalHitStream = 0xE7A1'0001ULL;
constexpr std::uint64_t kEvalSafetyStream = 0xE7A1'0002ULL;
constexpr std::uint64_t kPairsStream = 0xE7A1'0003ULL;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text << '\n';
}

std::vector<CognitiveLabels> eval_scenarios(const RunConfig& cfg, Rng& rng) {
  if (cfg.eval.natural) {
    return natural_eval_scenarios(cfg.world.scenarios, cfg.eval.natural_samples, rng);
  }
  return balanced_eval_grid(cfg.eval.grid_repeats);
}

// Loads a checkpoint and checks it against the architecture the config implies.
QNetwork load_policy(const std::string& path, const RunConfig& cfg) {
  Checkpoint ck = load_checkpoint(path);
  std::vector<std::size_t> dims{cfg.world.encoder.dim};
  dims.insert(dims.end(), cfg.learner.hidden.begin(), cfg.learner.hidden.end());
  dims.push_back(kNumActions);
  if (ck.net.dims() != dims || ck.net.dropout_p() != cfg.learner.dropout) {
    throw ConfigError("", "checkpoint header does not match the config (encoder.dim / "
                          "learner.hidden / learner.dropout)");
  }
  return std::move(ck.net);
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TrainingError& e) {
    log << "training failed: " << e.what() << '\n';
    return kExitNonFinite;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_real(*v) : "n/a"; }

}  // namespace

std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("CPRL_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return cfg.output_dir;
}

PolicyReports evaluate_policy(const QNetwork& net, const RunConfig& cfg) {
  const QFunction q = q_function(net);
  PolicyReports out;
  Rng hit_rng = derive_stream(cfg.seed, kEvalHitStream);
  const auto scenarios = eval_scenarios(cfg, hit_rng);
  out.hits = evaluate_hit_rates(q, scenarios, cfg.world.encoder, hit_rng);

  Rng safety_rng = derive_stream(cfg.seed, kEvalSafetyStream);
  const auto grid = full_label_grid(cfg.eval.grid_repeats);
  const auto states = encode_scenarios(grid, cfg.world.encoder, safety_rng);
  out.safety = advantage_report(q, states);
  return out;
}

void write_reports(const std::string& dir, const PolicyReports& reports, const RunConfig& cfg) {
  const fs::path root(dir);
  fs::create_directories(root);
  write_text(root / "hit_rates.json", hit_rates_to_json(reports.hits));
  {
    auto out = open_out(root / "hit_rates.csv");
    write_hit_rates_csv(out, reports.hits);
  }
  write_text(root / "safety_report.json", safety_report_to_json(reports.safety));
  auto out = open_out(root / "safety_advantage_hist.csv");
  write_histogram_csv(out, histogram(reports.safety.advantages, cfg.eval.histogram_bins));
}

TrainingRun run_training(const RunConfig& cfg, const std::string& dir,
                         const ProgressFn& progress) {
  TrainingRun run{train(cfg.world, cfg.learner, progress), {}};
  const fs::path root(dir);
  fs::create_directories(root);
  {
    auto out = open_out(root / "metrics.csv");
    write_metrics_csv(out, run.result.trace);
  }
  save_checkpoint((root / "checkpoint.bin").string(), run.result.policy, run.result.opt,
                  run.result.counters);
  run.reports = evaluate_policy(run.result.policy, cfg);
  write_reports(dir, run.reports, cfg);
  return run;
}

int cli_train(const std::string& config_path, const std::optional<std::string>& output_dir,
              std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = load_config(config_path);
    const std::string dir = resolve_output_dir(cfg, output_dir);
    const TrainingRun run = run_training(cfg, dir);
    const auto& c = run.result.counters;
    log << "trained " << c.episodes << " episodes (" << c.env_steps << " env steps, "
        << c.learner_steps << " updates): gold=" << format_real(run.reports.hits.gold_rate)
        << " gold+silver=" << format_real(run.reports.hits.gold_plus_silver_rate)
        << " crisis_recall=" << fmt_opt(run.reports.safety.crisis.recall)
        << " positive_advantage=" << fmt_opt(run.reports.safety.positive_fraction)
        << " -> " << dir << '\n';
    return kExitOk;
  });
}

int cli_eval(const std::string& checkpoint_path, const std::string& config_path,
             std::optional<bool> natural, const std::optional<std::string>& output_dir,
             std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = load_config(config_path);
    if (natural) cfg.eval.natural = *natural;
    cfg.finalize();
    const QNetwork net = load_policy(checkpoint_path, cfg);
    const std::string dir =
        output_dir ? *output_dir : (fs::path(resolve_output_dir(cfg, std::nullopt)) / "eval").string();
    const PolicyReports reports = evaluate_policy(net, cfg);
    write_reports(dir, reports, cfg);
    log << "eval (" << (cfg.eval.natural ? "natural" : "balanced")
        << "): gold=" << format_real(reports.hits.gold_rate)
        << " gold+silver=" << format_real(reports.hits.gold_plus_silver_rate)
        << " crisis_recall=" << fmt_opt(reports.safety.crisis.recall) << " -> " << dir << '\n';
    return kExitOk;
  });
}

int cli_safety_sweep(const SweepArgs& args, std::ostream& log) {
  return guarded(log, [&]() -> int {
    if (args.p_risk.empty()) throw ConfigError("p-risk", "need at least one value");
    if (!(args.tau > 0.0)) throw ConfigError("tau", "must be > 0");
    if (!(args.gamma >= 0.0 && args.gamma < 1.0)) {
      throw ConfigError("gamma", "must satisfy 0 <= gamma < 1: bounded base rewards only bound "
                                 "the future value by R_max / (1 - gamma) when gamma < 1");
    }
    const auto sweep =
        safety_concentration_sweep(args.p_risk, args.base_bound, args.r_safe, args.gamma, args.tau);
    {
      auto out = open_out(args.output);
      write_sweep_csv(out, sweep);
    }
    std::vector<SweepPoint> sorted = sweep;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.p_risk < b.p_risk; });
    const bool monotone = strictly_increasing(sorted);
    const auto threshold = concentration_threshold(sweep, args.threshold);
    log << "monotone: " << (monotone ? "yes" : "NO") << "; smallest p_risk with pi_safe >= "
        << format_real(args.threshold) << ": "
        << (threshold ? format_real(*threshold) : std::string("none")) << '\n';
    return monotone ? kExitOk : kExitCheck;
  });
}

int cli_dataset_stats(const std::string& input, const std::string& output, bool lenient,
                      std::ostream& log) {
  return guarded(log, [&] {
    std::ifstream in(input);
    if (!in) throw Error("cannot open '" + input + "'");
    const ParsedAnnotations parsed = parse_annotations(in);
    for (const auto& issue : parsed.issues) {
      log << input << ":" << issue.line << ": " << issue.message << '\n';
    }
    if (!parsed.issues.empty() && !lenient) {
      log << parsed.issues.size() << " malformed line(s); no summary written (use --lenient)\n";
      return kExitFailure;
    }
    const DatasetSummary summary = summarize(parsed.records);
    write_text(output, summary_to_json(summary));
    log << summary.n_dialogues << " dialogues, " << summary.n_utterances << " utterances, "
        << summary.n_labels << " labels";
    if (!parsed.issues.empty()) log << " (" << parsed.issues.size() << " lines skipped)";
    log << '\n';
    return kExitOk;
  });
}

int cli_build_pairs(const std::string& checkpoint_path, const std::string& config_path,
                    const std::string& output, std::optional<bool> natural, std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = load_config(config_path);
    if (natural) cfg.eval.natural = *natural;
    cfg.finalize();
    const QNetwork net = load_policy(checkpoint_path, cfg);
    Rng rng = derive_stream(cfg.seed, kPairsStream);
    const auto scenarios =
        cfg.eval.natural ? natural_eval_scenarios(cfg.world.scenarios, cfg.eval.natural_samples, rng)
                         : full_label_grid(cfg.eval.grid_repeats);
    const auto pairs = build_training_pairs(q_function(net), scenarios, cfg.world.encoder, rng);
    auto out = open_out(output);
    write_training_pairs_jsonl(out, pairs);
    log << pairs.size() << " training records -> " << output << '\n';
    return kExitOk;
  });
}

}  // namespace cprl
