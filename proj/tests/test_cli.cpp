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

// End-to-end runs of the cprl binary: every subcommand, its outputs and exit codes.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "cprl_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(CPRL_BINARY) + " " + args + " > " +
                          (kWork / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

nlohmann::json load(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

const char* kTinyConfig = R"(run.seed = 3
run.output_dir = unused
encoder.dim = 16
learner.total_episodes = 150
learner.num_actors = 2
learner.warmup = 64
learner.decay_steps = 500
learner.metrics_interval = 100
)";

}  // namespace

TEST_CASE("train, eval and build-pairs round trip") {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  write(kWork / "tiny.cfg", kTinyConfig);
  const auto cfg = (kWork / "tiny.cfg").string();
  const auto out = kWork / "train";

  REQUIRE(run("train --config " + cfg + " --output-dir " + out.string()) == 0);
  for (const char* f : {"metrics.csv", "checkpoint.bin", "hit_rates.json", "hit_rates.csv",
                        "safety_report.json", "safety_advantage_hist.csv"}) {
    CHECK(fs::exists(out / f));
  }
  std::ifstream metrics(out / "metrics.csv");
  std::string header;
  std::getline(metrics, header);
  CHECK(header ==
        "step,episodes,epsilon,avg_reward,q_loss,kl_loss,total_loss,gold_hit_rate,silver_hit_rate,"
        "crisis_recall");

  const auto ckpt = (out / "checkpoint.bin").string();
  REQUIRE(run("--kernels scalar eval --checkpoint " + ckpt + " --config " + cfg +
              " --output-dir " + (kWork / "eval").string()) == 0);
  CHECK(load(kWork / "eval" / "hit_rates.json")["overall"]["n"].get<int>() > 0);

  const auto pairs = kWork / "pairs.jsonl";
  REQUIRE(run("build-pairs --checkpoint " + ckpt + " --config " + cfg + " --output " +
              pairs.string()) == 0);
  std::ifstream in(pairs);
  std::string line;
  int records = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("policy_action"));
    ++records;
  }
  CHECK(records > 0);

  SUBCASE("checkpoint that does not match the config is rejected") {
    std::string wide = kTinyConfig;
    wide.replace(wide.find("dim = 16"), 8, "dim = 32");
    write(kWork / "wide.cfg", wide);
    CHECK(run("eval --checkpoint " + ckpt + " --config " + (kWork / "wide.cfg").string()) == 2);
  }
}

TEST_CASE("safety-sweep writes a monotone table") {
  fs::create_directories(kWork);
  const auto csv = kWork / "sweep.csv";
  REQUIRE(run("safety-sweep --output " + csv.string()) == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "p_risk,pi_safe,log_unsafe_mass,log_unsafe_odds");
  double prev = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string p, pi;
    std::getline(row, p, ',');
    std::getline(row, pi, ',');
    CHECK(std::stod(pi) >= prev);
    prev = std::stod(pi);
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("dataset-stats strict and lenient modes") {
  fs::create_directories(kWork);
  const auto good = kWork / "good.jsonl";
  write(good,
        R"({"dialogue_id":"d1","segment_id":"s1","speaker":"Seeker","labels":{"distortion":"Labeling","intensity":"Mild","risk":"Low"}}
{"dialogue_id":"d1","segment_id":"s2","speaker":"Counselor"}
)");
  const auto stats = kWork / "stats.json";
  REQUIRE(run("dataset-stats --input " + good.string() + " --output " + stats.string()) == 0);
  CHECK(fs::exists(stats));

  const auto bad = kWork / "bad.jsonl";
  write(bad, "{\"dialogue_id\":\"d1\",\"segment_id\":\"s1\",\"speaker\":\"Seeker\"}\nnot json\n");
  CHECK(run("dataset-stats --input " + bad.string() + " --output " + stats.string()) == 1);
  CHECK(run("dataset-stats --lenient --input " + bad.string() + " --output " + stats.string()) == 0);
}

TEST_CASE("bad invocations") {
  fs::create_directories(kWork);
  write(kWork / "broken.cfg", "learner.gamma = 1.5\n");
  CHECK(run("train --config " + (kWork / "broken.cfg").string()) == 2);
  CHECK(run("--kernels sse9 safety-sweep --output " + (kWork / "x.csv").string()) != 0);
  CHECK(run("no-such-command") != 0);
}
