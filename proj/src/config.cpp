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

#include "cprl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>

namespace cprl {

void EvalConfig::validate() const {
  if (grid_repeats == 0) throw ConfigError("eval.grid_repeats", "must be positive");
  if (natural && natural_samples == 0) throw ConfigError("eval.natural_samples", "must be positive");
  if (histogram_bins == 0) throw ConfigError("eval.histogram_bins", "must be positive");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(key, "expected a real number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  std::string digits;
  for (char c : text) {
    if (c != '_' && c != '\'') digits.push_back(c);
  }
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
    throw ConfigError(key, "expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <std::size_t N>
std::array<double, N> parse_real_array(const std::string& key, const std::string& text) {
  const auto items = split_list(text);
  if (items.size() != N) {
    throw ConfigError(key, "expected " + std::to_string(N) + " comma-separated values");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = parse_real(key, items[i]);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key,
                                  const std::string& value)>;

template <typename T>
Setter real_field(T member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v) {
    std::invoke(member, c) = parse_real(k, v);
  };
}

template <typename T>
Setter uint_field(T member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v) {
    using Target = std::remove_reference_t<decltype(std::invoke(member, c))>;
    std::invoke(member, c) = static_cast<Target>(parse_uint(k, v));
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["run.seed"] = uint_field([](RunConfig& c) -> auto& { return c.seed; });
    t["run.output_dir"] = [](RunConfig& c, const std::string&,
                             const std::string& v) { c.output_dir = v; };

    t["encoder.dim"] = uint_field([](RunConfig& c) -> auto& { return c.world.encoder.dim; });
    t["encoder.noise_sigma"] =
        real_field([](RunConfig& c) -> auto& { return c.world.encoder.noise_sigma; });

    t["env.max_turns"] = uint_field([](RunConfig& c) -> auto& { return c.world.env.max_turns; });
    t["env.p_improve_gold"] =
        real_field([](RunConfig& c) -> auto& { return c.world.env.p_improve_gold; });
    t["env.p_improve_silver"] =
        real_field([](RunConfig& c) -> auto& { return c.world.env.p_improve_silver; });
    t["env.p_improve_mismatch"] =
        real_field([](RunConfig& c) -> auto& { return c.world.env.p_improve_mismatch; });
    t["env.p_worsen_mismatch"] =
        real_field([](RunConfig& c) -> auto& { return c.world.env.p_worsen_mismatch; });
    t["env.p_no_distortion"] = [](RunConfig& c, const std::string& k,
                                  const std::string& v) { c.scenarios.p_no_distortion = parse_real(k, v); };
    t["env.distortion_probs"] = [](RunConfig& c, const std::string& k,
                                   const std::string& v) {
      c.scenarios.distortion = parse_real_array<kNumDistortions>(k, v);
    };
    t["env.tail_weights"] = [](RunConfig& c, const std::string& k,
                               const std::string& v) { c.scenarios.tail_weights = parse_real_array<5>(k, v); };
    t["env.intensity_probs"] = [](RunConfig& c, const std::string& k,
                                  const std::string& v) {
      c.scenarios.intensity = parse_real_array<kNumIntensities>(k, v);
    };
    t["env.risk_probs"] = [](RunConfig& c, const std::string& k,
                             const std::string& v) { c.scenarios.risk = parse_real_array<kNumRiskLevels>(k, v); };

#define CPRL_REWARD(name) \
  t["reward." #name] = real_field([](RunConfig& c) -> auto& { return c.world.reward.name; })
    CPRL_REWARD(r_crisis_hit);
    CPRL_REWARD(r_crisis_miss);
    CPRL_REWARD(r_false_positive);
    CPRL_REWARD(r_gold);
    CPRL_REWARD(r_silver);
    CPRL_REWARD(r_mismatch);
    CPRL_REWARD(r_severe_bonus);
    CPRL_REWARD(r_mild_penalty);
    CPRL_REWARD(w_imp);
    CPRL_REWARD(w_match);
    CPRL_REWARD(w_safe);
#undef CPRL_REWARD
    t["reward.p_risk_override"] = [](RunConfig& c, const std::string& k,
                                     const std::string& v) {
      if (v == "none") c.world.reward.p_risk_override.reset();
      else c.world.reward.p_risk_override = parse_real(k, v);
    };

#define CPRL_LEARNER_REAL(name) \
  t["learner." #name] = real_field([](RunConfig& c) -> auto& { return c.learner.name; })
#define CPRL_LEARNER_UINT(name) \
  t["learner." #name] = uint_field([](RunConfig& c) -> auto& { return c.learner.name; })
    CPRL_LEARNER_REAL(gamma);
    CPRL_LEARNER_UINT(batch_size);
    CPRL_LEARNER_REAL(epsilon_start);
    CPRL_LEARNER_REAL(epsilon_end);
    CPRL_LEARNER_UINT(decay_steps);
    CPRL_LEARNER_REAL(kl_beta);
    CPRL_LEARNER_REAL(temperature);
    CPRL_LEARNER_UINT(target_update_every);
    CPRL_LEARNER_UINT(total_episodes);
    CPRL_LEARNER_UINT(replay_capacity);
    CPRL_LEARNER_UINT(warmup);
    CPRL_LEARNER_UINT(train_every);
    CPRL_LEARNER_UINT(num_actors);
    CPRL_LEARNER_UINT(snapshot_interval);
    CPRL_LEARNER_UINT(metrics_interval);
    CPRL_LEARNER_REAL(dropout);
    CPRL_LEARNER_REAL(learning_rate);
    CPRL_LEARNER_REAL(weight_decay);
    CPRL_LEARNER_REAL(grad_clip);
#undef CPRL_LEARNER_REAL
#undef CPRL_LEARNER_UINT
    t["learner.hidden"] = [](RunConfig& c, const std::string& k,
                             const std::string& v) {
      c.learner.hidden.clear();
      if (trim(v).empty()) return;
      for (const auto& item : split_list(v)) {
        c.learner.hidden.push_back(static_cast<std::size_t>(parse_uint(k, item)));
      }
    };

    t["eval.grid_repeats"] = uint_field([](RunConfig& c) -> auto& { return c.eval.grid_repeats; });
    t["eval.natural"] = [](RunConfig& c, const std::string& k,
                           const std::string& v) { c.eval.natural = parse_bool(k, v); };
    t["eval.natural_samples"] =
        uint_field([](RunConfig& c) -> auto& { return c.eval.natural_samples; });
    t["eval.histogram_bins"] =
        uint_field([](RunConfig& c) -> auto& { return c.eval.histogram_bins; });
    return t;
  }();
  return table;
}

}  // namespace

ScenarioDistribution ScenarioSettings::build() const {
  if (!(p_no_distortion >= 0.0 && p_no_distortion <= 1.0)) {
    throw ConfigError("env.p_no_distortion", "must be in [0,1]");
  }
  ScenarioDistribution dist = default_scenario_distribution(tail_weights);
  if (distortion) dist.distortion = *distortion;
  for (double& p : dist.distortion) p *= 1.0 - p_no_distortion;
  dist.p_no_distortion = p_no_distortion;
  if (intensity) dist.intensity = *intensity;
  if (risk) dist.risk = *risk;
  return dist;
}

void RunConfig::finalize() {
  world.env.seed = seed;
  world.encoder.seed = seed ^ 0x5EED'0000'0000'0001ULL;
  learner.seed = seed;
  auto wrap = [](const char* section, const auto& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(section, e.what());
    }
  };
  wrap("encoder", [&] { world.encoder.validate(); });
  wrap("env", [&] { world.scenarios = scenarios.build(); });
  wrap("env", [&] { world.env.validate(); });
  wrap("env", [&] { world.scenarios.validate(); });
  wrap("reward", [&] { world.reward.validate(); });
  wrap("learner", [&] { learner.validate(); });
  eval.validate();
  if (output_dir.empty()) throw ConfigError("run.output_dir", "must not be empty");
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown configuration key");
  it->second(cfg, key, value);
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.finalize();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace cprl
