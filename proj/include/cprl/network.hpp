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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cprl/random.hpp"

namespace cprl {

enum class Mode { Train, Eval };

// Per-sample intermediate values kept for backpropagation.
struct ForwardCache {
  // activations[0] is the input; activations[l] feeds layer l; the last entry
  // holds the network output.
  std::vector<std::vector<double>> activations;
  // For each hidden layer: dh/dz including the dropout mask and its 1/(1-p)
  // scale (0 where the unit was inactive or dropped).
  std::vector<std::vector<double>> gates;

  std::span<const double> output() const { return activations.back(); }
};

// Fully connected ReLU network with an identity output layer. All parameters
// live in one flat buffer: for each layer, row-major weights (out x in) then
// biases. Gradients and optimizer moments share that layout.
class QNetwork {
 public:
  QNetwork() = default;
  // Zero-initialized parameters. dims = {d_in, hidden..., d_out}.
  QNetwork(std::vector<std::size_t> dims, double dropout_p);

  // He-uniform hidden layers, U(-1e-3, 1e-3) output weights, zero biases.
  static QNetwork initialized(std::vector<std::size_t> dims, double dropout_p, Rng& rng);
  // {d_in, 256, 128, 10}
  static std::vector<std::size_t> default_dims(std::size_t d_in);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_dim() const { return dims_.front(); }
  std::size_t output_dim() const { return dims_.back(); }
  std::size_t num_layers() const { return dims_.size() - 1; }
  double dropout_p() const { return dropout_p_; }
  std::size_t num_parameters() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> biases(std::size_t layer);
  std::span<const double> biases(std::size_t layer) const;
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + dims_[layer] * dims_[layer + 1];
  }

  // Deterministic eval-mode forward.
  std::vector<double> forward(std::span<const double> s) const;
  // Train mode draws one dropout coin per hidden unit from `rng` (none when
  // dropout_p == 0). Eval mode ignores `rng`.
  void forward(std::span<const double> s, Mode mode, Rng* rng, ForwardCache& cache) const;
  // grads += d(output_grad . output) / d(params) for the sample in `cache`.
  void backward(const ForwardCache& cache, std::span<const double> output_grad,
                std::span<double> grads) const;

  bool same_architecture(const QNetwork& other) const {
    return dims_ == other.dims_ && dropout_p_ == other.dropout_p_;
  }
  bool all_finite() const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  double dropout_p_ = 0.0;
  std::vector<double> params_;
};

// Gradient of (target_y - Q(s, action))^2 with an eval-mode forward.
std::vector<double> td_gradient(const QNetwork& net, std::span<const double> s,
                                std::size_t action, double target_y);

struct OptimizerState {
  double lr = 1e-4;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  // Zero moments sized for `net`.
  void reset_for(const QNetwork& net);
};

void adamw_step(QNetwork& net, std::span<const double> grads, OptimizerState& opt);

// Byte copy of the online parameters into the target.
void hard_update(QNetwork& target, const QNetwork& online);

// Trailer written after the optimizer block when a learner saves its state.
struct LearnerFooter {
  std::uint64_t env_steps = 0;
  std::uint64_t learner_steps = 0;
  std::uint64_t episodes = 0;
  double epsilon = 0.0;

  friend bool operator==(const LearnerFooter&, const LearnerFooter&) = default;
};

struct Checkpoint {
  QNetwork net;
  OptimizerState opt;
  std::optional<LearnerFooter> learner;
};

// Binary format, all integers and reals little-endian:
//   "CPRL1" | u64 d_in | u64 n_layers | u64 out_dim[n_layers] | f64 dropout_p
//   | f64 params | f64 m | f64 v | u64 step | optional ("LRNR" footer)
void write_checkpoint(std::ostream& out, const QNetwork& net, const OptimizerState& opt,
                      const std::optional<LearnerFooter>& learner = std::nullopt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const QNetwork& net, const OptimizerState& opt,
                     const std::optional<LearnerFooter>& learner = std::nullopt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace cprl
