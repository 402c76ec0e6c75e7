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

#include "cprl/network.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "cprl/domain.hpp"
#include "cprl/kernels.hpp"

namespace cprl {

QNetwork::QNetwork(std::vector<std::size_t> dims, double dropout_p)
    : dims_(std::move(dims)), dropout_p_(dropout_p) {
  if (dims_.size() < 2) throw Error("network needs at least input and output dims");
  for (std::size_t d : dims_) {
    if (d == 0) throw Error("network layer dims must be positive");
  }
  if (!(dropout_p_ >= 0.0 && dropout_p_ < 1.0)) throw Error("dropout_p must be in [0,1)");
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(offset);
    offset += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
  params_.assign(offset, 0.0);
}

QNetwork QNetwork::initialized(std::vector<std::size_t> dims, double dropout_p, Rng& rng) {
  QNetwork net(std::move(dims), dropout_p);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const bool output_layer = l + 1 == net.num_layers();
    const double limit =
        output_layer ? 1e-3 : std::sqrt(6.0 / static_cast<double>(net.dims_[l]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : net.weights(l)) w = dist(rng);
  }
  return net;
}

std::vector<std::size_t> QNetwork::default_dims(std::size_t d_in) {
  return {d_in, 256, 128, kNumActions};
}

std::span<double> QNetwork::weights(std::size_t layer) {
  return std::span<double>(params_).subspan(offsets_.at(layer), dims_[layer] * dims_[layer + 1]);
}
std::span<const double> QNetwork::weights(std::size_t layer) const {
  return std::span<const double>(params_).subspan(offsets_.at(layer),
                                                  dims_[layer] * dims_[layer + 1]);
}
std::span<double> QNetwork::biases(std::size_t layer) {
  return std::span<double>(params_).subspan(bias_offset(layer), dims_[layer + 1]);
}
std::span<const double> QNetwork::biases(std::size_t layer) const {
  return std::span<const double>(params_).subspan(bias_offset(layer), dims_[layer + 1]);
}

std::vector<double> QNetwork::forward(std::span<const double> s) const {
  ForwardCache cache;
  forward(s, Mode::Eval, nullptr, cache);
  return std::move(cache.activations.back());
}

void QNetwork::forward(std::span<const double> s, Mode mode, Rng* rng,
                       ForwardCache& cache) const {
  if (s.size() != input_dim()) {
    throw Error("state dimension " + std::to_string(s.size()) + " does not match network input " +
                std::to_string(input_dim()));
  }
  const bool dropout = mode == Mode::Train && dropout_p_ > 0.0;
  if (dropout && rng == nullptr) throw Error("train-mode forward with dropout needs an rng");
  const auto& k = simd::active();
  const std::size_t layers = num_layers();
  cache.activations.resize(layers + 1);
  cache.gates.resize(layers - 1);
  cache.activations[0].assign(s.begin(), s.end());
  const double keep_scale = 1.0 / (1.0 - dropout_p_);
  for (std::size_t l = 0; l < layers; ++l) {
    auto& out = cache.activations[l + 1];
    out.resize(dims_[l + 1]);
    k.matvec(params_.data() + offsets_[l], params_.data() + bias_offset(l),
             cache.activations[l].data(), out.data(), dims_[l + 1], dims_[l]);
    if (l + 1 == layers) break;
    auto& gate = cache.gates[l];
    gate.resize(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      double g = out[j] > 0.0 ? 1.0 : 0.0;
      if (dropout) g = uniform01(*rng) < dropout_p_ ? 0.0 : g * keep_scale;
      gate[j] = g;
      out[j] = out[j] > 0.0 ? out[j] * g : 0.0;
    }
  }
}

void QNetwork::backward(const ForwardCache& cache, std::span<const double> output_grad,
                        std::span<double> grads) const {
  if (grads.size() != params_.size()) throw Error("gradient buffer has the wrong size");
  if (output_grad.size() != output_dim()) throw Error("output gradient has the wrong size");
  const auto& k = simd::active();
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> upstream;
  for (std::size_t l = num_layers(); l-- > 0;) {
    const std::size_t rows = dims_[l + 1];
    const std::size_t cols = dims_[l];
    k.rank1_acc(delta.data(), cache.activations[l].data(), grads.data() + offsets_[l], rows, cols);
    k.axpy(1.0, delta.data(), grads.data() + bias_offset(l), rows);
    if (l == 0) break;
    upstream.assign(cols, 0.0);
    k.matvec_t_acc(params_.data() + offsets_[l], delta.data(), upstream.data(), rows, cols);
    const auto& gate = cache.gates[l - 1];
    for (std::size_t j = 0; j < cols; ++j) upstream[j] *= gate[j];
    delta.swap(upstream);
  }
}

bool QNetwork::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double x) { return std::isfinite(x); });
}

std::vector<double> td_gradient(const QNetwork& net, std::span<const double> s,
                                std::size_t action, double target_y) {
  if (action >= net.output_dim()) throw Error("action index out of range");
  ForwardCache cache;
  net.forward(s, Mode::Eval, nullptr, cache);
  std::vector<double> out_grad(net.output_dim(), 0.0);
  out_grad[action] = 2.0 * (cache.output()[action] - target_y);
  std::vector<double> grads(net.num_parameters(), 0.0);
  net.backward(cache, out_grad, grads);
  return grads;
}

void OptimizerState::reset_for(const QNetwork& net) {
  step = 0;
  m.assign(net.num_parameters(), 0.0);
  v.assign(net.num_parameters(), 0.0);
}

void adamw_step(QNetwork& net, std::span<const double> grads, OptimizerState& opt) {
  const std::size_t n = net.num_parameters();
  if (grads.size() != n || opt.m.size() != n || opt.v.size() != n) {
    throw Error("adamw_step: gradient/moment shapes do not match the network");
  }
  ++opt.step;
  const double t = static_cast<double>(opt.step);
  const simd::AdamWParams p{opt.lr,
                            opt.beta1,
                            opt.beta2,
                            opt.eps,
                            opt.weight_decay,
                            1.0 - std::pow(opt.beta1, t),
                            1.0 - std::pow(opt.beta2, t)};
  simd::active().adamw(p, net.parameters().data(), grads.data(), opt.m.data(), opt.v.data(), n);
}

void hard_update(QNetwork& target, const QNetwork& online) {
  if (!target.same_architecture(online)) throw Error("hard_update: architecture mismatch");
  std::copy(online.parameters().begin(), online.parameters().end(),
            target.parameters().begin());
}

// ---------------------------------------------------------------------------
// Checkpoint I/O

namespace {

constexpr char kMagic[5] = {'C', 'P', 'R', 'L', '1'};
constexpr char kFooterMagic[4] = {'L', 'R', 'N', 'R'};

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return value;
  }
}

void put_u64(std::ostream& out, std::uint64_t v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
void put_block(std::ostream& out, std::span<const double> values) {
  for (double v : values) put_f64(out, v);
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("checkpoint truncated");
  return to_little(v);
}
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }
void get_block(std::istream& in, std::span<double> values) {
  for (double& v : values) v = get_f64(in);
}

}  // namespace

void write_checkpoint(std::ostream& out, const QNetwork& net, const OptimizerState& opt,
                      const std::optional<LearnerFooter>& learner) {
  if (opt.m.size() != net.num_parameters() || opt.v.size() != net.num_parameters()) {
    throw Error("write_checkpoint: optimizer state does not match network");
  }
  out.write(kMagic, sizeof kMagic);
  put_u64(out, net.input_dim());
  put_u64(out, net.num_layers());
  for (std::size_t l = 0; l < net.num_layers(); ++l) put_u64(out, net.dims()[l + 1]);
  put_f64(out, net.dropout_p());
  put_block(out, net.parameters());
  put_block(out, opt.m);
  put_block(out, opt.v);
  put_u64(out, opt.step);
  if (learner) {
    out.write(kFooterMagic, sizeof kFooterMagic);
    put_u64(out, learner->env_steps);
    put_u64(out, learner->learner_steps);
    put_u64(out, learner->episodes);
    put_f64(out, learner->epsilon);
  }
  if (!out) throw Error("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw Error("checkpoint format error: bad magic bytes");
  }
  constexpr std::uint64_t kMaxDim = 1u << 24;
  std::vector<std::size_t> dims{static_cast<std::size_t>(get_u64(in))};
  const std::uint64_t layers = get_u64(in);
  if (layers == 0 || layers > 64 || dims[0] == 0 || dims[0] > kMaxDim) {
    throw Error("checkpoint format error: implausible layer layout");
  }
  for (std::uint64_t l = 0; l < layers; ++l) {
    const std::uint64_t d = get_u64(in);
    if (d == 0 || d > kMaxDim) throw Error("checkpoint format error: implausible layer width");
    dims.push_back(static_cast<std::size_t>(d));
  }
  const double dropout = get_f64(in);
  Checkpoint ck{QNetwork(std::move(dims), dropout), {}, std::nullopt};
  get_block(in, ck.net.parameters());
  ck.opt.reset_for(ck.net);
  get_block(in, ck.opt.m);
  get_block(in, ck.opt.v);
  ck.opt.step = get_u64(in);

  char footer[sizeof kFooterMagic];
  if (in.read(footer, sizeof footer)) {
    if (std::memcmp(footer, kFooterMagic, sizeof kFooterMagic) != 0) {
      throw Error("checkpoint format error: unknown trailer");
    }
    LearnerFooter f;
    f.env_steps = get_u64(in);
    f.learner_steps = get_u64(in);
    f.episodes = get_u64(in);
    f.epsilon = get_f64(in);
    ck.learner = f;
  } else if (in.gcount() != 0) {
    throw Error("checkpoint format error: truncated trailer");
  }
  return ck;
}

void save_checkpoint(const std::string& path, const QNetwork& net, const OptimizerState& opt,
                     const std::optional<LearnerFooter>& learner) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_checkpoint(out, net, opt, learner);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace cprl
