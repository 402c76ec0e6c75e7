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

#include <cmath>

#include "cprl/kernels.hpp"

namespace cprl::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_scalar(const double* w, const double* bias, const double* x, double* y,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + dot_scalar(w + r * cols, x, cols);
  }
}

void matvec_t_acc_scalar(const double* w, const double* delta, double* gx, std::size_t rows,
                         std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (delta[r] != 0.0) axpy_scalar(delta[r], w + r * cols, gx, cols);
  }
}

void rank1_acc_scalar(const double* delta, const double* x, double* gw, std::size_t rows,
                      std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (delta[r] != 0.0) axpy_scalar(delta[r], x, gw + r * cols, cols);
  }
}

void adamw_scalar(const AdamWParams& p, double* param, const double* grad, double* m, double* v,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * g;
    v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * g * g;
    const double m_hat = m[i] / p.bias_correction1;
    const double v_hat = v[i] / p.bias_correction2;
    param[i] -= p.lr * (m_hat / (std::sqrt(v_hat) + p.eps) + p.weight_decay * param[i]);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar", dot_scalar, axpy_scalar, matvec_scalar, matvec_t_acc_scalar, rank1_acc_scalar,
      adamw_scalar,
  };
  return table;
}

}  // namespace cprl::simd
