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

// Dense double-precision kernels behind the Q-network. Every kernel has a
// portable scalar reference and, on x86-64, an AVX2+FMA variant. The active
// table is picked once at startup from CPUID and can be pinned with the
// CPRL_KERNELS environment variable ("scalar", "avx2" or "auto").

#include <cstddef>
#include <string_view>

namespace cprl::simd {

struct AdamWParams {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double weight_decay;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  std::string_view name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[r] = bias[r] + sum_c w[r * cols + c] * x[c]
  void (*matvec)(const double* w, const double* bias, const double* x, double* y,
                 std::size_t rows, std::size_t cols);
  // gx[c] += sum_r w[r * cols + c] * delta[r]
  void (*matvec_t_acc)(const double* w, const double* delta, double* gx, std::size_t rows,
                       std::size_t cols);
  // gw[r * cols + c] += delta[r] * x[c]
  void (*rank1_acc)(const double* delta, const double* x, double* gw, std::size_t rows,
                    std::size_t cols);
  // Decoupled-weight-decay Adam update over n parameters.
  void (*adamw)(const AdamWParams& p, double* param, const double* grad, double* m, double* v,
                std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();

// The table used by the library. Chosen on first call.
const KernelTable& active();

// Force a table ("scalar", "avx2", "auto"); throws cprl::Error if unavailable.
void select(std::string_view name);

}  // namespace cprl::simd
