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

#include <atomic>
#include <cstdlib>
#include <string>

#include "cprl/domain.hpp"
#include "cprl/kernels.hpp"

namespace cprl::simd {

#if defined(CPRL_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(CPRL_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* best_available() {
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

const KernelTable* lookup(std::string_view name) {
  if (name == "auto") return best_available();
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") {
    if (const KernelTable* t = avx2_kernels()) return t;
    throw Error("avx2 kernels are not available on this machine");
  }
  throw Error("unknown kernel set '" + std::string(name) + "'");
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{[] {
    const char* env = std::getenv("CPRL_KERNELS");
    return lookup(env != nullptr && *env != '\0' ? std::string_view(env) : "auto");
  }()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void select(std::string_view name) { slot().store(lookup(name), std::memory_order_release); }

}  // namespace cprl::simd
