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
#include <vector>

#include "cprl/domain.hpp"
#include "cprl/random.hpp"

namespace cprl {

using StateVector = std::vector<double>;

// Feature layout: [0,8) distortion one-hot, [8,11) intensity, [11,14) risk,
// 14 distortion-present flag, [15,dim) noise padding.
inline constexpr std::size_t kDistortionOffset = 0;
inline constexpr std::size_t kIntensityOffset = 8;
inline constexpr std::size_t kRiskOffset = 11;
inline constexpr std::size_t kPresenceIndex = 14;
inline constexpr std::size_t kMinStateDim = 15;

struct EncoderConfig {
  std::size_t dim = 64;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Structured one-hot encoding plus N(0, sigma^2) perturbation on every slot.
// With sigma == 0 no random numbers are consumed.
StateVector encode_state(const CognitiveLabels& labels, const EncoderConfig& cfg, Rng& rng);

}  // namespace cprl
