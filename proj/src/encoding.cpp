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

#include "cprl/encoding.hpp"

#include <cmath>
#include <string>

namespace cprl {

void EncoderConfig::validate() const {
  if (dim < kMinStateDim) {
    throw Error("encoder.dim must be >= " + std::to_string(kMinStateDim) + ", got " +
                std::to_string(dim));
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error("encoder.noise_sigma must be a finite nonnegative number");
  }
}

StateVector encode_state(const CognitiveLabels& labels, const EncoderConfig& cfg, Rng& rng) {
  cfg.validate();
  StateVector s(cfg.dim, 0.0);
  if (labels.distortion) {
    s[kDistortionOffset + index_of(*labels.distortion)] = 1.0;
    s[kIntensityOffset + index_of(labels.intensity)] = 1.0;
    s[kPresenceIndex] = 1.0;
  }
  s[kRiskOffset + index_of(labels.risk)] = 1.0;
  if (cfg.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
    for (double& x : s) x += noise(rng);
  }
  return s;
}

}  // namespace cprl
