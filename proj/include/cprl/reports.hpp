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

// Serialization of evaluation reports (JSON and CSV).

#include <iosfwd>
#include <span>
#include <string>

#include "cprl/policy_eval.hpp"
#include "cprl/safety.hpp"

namespace cprl {

std::string hit_rates_to_json(const HitRateReport& report);
// distortion,n,gold_rate,silver_rate,combined — rows ranked by combined,
// highest first.
void write_hit_rates_csv(std::ostream& out, const HitRateReport& report);

std::string safety_report_to_json(const SafetyReport& report);
// bin_lo,bin_hi,count
void write_histogram_csv(std::ostream& out, const Histogram& h);
// p_risk,pi_safe,log_unsafe_mass
void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> sweep);

}  // namespace cprl
