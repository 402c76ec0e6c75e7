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

#include "cprl/domain.hpp"
#include "cprl/encoding.hpp"

namespace cprl {

// One environment step as stored in replay. `s_next` is ignored by the
// bootstrap target when `done` is set.
struct Transition {
  StateVector s;
  Action a = Action::EmpathicValidation;
  double r = 0.0;
  StateVector s_next;
  bool done = false;
  CognitiveLabels labels;
};

}  // namespace cprl
