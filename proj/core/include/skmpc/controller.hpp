/*
 * Copyright 2026 The skmpc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <string>

#include "skmpc/linalg.hpp"

namespace skmpc {

enum class SolveStatus { kOptimal, kMaxIter, kInfeasible };

const char* to_string(SolveStatus status);

struct ControlOutput {
  Vector u;
  SolveStatus status = SolveStatus::kOptimal;
  int iterations = 0;
};

/// A state-feedback law x -> u with solver diagnostics. Stateful laws (warm
/// started MPC) expose `reset` so every rollout starts from the same state.
struct Controller {
  std::string name;
  std::function<ControlOutput(const Vector& x)> law;
  std::function<void()> reset;

  ControlOutput operator()(const Vector& x) const { return law(x); }
  void restart() const {
    if (reset) reset();
  }
};

}  // namespace skmpc
