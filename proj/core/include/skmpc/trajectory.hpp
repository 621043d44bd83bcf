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

#include <vector>

#include "skmpc/controller.hpp"

namespace skmpc {

/// Closed-loop run. states has one more entry than inputs; a run that ends
/// early on controller infeasibility is flagged `truncated`.
struct Trajectory {
  Vector x0;
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  std::vector<double> stage_costs;
  std::vector<double> accumulated;
  std::vector<SolveStatus> statuses;
  bool truncated = false;

  int steps() const noexcept { return static_cast<int>(inputs.size()); }
  double accumulated_cost() const noexcept {
    return accumulated.empty() ? 0.0 : accumulated.back();
  }
};

}  // namespace skmpc
