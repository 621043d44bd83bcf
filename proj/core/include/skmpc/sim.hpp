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

#include <filesystem>
#include <string>
#include <vector>

#include "skmpc/certify.hpp"
#include "skmpc/controller.hpp"
#include "skmpc/model.hpp"
#include "skmpc/mpc.hpp"
#include "skmpc/trajectory.hpp"

namespace skmpc {

/// T-step closed loop x+ = f(x, k(x)). Stops early when the controller
/// reports an infeasible solve.
Trajectory rollout(const Plant& plant, const Controller& controller, const StageCost& cost,
                   const Vector& x0, int T);

struct RunSummary {
  std::string controller;
  int x0_index = 0;
  Vector x0;
  double accumulated_cost = 0.0;
  double final_norm = 0.0;
  bool converged = false;
  bool truncated = false;
  int steps = 0;
  DecayFit decay;
};

struct ComparisonReport {
  std::vector<std::string> controllers;
  std::vector<Vector> x0s;
  /// runs[i * x0s.size() + j] is controller i from x0s[j].
  std::vector<RunSummary> runs;
  std::vector<Trajectory> trajectories;

  const RunSummary& run(std::size_t controller, std::size_t x0) const;
  /// (J_other - J_base) / J_base from x0s[x0]; zero when both costs vanish.
  double relative_gap(std::size_t base, std::size_t other, std::size_t x0) const;
};

ComparisonReport compare(const Plant& plant, const std::vector<Controller>& controllers,
                         const StageCost& cost, const std::vector<Vector>& x0s, int T,
                         double convergence_tol = 1e-2);

struct ValueTrace {
  std::vector<double> values;
  bool truncated = false;
};

/// V_N*(Psi(x_t)) along the trajectory, re-solving at every state.
ValueTrace value_trace(const CondensedMpc& cm, const Dictionary& dict, const Trajectory& traj,
                       const SolverOptions& opts = {});

/// Columns: t, x1..xn, u1..um, stage_cost, accum_cost, status.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace skmpc
