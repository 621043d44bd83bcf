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

#include "skmpc/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "skmpc/errors.hpp"

namespace skmpc {

Trajectory rollout(const Plant& plant, const Controller& controller, const StageCost& cost,
                   const Vector& x0, int T) {
  if (T < 1) throw InputError("rollout: horizon must be >= 1");
  linalg::require_size(x0, plant.n, "rollout initial state");
  controller.restart();
  Trajectory traj;
  traj.x0 = x0;
  traj.states.reserve(T + 1);
  traj.states.push_back(x0);
  double acc = 0.0;
  Vector x = x0;
  for (int t = 0; t < T; ++t) {
    ControlOutput out = controller(x);
    traj.statuses.push_back(out.status);
    if (out.status == SolveStatus::kInfeasible) {
      traj.truncated = true;
      break;
    }
    const double stage = cost(x, out.u);
    acc += stage;
    x = plant.step(x, out.u);
    traj.inputs.push_back(std::move(out.u));
    traj.stage_costs.push_back(stage);
    traj.accumulated.push_back(acc);
    traj.states.push_back(x);
  }
  return traj;
}

const RunSummary& ComparisonReport::run(std::size_t controller, std::size_t x0) const {
  if (controller >= controllers.size() || x0 >= x0s.size()) {
    throw InputError("ComparisonReport::run: index out of range");
  }
  return runs[controller * x0s.size() + x0];
}

double ComparisonReport::relative_gap(std::size_t base, std::size_t other, std::size_t x0) const {
  const double jb = run(base, x0).accumulated_cost;
  const double jo = run(other, x0).accumulated_cost;
  if (jb == 0.0 && jo == 0.0) return 0.0;
  if (jb == 0.0) return std::numeric_limits<double>::infinity();
  return (jo - jb) / jb;
}

ComparisonReport compare(const Plant& plant, const std::vector<Controller>& controllers,
                         const StageCost& cost, const std::vector<Vector>& x0s, int T,
                         double convergence_tol) {
  if (controllers.empty() || x0s.empty()) throw InputError("compare: empty controller or state list");
  ComparisonReport rep;
  rep.x0s = x0s;
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    rep.controllers.push_back(controllers[i].name);
    for (std::size_t j = 0; j < x0s.size(); ++j) {
      Trajectory traj = rollout(plant, controllers[i], cost, x0s[j], T);
      RunSummary s;
      s.controller = controllers[i].name;
      s.x0_index = static_cast<int>(j);
      s.x0 = x0s[j];
      s.accumulated_cost = traj.accumulated_cost();
      s.final_norm = traj.states.back().norm();
      s.truncated = traj.truncated;
      s.converged = !traj.truncated && s.final_norm <= convergence_tol;
      s.steps = traj.steps();
      if (x0s[j].norm() == 0.0) {
        s.decay = DecayFit{1.0, 0.0, true, 0};
      } else if (traj.states.size() >= 10) {
        s.decay = fit_decay_rate(traj);
      }
      rep.runs.push_back(std::move(s));
      rep.trajectories.push_back(std::move(traj));
    }
  }
  return rep;
}

ValueTrace value_trace(const CondensedMpc& cm, const Dictionary& dict, const Trajectory& traj,
                       const SolverOptions& opts) {
  ValueTrace trace;
  std::optional<Vector> warm;
  for (const Vector& x : traj.states) {
    const Vector z = dict.lift(x);
    const MpcSolution sol = solve_kmpc(cm, z, warm, opts);
    if (sol.status == SolveStatus::kInfeasible) {
      trace.truncated = true;
      break;
    }
    trace.values.push_back(sol.value);
    warm = shifted_sequence(cm, z, sol.u_seq);
  }
  return trace;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (f == nullptr) throw InputError("cannot open " + path.string() + " for writing");
  const int n = static_cast<int>(traj.x0.size());
  const int m = traj.inputs.empty() ? 0 : static_cast<int>(traj.inputs.front().size());
  std::fputs("t", f);
  for (int i = 0; i < n; ++i) std::fprintf(f, ",x%d", i + 1);
  for (int i = 0; i < m; ++i) std::fprintf(f, ",u%d", i + 1);
  std::fputs(",stage_cost,accum_cost,status\n", f);
  for (int t = 0; t < static_cast<int>(traj.states.size()); ++t) {
    std::fprintf(f, "%d", t);
    for (int i = 0; i < n; ++i) std::fprintf(f, ",%.17g", traj.states[t](i));
    if (t < traj.steps()) {
      for (int i = 0; i < m; ++i) std::fprintf(f, ",%.17g", traj.inputs[t](i));
      std::fprintf(f, ",%.17g,%.17g,%s\n", traj.stage_costs[t], traj.accumulated[t],
                   to_string(traj.statuses[t]));
    } else {
      // Final state: no input applied.
      for (int i = 0; i < m; ++i) std::fputs(",", f);
      const char* status = t < static_cast<int>(traj.statuses.size())
                               ? to_string(traj.statuses[t])
                               : "terminal";
      std::fprintf(f, ",,%.17g,%s\n", traj.accumulated_cost(), status);
    }
  }
  std::fclose(f);
}

}  // namespace skmpc
