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

#include <optional>
#include <string>
#include <utility>

#include "skmpc/box.hpp"
#include "skmpc/controller.hpp"
#include "skmpc/model.hpp"
#include "skmpc/terminal.hpp"

namespace skmpc {

/// Condensed horizon-N Koopman MPC. Predicted lifted states are eliminated
/// through the stacked maps
///   Z = O z + T u,  z_N = Obar z + Tbar u,
/// so that V_N(z, u) = Z' Qbar Z + u' Rbar u with
/// Qbar = diag(C'QC, ..., C'QC, Phat) and Rbar = diag(R, ..., R).
struct CondensedMpc {
  int N = 0;
  LiftedModel model;
  StageCost cost;
  Box input_box;
  TerminalIngredients terminal;

  Matrix O;
  Matrix T;
  Matrix Obar;
  Matrix Tbar;
  Matrix Qbar;
  Matrix Rbar;

  /// Hessian T'QbarT + Rbar, linear map T'QbarO and constant O'QbarO.
  Matrix hessian;
  Matrix linear;
  Matrix constant;
  /// Symmetric square root of Phat.
  Matrix phat_sqrt;

  int nz() const noexcept { return model.nz(); }
  int m() const noexcept { return model.m(); }
  int num_inputs() const noexcept { return N * model.m(); }

  /// V_N(z, u) through the condensed quadratic form.
  double condensed_value(const Vector& z, const Vector& u) const;
  /// Obar z + Tbar u.
  Vector terminal_state(const Vector& z, const Vector& u) const;
};

CondensedMpc build_condensed(const LiftedModel& model, const StageCost& cost,
                             const TerminalIngredients& terminal, const Box& input_box,
                             int N);

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 50000;
  double rho = 1.0;
  /// Residual balancing: scale rho by `adapt_factor` when one residual
  /// exceeds the other by more than `adapt_ratio`.
  double adapt_factor = 2.0;
  double adapt_ratio = 10.0;
  int adapt_interval = 25;
  /// Window for the infeasibility test on the terminal consensus residual.
  int infeasibility_window = 1000;
  /// Refine converged ADMM iterates by an exact active-set solve.
  bool polish = true;
};

struct MpcSolution {
  Vector u_seq;
  double value = 0.0;
  SolveStatus status = SolveStatus::kMaxIter;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool polished = false;
};

/// min_u V_N(z, u) s.t. u in U^N, V_f(Obar z + Tbar u) <= tau, by ADMM with
/// box clipping and exact ellipsoid projection, optionally polished.
MpcSolution solve_kmpc(const CondensedMpc& cm, const Vector& z,
                       const std::optional<Vector>& warm_start = std::nullopt,
                       const SolverOptions& opts = {});

/// First block of the optimal sequence. Throws FeasibilityError if infeasible.
std::pair<Vector, MpcSolution> mpc_law(const CondensedMpc& cm, const Vector& z,
                                       const std::optional<Vector>& warm_start = std::nullopt,
                                       const SolverOptions& opts = {});

/// (u(1:N-1), K phi(N; z, u)).
Vector shifted_sequence(const CondensedMpc& cm, const Vector& z, const Vector& u_opt);

/// V_N(z, u) by explicit rollout of the lifted model.
double value_function(const CondensedMpc& cm, const Vector& z, const Vector& u);

/// u in U^N within `box_tol` and V_f(phi(N; z, u)) <= tau + `terminal_tol`.
bool is_feasible_sequence(const CondensedMpc& cm, const Vector& z, const Vector& u,
                          double box_tol = 1e-8, double terminal_tol = 1e-6);

/// x -> kappa(Psi(x)). With `warm_start`, each solve starts from the shifted
/// previous solution; `restart()` clears it.
Controller make_mpc_controller(const CondensedMpc& cm, const Dictionary& dict,
                               const SolverOptions& opts = {}, std::string name = "s-kmpc",
                               bool warm_start = true);

}  // namespace skmpc
