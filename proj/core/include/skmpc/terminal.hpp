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

#include <cstdint>
#include <optional>

#include "skmpc/box.hpp"
#include "skmpc/lqr.hpp"
#include "skmpc/model.hpp"

namespace skmpc {

/// Terminal cost V_f(z) = z' Phat z and terminal set {z : V_f(z) <= tau}
/// built from the Koopman LQR.
struct TerminalIngredients {
  Matrix K;
  Matrix P;
  Matrix Phat;
  Matrix Qhat;
  double tau = 0.0;
  double sigma_phat = 0.0;
  double lambda_qhat = 0.0;
  double eps = 0.0;
  double riccati_residual = 0.0;
};

/// K, P from the DARE; Qhat = C'QC + K'RK + eps I; Phat from the Lyapunov
/// equation of A + BK; tau = lambda_min(R) * r_U^2 with r_U the inscribed
/// radius of the input box. `eps` defaults to 1e-6 * lambda_min(Q).
TerminalIngredients design_terminal(const LiftedModel& model, const StageCost& cost,
                                    const Box& input_box,
                                    std::optional<double> eps = std::nullopt);

double terminal_cost(const TerminalIngredients& ing, const Vector& z);

/// -l(Cz, Kz) - (V_f(A_K z) - V_f(z)); nonnegative for a sound design.
double terminal_decrease_margin(const TerminalIngredients& ing, const LiftedModel& model,
                                const StageCost& cost, const Vector& z);

struct TerminalConditionsReport {
  /// min over samples of -l(Cz, Kz) - (V_f(A_K z) - V_f(z)).
  double min_margin = 0.0;
  bool all_inputs_admissible = true;
  /// Largest V_f(A_K z) over samples, for the invariance check.
  double max_successor_level = 0.0;
  int num_samples = 0;
};

/// Samples the terminal set (half on its boundary, half in the interior,
/// through the Phat^{-1/2} map of the unit sphere/ball) and checks the
/// terminal decrease condition and admissibility of the terminal controller.
TerminalConditionsReport verify_terminal_conditions(const TerminalIngredients& ing,
                                       const LiftedModel& model, const StageCost& cost,
                                       const Box& input_box, int num_samples,
                                       std::uint64_t seed);

/// Samples in {z : z' Phat z <= tau}; the first half lie on the boundary.
std::vector<Vector> sample_terminal_set(const TerminalIngredients& ing, int num_samples,
                                        std::uint64_t seed);

}  // namespace skmpc
