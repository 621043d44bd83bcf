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

#include "skmpc/terminal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skmpc/errors.hpp"
#include "skmpc/sampling.hpp"

namespace skmpc {

TerminalIngredients design_terminal(const LiftedModel& model, const StageCost& cost,
                                    const Box& input_box, std::optional<double> eps) {
  model.validate();
  cost.validate();
  linalg::require_shape(cost.Q, model.n(), model.n(), "stage cost Q");
  linalg::require_shape(cost.R, model.m(), model.m(), "stage cost R");
  linalg::require_size(input_box.lower, model.m(), "input box");
  const double r_u = inscribed_radius(input_box);

  const ModelAssumptions check = check_model_assumptions(model);
  if (!check.ok()) throw DesignError("terminal design: " + check.failure());

  const double reg = eps.value_or(1e-6 * cost.lambda_q());
  if (!(reg > 0.0)) throw InputError("terminal design: eps must be positive");

  TerminalIngredients ing;
  const RiccatiSolution lqr = koopman_lqr(model, cost.Q, cost.R);
  ing.K = lqr.K;
  ing.P = lqr.P;
  ing.riccati_residual = lqr.residual;
  ing.eps = reg;

  const Matrix A_K = model.A + model.B * ing.K;
  const auto nz = model.nz();
  ing.Qhat = linalg::symmetrize(model.C.transpose() * cost.Q * model.C +
                                ing.K.transpose() * cost.R * ing.K +
                                reg * Matrix::Identity(nz, nz));
  ing.Phat = solve_dlyap(A_K, ing.Qhat);
  ing.sigma_phat = linalg::max_eigenvalue_sym(ing.Phat);
  ing.lambda_qhat = linalg::min_eigenvalue_sym(ing.Qhat);
  ing.tau = cost.lambda_r() * r_u * r_u;
  return ing;
}

double terminal_cost(const TerminalIngredients& ing, const Vector& z) {
  linalg::require_size(z, ing.Phat.rows(), "terminal_cost");
  return z.dot(ing.Phat * z);
}

double terminal_decrease_margin(const TerminalIngredients& ing, const LiftedModel& model,
                                const StageCost& cost, const Vector& z) {
  const Vector u = ing.K * z;
  const Vector next = model.A * z + model.B * u;
  const double stage = cost(model.C * z, u);
  return -stage - (terminal_cost(ing, next) - terminal_cost(ing, z));
}

std::vector<Vector> sample_terminal_set(const TerminalIngredients& ing, int num_samples,
                                        std::uint64_t seed) {
  const auto nz = static_cast<int>(ing.Phat.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::symmetrize(ing.Phat));
  const Matrix inv_sqrt = es.eigenvectors() *
                          es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose();
  const double radius = std::sqrt(ing.tau);

  sampling::Rng rng = sampling::make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(num_samples);
  const int boundary = num_samples / 2;
  for (int k = 0; k < num_samples; ++k) {
    Vector w = sampling::unit_direction(nz, rng);
    if (k >= boundary) w *= std::pow(unit(rng), 1.0 / nz);
    out.push_back(radius * (inv_sqrt * w));
  }
  return out;
}

TerminalConditionsReport verify_terminal_conditions(const TerminalIngredients& ing,
                                       const LiftedModel& model, const StageCost& cost,
                                       const Box& input_box, int num_samples,
                                       std::uint64_t seed) {
  TerminalConditionsReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const Matrix A_K = model.A + model.B * ing.K;
  for (const Vector& z : sample_terminal_set(ing, num_samples, seed)) {
    rep.min_margin = std::min(rep.min_margin, terminal_decrease_margin(ing, model, cost, z));
    if (!input_box.contains(ing.K * z)) rep.all_inputs_admissible = false;
    rep.max_successor_level = std::max(rep.max_successor_level, terminal_cost(ing, A_K * z));
    ++rep.num_samples;
  }
  if (rep.num_samples == 0) rep.min_margin = 0.0;
  return rep;
}

}  // namespace skmpc
