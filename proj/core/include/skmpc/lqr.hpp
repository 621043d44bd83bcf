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

#include "skmpc/controller.hpp"
#include "skmpc/model.hpp"

namespace skmpc {

struct RiccatiSolution {
  Matrix P;
  Matrix K;
  double residual = 0.0;
  int iterations = 0;
};

struct IterationOptions {
  double tol = 1e-12;
  int max_iter = 100000;
};

/// Fixed-point iteration of
///   P = Qc + A'PA - A'PB (R + B'PB)^-1 B'PA
/// from P0 = Qc. Stops when the Frobenius change between iterates is at most
/// tol * max(1, |P|_F). Returns K = -(R + B'PB)^-1 B'PA.
RiccatiSolution solve_dare(const Matrix& A, const Matrix& B, const Matrix& Qc,
                           const Matrix& R, const IterationOptions& opts = {});

/// |P - (Qc + A'PA - A'PB(R + B'PB)^-1 B'PA)|_F
double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Qc,
                     const Matrix& R, const Matrix& P);

/// Discrete Lyapunov equation A_K' P A_K - P + Qhat = 0 by squared-Smith
/// doubling of the series P = sum_k (A_K')^k Qhat A_K^k.
Matrix solve_dlyap(const Matrix& A_K, const Matrix& Qhat, const IterationOptions& opts = {});

/// Koopman LQR on a lifted model: Qc = C'QC.
RiccatiSolution koopman_lqr(const LiftedModel& model, const Matrix& Q, const Matrix& R,
                            const IterationOptions& opts = {});

/// u = K Psi(x).
Controller lqr_policy(const Matrix& K, const Dictionary& dict, std::string name = "koopman-lqr");

}  // namespace skmpc
