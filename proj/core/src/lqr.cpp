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

#include "skmpc/lqr.hpp"

#include <algorithm>
#include <cmath>

#include "skmpc/errors.hpp"

namespace skmpc {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kMaxIter:
      return "max_iter";
    case SolveStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

namespace {

Eigen::LLT<Matrix> factor_input_hessian(const Matrix& S) {
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    throw ConditioningError("R + B'PB is numerically singular");
  }
  return llt;
}

void check_dare_inputs(const Matrix& A, const Matrix& B, const Matrix& Qc, const Matrix& R) {
  const auto n = A.rows();
  linalg::require_shape(A, n, n, "DARE A");
  linalg::require_shape(B, n, B.cols(), "DARE B");
  linalg::require_shape(Qc, n, n, "DARE Qc");
  linalg::require_shape(R, B.cols(), B.cols(), "DARE R");
}

}  // namespace

double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Qc, const Matrix& R,
                     const Matrix& P) {
  const Matrix S = R + B.transpose() * P * B;
  const Matrix BtPA = B.transpose() * P * A;
  const Matrix rhs = Qc + A.transpose() * P * A - BtPA.transpose() * S.ldlt().solve(BtPA);
  return (P - rhs).norm();
}

RiccatiSolution solve_dare(const Matrix& A, const Matrix& B, const Matrix& Qc, const Matrix& R,
                           const IterationOptions& opts) {
  check_dare_inputs(A, B, Qc, R);
  if (!(opts.tol > 0.0)) throw InputError("solve_dare: tolerance must be positive");

  Matrix P = linalg::symmetrize(Qc);
  double change = 0.0;
  int it = 0;
  bool converged = false;
  while (it < opts.max_iter) {
    ++it;
    const Matrix BtPA = B.transpose() * P * A;
    const auto llt = factor_input_hessian(R + B.transpose() * P * B);
    Matrix next = Qc + A.transpose() * P * A - BtPA.transpose() * llt.solve(BtPA);
    next = linalg::symmetrize(next);
    change = (next - P).norm();
    P = std::move(next);
    if (!P.allFinite()) break;
    if (change <= opts.tol * std::max(1.0, P.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergenceError("solve_dare: no convergence within max_iter", change);
  }

  RiccatiSolution sol;
  const auto llt = factor_input_hessian(R + B.transpose() * P * B);
  sol.K = -llt.solve(B.transpose() * P * A);
  sol.P = std::move(P);
  sol.residual = dare_residual(A, B, Qc, R, sol.P);
  sol.iterations = it;
  return sol;
}

Matrix solve_dlyap(const Matrix& A_K, const Matrix& Qhat, const IterationOptions& opts) {
  const auto n = A_K.rows();
  linalg::require_shape(A_K, n, n, "dlyap A_K");
  linalg::require_shape(Qhat, n, n, "dlyap Qhat");
  if (!linalg::is_schur_stable(A_K)) {
    throw InstabilityError("solve_dlyap: A_K is not Schur stable");
  }

  // Squared Smith: after k sweeps P holds the first 2^k terms of the series.
  Matrix P = linalg::symmetrize(Qhat);
  Matrix Ak = A_K;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const Matrix term = Ak.transpose() * P * Ak;
    P = linalg::symmetrize(P + term);
    Ak = Ak * Ak;
    if (term.norm() <= opts.tol * std::max(1.0, P.norm()) * 1e-3) break;
  }
  const double residual = (A_K.transpose() * P * A_K - P + Qhat).norm();
  if (!P.allFinite() || residual > std::max(opts.tol, 1e-13) * 1e3 * std::max(1.0, P.norm())) {
    throw NonConvergenceError("solve_dlyap: residual above tolerance", residual);
  }
  return P;
}

RiccatiSolution koopman_lqr(const LiftedModel& model, const Matrix& Q, const Matrix& R,
                            const IterationOptions& opts) {
  model.validate();
  const Matrix Qc = model.C.transpose() * Q * model.C;
  return solve_dare(model.A, model.B, Qc, R, opts);
}

Controller lqr_policy(const Matrix& K, const Dictionary& dict, std::string name) {
  if (K.cols() != dict.nz()) throw InputError("lqr_policy: gain width must equal n_z");
  return Controller{std::move(name),
                    [K, dict](const Vector& x) {
                      return ControlOutput{K * dict.lift(x), SolveStatus::kOptimal, 0};
                    },
                    {}};
}

}  // namespace skmpc
