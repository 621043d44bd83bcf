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

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "skmpc/edmd.hpp"
#include "skmpc/mpc.hpp"

namespace skmpc::oracle {

/// (A, B) from the normal equations of the stacked regression.
inline std::pair<Matrix, Matrix> normal_equations_fit(const Dataset& data, const Dictionary& dict) {
  const int nz = dict.nz();
  const int m = data.m();
  Matrix Phi(nz + m, data.size());
  Matrix Y(nz, data.size());
  for (int k = 0; k < data.size(); ++k) {
    Phi.col(k).head(nz) = dict.lift(data.X.col(k));
    Phi.col(k).tail(m) = data.U.col(k);
    Y.col(k) = dict.lift(data.X_next.col(k));
  }
  const Matrix G = Phi * Phi.transpose();
  const Matrix W = G.ldlt().solve(Phi * Y.transpose()).transpose();
  return {W.leftCols(nz), W.rightCols(m)};
}

/// Cost-to-go value iteration: V_{k+1}(z) = min_u z'Qc z + u'Ru + V_k(Az + Bu),
/// minimised through the Schur complement of the joint (z, u) quadratic.
/// Stops early once an update changes V by at most `tol` max(1, |V|).
inline Matrix value_iteration(const Matrix& A, const Matrix& B, const Matrix& Qc,
                              const Matrix& R, int steps, double tol = 0.0) {
  const int nz = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Matrix V = Qc;
  for (int k = 0; k < steps; ++k) {
    Matrix AB(nz, nz + m);
    AB << A, B;
    Matrix J = AB.transpose() * V * AB;
    J.topLeftCorner(nz, nz) += Qc;
    J.bottomRightCorner(m, m) += R;
    const Matrix Juu = J.bottomRightCorner(m, m);
    const Matrix Juz = J.bottomLeftCorner(m, nz);
    Matrix next = J.topLeftCorner(nz, nz) - Juz.transpose() * Juu.llt().solve(Juz);
    next = 0.5 * (next + next.transpose()).eval();
    const double change = (next - V).cwiseAbs().maxCoeff();
    V = std::move(next);
    if (change <= tol * std::max(1.0, V.cwiseAbs().maxCoeff())) break;
  }
  return V;
}

/// vec(P) = (I - A'(x)A')^-1 vec(Q).
inline Matrix kronecker_dlyap(const Matrix& AK, const Matrix& Q) {
  const int n = static_cast<int>(AK.rows());
  Matrix Kr(n * n, n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) Kr.block(i * n, j * n, n, n) = AK(j, i) * AK.transpose();
  }
  const Matrix I = Matrix::Identity(n * n, n * n);
  const Vector q = Eigen::Map<const Vector>(Q.data(), n * n);
  const Vector p = (I - Kr).partialPivLu().solve(q);
  return Eigen::Map<const Matrix>(p.data(), n, n);
}

/// V_N by explicit rollout, independent of the library's helpers.
inline double rollout_value(const CondensedMpc& cm, const Vector& z, const Vector& u) {
  const LiftedModel& mdl = cm.model;
  const int m = cm.m();
  Vector zk = z;
  double v = 0.0;
  for (int k = 0; k < cm.N; ++k) {
    const Vector uk = u.segment(k * m, m);
    const Vector xk = mdl.C * zk;
    v += xk.dot(cm.cost.Q * xk) + uk.dot(cm.cost.R * uk);
    zk = mdl.A * zk + mdl.B * uk;
  }
  return v + zk.dot(cm.terminal.Phat * zk);
}

struct GridResult {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  Vector u;
};

/// Brute-force search over U^N (m = 1, N <= 3) restricted to terminal-feasible
/// points, refined around the incumbent by shrinking the step tenfold.
inline GridResult grid_search(const CondensedMpc& cm, const Vector& z, int points = 41,
                              int refinements = 5) {
  const int nu = cm.num_inputs();
  const double lo = cm.input_box.lower(0);
  const double hi = cm.input_box.upper(0);
  GridResult best;
  Vector center = Vector::Constant(nu, 0.5 * (lo + hi));
  double half = 0.5 * (hi - lo);
  int per_dim = points;
  for (int pass = 0; pass <= refinements; ++pass) {
    const double step = 2.0 * half / (per_dim - 1);
    std::vector<int> idx(nu, 0);
    Vector u(nu);
    while (true) {
      bool inside = true;
      for (int d = 0; d < nu; ++d) {
        u(d) = center(d) - half + step * idx[d];
        inside = inside && u(d) >= lo - 1e-15 && u(d) <= hi + 1e-15;
      }
      if (inside) {
        u = u.cwiseMax(lo).cwiseMin(hi);
        Vector zk = z;
        for (int k = 0; k < cm.N; ++k) zk = cm.model.A * zk + cm.model.B * u.segment(k, 1);
        if (zk.dot(cm.terminal.Phat * zk) <= cm.terminal.tau) {
          const double v = rollout_value(cm, z, u);
          if (v < best.value) {
            best.value = v;
            best.u = u;
            best.feasible = true;
          }
        }
      }
      int d = 0;
      while (d < nu && ++idx[d] == per_dim) idx[d++] = 0;
      if (d == nu) break;
    }
    if (!best.feasible) return best;
    center = best.u;
    half = 2.0 * step;
    per_dim = 21;
  }
  return best;
}

}  // namespace skmpc::oracle
