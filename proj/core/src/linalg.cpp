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

#include "skmpc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "skmpc/errors.hpp"

namespace skmpc::linalg {

void require_size(const Vector& v, Eigen::Index expected, std::string_view what) {
  if (v.size() != expected) {
    std::ostringstream os;
    os << what << ": expected dimension " << expected << ", got " << v.size();
    throw InputError(os.str());
  }
}

void require_shape(const Matrix& M, Eigen::Index rows, Eigen::Index cols,
                   std::string_view what) {
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream os;
    os << what << ": expected " << rows << "x" << cols << ", got " << M.rows() << "x"
       << M.cols();
    throw InputError(os.str());
  }
}

double spectral_radius(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_schur_stable(const Matrix& A) { return spectral_radius(A) < 1.0 - 1e-9; }

double min_eigenvalue_sym(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue_sym(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double max_singular_value(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

Matrix sqrt_psd(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S));
  Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Matrix symmetrize(const Matrix& S) { return 0.5 * (S + S.transpose()); }

namespace {

Eigen::Index complex_rank(const Eigen::MatrixXcd& M, double rel_tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& s = svd.singularValues();
  const double cutoff = rel_tol * s(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++r;
  }
  return r;
}

}  // namespace

Eigen::Index numerical_rank(const Matrix& M, double rel_tol) {
  return complex_rank(M.cast<std::complex<double>>(), rel_tol);
}

bool pbh_stabilizable(const Matrix& A, const Matrix& B, double rel_tol) {
  const Eigen::Index n = A.rows();
  Eigen::EigenSolver<Matrix> es(A, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    if (std::abs(lambda) < 1.0) continue;
    Eigen::MatrixXcd M(n, n + B.cols());
    M.leftCols(n) = A.cast<std::complex<double>>() -
                    lambda * Eigen::MatrixXcd::Identity(n, n);
    M.rightCols(B.cols()) = B.cast<std::complex<double>>();
    if (complex_rank(M, rel_tol) < n) return false;
  }
  return true;
}

bool pbh_observable(const Matrix& A, const Matrix& C, double rel_tol) {
  const Eigen::Index n = A.rows();
  Eigen::EigenSolver<Matrix> es(A, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    Eigen::MatrixXcd M(n + C.rows(), n);
    M.topRows(n) = A.cast<std::complex<double>>() -
                   lambda * Eigen::MatrixXcd::Identity(n, n);
    M.bottomRows(C.rows()) = C.cast<std::complex<double>>();
    if (complex_rank(M, rel_tol) < n) return false;
  }
  return true;
}

}  // namespace skmpc::linalg
