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

#include <Eigen/Dense>

#include <string_view>

namespace skmpc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linalg {

/// Throws InputError when `v` does not have `expected` entries.
void require_size(const Vector& v, Eigen::Index expected, std::string_view what);
void require_shape(const Matrix& M, Eigen::Index rows, Eigen::Index cols,
                   std::string_view what);

double spectral_radius(const Matrix& A);

/// rho(A) < 1 - 1e-9.
bool is_schur_stable(const Matrix& A);

double min_eigenvalue_sym(const Matrix& S);
double max_eigenvalue_sym(const Matrix& S);
double max_singular_value(const Matrix& M);

/// Symmetric positive semidefinite square root via eigendecomposition.
Matrix sqrt_psd(const Matrix& S);

Matrix symmetrize(const Matrix& S);

/// Numerical rank with tolerance rel_tol * sigma_max.
Eigen::Index numerical_rank(const Matrix& M, double rel_tol = 1e-8);

/// PBH test: rank [A - lambda I, B] = n at every eigenvalue with |lambda| >= 1.
bool pbh_stabilizable(const Matrix& A, const Matrix& B, double rel_tol = 1e-8);

/// PBH test: rank [A - lambda I; C] = n at every eigenvalue of A.
bool pbh_observable(const Matrix& A, const Matrix& C, double rel_tol = 1e-8);

}  // namespace linalg
}  // namespace skmpc
