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

#include "skmpc/model.hpp"

#include <cmath>
#include <sstream>

#include "skmpc/errors.hpp"

namespace skmpc {

Vector Plant::step(const Vector& x, const Vector& u) const {
  linalg::require_size(x, n, name + " state");
  linalg::require_size(u, m, name + " input");
  return step_fn(x, u);
}

Dictionary::Dictionary(std::string name, int n, std::vector<Observable> extra)
    : name_(std::move(name)), n_(n), extra_(std::move(extra)) {
  if (n_ <= 0) throw InputError("dictionary input dimension must be positive");
}

Vector Dictionary::lift(const Vector& x) const {
  linalg::require_size(x, n_, "lift(" + name_ + ")");
  Vector z(nz());
  z.head(n_) = x;
  for (std::size_t i = 0; i < extra_.size(); ++i) {
    z(n_ + static_cast<Eigen::Index>(i)) = extra_[i](x);
  }
  return z;
}

Matrix Dictionary::reconstruction() const {
  Matrix C = Matrix::Zero(n_, nz());
  C.leftCols(n_).setIdentity();
  return C;
}

void LiftedModel::validate() const {
  if (A.rows() != A.cols()) throw InputError("lifted model: A must be square");
  if (B.rows() != A.rows()) throw InputError("lifted model: B rows must match A");
  if (C.cols() != A.rows()) throw InputError("lifted model: C columns must match A");
  if (C.rows() > C.cols()) throw InputError("lifted model: n must not exceed n_z");
}

StageCost StageCost::scaled_identity(int n, double q, int m, double r) {
  return StageCost{q * Matrix::Identity(n, n), r * Matrix::Identity(m, m)};
}

double StageCost::operator()(const Vector& x, const Vector& u) const {
  return x.dot(Q * x) + u.dot(R * u);
}

double StageCost::lambda_q() const { return linalg::min_eigenvalue_sym(Q); }
double StageCost::lambda_r() const { return linalg::min_eigenvalue_sym(R); }

void StageCost::validate() const {
  if (Q.rows() != Q.cols() || R.rows() != R.cols()) {
    throw InputError("stage cost: Q and R must be square");
  }
  if ((Q - Q.transpose()).norm() > 1e-12 * (1.0 + Q.norm()) ||
      (R - R.transpose()).norm() > 1e-12 * (1.0 + R.norm())) {
    throw InputError("stage cost: Q and R must be symmetric");
  }
  if (lambda_q() <= 0.0 || lambda_r() <= 0.0) {
    throw InputError("stage cost: Q and R must be positive definite");
  }
}

std::string ModelAssumptions::failure() const {
  if (!identity_first) return "reconstruction matrix C is not [I | 0]";
  if (!stabilizable) return "(A, B) is not stabilizable";
  if (!observable) return "(A, C) is not observable";
  return {};
}

ModelAssumptions check_model_assumptions(const LiftedModel& model) {
  model.validate();
  ModelAssumptions out;
  Matrix expected = Matrix::Zero(model.n(), model.nz());
  expected.leftCols(model.n()).setIdentity();
  out.identity_first = (model.C - expected).norm() == 0.0;
  out.stabilizable = linalg::pbh_stabilizable(model.A, model.B);
  out.observable = linalg::pbh_observable(model.A, model.C);
  return out;
}

Vector lift(const Dictionary& dict, const Vector& x) { return dict.lift(x); }

Vector koopman_step(const LiftedModel& model, const Vector& z, const Vector& u) {
  linalg::require_size(z, model.nz(), "koopman_step lifted state");
  linalg::require_size(u, model.m(), "koopman_step input");
  return model.A * z + model.B * u;
}

Vector one_step_error(const LiftedModel& model, const Dictionary& dict, const Plant& plant,
                      const Vector& x, const Vector& u) {
  if (dict.nz() != model.nz() || dict.n() != plant.n || model.m() != plant.m) {
    throw InputError("one_step_error: model, dictionary and plant dimensions disagree");
  }
  const Vector z = dict.lift(x);
  return dict.lift(plant.step(x, u)) - model.A * z - model.B * u;
}

Jacobians taylor_linearize(const Plant& plant, const Vector& x0, const Vector& u0, double h) {
  if (!(h > 0.0)) throw InputError("taylor_linearize: step size must be positive");
  linalg::require_size(x0, plant.n, "taylor_linearize x0");
  linalg::require_size(u0, plant.m, "taylor_linearize u0");
  Jacobians jac{Matrix(plant.n, plant.n), Matrix(plant.n, plant.m)};
  for (int j = 0; j < plant.n; ++j) {
    Vector xp = x0, xm = x0;
    xp(j) += h;
    xm(j) -= h;
    jac.A.col(j) = (plant.step(xp, u0) - plant.step(xm, u0)) / (2.0 * h);
  }
  for (int j = 0; j < plant.m; ++j) {
    Vector up = u0, um = u0;
    up(j) += h;
    um(j) -= h;
    jac.B.col(j) = (plant.step(x0, up) - plant.step(x0, um)) / (2.0 * h);
  }
  return jac;
}

LiftedModel model_from_jacobians(const Jacobians& jac) {
  const auto n = jac.A.rows();
  return LiftedModel{jac.A, jac.B, Matrix::Identity(n, n)};
}

// ---------------------------------------------------------------------------

Plant example1_plant() {
  return Plant{"example1", 2, 1, [](const Vector& x, const Vector& u) {
                 Vector next(2);
                 next(0) = 0.9 * x(0);
                 next(1) = 1.5 * x(1) + u(0) - 5.0 * x(0) * x(0);
                 return next;
               }};
}

Dictionary example1_dictionary() {
  return Dictionary("example1", 2, {[](const Vector& x) { return x(0) * x(0); }});
}

LiftedModel example1_koopman_model() {
  Matrix A(3, 3);
  A << 0.9, 0.0, 0.0,
       0.0, 1.5, -5.0,
       0.0, 0.0, 0.81;
  Matrix B(3, 1);
  B << 0.0, 1.0, 0.0;
  return LiftedModel{A, B, example1_dictionary().reconstruction()};
}

Plant pendulum_plant(const PendulumParams& p) {
  const double inertia = p.mass * p.length * p.length;
  const double a22 = 1.0 - p.damping * p.sample_time / inertia;
  const double b2 = p.sample_time / inertia;
  const double g2 = p.gravity * p.sample_time / p.length;
  const double ts = p.sample_time;
  return Plant{"pendulum", 2, 1, [=](const Vector& x, const Vector& u) {
                 Vector next(2);
                 next(0) = x(0) + ts * x(1);
                 next(1) = a22 * x(1) + b2 * u(0) + g2 * std::sin(x(0));
                 return next;
               }};
}

Dictionary pendulum_dictionary() {
  return Dictionary("pendulum3", 2, {[](const Vector& x) { return std::sin(x(0)); }});
}

Dictionary identity_dictionary(int n) { return Dictionary("identity", n); }

Plant make_plant(const std::string& id) {
  if (id == "example1") return example1_plant();
  if (id == "pendulum") return pendulum_plant();
  throw InputError("unknown plant '" + id + "'");
}

Dictionary make_dictionary(const std::string& id, int n) {
  if (id == "example1") return example1_dictionary();
  if (id == "pendulum3") return pendulum_dictionary();
  if (id == "identity") return identity_dictionary(n);
  throw InputError("unknown dictionary '" + id + "'");
}

namespace reference {

Matrix pendulum_koopman_A() {
  Matrix A(3, 3);
  A << 1.0,   0.02,  0.0,
       0.0,   0.996, 0.1962,
       0.002, 0.02,  0.998;
  return A;
}

Matrix pendulum_koopman_B() {
  Matrix B(3, 1);
  B << 0.0, 0.02, 0.0;
  return B;
}

Matrix pendulum_taylor_A() {
  Matrix A(2, 2);
  A << 1.0,    0.02,
       0.1962, 0.996;
  return A;
}

Matrix pendulum_taylor_B() {
  Matrix B(2, 1);
  B << 0.0, 0.02;
  return B;
}

}  // namespace reference
}  // namespace skmpc
