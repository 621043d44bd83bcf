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

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "skmpc/linalg.hpp"

namespace skmpc {

/// Discrete-time plant x+ = f(x, u) with an equilibrium at the origin.
struct Plant {
  using StepFn = std::function<Vector(const Vector& x, const Vector& u)>;

  std::string name;
  int n = 0;
  int m = 0;
  StepFn step_fn;

  /// Dimension-checked evaluation of the step map.
  Vector step(const Vector& x, const Vector& u) const;
};

/// Ordered observables psi_1..psi_nz. The first n observables are always the
/// coordinate maps, so C = [I_n | 0] reconstructs x from the lift.
class Dictionary {
 public:
  using Observable = std::function<double(const Vector& x)>;

  /// Builds a dictionary from the identity block plus `extra` observables.
  Dictionary(std::string name, int n, std::vector<Observable> extra = {});

  const std::string& name() const noexcept { return name_; }
  int n() const noexcept { return n_; }
  int nz() const noexcept { return n_ + static_cast<int>(extra_.size()); }

  Vector lift(const Vector& x) const;

  /// C = [I_n | 0].
  Matrix reconstruction() const;

 private:
  std::string name_;
  int n_;
  std::vector<Observable> extra_;
};

/// Lifted linear predictor z+ = A z + B u, x = C z.
struct LiftedModel {
  Matrix A;
  Matrix B;
  Matrix C;

  int n() const noexcept { return static_cast<int>(C.rows()); }
  int m() const noexcept { return static_cast<int>(B.cols()); }
  int nz() const noexcept { return static_cast<int>(A.rows()); }

  /// Throws InputError on inconsistent block shapes.
  void validate() const;
};

/// Quadratic stage cost l(x, u) = |x|_Q^2 + |u|_R^2 with Q, R positive definite.
struct StageCost {
  Matrix Q;
  Matrix R;

  static StageCost scaled_identity(int n, double q, int m, double r);

  double operator()(const Vector& x, const Vector& u) const;
  double lambda_q() const;
  double lambda_r() const;

  /// Throws InputError when Q or R is not symmetric positive definite.
  void validate() const;
};

struct ModelAssumptions {
  bool identity_first = false;
  bool stabilizable = false;
  bool observable = false;

  bool ok() const noexcept { return identity_first && stabilizable && observable; }
  /// Names the first failed check, empty when ok().
  std::string failure() const;
};

ModelAssumptions check_model_assumptions(const LiftedModel& model);

Vector lift(const Dictionary& dict, const Vector& x);
Vector koopman_step(const LiftedModel& model, const Vector& z, const Vector& u);

/// e(x, u) = Psi(f(x, u)) - A Psi(x) - B u.
Vector one_step_error(const LiftedModel& model, const Dictionary& dict,
                      const Plant& plant, const Vector& x, const Vector& u);

struct Jacobians {
  Matrix A;
  Matrix B;
};

/// Central finite-difference Jacobians of plant.step at (x0, u0).
Jacobians taylor_linearize(const Plant& plant, const Vector& x0, const Vector& u0,
                           double h = 1e-6);

/// Wraps a state-space Jacobian pair as a lifted model on the identity lift.
LiftedModel model_from_jacobians(const Jacobians& jac);

// ---------------------------------------------------------------------------
// Built-in plants and dictionaries.

struct PendulumParams {
  double mass = 1.0;
  double length = 1.0;
  double damping = 0.2;
  double gravity = 9.81;
  double sample_time = 0.02;
};

/// x1+ = 0.9 x1, x2+ = 1.5 x2 + u - 5 x1^2.
Plant example1_plant();
/// Psi(x) = (x1, x2, x1^2).
Dictionary example1_dictionary();
/// Exact lifted representation of example1_plant on example1_dictionary.
LiftedModel example1_koopman_model();

/// Damped inverted pendulum about the upright equilibrium, explicit Euler.
Plant pendulum_plant(const PendulumParams& params = {});
/// Psi(x) = (x1, x2, sin x1).
Dictionary pendulum_dictionary();

Dictionary identity_dictionary(int n);

/// Lookup by identifier: "example1", "pendulum". Throws InputError.
Plant make_plant(const std::string& id);
/// Lookup by identifier: "example1", "pendulum3", "identity<n>". Throws InputError.
Dictionary make_dictionary(const std::string& id, int n);

/// Reference matrices for the pendulum benchmark, used for
/// regression reporting on identified models.
namespace reference {
Matrix pendulum_koopman_A();
Matrix pendulum_koopman_B();
Matrix pendulum_taylor_A();
Matrix pendulum_taylor_B();
}  // namespace reference

}  // namespace skmpc
