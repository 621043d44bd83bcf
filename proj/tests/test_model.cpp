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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "skmpc/errors.hpp"
#include "skmpc/model.hpp"
#include "skmpc/sampling.hpp"

using namespace skmpc;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }
Vector v3(double a, double b, double c) { return (Vector(3) << a, b, c).finished(); }

}  // namespace

TEST(Lift, Example1Dictionary) {
  const Dictionary d = example1_dictionary();
  EXPECT_EQ(d.lift(v2(2, 3)), v3(2, 3, 4));
  EXPECT_EQ(d.lift(v2(0, 0)), Vector::Zero(3));
}

TEST(Lift, PendulumDictionary) {
  const Vector z = pendulum_dictionary().lift(v2(std::numbers::pi / 2, 1));
  EXPECT_DOUBLE_EQ(z(0), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(z(1), 1.0);
  EXPECT_NEAR(z(2), 1.0, 1e-15);
}

TEST(Lift, DimensionMismatchThrows) {
  EXPECT_THROW(example1_dictionary().lift(Vector::Zero(3)), InputError);
}

TEST(Lift, IdentityFirstReconstruction) {
  auto rng = sampling::make_rng(11);
  const Box box{v2(-3, -3), v2(3, 3)};
  for (const Dictionary& d : {example1_dictionary(), pendulum_dictionary(), identity_dictionary(2)}) {
    const Matrix C = d.reconstruction();
    for (int k = 0; k < 200; ++k) {
      const Vector x = sampling::uniform_in_box(box, rng);
      EXPECT_EQ(C * d.lift(x), x) << d.name();
    }
    EXPECT_EQ(d.lift(Vector::Zero(2)), Vector::Zero(d.nz()));
  }
}

TEST(KoopmanStep, Example1) {
  const LiftedModel m = example1_koopman_model();
  EXPECT_EQ(koopman_step(m, Vector::Zero(3), Vector::Zero(1)), Vector::Zero(3));
  const Vector z = koopman_step(m, v3(1, 0, 1), Vector::Zero(1));
  EXPECT_NEAR((z - v3(0.9, -5, 0.81)).norm(), 0.0, 1e-15);
}

TEST(KoopmanStep, PendulumReferenceModel) {
  const LiftedModel m{reference::pendulum_koopman_A(), reference::pendulum_koopman_B(),
                      pendulum_dictionary().reconstruction()};
  const Vector z = koopman_step(m, v3(0, 0, 1), Vector::Zero(1));
  EXPECT_NEAR((z - v3(0, 0.1962, 0.998)).norm(), 0.0, 1e-15);
}

TEST(KoopmanStep, DimensionMismatchThrows) {
  EXPECT_THROW(koopman_step(example1_koopman_model(), Vector::Zero(2), Vector::Zero(1)), InputError);
  EXPECT_THROW(koopman_step(example1_koopman_model(), Vector::Zero(3), Vector::Zero(2)), InputError);
}

TEST(OneStepError, ExactEmbeddingOnGrid) {
  const Plant p = example1_plant();
  const Dictionary d = example1_dictionary();
  const LiftedModel m = example1_koopman_model();
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      for (int k = 0; k < 20; ++k) {
        const Vector x = v2(-2 + 4.0 * i / 19, -2 + 4.0 * j / 19);
        const Vector u = Vector::Constant(1, -2 + 4.0 * k / 19);
        worst = std::max(worst, one_step_error(m, d, p, x, u).cwiseAbs().maxCoeff());
      }
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(OneStepError, TaylorModelPaddedInPendulumLift) {
  // Taylor dynamics on (x1, x2) with a zero row and column for sin x1.
  LiftedModel m;
  m.A = Matrix::Zero(3, 3);
  m.A.topLeftCorner(2, 2) = reference::pendulum_taylor_A();
  m.B = Matrix::Zero(3, 1);
  m.B.topRows(2) = reference::pendulum_taylor_B();
  m.C = pendulum_dictionary().reconstruction();
  const Vector e = one_step_error(m, pendulum_dictionary(), pendulum_plant(), v2(1, 0), Vector::Zero(1));
  // f(1, 0) = (1, 0.02 * 9.81 sin 1); the prediction is (1, 0.1962, 0).
  EXPECT_NEAR(e(0), 0.0, 1e-15);
  EXPECT_NEAR(e(1), 0.1962 * std::sin(1.0) - 0.1962, 1e-15);
  EXPECT_NEAR(e(2), std::sin(1.0), 1e-15);
  EXPECT_EQ(one_step_error(m, pendulum_dictionary(), pendulum_plant(), Vector::Zero(2), Vector::Zero(1)),
            Vector::Zero(3));
}

TEST(Plant, EquilibriumAndDeterminism) {
  for (const Plant& p : {example1_plant(), pendulum_plant()}) {
    EXPECT_EQ(p.step(Vector::Zero(2), Vector::Zero(1)), Vector::Zero(2)) << p.name;
    const Vector x = v2(0.3, -0.7);
    const Vector u = Vector::Constant(1, 1.3);
    EXPECT_EQ(p.step(x, u), p.step(x, u));
  }
}

TEST(TaylorLinearize, Example1AtOrigin) {
  const Jacobians j = taylor_linearize(example1_plant(), Vector::Zero(2), Vector::Zero(1));
  EXPECT_NEAR((j.A - (Matrix(2, 2) << 0.9, 0, 0, 1.5).finished()).cwiseAbs().maxCoeff(), 0.0, 1e-6);
  EXPECT_NEAR((j.B - (Matrix(2, 1) << 0, 1).finished()).cwiseAbs().maxCoeff(), 0.0, 1e-6);
}

TEST(TaylorLinearize, PendulumAtOrigin) {
  const Jacobians j = taylor_linearize(pendulum_plant(), Vector::Zero(2), Vector::Zero(1));
  EXPECT_LE((j.A - reference::pendulum_taylor_A()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((j.B - reference::pendulum_taylor_B()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(TaylorLinearize, LinearPlant) {
  const Plant p{"linear", 1, 1, [](const Vector& x, const Vector& u) { return Vector(2 * x + u); }};
  const Jacobians j = taylor_linearize(p, Vector::Constant(1, 0.4), Vector::Constant(1, -1));
  EXPECT_NEAR(j.A(0, 0), 2.0, 1e-10);
  EXPECT_NEAR(j.B(0, 0), 1.0, 1e-10);
  EXPECT_THROW(taylor_linearize(p, Vector::Zero(1), Vector::Zero(1), 0.0), InputError);
  EXPECT_THROW(taylor_linearize(p, Vector::Zero(1), Vector::Zero(1), -1e-3), InputError);
}

TEST(TaylorLinearize, SecondOrderConvergence) {
  // d/dx of x+ = sin(x) * exp(x) at x0 = 0.7 has closed form (cos + sin) exp.
  const Plant p{"smooth", 1, 1, [](const Vector& x, const Vector& u) {
                  return Vector::Constant(1, std::sin(x(0)) * std::exp(x(0)) + u(0));
                }};
  const double x0 = 0.7;
  const double exact = (std::cos(x0) + std::sin(x0)) * std::exp(x0);
  auto err = [&](double h) {
    return std::abs(taylor_linearize(p, Vector::Constant(1, x0), Vector::Zero(1), h).A(0, 0) - exact);
  };
  const double ratio = err(1e-2) / err(5e-3);
  EXPECT_NEAR(ratio, 4.0, 0.1);
}

TEST(StageCost, EvaluatesAndValidates) {
  const StageCost c = StageCost::scaled_identity(2, 10, 1, 1);
  EXPECT_DOUBLE_EQ(c(v2(1, 2), Vector::Constant(1, 3)), 10 * 5 + 9);
  EXPECT_DOUBLE_EQ(c.lambda_q(), 10.0);
  EXPECT_DOUBLE_EQ(c.lambda_r(), 1.0);
  StageCost bad{Matrix::Identity(2, 2), -Matrix::Identity(1, 1)};
  EXPECT_THROW(bad.validate(), InputError);
}

TEST(ModelAssumptions, BuiltInModels) {
  EXPECT_TRUE(check_model_assumptions(example1_koopman_model()).ok());
  const LiftedModel ref{reference::pendulum_koopman_A(), reference::pendulum_koopman_B(),
                        pendulum_dictionary().reconstruction()};
  EXPECT_TRUE(check_model_assumptions(ref).ok());
}

TEST(ModelAssumptions, DetectsUnstabilizableMode) {
  // Unstable mode 2 is not driven by the input.
  LiftedModel m{(Matrix(2, 2) << 0.5, 0, 0, 1.2).finished(), (Matrix(2, 1) << 1, 0).finished(),
                Matrix::Identity(2, 2)};
  const ModelAssumptions c = check_model_assumptions(m);
  EXPECT_FALSE(c.stabilizable);
  EXPECT_FALSE(c.ok());
  EXPECT_FALSE(c.failure().empty());
}

TEST(ModelAssumptions, DetectsUnobservableMode) {
  LiftedModel m{(Matrix(2, 2) << 0.5, 0, 0, 0.7).finished(), (Matrix(2, 1) << 1, 1).finished(),
                (Matrix(1, 2) << 1, 0).finished()};
  EXPECT_FALSE(check_model_assumptions(m).observable);
}

TEST(Registry, NamesAndErrors) {
  EXPECT_EQ(make_plant("pendulum").n, 2);
  EXPECT_EQ(make_dictionary("pendulum3", 2).nz(), 3);
  EXPECT_EQ(make_dictionary("identity", 4).nz(), 4);
  EXPECT_THROW(make_plant("cartpole"), InputError);
  EXPECT_THROW(make_dictionary("rbf", 2), InputError);
}
