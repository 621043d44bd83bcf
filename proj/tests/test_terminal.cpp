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

#include <gtest/gtest.h>

#include "skmpc/box.hpp"
#include "skmpc/edmd.hpp"
#include "skmpc/errors.hpp"
#include "skmpc/sampling.hpp"
#include "skmpc/terminal.hpp"

using namespace skmpc;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
Box box1(double a, double b) { return Box{Vector::Constant(1, a), Vector::Constant(1, b)}; }

LiftedModel pendulum_reference_model() {
  return {reference::pendulum_koopman_A(), reference::pendulum_koopman_B(),
          pendulum_dictionary().reconstruction()};
}

}  // namespace

TEST(DesignTerminal, ScalarZeroDynamics) {
  const LiftedModel m{scalar(0), scalar(1), scalar(1)};
  const StageCost c{scalar(1), scalar(1)};
  const TerminalIngredients t = design_terminal(m, c, box1(-1, 1), 1e-6);
  EXPECT_NEAR(t.K(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(t.P(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(t.Qhat(0, 0), 1 + 1e-6, 1e-15);
  EXPECT_NEAR(t.Phat(0, 0), 1 + 1e-6, 1e-15);
  EXPECT_NEAR(t.tau, 1.0, 1e-15);
}

TEST(DesignTerminal, PendulumTau) {
  const TerminalIngredients t =
      design_terminal(pendulum_reference_model(), StageCost::scaled_identity(2, 10, 1, 1), box1(-40, 40));
  EXPECT_DOUBLE_EQ(t.tau, 1600.0);
  EXPECT_NEAR(t.eps, 1e-5, 1e-18);
}

TEST(DesignTerminal, TauUsesSmallestEigenvalueAndHalfWidth) {
  const LiftedModel m{Matrix::Zero(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  const StageCost c{Matrix::Identity(2, 2), (Matrix(2, 2) << 2, 0, 0, 5).finished()};
  const Box U{(Vector(2) << -3, -1).finished(), (Vector(2) << 4, 2).finished()};
  EXPECT_NEAR(design_terminal(m, c, U).tau, 2.0 * 1.0, 1e-15);
}

TEST(DesignTerminal, DegenerateBoxIsDesignError) {
  const StageCost c = StageCost::scaled_identity(2, 10, 1, 1);
  EXPECT_THROW(design_terminal(pendulum_reference_model(), c, box1(0, 0)), DesignError);
  EXPECT_THROW(design_terminal(pendulum_reference_model(), c, box1(0.5, 1)), DesignError);
}

TEST(DesignTerminal, Invariants) {
  const LiftedModel m = pendulum_reference_model();
  const StageCost c = StageCost::scaled_identity(2, 10, 1, 1);
  const TerminalIngredients t = design_terminal(m, c, box1(-40, 40));
  const Matrix AK = m.A + m.B * t.K;
  const Matrix base = m.C.transpose() * c.Q * m.C + t.K.transpose() * c.R * t.K;
  EXPECT_GE(linalg::min_eigenvalue_sym(t.Qhat - base), t.eps - 1e-12 * base.norm());
  EXPECT_GT(linalg::min_eigenvalue_sym(t.Qhat), 0.0);
  EXPECT_LE((AK.transpose() * t.Phat * AK - t.Phat + t.Qhat).norm(), 1e-10 * t.Phat.norm());
  // Ball of radius sqrt(tau / lambda_min(R)) fits in U.
  EXPECT_LE(std::sqrt(t.tau / c.lambda_r()), 40.0 + 1e-12);
}

TEST(TerminalCost, Values) {
  TerminalIngredients t;
  t.Phat = Matrix::Identity(2, 2);
  EXPECT_DOUBLE_EQ(terminal_cost(t, Vector::Zero(2)), 0.0);
  EXPECT_DOUBLE_EQ(terminal_cost(t, (Vector(2) << 3, 4).finished()), 25.0);
  const TerminalIngredients d =
      design_terminal(pendulum_reference_model(), StageCost::scaled_identity(2, 10, 1, 1), box1(-40, 40));
  Eigen::SelfAdjointEigenSolver<Matrix> es(d.Phat);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(terminal_cost(d, es.eigenvectors().col(i)), es.eigenvalues()(i), 1e-9 * d.sigma_phat);
  }
  auto rng = sampling::make_rng(2);
  std::normal_distribution<double> g;
  for (int k = 0; k < 50; ++k) {
    const Vector z = Vector::NullaryExpr(3, [&] { return g(rng); });
    EXPECT_LE(terminal_cost(d, z), d.sigma_phat * z.squaredNorm() * (1 + 1e-12));
  }
}

TEST(TerminalConditions, DecreaseIdentity) {
  const LiftedModel m = pendulum_reference_model();
  const StageCost c = StageCost::scaled_identity(2, 10, 1, 1);
  const TerminalIngredients t = design_terminal(m, c, box1(-40, 40));
  const Matrix AK = m.A + m.B * t.K;
  auto rng = sampling::make_rng(4);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    const Vector z = Vector::NullaryExpr(3, [&] { return g(rng); });
    const double lhs = terminal_cost(t, AK * z) - terminal_cost(t, z);
    EXPECT_NEAR(lhs, -z.dot(t.Qhat * z), 1e-9 * std::max(1.0, t.Phat.norm() * z.squaredNorm()));
    EXPECT_GE(terminal_decrease_margin(t, m, c, z), t.eps * z.squaredNorm() * (1 - 1e-6) - 1e-9);
  }
  EXPECT_EQ(terminal_decrease_margin(t, m, c, Vector::Zero(3)), 0.0);
}

TEST(TerminalConditions, SampledSoundness) {
  for (std::uint64_t seed : {0u, 1u}) {
    const LiftedModel m = pendulum_reference_model();
    const StageCost c = StageCost::scaled_identity(2, 10, 1, 1);
    const TerminalIngredients t = design_terminal(m, c, box1(-40, 40));
    const TerminalConditionsReport r = verify_terminal_conditions(t, m, c, box1(-40, 40), 2000, seed);
    EXPECT_EQ(r.num_samples, 2000);
    EXPECT_GE(r.min_margin, -1e-9);
    EXPECT_TRUE(r.all_inputs_admissible);
    EXPECT_LE(r.max_successor_level, t.tau);
  }
}

TEST(TerminalConditions, SamplesLieInTheSet) {
  const TerminalIngredients t =
      design_terminal(pendulum_reference_model(), StageCost::scaled_identity(2, 10, 1, 1), box1(-40, 40));
  const std::vector<Vector> s = sample_terminal_set(t, 100, 9);
  ASSERT_EQ(s.size(), 100u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_LE(terminal_cost(t, s[i]), t.tau * (1 + 1e-12));
    if (i < 50) {
      EXPECT_NEAR(terminal_cost(t, s[i]), t.tau, 1e-9 * t.tau);
    }
  }
}

TEST(TerminalConditions, InflatedLevelBreaksAdmissibility) {
  const LiftedModel m = pendulum_reference_model();
  const StageCost c = StageCost::scaled_identity(2, 10, 1, 1);
  TerminalIngredients t = design_terminal(m, c, box1(-40, 40));
  t.tau *= 100.0;
  EXPECT_FALSE(verify_terminal_conditions(t, m, c, box1(-40, 40), 2000, 0).all_inputs_admissible);
}
