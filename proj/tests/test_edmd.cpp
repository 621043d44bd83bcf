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

#include <filesystem>

#include <gtest/gtest.h>

#include "skmpc/edmd.hpp"
#include "skmpc/errors.hpp"
#include "skmpc/sampling.hpp"
#include "support/oracles.hpp"

using namespace skmpc;

namespace {

Box box2(double a, double b, double c, double d) {
  return Box{(Vector(2) << a, c).finished(), (Vector(2) << b, d).finished()};
}
Box box1(double a, double b) { return Box{Vector::Constant(1, a), Vector::Constant(1, b)}; }

double residual(const Dataset& data, const Dictionary& dict, const Matrix& A, const Matrix& B) {
  double s = 0.0;
  for (int k = 0; k < data.size(); ++k) {
    s += (dict.lift(data.X_next.col(k)) - A * dict.lift(data.X.col(k)) - B * data.U.col(k)).squaredNorm();
  }
  return s;
}

}  // namespace

TEST(GenerateDataset, CountsAndTransitions) {
  const Plant p = pendulum_plant();
  const Dataset d = generate_dataset(p, box2(-2, 2, -8, 8), box1(-40, 40), 7, 30, 5);
  ASSERT_EQ(d.size(), 7 * 29);
  for (int k = 0; k < d.size(); ++k) {
    EXPECT_EQ(d.X_next.col(k), p.step(d.X.col(k), d.U.col(k)));
    EXPECT_TRUE(box1(-40, 40).contains(d.U.col(k)));
  }
  EXPECT_EQ(generate_dataset(p, box2(-2, 2, -8, 8), box1(-40, 40), 1, 2, 0).size(), 1);
}

TEST(GenerateDataset, SeedDeterminism) {
  const Plant p = pendulum_plant();
  const Dataset a = generate_dataset(p, box2(-2, 2, -8, 8), box1(-40, 40), 5, 50, 42);
  const Dataset b = generate_dataset(p, box2(-2, 2, -8, 8), box1(-40, 40), 5, 50, 42);
  const Dataset c = generate_dataset(p, box2(-2, 2, -8, 8), box1(-40, 40), 5, 50, 43);
  EXPECT_EQ(a.X, b.X);
  EXPECT_EQ(a.U, b.U);
  EXPECT_EQ(a.X_next, b.X_next);
  EXPECT_NE(a.X, c.X);
}

TEST(GenerateDataset, DivergentTrajectoriesAreTruncated) {
  const Plant p{"blowup", 1, 1, [](const Vector& x, const Vector& u) { return Vector(10 * x + u); }};
  const Dataset d = generate_dataset(p, box1(0.5, 1), box1(0, 0), 3, 20, 1);
  EXPECT_EQ(d.meta.truncated.size(), 3u);
  EXPECT_LT(d.size(), 3 * 19);
  EXPECT_LE(d.X_next.cwiseAbs().maxCoeff(), kOverflowGuard);
}

TEST(EdmdFit, RecoversExactLinearLift) {
  const Dataset d = generate_dataset(example1_plant(), box2(-1, 1, -1, 1), box1(-1, 1), 20, 10, 3);
  const LiftedModel m = edmd_fit(d, example1_dictionary());
  const LiftedModel exact = example1_koopman_model();
  EXPECT_LE((m.A - exact.A).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((m.B - exact.B).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(m.C, example1_dictionary().reconstruction());
  EXPECT_LE(fit_residual_report(d, example1_dictionary(), exact).rms_error, 1e-12);
}

TEST(EdmdFit, MatchesNormalEquationsOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset d = generate_dataset(pendulum_plant(), box2(-1, 1, -2, 2), box1(-5, 5), 5, 11, seed);
    ASSERT_LE(d.size(), 50);
    const LiftedModel m = edmd_fit(d, pendulum_dictionary());
    const auto [A, B] = oracle::normal_equations_fit(d, pendulum_dictionary());
    EXPECT_LE((m.A - A).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((m.B - B).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(EdmdFit, LeastSquaresOptimality) {
  const Dictionary dict = pendulum_dictionary();
  const Dataset d = generate_dataset(pendulum_plant(), box2(-2, 2, -8, 8), box1(-40, 40), 10, 100, 9);
  const LiftedModel m = edmd_fit(d, dict);
  const double base = residual(d, dict, m.A, m.B);
  auto rng = sampling::make_rng(77);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    Matrix dA = Matrix::NullaryExpr(3, 3, [&] { return g(rng); });
    Matrix dB = Matrix::NullaryExpr(3, 1, [&] { return g(rng); });
    const double scale = 1e-3 / std::sqrt(dA.squaredNorm() + dB.squaredNorm());
    EXPECT_GE(residual(d, dict, m.A + scale * dA, m.B + scale * dB), base);
  }
}

TEST(EdmdFit, ZeroDataIsRankDeficient) {
  Dataset d;
  d.X = Matrix::Zero(2, 30);
  d.U = Matrix::Zero(1, 30);
  d.X_next = Matrix::Zero(2, 30);
  EXPECT_THROW(edmd_fit(d, pendulum_dictionary()), IdentificationError);
}

TEST(EdmdFit, ConstantInputIsRankDeficient) {
  Dataset d = generate_dataset(pendulum_plant(), box2(-1, 1, -1, 1), box1(0, 0), 5, 20, 2);
  try {
    edmd_fit(d, pendulum_dictionary());
    FAIL() << "expected IdentificationError";
  } catch (const IdentificationError& e) {
    EXPECT_NE(std::string(e.what()).find("input"), std::string::npos) << e.what();
  }
}

TEST(FitResidualReport, ZeroModelHasPositiveError) {
  const Dataset d = generate_dataset(pendulum_plant(), box2(-1, 1, -1, 1), box1(-1, 1), 3, 10, 4);
  const LiftedModel zero{Matrix::Zero(3, 3), Matrix::Zero(3, 1), pendulum_dictionary().reconstruction()};
  const FitResidualReport r = fit_residual_report(d, pendulum_dictionary(), zero);
  EXPECT_GT(r.rms_error, 0.0);
  EXPECT_GE(r.max_error, r.rms_error);
  EXPECT_EQ(r.per_observable_rms.size(), 3);
}

TEST(DatasetIo, RoundTrip) {
  const Dataset d = generate_dataset(pendulum_plant(), box2(-2, 2, -8, 8), box1(-40, 40), 3, 15, 8);
  const auto dir = std::filesystem::temp_directory_path() / "skmpc_test_dataset";
  std::filesystem::create_directories(dir);
  write_dataset(d, dir / "data.csv");
  ASSERT_TRUE(std::filesystem::exists(dir / "data.json"));
  const Dataset r = read_dataset(dir / "data.csv");
  EXPECT_EQ(r.X, d.X);
  EXPECT_EQ(r.U, d.U);
  EXPECT_EQ(r.X_next, d.X_next);
  EXPECT_EQ(r.meta.seed, 8u);
  EXPECT_EQ(r.meta.num_trajectories, 3);
  std::filesystem::remove_all(dir);
}
