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

#include <benchmark/benchmark.h>

#include "skmpc/edmd.hpp"
#include "skmpc/lqr.hpp"
#include "skmpc/mpc.hpp"
#include "skmpc/terminal.hpp"

namespace {

using namespace skmpc;

LiftedModel reference_pendulum() {
  return {reference::pendulum_koopman_A(), reference::pendulum_koopman_B(),
          pendulum_dictionary().reconstruction()};
}

void BM_SolveDare(benchmark::State& state) {
  const LiftedModel m = reference_pendulum();
  const Matrix Qc = m.C.transpose() * (10 * Matrix::Identity(2, 2)) * m.C;
  const Matrix R = Matrix::Identity(1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dare(m.A, m.B, Qc, R));
}
BENCHMARK(BM_SolveDare);

void BM_DesignTerminal(benchmark::State& state) {
  const LiftedModel m = reference_pendulum();
  const StageCost c = StageCost::scaled_identity(2, 10, 1, 1);
  const Box U{Vector::Constant(1, -40), Vector::Constant(1, 40)};
  for (auto _ : state) benchmark::DoNotOptimize(design_terminal(m, c, U));
}
BENCHMARK(BM_DesignTerminal);

void BM_SolveKmpc(benchmark::State& state) {
  const LiftedModel m = reference_pendulum();
  const StageCost c = StageCost::scaled_identity(2, 10, 1, 1);
  const Box U{Vector::Constant(1, -40), Vector::Constant(1, 40)};
  const CondensedMpc cm = build_condensed(m, c, design_terminal(m, c, U), U,
                                          static_cast<int>(state.range(0)));
  Vector x(2);
  x << 0.8, 0.0;
  const Vector z = pendulum_dictionary().lift(x);
  for (auto _ : state) benchmark::DoNotOptimize(solve_kmpc(cm, z));
}
BENCHMARK(BM_SolveKmpc)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_EdmdFit(benchmark::State& state) {
  const Plant p = pendulum_plant();
  Vector lo(2), hi(2);
  lo << -2, -8;
  hi << 2, 8;
  const Box X{lo, hi};
  const Box U{Vector::Constant(1, -40), Vector::Constant(1, 40)};
  const Dataset data = generate_dataset(p, X, U, static_cast<int>(state.range(0)), 1000, 0);
  const Dictionary d = pendulum_dictionary();
  for (auto _ : state) benchmark::DoNotOptimize(edmd_fit(data, d));
}
BENCHMARK(BM_EdmdFit)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
