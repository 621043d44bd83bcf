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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "skmpc/box.hpp"
#include "skmpc/model.hpp"

namespace skmpc {

struct DatasetMeta {
  Box x_range;
  Box u_range;
  int num_trajectories = 0;
  int length = 0;
  std::uint64_t seed = 0;
  /// Indices of trajectories cut short by the overflow guard.
  std::vector<int> truncated;
};

/// Snapshot triples stored column-wise: column k is (x_k, u_k, x_next_k).
struct Dataset {
  Matrix X;
  Matrix U;
  Matrix X_next;
  DatasetMeta meta;

  int size() const noexcept { return static_cast<int>(X.cols()); }
  int n() const noexcept { return static_cast<int>(X.rows()); }
  int m() const noexcept { return static_cast<int>(U.rows()); }
};

/// Component magnitude above which a trajectory counts as divergent.
inline constexpr double kOverflowGuard = 1e6;

/// Rolls `num_traj` trajectories of `length` states each. Initial states are
/// uniform in `x_range`, inputs i.i.d. uniform in `u_range` per step. Every
/// trajectory draws from its own stream seeded by (seed, index).
Dataset generate_dataset(const Plant& plant, const Box& x_range, const Box& u_range,
                         int num_traj, int length, std::uint64_t seed);

/// Least-squares EDMD fit of (A, B) with C = [I | 0], solved by column-pivoted
/// QR on the stacked lifted snapshots. Throws IdentificationError on a
/// rank-deficient regressor or a failed stabilizability/observability check.
LiftedModel edmd_fit(const Dataset& data, const Dictionary& dict);

/// Stacked regression data: Phi is (n_z + m) x N, Y is n_z x N.
struct LiftedSnapshots {
  Matrix Phi;
  Matrix Y;
};
LiftedSnapshots lift_snapshots(const Dataset& data, const Dictionary& dict);

struct FitResidualReport {
  double rms_error = 0.0;
  double max_error = 0.0;
  Vector per_observable_rms;
};

FitResidualReport fit_residual_report(const Dataset& data, const Dictionary& dict,
                                      const LiftedModel& model);

/// Columnar CSV `x1..xn,u1..um,x1_next..xn_next` plus `<stem>.json` sidecar.
void write_dataset(const Dataset& data, const std::filesystem::path& csv_path);
Dataset read_dataset(const std::filesystem::path& csv_path);

}  // namespace skmpc
