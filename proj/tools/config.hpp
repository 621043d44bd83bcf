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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skmpc/box.hpp"
#include "skmpc/model.hpp"
#include "skmpc/mpc.hpp"

namespace skmpc::cli {

struct EdmdSettings {
  Box x_range;
  Box u_range;
  int num_trajectories = 200;
  int length = 1000;
  /// Fit from this dataset CSV instead of generating one.
  std::filesystem::path dataset;
  bool write_dataset = false;
};

struct SimulationSettings {
  int steps = 750;
  std::vector<Vector> x0s;
  double convergence_tol = 1e-2;
};

struct CertifySettings {
  double r_psi = 1.0;
  double r = 0.5;
  /// Defaults to lambda_Q * min(r_psi, r)^2.
  std::optional<double> rho_level;
  int lipschitz_samples = 10000;
  int cz_samples = 200;
  int lyapunov_samples = 2000;
  Vector decay_x0;
  int decay_steps = 750;
};

struct ExperimentConfig {
  std::string plant;
  std::string dictionary;
  /// "edmd", "exact", "reference" or "taylor".
  std::string model_source;
  std::uint64_t seed = 0;
  StageCost cost;
  int horizon = 20;
  Box input_box;
  EdmdSettings edmd;
  std::optional<double> terminal_eps;
  SolverOptions solver;
  SimulationSettings simulation;
  CertifySettings certify;
  std::optional<Vector> state;
  std::filesystem::path output_dir = "out";
};

/// Defaults for "example1" or "pendulum".
ExperimentConfig default_config(const std::string& plant);

/// Overlays `j` on the defaults of its "plant" (or `fallback_plant`). Unknown
/// keys and malformed values raise InputError.
ExperimentConfig config_from_json(const nlohmann::ordered_json& j,
                                  const std::string& fallback_plant);
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::string& fallback_plant);

/// Validates cross-field consistency: dimensions, positive settings.
void validate(const ExperimentConfig& cfg);

/// Deterministic sub-seed for the `stream`-th consumer of the master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace skmpc::cli
