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

#include <filesystem>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "config.hpp"
#include "skmpc/edmd.hpp"
#include "skmpc/mpc.hpp"
#include "skmpc/terminal.hpp"

namespace skmpc::cli {

using Json = nlohmann::ordered_json;

/// Lifted model for the configured plant, dictionary and model source.
struct IdentifiedModel {
  LiftedModel model;
  Dictionary dict;
  std::optional<Dataset> data;
};

IdentifiedModel identify(const ExperimentConfig& cfg);

/// Terminal design plus condensed MPC for `model`.
CondensedMpc design_mpc(const ExperimentConfig& cfg, const LiftedModel& model);

/// Linearization of the configured plant at the origin.
LiftedModel taylor_model(const ExperimentConfig& cfg);

/// Every command writes its artifacts under cfg.output_dir and returns the
/// main JSON report. `log` may be null.
Json cmd_lqr_example(const ExperimentConfig& cfg, std::ostream* log);
Json cmd_pendulum(const ExperimentConfig& cfg, std::ostream* log);
Json cmd_certify(const ExperimentConfig& cfg, std::ostream* log);
Json cmd_edmd_fit(const ExperimentConfig& cfg, std::ostream* log);
Json cmd_solve_once(const ExperimentConfig& cfg, std::ostream* log);

void write_json(const Json& j, const std::filesystem::path& path);

/// 0 success, 1 config, 2 identification, 3 design, 4 solver.
int exit_code_for(const std::exception& e);

}  // namespace skmpc::cli
