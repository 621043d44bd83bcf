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

#include <json.hpp>

#include "skmpc/certify.hpp"
#include "skmpc/edmd.hpp"
#include "skmpc/lqr.hpp"
#include "skmpc/model.hpp"
#include "skmpc/mpc.hpp"
#include "skmpc/sim.hpp"
#include "skmpc/terminal.hpp"

namespace skmpc::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCertificateSchema = "skmpc.certificate/1";
inline constexpr const char* kComparisonSchema = "skmpc.comparison/1";
inline constexpr const char* kModelSchema = "skmpc.model/1";
inline constexpr const char* kTerminalSchema = "skmpc.terminal/1";

/// {"rows": r, "cols": c, "data": [row-major entries]}
Json to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j);
Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const LiftedModel& model);
LiftedModel model_from_json(const Json& j);
Json to_json(const RiccatiSolution& sol);
Json to_json(const TerminalIngredients& ing);
TerminalIngredients terminal_from_json(const Json& j);
Json to_json(const MpcSolution& sol);
Json to_json(const DatasetMeta& meta);
Json to_json(const FitResidualReport& rep);
Json to_json(const DecayFit& fit);
Json to_json(const LyapunovCheck& check);
Json to_json(const CertificateReport& report);
CertificateReport certificate_from_json(const Json& j);
Json to_json(const ComparisonReport& report);

}  // namespace skmpc::io
