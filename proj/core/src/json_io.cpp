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

#include "skmpc/json_io.hpp"

#include <cmath>
#include <limits>

#include "skmpc/errors.hpp"

namespace skmpc::io {

namespace {

// JSON has no infinity; unbounded quantities are written as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

void require_schema(const Json& j, const char* schema) {
  if (!j.contains("schema") || j.at("schema").get<std::string>() != schema) {
    throw InputError(std::string("expected JSON schema ") + schema);
  }
}

}  // namespace

Json to_json(const Matrix& M) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index k = 0; k < M.cols(); ++k) data.push_back(M(i, k));
  }
  return Json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() ||
      static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw InputError("matrix JSON: data length does not match rows * cols");
  }
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = data[i * cols + k].get<double>();
  }
  return M;
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("vector JSON must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Json to_json(const LiftedModel& model) {
  return Json{{"schema", kModelSchema},
              {"A", to_json(model.A)},
              {"B", to_json(model.B)},
              {"C", to_json(model.C)}};
}

LiftedModel model_from_json(const Json& j) {
  require_schema(j, kModelSchema);
  LiftedModel model{matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                    matrix_from_json(j.at("C"))};
  model.validate();
  return model;
}

Json to_json(const RiccatiSolution& sol) {
  return Json{{"P", to_json(sol.P)},
              {"K", to_json(sol.K)},
              {"residual", sol.residual},
              {"iterations", sol.iterations}};
}

Json to_json(const TerminalIngredients& ing) {
  return Json{{"schema", kTerminalSchema},
              {"K", to_json(ing.K)},
              {"P", to_json(ing.P)},
              {"Phat", to_json(ing.Phat)},
              {"Qhat", to_json(ing.Qhat)},
              {"tau", ing.tau},
              {"sigma_phat", ing.sigma_phat},
              {"lambda_qhat", ing.lambda_qhat},
              {"eps", ing.eps},
              {"riccati_residual", ing.riccati_residual}};
}

TerminalIngredients terminal_from_json(const Json& j) {
  require_schema(j, kTerminalSchema);
  TerminalIngredients ing;
  ing.K = matrix_from_json(j.at("K"));
  ing.P = matrix_from_json(j.at("P"));
  ing.Phat = matrix_from_json(j.at("Phat"));
  ing.Qhat = matrix_from_json(j.at("Qhat"));
  ing.tau = j.at("tau").get<double>();
  ing.sigma_phat = j.at("sigma_phat").get<double>();
  ing.lambda_qhat = j.at("lambda_qhat").get<double>();
  ing.eps = j.at("eps").get<double>();
  ing.riccati_residual = j.at("riccati_residual").get<double>();
  return ing;
}

Json to_json(const MpcSolution& sol) {
  return Json{{"u_seq", to_json(sol.u_seq)},
              {"value", sol.value},
              {"status", to_string(sol.status)},
              {"primal_residual", sol.primal_residual},
              {"dual_residual", sol.dual_residual},
              {"iterations", sol.iterations},
              {"polished", sol.polished}};
}

Json to_json(const DatasetMeta& meta) {
  return Json{{"x_range", {{"lower", to_json(meta.x_range.lower)}, {"upper", to_json(meta.x_range.upper)}}},
              {"u_range", {{"lower", to_json(meta.u_range.lower)}, {"upper", to_json(meta.u_range.upper)}}},
              {"num_trajectories", meta.num_trajectories},
              {"length", meta.length},
              {"seed", meta.seed},
              {"truncated", meta.truncated}};
}

Json to_json(const FitResidualReport& rep) {
  return Json{{"rms_error", rep.rms_error},
              {"max_error", rep.max_error},
              {"per_observable_rms", to_json(rep.per_observable_rms)}};
}

Json to_json(const DecayFit& fit) {
  return Json{{"c", number(fit.c)},
              {"rho", number(fit.rho)},
              {"certified", fit.certified},
              {"samples_used", fit.samples_used}};
}

Json to_json(const LyapunovCheck& check) {
  return Json{{"alpha3_margin", number(check.alpha3_margin)},
              {"invariance_violations", check.invariance_violations},
              {"num_in_level", check.num_in_level},
              {"label", "verified on samples"}};
}

Json to_json(const CertificateReport& report) {
  const CertificateInputs& in = report.inputs;
  const CertificateConstants& k = report.constants;
  Json inputs{{"lambda_q", in.lambda_q},     {"lambda_r", in.lambda_r},
              {"lambda_qhat", in.lambda_qhat}, {"sigma_phat", in.sigma_phat},
              {"tau", in.tau},               {"L_psi", in.L_psi},
              {"L", in.L},                   {"c_z", in.c_z},
              {"c_x", in.c_x},               {"sigma_A", in.sigma_A},
              {"sigma_B", in.sigma_B},       {"sigma_1", in.sigma_1},
              {"sigma_2", in.sigma_2},       {"sigma_3", in.sigma_3},
              {"sigma_4", in.sigma_4}};
  Json constants{{"c1", k.c1},
                 {"c2", k.c2},
                 {"c3", k.c3},
                 {"c4", k.c4},
                 {"gamma", k.gamma},
                 {"delta1", number(k.delta1)},
                 {"delta2", number(k.delta2)},
                 {"delta", number(k.delta)},
                 {"delta1_residual", k.delta1_residual},
                 {"delta2_residual", k.delta2_residual},
                 {"L_below_delta", k.L_below_delta}};
  return Json{{"schema", kCertificateSchema},
              {"inputs", std::move(inputs)},
              {"constants", std::move(constants)},
              {"rho_level", report.rho_level},
              {"r_psi", report.r_psi},
              {"r", report.r},
              {"lyapunov", to_json(report.lyapunov)},
              {"decay_fit", to_json(report.decay)},
              {"L_psi_argmax", to_json(report.L_psi_argmax)},
              {"L_argmax", to_json(report.L_argmax)}};
}

CertificateReport certificate_from_json(const Json& j) {
  require_schema(j, kCertificateSchema);
  CertificateReport rep;
  const Json& in = j.at("inputs");
  CertificateInputs& i = rep.inputs;
  i.lambda_q = in.at("lambda_q").get<double>();
  i.lambda_r = in.at("lambda_r").get<double>();
  i.lambda_qhat = in.at("lambda_qhat").get<double>();
  i.sigma_phat = in.at("sigma_phat").get<double>();
  i.tau = in.at("tau").get<double>();
  i.L_psi = in.at("L_psi").get<double>();
  i.L = in.at("L").get<double>();
  i.c_z = in.at("c_z").get<double>();
  i.c_x = in.at("c_x").get<double>();
  i.sigma_A = in.at("sigma_A").get<double>();
  i.sigma_B = in.at("sigma_B").get<double>();
  i.sigma_1 = in.at("sigma_1").get<double>();
  i.sigma_2 = in.at("sigma_2").get<double>();
  i.sigma_3 = in.at("sigma_3").get<double>();
  i.sigma_4 = in.at("sigma_4").get<double>();

  const Json& k = j.at("constants");
  CertificateConstants& c = rep.constants;
  c.c1 = k.at("c1").get<double>();
  c.c2 = k.at("c2").get<double>();
  c.c3 = k.at("c3").get<double>();
  c.c4 = k.at("c4").get<double>();
  c.gamma = k.at("gamma").get<double>();
  c.delta1 = number_from(k.at("delta1"));
  c.delta2 = number_from(k.at("delta2"));
  c.delta = number_from(k.at("delta"));
  c.delta1_residual = k.at("delta1_residual").get<double>();
  c.delta2_residual = k.at("delta2_residual").get<double>();
  c.L_below_delta = k.at("L_below_delta").get<bool>();

  rep.rho_level = j.at("rho_level").get<double>();
  rep.r_psi = j.at("r_psi").get<double>();
  rep.r = j.at("r").get<double>();
  const Json& ly = j.at("lyapunov");
  rep.lyapunov.alpha3_margin = number_from(ly.at("alpha3_margin"));
  rep.lyapunov.invariance_violations = ly.at("invariance_violations").get<int>();
  rep.lyapunov.num_in_level = ly.at("num_in_level").get<int>();
  const Json& d = j.at("decay_fit");
  rep.decay.c = number_from(d.at("c"));
  rep.decay.rho = number_from(d.at("rho"));
  rep.decay.certified = d.at("certified").get<bool>();
  rep.decay.samples_used = d.at("samples_used").get<int>();
  rep.L_psi_argmax = vector_from_json(j.at("L_psi_argmax"));
  rep.L_argmax = vector_from_json(j.at("L_argmax"));
  return rep;
}

Json to_json(const ComparisonReport& report) {
  Json runs = Json::array();
  for (const RunSummary& s : report.runs) {
    runs.push_back(Json{{"controller", s.controller},
                        {"x0_index", s.x0_index},
                        {"x0", to_json(s.x0)},
                        {"accumulated_cost", s.accumulated_cost},
                        {"final_norm", s.final_norm},
                        {"converged", s.converged},
                        {"truncated", s.truncated},
                        {"steps", s.steps},
                        {"decay_fit", to_json(s.decay)}});
  }
  Json gaps = Json::array();
  for (std::size_t a = 0; a < report.controllers.size(); ++a) {
    for (std::size_t b = a + 1; b < report.controllers.size(); ++b) {
      for (std::size_t x = 0; x < report.x0s.size(); ++x) {
        gaps.push_back(Json{{"base", report.controllers[a]},
                            {"other", report.controllers[b]},
                            {"x0_index", x},
                            {"relative_gap", number(report.relative_gap(a, b, x))}});
      }
    }
  }
  Json x0s = Json::array();
  for (const Vector& x0 : report.x0s) x0s.push_back(to_json(x0));
  return Json{{"schema", kComparisonSchema},
              {"controllers", report.controllers},
              {"x0s", std::move(x0s)},
              {"runs", std::move(runs)},
              {"relative_gaps", std::move(gaps)}};
}

}  // namespace skmpc::io
