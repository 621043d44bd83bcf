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

#include "commands.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "skmpc/certify.hpp"
#include "skmpc/errors.hpp"
#include "skmpc/json_io.hpp"
#include "skmpc/lqr.hpp"
#include "skmpc/sim.hpp"

namespace skmpc::cli {

namespace {

constexpr const char* kLqrSchema = "skmpc.lqr/1";
constexpr const char* kIdentificationSchema = "skmpc.identification/1";
constexpr const char* kSolveSchema = "skmpc.solve/1";

void say(std::ostream* log, const std::string& line) {
  if (log != nullptr) *log << line << "\n";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + "]";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_trajectories(const ComparisonReport& rep, const std::filesystem::path& dir) {
  const std::size_t nx0 = rep.x0s.size();
  for (std::size_t i = 0; i < rep.controllers.size(); ++i) {
    for (std::size_t j = 0; j < nx0; ++j) {
      write_trajectory_csv(rep.trajectories[i * nx0 + j],
                           dir / ("trajectory_" + rep.controllers[i] + "_" + std::to_string(j) + ".csv"));
    }
  }
}

void log_comparison(const ComparisonReport& rep, std::ostream* log) {
  if (log == nullptr) return;
  for (const RunSummary& s : rep.runs) {
    say(log, s.controller + " x0=" + fmt(s.x0) + " cost=" + fmt(s.accumulated_cost) +
                 " |x_T|=" + fmt(s.final_norm) + (s.converged ? " converged" : " not-converged") +
                 (s.truncated ? " truncated" : ""));
  }
  for (std::size_t b = 1; b < rep.controllers.size(); ++b) {
    for (std::size_t j = 0; j < rep.x0s.size(); ++j) {
      say(log, "relative cost increase " + rep.controllers[b] + " vs " + rep.controllers[0] +
                   " x0#" + std::to_string(j) + ": " + fmt(100.0 * rep.relative_gap(0, b, j)) + "%");
    }
  }
}

Json identification_json(const ExperimentConfig& cfg, const IdentifiedModel& idm) {
  Json j{{"schema", kIdentificationSchema},
         {"plant", cfg.plant},
         {"dictionary", idm.dict.name()},
         {"model_source", cfg.model_source},
         {"model", io::to_json(idm.model)}};
  if (idm.data) {
    j["num_snapshots"] = idm.data->size();
    j["dataset"] = io::to_json(idm.data->meta);
    j["fit_residuals"] = io::to_json(fit_residual_report(*idm.data, idm.dict, idm.model));
  }
  if (cfg.plant == "pendulum" && idm.dict.name() == "pendulum3") {
    j["reference_max_abs_deviation"] = {
        {"A", (idm.model.A - reference::pendulum_koopman_A()).cwiseAbs().maxCoeff()},
        {"B", (idm.model.B - reference::pendulum_koopman_B()).cwiseAbs().maxCoeff()}};
  }
  return j;
}

Vector auto_decay_x0(const CondensedMpc& cm, const Dictionary& dict, const SolverOptions& opts,
                     double rho_level, double r) {
  const int n = dict.n();
  const Vector dir = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  auto V = [&](double s) {
    const MpcSolution sol = solve_kmpc(cm, dict.lift(s * dir), std::nullopt, opts);
    return sol.status == SolveStatus::kOptimal ? sol.value : std::numeric_limits<double>::infinity();
  };
  const double target = 0.5 * rho_level;
  if (V(r) <= target) return r * dir;
  double lo = 0.0;
  double hi = r;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (V(mid) <= target ? lo : hi) = mid;
  }
  return lo * dir;
}

}  // namespace

void write_json(const Json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e) != nullptr) return 1;
  if (dynamic_cast<const IdentificationError*>(&e) != nullptr) return 2;
  if (dynamic_cast<const DesignError*>(&e) != nullptr) return 3;
  if (dynamic_cast<const SolverError*>(&e) != nullptr) return 4;
  if (dynamic_cast<const CoverageError*>(&e) != nullptr) return 4;
  if (dynamic_cast<const nlohmann::json::exception*>(&e) != nullptr) return 1;
  return 4;
}

IdentifiedModel identify(const ExperimentConfig& cfg) {
  const Plant plant = make_plant(cfg.plant);
  const std::string& src = cfg.model_source;
  if (src == "exact") return {example1_koopman_model(), example1_dictionary(), std::nullopt};
  if (src == "reference") {
    LiftedModel model{reference::pendulum_koopman_A(), reference::pendulum_koopman_B(),
                      pendulum_dictionary().reconstruction()};
    return {std::move(model), pendulum_dictionary(), std::nullopt};
  }
  if (src == "taylor") return {taylor_model(cfg), identity_dictionary(plant.n), std::nullopt};

  Dictionary dict = make_dictionary(cfg.dictionary, plant.n);
  Dataset data = cfg.edmd.dataset.empty()
                     ? generate_dataset(plant, cfg.edmd.x_range, cfg.edmd.u_range,
                                        cfg.edmd.num_trajectories, cfg.edmd.length, cfg.seed)
                     : read_dataset(cfg.edmd.dataset);
  if (data.n() != plant.n || data.m() != plant.m) {
    throw InputError("dataset dimensions do not match the configured plant");
  }
  LiftedModel model = edmd_fit(data, dict);
  return {std::move(model), std::move(dict), std::move(data)};
}

LiftedModel taylor_model(const ExperimentConfig& cfg) {
  const Plant plant = make_plant(cfg.plant);
  return model_from_jacobians(taylor_linearize(plant, Vector::Zero(plant.n), Vector::Zero(plant.m)));
}

CondensedMpc design_mpc(const ExperimentConfig& cfg, const LiftedModel& model) {
  const TerminalIngredients ing = design_terminal(model, cfg.cost, cfg.input_box, cfg.terminal_eps);
  return build_condensed(model, cfg.cost, ing, cfg.input_box, cfg.horizon);
}

Json cmd_lqr_example(const ExperimentConfig& cfg, std::ostream* log) {
  if (cfg.plant != "example1") throw InputError("lqr-example needs plant example1");
  const Plant plant = make_plant(cfg.plant);
  const IdentifiedModel idm = identify(cfg);
  const LiftedModel tm = taylor_model(cfg);
  const RiccatiSolution koop = koopman_lqr(idm.model, cfg.cost.Q, cfg.cost.R);
  const RiccatiSolution tay = koopman_lqr(tm, cfg.cost.Q, cfg.cost.R);
  say(log, "koopman LQR K = " + fmt(Vector(koop.K.row(0).transpose())) +
               ", taylor LQR K = " + fmt(Vector(tay.K.row(0).transpose())));

  const std::vector<Controller> controllers{lqr_policy(koop.K, idm.dict, "koopman-lqr"),
                                            lqr_policy(tay.K, identity_dictionary(plant.n), "taylor-lqr")};
  const ComparisonReport rep = compare(plant, controllers, cfg.cost, cfg.simulation.x0s,
                                       cfg.simulation.steps, cfg.simulation.convergence_tol);
  log_comparison(rep, log);

  write_trajectories(rep, cfg.output_dir);
  write_json(Json{{"schema", kLqrSchema},
                  {"koopman", {{"model", io::to_json(idm.model)}, {"riccati", io::to_json(koop)}}},
                  {"taylor", {{"model", io::to_json(tm)}, {"riccati", io::to_json(tay)}}}},
             cfg.output_dir / "lqr.json");
  Json out = io::to_json(rep);
  write_json(out, cfg.output_dir / "comparison.json");
  return out;
}

Json cmd_pendulum(const ExperimentConfig& cfg, std::ostream* log) {
  const Plant plant = make_plant(cfg.plant);
  const IdentifiedModel idm = identify(cfg);
  const Json ident = identification_json(cfg, idm);
  say(log, "identified A =\n" + [&] {
    std::ostringstream s;
    s << idm.model.A;
    return s.str();
  }());
  if (ident.contains("reference_max_abs_deviation")) {
    say(log, "max |A - A_ref| = " + fmt(ident["reference_max_abs_deviation"]["A"].get<double>()) +
                 ", max |B - B_ref| = " + fmt(ident["reference_max_abs_deviation"]["B"].get<double>()));
  }
  if (idm.data && cfg.edmd.write_dataset) write_dataset(*idm.data, cfg.output_dir / "dataset.csv");
  write_json(ident, cfg.output_dir / "identification_report.json");

  const LiftedModel tm = taylor_model(cfg);
  const CondensedMpc koop = design_mpc(cfg, idm.model);
  const CondensedMpc lin = design_mpc(cfg, tm);
  write_json(io::to_json(koop.terminal), cfg.output_dir / "terminal_koopman.json");
  write_json(io::to_json(lin.terminal), cfg.output_dir / "terminal_taylor.json");
  write_json(io::to_json(tm), cfg.output_dir / "taylor_model.json");
  say(log, "terminal designs done: tau = " + fmt(koop.terminal.tau));

  const std::vector<Controller> controllers{
      make_mpc_controller(koop, idm.dict, cfg.solver, "s-kmpc"),
      make_mpc_controller(lin, identity_dictionary(plant.n), cfg.solver, "l-mpc")};
  const ComparisonReport rep = compare(plant, controllers, cfg.cost, cfg.simulation.x0s,
                                       cfg.simulation.steps, cfg.simulation.convergence_tol);
  log_comparison(rep, log);
  write_trajectories(rep, cfg.output_dir);
  Json out = io::to_json(rep);
  write_json(out, cfg.output_dir / "comparison.json");
  return out;
}

Json cmd_certify(const ExperimentConfig& cfg, std::ostream* log) {
  const Plant plant = make_plant(cfg.plant);
  const IdentifiedModel idm = identify(cfg);
  const CondensedMpc cm = design_mpc(cfg, idm.model);
  const Controller ctrl = make_mpc_controller(cm, idm.dict, cfg.solver, "s-kmpc");
  const CertifySettings& cs = cfg.certify;

  const LipschitzEstimate lpsi =
      estimate_lift_lipschitz(idm.dict, cs.r_psi, cs.lipschitz_samples, derive_seed(cfg.seed, 1));
  const LipschitzEstimate lcl = estimate_closed_loop_error(
      plant, idm.model, idm.dict, ctrl, cs.r, cs.lipschitz_samples, derive_seed(cfg.seed, 2));
  const CzEstimate cz = estimate_cz(cm, cs.cz_samples, derive_seed(cfg.seed, 3), cfg.solver);
  const double lambda_q = cfg.cost.lambda_q();
  const double rho_level = cs.rho_level.value_or(max_rho_level(lambda_q, cs.r_psi, cs.r));
  say(log, "L_psi = " + fmt(lpsi.constant) + ", L = " + fmt(lcl.constant) + ", c_z = " + fmt(cz.c_z) +
               ", rho = " + fmt(rho_level));

  CertificateReport rep = appendix_constants(cm, lpsi.constant, lcl.constant, cz.c_z, rho_level / lambda_q);
  rep.rho_level = rho_level;
  rep.r_psi = cs.r_psi;
  rep.r = cs.r;
  rep.L_psi_argmax = lpsi.argmax_point;
  rep.L_argmax = lcl.argmax_point;

  const std::function<double(const Vector&)> V = [&](const Vector& z) {
    const MpcSolution sol = solve_kmpc(cm, z, std::nullopt, cfg.solver);
    return sol.status == SolveStatus::kInfeasible ? std::numeric_limits<double>::infinity() : sol.value;
  };
  rep.lyapunov = lyapunov_check(plant, idm.dict, ctrl, V, rho_level, cs.r, cs.lyapunov_samples,
                                derive_seed(cfg.seed, 4));

  const Vector x0 = cs.decay_x0.size() != 0 ? cs.decay_x0
                                            : auto_decay_x0(cm, idm.dict, cfg.solver, rho_level, cs.r);
  const Trajectory traj = rollout(plant, ctrl, cfg.cost, x0, cs.decay_steps);
  Json decay_run{{"x0", io::to_json(x0)}, {"steps", traj.steps()}, {"truncated", traj.truncated}};
  if (x0.norm() > 0.0) {
    rep.decay = fit_decay_rate(traj);
    const ValueTrace trace = value_trace(cm, idm.dict, traj, cfg.solver);
    double max_increase = 0.0;
    for (std::size_t t = 1; t < trace.values.size(); ++t) {
      max_increase = std::max(max_increase, trace.values[t] - trace.values[t - 1]);
    }
    int flags = 0;
    for (SolveStatus s : traj.statuses) flags += s == SolveStatus::kInfeasible ? 1 : 0;
    decay_run["V0"] = trace.values.empty() ? 0.0 : trace.values.front();
    decay_run["max_value_increase"] = max_increase;
    decay_run["infeasibility_flags"] = flags;
  }
  say(log, "delta1 = " + fmt(rep.constants.delta1) + ", delta2 = " + fmt(rep.constants.delta2) +
               ", L < min(delta1, delta2): " + (rep.constants.L_below_delta ? "true" : "false"));
  say(log, "decay fit c = " + fmt(rep.decay.c) + ", rho = " + fmt(rep.decay.rho) +
               (rep.decay.certified ? " (certified)" : " (not certified)"));

  Json out = io::to_json(rep);
  out["cz_check"] = {{"max_sampled_ratio", cz.max_sampled_ratio},
                     {"num_verified", cz.num_verified},
                     {"num_excluded", cz.num_excluded}};
  out["lipschitz_samples"] = {{"L_psi", lpsi.num_samples},
                              {"L", lcl.num_samples},
                              {"L_skipped", lcl.skipped}};
  out["decay_run"] = std::move(decay_run);
  out["generated_at"] = utc_timestamp();
  write_json(out, cfg.output_dir / "certificate.json");
  return out;
}

Json cmd_edmd_fit(const ExperimentConfig& cfg, std::ostream* log) {
  if (cfg.model_source != "edmd") throw InputError("edmd-fit needs model_source edmd");
  const IdentifiedModel idm = identify(cfg);
  if (cfg.edmd.dataset.empty()) write_dataset(*idm.data, cfg.output_dir / "dataset.csv");
  write_json(io::to_json(idm.model), cfg.output_dir / "identified_model.json");
  Json rep = identification_json(cfg, idm);
  write_json(rep, cfg.output_dir / "identification_report.json");
  say(log, "fit " + std::to_string(idm.data->size()) + " snapshots, rms one-step error " +
               fmt(rep["fit_residuals"]["rms_error"].get<double>()));
  return rep;
}

Json cmd_solve_once(const ExperimentConfig& cfg, std::ostream* log) {
  if (!cfg.state) throw InputError("solve-once needs a state (--state or solve_once.state)");
  const IdentifiedModel idm = identify(cfg);
  const CondensedMpc cm = design_mpc(cfg, idm.model);
  const Vector z = idm.dict.lift(*cfg.state);
  const MpcSolution sol = solve_kmpc(cm, z, std::nullopt, cfg.solver);
  if (sol.status == SolveStatus::kInfeasible) {
    throw FeasibilityError("MPC infeasible at state " + fmt(*cfg.state));
  }
  const Vector u0 = sol.u_seq.head(cm.m());
  say(log, "u0 = " + fmt(u0));
  say(log, "value = " + fmt(sol.value));
  say(log, std::string("status = ") + to_string(sol.status));
  Json out{{"schema", kSolveSchema},
           {"state", io::to_json(*cfg.state)},
           {"lifted_state", io::to_json(z)},
           {"u0", io::to_json(u0)},
           {"solution", io::to_json(sol)}};
  write_json(out, cfg.output_dir / "solve.json");
  return out;
}

}  // namespace skmpc::cli
