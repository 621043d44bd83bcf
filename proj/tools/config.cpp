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

#include "config.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "skmpc/errors.hpp"
#include "skmpc/json_io.hpp"

namespace skmpc::cli {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw InputError("config " + where + ": " + msg);
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) fail(where, "unknown field \"" + key + "\"");
  }
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(where + "." + key, e.what());
  }
}

Vector vec(const Json& j, const std::string& where) {
  try {
    return io::vector_from_json(j);
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

Matrix mat(const Json& j, const std::string& where) {
  try {
    return io::matrix_from_json(j);
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

Box box(const Json& j, const std::string& where) {
  check_keys(j, {"lower", "upper"}, where);
  Box b{vec(j.at("lower"), where + ".lower"), vec(j.at("upper"), where + ".upper")};
  if (b.lower.size() != b.upper.size()) fail(where, "lower and upper differ in length");
  return b;
}

Box make_box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Box b{Vector(static_cast<Eigen::Index>(lo.size())), Vector(static_cast<Eigen::Index>(hi.size()))};
  Eigen::Index i = 0;
  for (double v : lo) b.lower(i++) = v;
  i = 0;
  for (double v : hi) b.upper(i++) = v;
  return b;
}

Vector make_vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ExperimentConfig default_config(const std::string& plant) {
  ExperimentConfig cfg;
  cfg.plant = plant;
  if (plant == "example1") {
    cfg.dictionary = "example1";
    cfg.model_source = "exact";
    cfg.cost = StageCost::scaled_identity(2, 1.0, 1, 1.0);
    cfg.horizon = 10;
    cfg.input_box = make_box({-20.0}, {20.0});
    cfg.edmd.x_range = make_box({-1.0, -1.0}, {1.0, 1.0});
    cfg.edmd.u_range = make_box({-1.0}, {1.0});
    cfg.edmd.num_trajectories = 50;
    cfg.edmd.length = 20;
    cfg.simulation.steps = 500;
    cfg.simulation.convergence_tol = 1e-3;
    cfg.simulation.x0s = {make_vec({0.5, 0.5})};
    cfg.certify.r_psi = 1.0;
    cfg.certify.r = 1.0;
    cfg.certify.decay_steps = 200;
  } else if (plant == "pendulum") {
    cfg.dictionary = "pendulum3";
    cfg.model_source = "edmd";
    cfg.cost = StageCost::scaled_identity(2, 10.0, 1, 1.0);
    cfg.horizon = 20;
    cfg.input_box = make_box({-40.0}, {40.0});
    cfg.edmd.x_range = make_box({-2.0, -8.0}, {2.0, 8.0});
    cfg.edmd.u_range = make_box({-40.0}, {40.0});
    cfg.edmd.num_trajectories = 200;
    cfg.edmd.length = 1000;
    cfg.simulation.steps = 750;
    cfg.simulation.convergence_tol = 1e-2;
    cfg.simulation.x0s = {make_vec({0.3, 0.0}), make_vec({0.8, 0.0}), make_vec({1.4, 0.0})};
    cfg.certify.r_psi = 1.0;
    cfg.certify.r = 0.5;
    cfg.certify.decay_steps = 750;
  } else {
    fail("plant", "unknown plant \"" + plant + "\" (expected example1 or pendulum)");
  }
  return cfg;
}

ExperimentConfig config_from_json(const Json& j, const std::string& fallback_plant) {
  check_keys(j, {"plant", "dictionary", "model_source", "seed", "cost", "horizon", "input_box",
                 "edmd", "terminal", "solver", "simulation", "certify", "solve_once",
                 "output_dir"},
             "root");
  const std::string plant = j.contains("plant") ? get<std::string>(j, "plant", "root") : fallback_plant;
  ExperimentConfig cfg = default_config(plant);

  if (j.contains("dictionary")) cfg.dictionary = get<std::string>(j, "dictionary", "root");
  if (j.contains("model_source")) cfg.model_source = get<std::string>(j, "model_source", "root");
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed", "root");
  if (j.contains("horizon")) cfg.horizon = get<int>(j, "horizon", "root");
  if (j.contains("input_box")) cfg.input_box = box(j.at("input_box"), "input_box");
  if (j.contains("output_dir")) cfg.output_dir = get<std::string>(j, "output_dir", "root");

  if (j.contains("cost")) {
    const Json& c = j.at("cost");
    check_keys(c, {"q", "r", "Q", "R"}, "cost");
    if (c.contains("q") && c.contains("Q")) fail("cost", "give either q or Q");
    if (c.contains("r") && c.contains("R")) fail("cost", "give either r or R");
    const int n = static_cast<int>(cfg.cost.Q.rows());
    const int m = static_cast<int>(cfg.cost.R.rows());
    if (c.contains("q")) cfg.cost.Q = get<double>(c, "q", "cost") * Matrix::Identity(n, n);
    if (c.contains("r")) cfg.cost.R = get<double>(c, "r", "cost") * Matrix::Identity(m, m);
    if (c.contains("Q")) cfg.cost.Q = mat(c.at("Q"), "cost.Q");
    if (c.contains("R")) cfg.cost.R = mat(c.at("R"), "cost.R");
  }

  if (j.contains("edmd")) {
    const Json& e = j.at("edmd");
    check_keys(e, {"x_range", "u_range", "num_trajectories", "length", "dataset", "write_dataset"},
               "edmd");
    if (e.contains("x_range")) cfg.edmd.x_range = box(e.at("x_range"), "edmd.x_range");
    if (e.contains("u_range")) cfg.edmd.u_range = box(e.at("u_range"), "edmd.u_range");
    if (e.contains("num_trajectories")) {
      cfg.edmd.num_trajectories = get<int>(e, "num_trajectories", "edmd");
    }
    if (e.contains("length")) cfg.edmd.length = get<int>(e, "length", "edmd");
    if (e.contains("dataset")) cfg.edmd.dataset = get<std::string>(e, "dataset", "edmd");
    if (e.contains("write_dataset")) cfg.edmd.write_dataset = get<bool>(e, "write_dataset", "edmd");
  }

  if (j.contains("terminal")) {
    const Json& t = j.at("terminal");
    check_keys(t, {"eps"}, "terminal");
    if (t.contains("eps") && !t.at("eps").is_null()) cfg.terminal_eps = get<double>(t, "eps", "terminal");
  }

  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    check_keys(s, {"tol", "max_iter", "rho", "adapt_factor", "adapt_ratio", "adapt_interval",
                   "infeasibility_window", "polish"},
               "solver");
    SolverOptions& o = cfg.solver;
    if (s.contains("tol")) o.tol = get<double>(s, "tol", "solver");
    if (s.contains("max_iter")) o.max_iter = get<int>(s, "max_iter", "solver");
    if (s.contains("rho")) o.rho = get<double>(s, "rho", "solver");
    if (s.contains("adapt_factor")) o.adapt_factor = get<double>(s, "adapt_factor", "solver");
    if (s.contains("adapt_ratio")) o.adapt_ratio = get<double>(s, "adapt_ratio", "solver");
    if (s.contains("adapt_interval")) o.adapt_interval = get<int>(s, "adapt_interval", "solver");
    if (s.contains("infeasibility_window")) {
      o.infeasibility_window = get<int>(s, "infeasibility_window", "solver");
    }
    if (s.contains("polish")) o.polish = get<bool>(s, "polish", "solver");
  }

  if (j.contains("simulation")) {
    const Json& s = j.at("simulation");
    check_keys(s, {"steps", "x0s", "convergence_tol"}, "simulation");
    if (s.contains("steps")) cfg.simulation.steps = get<int>(s, "steps", "simulation");
    if (s.contains("convergence_tol")) {
      cfg.simulation.convergence_tol = get<double>(s, "convergence_tol", "simulation");
    }
    if (s.contains("x0s")) {
      if (!s.at("x0s").is_array()) fail("simulation.x0s", "expected an array of states");
      cfg.simulation.x0s.clear();
      for (const Json& x : s.at("x0s")) cfg.simulation.x0s.push_back(vec(x, "simulation.x0s"));
    }
  }

  if (j.contains("certify")) {
    const Json& c = j.at("certify");
    check_keys(c, {"r_psi", "r", "rho_level", "lipschitz_samples", "cz_samples",
                   "lyapunov_samples", "decay_x0", "decay_steps"},
               "certify");
    CertifySettings& s = cfg.certify;
    if (c.contains("r_psi")) s.r_psi = get<double>(c, "r_psi", "certify");
    if (c.contains("r")) s.r = get<double>(c, "r", "certify");
    if (c.contains("rho_level") && !c.at("rho_level").is_null()) {
      s.rho_level = get<double>(c, "rho_level", "certify");
    }
    if (c.contains("lipschitz_samples")) s.lipschitz_samples = get<int>(c, "lipschitz_samples", "certify");
    if (c.contains("cz_samples")) s.cz_samples = get<int>(c, "cz_samples", "certify");
    if (c.contains("lyapunov_samples")) s.lyapunov_samples = get<int>(c, "lyapunov_samples", "certify");
    if (c.contains("decay_x0")) s.decay_x0 = vec(c.at("decay_x0"), "certify.decay_x0");
    if (c.contains("decay_steps")) s.decay_steps = get<int>(c, "decay_steps", "certify");
  }

  if (j.contains("solve_once")) {
    const Json& s = j.at("solve_once");
    check_keys(s, {"state"}, "solve_once");
    if (s.contains("state")) cfg.state = vec(s.at("state"), "solve_once.state");
  }

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::string& fallback_plant) {
  if (!path) {
    ExperimentConfig cfg = default_config(fallback_plant);
    validate(cfg);
    return cfg;
  }
  std::ifstream in(*path);
  if (!in) fail(path->string(), "cannot open file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(path->string(), e.what());
  }
  return config_from_json(j, fallback_plant);
}

void validate(const ExperimentConfig& cfg) {
  const Plant plant = make_plant(cfg.plant);
  const int n = plant.n;
  const int m = plant.m;
  try {
    make_dictionary(cfg.dictionary, n);
  } catch (const std::exception& e) {
    fail("dictionary", e.what());
  }
  const std::string& src = cfg.model_source;
  if (src != "edmd" && src != "exact" && src != "reference" && src != "taylor") {
    fail("model_source", "expected edmd, exact, reference or taylor");
  }
  if (src == "exact" && cfg.plant != "example1") fail("model_source", "exact model exists only for example1");
  if (src == "reference" && cfg.plant != "pendulum") {
    fail("model_source", "reference matrices exist only for the pendulum");
  }
  if (src == "exact" && cfg.dictionary != "example1") fail("model_source", "exact model needs the example1 dictionary");
  if (src == "reference" && cfg.dictionary != "pendulum3") {
    fail("model_source", "reference model needs the pendulum3 dictionary");
  }
  if (cfg.cost.Q.rows() != n || cfg.cost.Q.cols() != n) fail("cost.Q", "must be n x n");
  if (cfg.cost.R.rows() != m || cfg.cost.R.cols() != m) fail("cost.R", "must be m x m");
  cfg.cost.validate();
  cfg.input_box.validate("input_box");
  cfg.edmd.x_range.validate("edmd.x_range");
  cfg.edmd.u_range.validate("edmd.u_range");
  if (cfg.input_box.dim() != m) fail("input_box", "dimension must equal m");
  if (cfg.edmd.x_range.dim() != n) fail("edmd.x_range", "dimension must equal n");
  if (cfg.edmd.u_range.dim() != m) fail("edmd.u_range", "dimension must equal m");
  if (cfg.horizon < 1) fail("horizon", "must be >= 1");
  if (cfg.edmd.num_trajectories < 1 || cfg.edmd.length < 2) fail("edmd", "need >= 1 trajectory of length >= 2");
  if (!(cfg.solver.tol > 0.0) || cfg.solver.max_iter < 1 || !(cfg.solver.rho > 0.0)) {
    fail("solver", "tol, max_iter and rho must be positive");
  }
  if (cfg.terminal_eps && !(*cfg.terminal_eps > 0.0)) fail("terminal.eps", "must be positive");
  if (cfg.simulation.steps < 1) fail("simulation.steps", "must be >= 1");
  if (cfg.simulation.x0s.empty()) fail("simulation.x0s", "need at least one initial state");
  for (const Vector& x0 : cfg.simulation.x0s) {
    if (x0.size() != n) fail("simulation.x0s", "every state must have n entries");
  }
  const CertifySettings& c = cfg.certify;
  if (!(c.r_psi > 0.0) || !(c.r > 0.0)) fail("certify", "r_psi and r must be positive");
  if (c.rho_level) {
    const double cap = max_rho_level(cfg.cost.lambda_q(), c.r_psi, c.r);
    if (!(*c.rho_level > 0.0) || *c.rho_level > cap) {
      fail("certify.rho_level", "must lie in (0, lambda_Q * min(r_psi, r)^2]");
    }
  }
  if (c.lipschitz_samples < 1 || c.cz_samples < 0 || c.lyapunov_samples < 1) {
    fail("certify", "sample counts must be positive");
  }
  if (c.decay_x0.size() != 0 && c.decay_x0.size() != n) fail("certify.decay_x0", "must have n entries");
  if (c.decay_steps < 10) fail("certify.decay_steps", "must be >= 10");
  if (cfg.state && cfg.state->size() != n) fail("solve_once.state", "must have n entries");
}

}  // namespace skmpc::cli
