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

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "skmpc/errors.hpp"

namespace {

using namespace skmpc;
using namespace skmpc::cli;

std::optional<Vector> parse_state(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("--state: cannot parse \"" + item + "\"");
    }
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilizing Koopman MPC experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  std::string state_text;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Override the master seed");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  struct Sub {
    const char* name;
    const char* help;
    const char* plant;
    Json (*run)(const ExperimentConfig&, std::ostream*);
  };
  const Sub subs[] = {
      {"lqr-example", "Koopman LQR vs Taylor LQR on the exact-embedding example", "example1",
       &cmd_lqr_example},
      {"pendulum", "EDMD fit, terminal design and S-KMPC vs L-MPC on the pendulum", "pendulum",
       &cmd_pendulum},
      {"certify", "Stability certificate ledger and sampled Lyapunov checks", "pendulum",
       &cmd_certify},
      {"edmd-fit", "Generate a dataset and fit the lifted model", "pendulum", &cmd_edmd_fit},
      {"solve-once", "Single MPC solve from a given state", "pendulum", &cmd_solve_once},
  };
  std::vector<CLI::App*> handles;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();
    if (std::string(s.name) == "solve-once") {
      sub->add_option("--state", state_text, "Comma-separated state, e.g. 0.3,0");
    }
    handles.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (std::size_t i = 0; i < handles.size(); ++i) {
    if (!handles[i]->parsed()) continue;
    const Sub& s = subs[i];
    try {
      std::optional<std::filesystem::path> path;
      if (!config_path.empty()) path = config_path;
      ExperimentConfig cfg = load_config(path, s.plant);
      if (seed) cfg.seed = *seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (auto st = parse_state(state_text)) cfg.state = st;
      validate(cfg);
      const bool is_solve = std::string(s.name) == "solve-once";
      s.run(cfg, quiet && !is_solve ? nullptr : &std::cout);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "skmpc " << s.name << ": " << e.what() << "\n";
      return exit_code_for(e);
    }
  }
  return 1;
}
