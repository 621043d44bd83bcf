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

#include "skmpc/edmd.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "skmpc/errors.hpp"
#include "skmpc/json_io.hpp"
#include "skmpc/sampling.hpp"

namespace skmpc {

namespace {

bool diverged(const Vector& x) {
  return !x.allFinite() || x.cwiseAbs().maxCoeff() > kOverflowGuard;
}

}  // namespace

Dataset generate_dataset(const Plant& plant, const Box& x_range, const Box& u_range,
                         int num_traj, int length, std::uint64_t seed) {
  x_range.validate("state sampling range");
  u_range.validate("input sampling range");
  linalg::require_size(x_range.lower, plant.n, "state sampling range");
  linalg::require_size(u_range.lower, plant.m, "input sampling range");
  if (num_traj < 1) throw InputError("generate_dataset: need at least one trajectory");
  if (length < 2) throw InputError("generate_dataset: trajectory length must be >= 2");

  Dataset data;
  data.meta = DatasetMeta{x_range, u_range, num_traj, length, seed, {}};
  const Eigen::Index capacity = static_cast<Eigen::Index>(num_traj) * (length - 1);
  data.X.resize(plant.n, capacity);
  data.U.resize(plant.m, capacity);
  data.X_next.resize(plant.n, capacity);

  Eigen::Index k = 0;
  for (int traj = 0; traj < num_traj; ++traj) {
    sampling::Rng rng = sampling::make_rng(seed, static_cast<std::uint64_t>(traj));
    Vector x = sampling::uniform_in_box(x_range, rng);
    for (int t = 0; t + 1 < length; ++t) {
      const Vector u = sampling::uniform_in_box(u_range, rng);
      const Vector next = plant.step(x, u);
      if (diverged(next)) {
        data.meta.truncated.push_back(traj);
        break;
      }
      data.X.col(k) = x;
      data.U.col(k) = u;
      data.X_next.col(k) = next;
      ++k;
      x = next;
    }
  }
  data.X.conservativeResize(Eigen::NoChange, k);
  data.U.conservativeResize(Eigen::NoChange, k);
  data.X_next.conservativeResize(Eigen::NoChange, k);
  return data;
}

LiftedSnapshots lift_snapshots(const Dataset& data, const Dictionary& dict) {
  if (dict.n() != data.n()) throw InputError("EDMD: dictionary and dataset dimensions differ");
  const int nz = dict.nz();
  const int m = data.m();
  LiftedSnapshots out{Matrix(nz + m, data.size()), Matrix(nz, data.size())};
  for (int k = 0; k < data.size(); ++k) {
    out.Phi.col(k).head(nz) = dict.lift(data.X.col(k));
    out.Phi.col(k).tail(m) = data.U.col(k);
    out.Y.col(k) = dict.lift(data.X_next.col(k));
  }
  return out;
}

LiftedModel edmd_fit(const Dataset& data, const Dictionary& dict) {
  const int nz = dict.nz();
  const int m = data.m();
  if (data.size() == 0) throw InputError("EDMD: empty dataset");
  if (data.size() < nz + m) {
    throw InputError("EDMD: need at least n_z + m snapshots");
  }
  const LiftedSnapshots snaps = lift_snapshots(data, dict);

  // Solve Phi' W' = Y' in the least-squares sense.
  const Matrix regressor = snaps.Phi.transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(regressor);
  qr.setThreshold(1e-10);
  if (qr.rank() < nz + m) {
    auto block_rank = [](const Matrix& M) {
      Eigen::ColPivHouseholderQR<Matrix> q(M);
      q.setThreshold(1e-10);
      return q.maxPivot() == 0.0 ? Eigen::Index{0} : q.rank();
    };
    const auto state_rank = block_rank(regressor.leftCols(nz));
    const auto input_rank = block_rank(regressor.rightCols(m));
    std::ostringstream os;
    os << "EDMD singular fit: ";
    if (state_rank < nz) {
      os << "lifted-state block has rank " << state_rank << " < " << nz;
    } else if (input_rank < m) {
      os << "input block has rank " << input_rank << " < " << m;
    } else {
      os << "lifted-state and input blocks are collinear (joint rank " << qr.rank() << " < "
         << nz + m << ")";
    }
    throw IdentificationError(os.str());
  }
  const Matrix W = qr.solve(snaps.Y.transpose()).transpose();

  LiftedModel model{W.leftCols(nz), W.rightCols(m), dict.reconstruction()};
  const ModelAssumptions check = check_model_assumptions(model);
  if (!check.ok()) throw IdentificationError("EDMD model rejected: " + check.failure());
  return model;
}

FitResidualReport fit_residual_report(const Dataset& data, const Dictionary& dict,
                                      const LiftedModel& model) {
  model.validate();
  if (dict.nz() != model.nz() || data.m() != model.m()) {
    throw InputError("fit_residual_report: inconsistent dimensions");
  }
  FitResidualReport rep;
  rep.per_observable_rms = Vector::Zero(model.nz());
  if (data.size() == 0) return rep;
  double sum_sq = 0.0;
  for (int k = 0; k < data.size(); ++k) {
    const Vector e = dict.lift(data.X_next.col(k)) - model.A * dict.lift(data.X.col(k)) -
                     model.B * data.U.col(k);
    const double sq = e.squaredNorm();
    sum_sq += sq;
    rep.max_error = std::max(rep.max_error, std::sqrt(sq));
    rep.per_observable_rms += e.cwiseAbs2();
  }
  rep.rms_error = std::sqrt(sum_sq / data.size());
  rep.per_observable_rms = (rep.per_observable_rms / data.size()).cwiseSqrt();
  return rep;
}

// ---------------------------------------------------------------------------
// CSV + JSON sidecar

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".json");
  return p;
}

}  // namespace

void write_dataset(const Dataset& data, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw InputError("cannot open " + csv_path.string() + " for writing");
  const int n = data.n();
  const int m = data.m();
  for (int i = 0; i < n; ++i) out << "x" << i + 1 << ",";
  for (int i = 0; i < m; ++i) out << "u" << i + 1 << ",";
  for (int i = 0; i < n; ++i) out << "x" << i + 1 << "_next" << (i + 1 < n ? "," : "\n");
  char buf[32];
  auto put = [&](double v, bool last) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << (last ? '\n' : ',');
  };
  for (int k = 0; k < data.size(); ++k) {
    for (int i = 0; i < n; ++i) put(data.X(i, k), false);
    for (int i = 0; i < m; ++i) put(data.U(i, k), false);
    for (int i = 0; i < n; ++i) put(data.X_next(i, k), i + 1 == n);
  }

  io::Json side = io::to_json(data.meta);
  side["n"] = n;
  side["m"] = m;
  side["num_snapshots"] = data.size();
  std::ofstream js(sidecar_path(csv_path));
  js << side.dump(2) << "\n";
}

Dataset read_dataset(const std::filesystem::path& csv_path) {
  std::ifstream side_in(sidecar_path(csv_path));
  if (!side_in) throw InputError("missing dataset sidecar for " + csv_path.string());
  const io::Json side = io::Json::parse(side_in);
  const int n = side.at("n").get<int>();
  const int m = side.at("m").get<int>();
  const int count = side.at("num_snapshots").get<int>();

  Dataset data;
  data.meta.x_range = Box{io::vector_from_json(side.at("x_range").at("lower")),
                          io::vector_from_json(side.at("x_range").at("upper"))};
  data.meta.u_range = Box{io::vector_from_json(side.at("u_range").at("lower")),
                          io::vector_from_json(side.at("u_range").at("upper"))};
  data.meta.num_trajectories = side.at("num_trajectories").get<int>();
  data.meta.length = side.at("length").get<int>();
  data.meta.seed = side.at("seed").get<std::uint64_t>();
  data.meta.truncated = side.at("truncated").get<std::vector<int>>();

  std::ifstream in(csv_path);
  if (!in) throw InputError("cannot open " + csv_path.string());
  std::string line;
  std::getline(in, line);
  data.X.resize(n, count);
  data.U.resize(m, count);
  data.X_next.resize(n, count);
  for (int k = 0; k < count; ++k) {
    if (!std::getline(in, line)) throw InputError("dataset CSV shorter than its sidecar");
    const char* p = line.c_str();
    auto next = [&]() {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw InputError("malformed dataset CSV row " + std::to_string(k + 2));
      p = (*end == ',') ? end + 1 : end;
      return v;
    };
    for (int i = 0; i < n; ++i) data.X(i, k) = next();
    for (int i = 0; i < m; ++i) data.U(i, k) = next();
    for (int i = 0; i < n; ++i) data.X_next(i, k) = next();
  }
  return data;
}

}  // namespace skmpc
