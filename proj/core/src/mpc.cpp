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

#include "skmpc/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "skmpc/errors.hpp"

namespace skmpc {

CondensedMpc build_condensed(const LiftedModel& model, const StageCost& cost,
                             const TerminalIngredients& terminal, const Box& input_box,
                             int N) {
  if (N < 1) throw InputError("build_condensed: horizon must be >= 1");
  model.validate();
  const int nz = model.nz();
  const int m = model.m();
  linalg::require_shape(cost.Q, model.n(), model.n(), "stage cost Q");
  linalg::require_shape(cost.R, m, m, "stage cost R");
  linalg::require_shape(terminal.Phat, nz, nz, "terminal weight");
  linalg::require_shape(terminal.K, m, nz, "terminal gain");
  linalg::require_size(input_box.lower, m, "input box");
  input_box.validate("input box");

  CondensedMpc cm;
  cm.N = N;
  cm.model = model;
  cm.cost = cost;
  cm.input_box = input_box;
  cm.terminal = terminal;

  std::vector<Matrix> powers(N + 1);
  powers[0] = Matrix::Identity(nz, nz);
  for (int k = 1; k <= N; ++k) powers[k] = model.A * powers[k - 1];

  cm.O.resize((N + 1) * nz, nz);
  cm.T = Matrix::Zero((N + 1) * nz, N * m);
  for (int i = 0; i <= N; ++i) {
    cm.O.middleRows(i * nz, nz) = powers[i];
    for (int j = 0; j < i; ++j) {
      cm.T.block(i * nz, j * m, nz, m) = powers[i - 1 - j] * model.B;
    }
  }
  cm.Obar = powers[N];
  cm.Tbar = cm.T.bottomRows(nz);

  const Matrix Qtilde = model.C.transpose() * cost.Q * model.C;
  cm.Qbar = Matrix::Zero((N + 1) * nz, (N + 1) * nz);
  for (int i = 0; i < N; ++i) cm.Qbar.block(i * nz, i * nz, nz, nz) = Qtilde;
  cm.Qbar.bottomRightCorner(nz, nz) = terminal.Phat;
  cm.Rbar = Matrix::Zero(N * m, N * m);
  for (int i = 0; i < N; ++i) cm.Rbar.block(i * m, i * m, m, m) = cost.R;

  cm.hessian = linalg::symmetrize(cm.T.transpose() * cm.Qbar * cm.T + cm.Rbar);
  cm.linear = cm.T.transpose() * cm.Qbar * cm.O;
  cm.constant = linalg::symmetrize(cm.O.transpose() * cm.Qbar * cm.O);
  cm.phat_sqrt = linalg::sqrt_psd(terminal.Phat);
  return cm;
}

double CondensedMpc::condensed_value(const Vector& z, const Vector& u) const {
  const Vector Z = O * z + T * u;
  return Z.dot(Qbar * Z) + u.dot(Rbar * u);
}

Vector CondensedMpc::terminal_state(const Vector& z, const Vector& u) const {
  return Obar * z + Tbar * u;
}

double value_function(const CondensedMpc& cm, const Vector& z, const Vector& u) {
  linalg::require_size(z, cm.nz(), "value_function state");
  linalg::require_size(u, cm.num_inputs(), "value_function inputs");
  const LiftedModel& mdl = cm.model;
  const int m = cm.m();
  Vector zk = z;
  double v = 0.0;
  for (int k = 0; k < cm.N; ++k) {
    const Vector uk = u.segment(k * m, m);
    v += cm.cost(mdl.C * zk, uk);
    zk = mdl.A * zk + mdl.B * uk;
  }
  return v + terminal_cost(cm.terminal, zk);
}

Vector shifted_sequence(const CondensedMpc& cm, const Vector& z, const Vector& u_opt) {
  linalg::require_size(u_opt, cm.num_inputs(), "shifted_sequence inputs");
  const int m = cm.m();
  Vector shifted(cm.num_inputs());
  shifted.head((cm.N - 1) * m) = u_opt.tail((cm.N - 1) * m);
  shifted.tail(m) = cm.terminal.K * cm.terminal_state(z, u_opt);
  return shifted;
}

bool is_feasible_sequence(const CondensedMpc& cm, const Vector& z, const Vector& u,
                          double box_tol, double terminal_tol) {
  const int m = cm.m();
  for (int k = 0; k < cm.N; ++k) {
    if (!cm.input_box.contains(u.segment(k * m, m), box_tol)) return false;
  }
  return terminal_cost(cm.terminal, cm.terminal_state(z, u)) <= cm.terminal.tau + terminal_tol;
}

namespace {

constexpr int kEarlyPolishInterval = 200;

struct QpData {
  const Matrix& H;
  Vector q;
  Matrix M;  // Phat^{1/2} Tbar
  Vector c;  // Phat^{1/2} Obar z
  Vector lo;
  Vector hi;
  double radius;
};

Vector project_ball(const Vector& v, double radius) {
  const double norm = v.norm();
  return norm <= radius ? v : Vector(v * (radius / norm));
}

double objective(const QpData& qp, const Vector& u) { return 0.5 * u.dot(qp.H * u) + qp.q.dot(u); }

// Equality-constrained subproblem of the active-set polish: components with
// state != 0 are pinned to a bound, the terminal ball is handled through its
// scalar multiplier mu.
struct SubSolution {
  Vector u;
  double mu = 0.0;
  bool ok = false;
};

SubSolution solve_subproblem(const QpData& qp, const std::vector<int>& state) {
  const int nu = static_cast<int>(qp.q.size());
  std::vector<int> free_idx;
  Vector u(nu);
  for (int j = 0; j < nu; ++j) {
    if (state[j] < 0) {
      u(j) = qp.lo(j);
    } else if (state[j] > 0) {
      u(j) = qp.hi(j);
    } else {
      u(j) = 0.0;
      free_idx.push_back(j);
    }
  }
  const int nf = static_cast<int>(free_idx.size());
  const double tau = qp.radius * qp.radius;
  SubSolution out;
  if (nf == 0) {
    out.u = u;
    out.ok = (qp.M * u + qp.c).squaredNorm() <= tau * (1.0 + 1e-12);
    return out;
  }

  Matrix Hff(nf, nf);
  Matrix Mf(qp.M.rows(), nf);
  Vector gf(nf);
  const Vector Hu = qp.H * u;  // contribution of the pinned components
  for (int a = 0; a < nf; ++a) {
    gf(a) = qp.q(free_idx[a]) + Hu(free_idx[a]);
    Mf.col(a) = qp.M.col(free_idx[a]);
    for (int b = 0; b < nf; ++b) Hff(a, b) = qp.H(free_idx[a], free_idx[b]);
  }
  const Vector d = qp.c + qp.M * u;
  const Matrix MtM = Mf.transpose() * Mf;
  const Vector Mtd = Mf.transpose() * d;

  auto solve_mu = [&](double mu) -> Vector {
    Eigen::LLT<Matrix> llt(Hff + mu * MtM);
    return llt.solve(-(gf + mu * Mtd));
  };
  auto excess = [&](const Vector& uf) { return (Mf * uf + d).squaredNorm() - tau; };

  Vector uf = solve_mu(0.0);
  double mu = 0.0;
  if (excess(uf) > 0.0) {
    double lo = 0.0;
    double hi = 1.0;
    Vector u_hi = solve_mu(hi);
    while (excess(u_hi) > 0.0) {
      lo = hi;
      hi *= 4.0;
      if (hi > 1e20) return out;
      u_hi = solve_mu(hi);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Vector u_mid = solve_mu(mid);
      if (excess(u_mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
        u_hi = u_mid;
      }
    }
    mu = hi;
    uf = u_hi;
  }
  for (int a = 0; a < nf; ++a) u(free_idx[a]) = uf(a);
  out.u = u;
  out.mu = mu;
  out.ok = u.allFinite();
  return out;
}

std::optional<Vector> polish(const QpData& qp, const Vector& guess) {
  const int nu = static_cast<int>(qp.q.size());
  std::vector<int> state(nu, 0);
  for (int j = 0; j < nu; ++j) {
    const double slack = 1e-9 * (1.0 + std::abs(qp.lo(j)) + std::abs(qp.hi(j)));
    if (guess(j) <= qp.lo(j) + slack) state[j] = -1;
    if (guess(j) >= qp.hi(j) - slack) state[j] = 1;
  }
  const double grad_tol = 1e-9 * (1.0 + qp.q.cwiseAbs().maxCoeff());

  for (int iter = 0; iter < 4 * nu + 20; ++iter) {
    const SubSolution sub = solve_subproblem(qp, state);
    if (!sub.ok) return std::nullopt;

    // Most violated bound among the free components.
    int worst = -1;
    double worst_violation = 0.0;
    for (int j = 0; j < nu; ++j) {
      if (state[j] != 0) continue;
      const double tol = 1e-12 * (1.0 + std::abs(qp.lo(j)) + std::abs(qp.hi(j)));
      const double v = std::max(qp.lo(j) - sub.u(j), sub.u(j) - qp.hi(j));
      if (v > tol && v > worst_violation) {
        worst = j;
        worst_violation = v;
      }
    }
    if (worst >= 0) {
      state[worst] = sub.u(worst) < qp.lo(worst) ? -1 : 1;
      continue;
    }

    // Pinned components whose multiplier has the wrong sign.
    const Vector grad = qp.H * sub.u + qp.q + sub.mu * (qp.M.transpose() * (qp.M * sub.u + qp.c));
    worst_violation = 0.0;
    for (int j = 0; j < nu; ++j) {
      const double v = state[j] > 0 ? grad(j) : state[j] < 0 ? -grad(j) : 0.0;
      if (v > grad_tol && v > worst_violation) {
        worst = j;
        worst_violation = v;
      }
    }
    if (worst >= 0) {
      state[worst] = 0;
      continue;
    }
    return sub.u.cwiseMax(qp.lo).cwiseMin(qp.hi);
  }
  return std::nullopt;
}

}  // namespace

MpcSolution solve_kmpc(const CondensedMpc& cm, const Vector& z,
                       const std::optional<Vector>& warm_start, const SolverOptions& opts) {
  linalg::require_size(z, cm.nz(), "solve_kmpc state");
  if (!z.allFinite()) throw InputError("solve_kmpc: state must be finite");
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || !(opts.rho > 0.0)) {
    throw InputError("solve_kmpc: invalid solver options");
  }
  const int nu = cm.num_inputs();
  const int m = cm.m();

  QpData qp{cm.hessian, cm.linear * z, cm.phat_sqrt * cm.Tbar,
            cm.phat_sqrt * (cm.Obar * z), Vector(nu), Vector(nu), std::sqrt(cm.terminal.tau)};
  for (int k = 0; k < cm.N; ++k) {
    qp.lo.segment(k * m, m) = cm.input_box.lower;
    qp.hi.segment(k * m, m) = cm.input_box.upper;
  }
  auto clamp = [&](const Vector& v) -> Vector { return v.cwiseMax(qp.lo).cwiseMin(qp.hi); };

  Vector x = Vector::Zero(nu);
  if (warm_start) {
    linalg::require_size(*warm_start, nu, "solve_kmpc warm start");
    x = clamp(*warm_start);
  }
  Vector y1 = clamp(x);
  Vector y2 = project_ball(qp.M * x + qp.c, qp.radius);
  Vector w1 = Vector::Zero(nu);
  Vector w2 = Vector::Zero(qp.M.rows());

  double rho = opts.rho;
  const Matrix MtM = qp.M.transpose() * qp.M;
  const Matrix I = Matrix::Identity(nu, nu);
  Eigen::LLT<Matrix> llt(qp.H + rho * (I + MtM));

  MpcSolution sol;
  sol.status = SolveStatus::kMaxIter;
  double prev_terminal = std::numeric_limits<double>::infinity();
  double prev_dual = 0.0;
  int it = 0;
  double prim = 0.0;
  double dual = 0.0;
  std::optional<Vector> early;
  while (it < opts.max_iter) {
    ++it;
    const Vector rhs = -qp.q + rho * (y1 - w1) + rho * (qp.M.transpose() * (y2 - qp.c - w2));
    x = llt.solve(rhs);
    const Vector Mx = qp.M * x;
    const Vector y1_old = y1;
    const Vector y2_old = y2;
    y1 = clamp(x + w1);
    y2 = project_ball(Mx + qp.c + w2, qp.radius);
    const Vector r1 = x - y1;
    const Vector r2 = Mx + qp.c - y2;
    w1 += r1;
    w2 += r2;
    prim = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
    dual = rho * ((y1 - y1_old) + qp.M.transpose() * (y2 - y2_old)).norm();
    if (prim <= opts.tol && dual <= opts.tol) {
      sol.status = SolveStatus::kOptimal;
      break;
    }
    // A KKT-verified polish of the current iterate is the exact optimum.
    if (opts.polish && it % kEarlyPolishInterval == 0) {
      if (auto refined = polish(qp, y1)) {
        early = std::move(refined);
        sol.status = SolveStatus::kOptimal;
        break;
      }
    }

    if (opts.infeasibility_window > 0 && it % opts.infeasibility_window == 0) {
      const double terminal_res = r2.norm();
      const double dual_mag = rho * w2.norm();
      if (terminal_res > opts.tol && prev_terminal - terminal_res < 1e-12 &&
          dual_mag > prev_dual) {
        sol.status = SolveStatus::kInfeasible;
        break;
      }
      prev_terminal = terminal_res;
      prev_dual = dual_mag;
    }

    if (opts.adapt_interval > 0 && it % opts.adapt_interval == 0) {
      double scale = 1.0;
      if (prim > opts.adapt_ratio * dual && rho < 1e8) {
        scale = opts.adapt_factor;
      } else if (dual > opts.adapt_ratio * prim && rho > 1e-8) {
        scale = 1.0 / opts.adapt_factor;
      }
      if (scale != 1.0) {
        rho *= scale;
        w1 /= scale;
        w2 /= scale;
        llt.compute(qp.H + rho * (I + MtM));
      }
    }
  }

  sol.iterations = it;
  sol.primal_residual = prim;
  sol.dual_residual = dual;
  sol.u_seq = y1;
  if (early) {
    sol.u_seq = *early;
    sol.polished = true;
  } else if (sol.status == SolveStatus::kOptimal && opts.polish) {
    if (auto refined = polish(qp, y1)) {
      const bool feasible = (qp.M * *refined + qp.c).norm() <= qp.radius * (1.0 + 1e-12);
      if (feasible &&
          objective(qp, *refined) <= objective(qp, y1) + 1e-9 * (1.0 + std::abs(objective(qp, y1)))) {
        sol.u_seq = *refined;
        sol.polished = true;
      }
    }
  }
  sol.value = cm.condensed_value(z, sol.u_seq);
  return sol;
}

std::pair<Vector, MpcSolution> mpc_law(const CondensedMpc& cm, const Vector& z,
                                       const std::optional<Vector>& warm_start,
                                       const SolverOptions& opts) {
  MpcSolution sol = solve_kmpc(cm, z, warm_start, opts);
  if (sol.status == SolveStatus::kInfeasible) {
    throw FeasibilityError("Koopman MPC infeasible at the queried state");
  }
  Vector u0 = sol.u_seq.head(cm.m());
  return {std::move(u0), std::move(sol)};
}

Controller make_mpc_controller(const CondensedMpc& cm, const Dictionary& dict,
                               const SolverOptions& opts, std::string name, bool warm_start) {
  if (dict.nz() != cm.nz()) throw InputError("make_mpc_controller: dictionary width != n_z");
  auto warm = std::make_shared<std::optional<Vector>>();
  auto law = [cm, dict, opts, warm, warm_start](const Vector& x) {
    const Vector z = dict.lift(x);
    MpcSolution sol = solve_kmpc(cm, z, warm_start ? *warm : std::nullopt, opts);
    if (sol.status == SolveStatus::kInfeasible) {
      warm->reset();
      return ControlOutput{Vector::Zero(cm.m()), sol.status, sol.iterations};
    }
    if (warm_start) *warm = shifted_sequence(cm, z, sol.u_seq);
    return ControlOutput{sol.u_seq.head(cm.m()), sol.status, sol.iterations};
  };
  return Controller{std::move(name), std::move(law), [warm]() { warm->reset(); }};
}

}  // namespace skmpc
