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

#include "skmpc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skmpc/errors.hpp"
#include "skmpc/sampling.hpp"

namespace skmpc {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string("certificate input ") + what + " must be positive and finite");
  }
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InputError(std::string("certificate input ") + what + " must be nonnegative and finite");
  }
}

}  // namespace

LipschitzEstimate estimate_lift_lipschitz(const Dictionary& dict, double r, int num_samples,
                                          std::uint64_t seed) {
  if (!(r > 0.0)) throw InputError("estimate_lift_lipschitz: radius must be positive");
  if (num_samples < 1) throw InputError("estimate_lift_lipschitz: need at least one sample");
  LipschitzEstimate est;
  est.radius = r;
  est.seed = seed;
  for (const Vector& x : sampling::ball_with_shell(dict.n(), r, num_samples, seed)) {
    const double ratio = dict.lift(x).norm() / x.norm();
    ++est.num_samples;
    if (ratio > est.constant || est.argmax_point.size() == 0) {
      est.constant = ratio;
      est.argmax_point = x;
    }
  }
  return est;
}

LipschitzEstimate closed_loop_error_on(const Plant& plant, const LiftedModel& model,
                                       const Dictionary& dict, const Controller& controller,
                                       std::span<const Vector> samples) {
  LipschitzEstimate est;
  for (const Vector& x : samples) {
    const double nx = x.norm();
    if (nx == 0.0) continue;
    est.radius = std::max(est.radius, nx);
    ++est.num_samples;
    controller.restart();
    const ControlOutput out = controller(x);
    if (out.status != SolveStatus::kOptimal) {
      ++est.skipped;
      continue;
    }
    const double ratio = one_step_error(model, dict, plant, x, out.u).norm() / nx;
    if (ratio > est.constant || est.argmax_point.size() == 0) {
      est.constant = ratio;
      est.argmax_point = x;
    }
  }
  controller.restart();
  if (est.num_samples > 0 && 10 * est.skipped > est.num_samples) {
    throw CoverageError("closed-loop error estimate: controller failed on " +
                        std::to_string(est.skipped) + " of " +
                        std::to_string(est.num_samples) + " samples");
  }
  return est;
}

LipschitzEstimate estimate_closed_loop_error(const Plant& plant, const LiftedModel& model,
                                             const Dictionary& dict, const Controller& controller,
                                             double r, int num_samples, std::uint64_t seed) {
  if (!(r > 0.0)) throw InputError("estimate_closed_loop_error: radius must be positive");
  if (num_samples < 1) throw InputError("estimate_closed_loop_error: need at least one sample");
  const std::vector<Vector> samples = sampling::ball_with_shell(dict.n(), r, num_samples, seed);
  LipschitzEstimate est = closed_loop_error_on(plant, model, dict, controller, samples);
  est.radius = r;
  est.seed = seed;
  return est;
}

Matrix lqr_candidate_cost_matrix(const CondensedMpc& cm) {
  const Matrix& K = cm.terminal.K;
  const Matrix AK = cm.model.A + cm.model.B * K;
  const Matrix stage = cm.model.C.transpose() * cm.cost.Q * cm.model.C + K.transpose() * cm.cost.R * K;
  Matrix S = Matrix::Zero(cm.nz(), cm.nz());
  Matrix Ak = Matrix::Identity(cm.nz(), cm.nz());
  for (int k = 0; k < cm.N; ++k) {
    S += Ak.transpose() * stage * Ak;
    Ak = AK * Ak;
  }
  S += Ak.transpose() * cm.terminal.Phat * Ak;
  return linalg::symmetrize(S);
}

CzEstimate estimate_cz(const CondensedMpc& cm, int num_samples, std::uint64_t seed,
                       const SolverOptions& opts) {
  CzEstimate est;
  est.c_z = linalg::max_singular_value(lqr_candidate_cost_matrix(cm));
  if (num_samples <= 0) return est;

  const Matrix AK = cm.model.A + cm.model.B * cm.terminal.K;
  const int m = cm.m();
  for (const Vector& z : sample_terminal_set(cm.terminal, num_samples, seed)) {
    const double nz2 = z.squaredNorm();
    if (nz2 == 0.0) continue;
    Vector candidate(cm.num_inputs());
    Vector zk = z;
    for (int k = 0; k < cm.N; ++k) {
      candidate.segment(k * m, m) = cm.terminal.K * zk;
      zk = AK * zk;
    }
    if (!is_feasible_sequence(cm, z, candidate, 1e-12, 0.0)) {
      ++est.num_excluded;
      continue;
    }
    const MpcSolution sol = solve_kmpc(cm, z, candidate, opts);
    if (sol.status != SolveStatus::kOptimal) {
      ++est.num_excluded;
      continue;
    }
    ++est.num_verified;
    est.max_sampled_ratio = std::max(est.max_sampled_ratio, sol.value / nz2);
  }
  return est;
}

double class_k_bound(double a, double b, double c1, double c2, double L) {
  return a * L * L + 2.0 * (a * c2 + b * std::sqrt(c1)) * L;
}

double class_k_inverse(double a, double b, double c1, double c2, double target) {
  if (!(target >= 0.0)) throw InputError("class_k_inverse: target must be nonnegative");
  const double lin = 2.0 * (a * c2 + b * std::sqrt(c1));
  if (a <= 0.0 && lin <= 0.0) return std::numeric_limits<double>::infinity();
  if (target == 0.0) return 0.0;
  return 2.0 * target / (lin + std::sqrt(lin * lin + 4.0 * a * target));
}

CertificateConstants compute_constants(const CertificateInputs& in) {
  require_positive(in.lambda_q, "lambda_q");
  require_positive(in.lambda_r, "lambda_r");
  require_positive(in.lambda_qhat, "lambda_qhat");
  require_positive(in.sigma_phat, "sigma_phat");
  require_positive(in.tau, "tau");
  require_positive(in.c_x, "c_x");
  require_nonnegative(in.L_psi, "L_psi");
  require_nonnegative(in.L, "L");
  require_nonnegative(in.c_z, "c_z");
  require_nonnegative(in.sigma_A, "sigma_A");
  require_nonnegative(in.sigma_B, "sigma_B");
  require_nonnegative(in.sigma_1, "sigma_1");
  require_nonnegative(in.sigma_2, "sigma_2");
  require_nonnegative(in.sigma_3, "sigma_3");
  require_nonnegative(in.sigma_4, "sigma_4");

  CertificateConstants k;
  k.c1 = in.c_z * in.L_psi * in.L_psi / in.lambda_r;
  k.c2 = in.sigma_A * in.L_psi + in.sigma_B * std::sqrt(k.c1);
  k.gamma = std::min(in.tau / 2.0, in.lambda_qhat * in.tau / (2.0 * in.sigma_phat));
  k.c3 = class_k_bound(in.sigma_1, in.sigma_2, k.c1, k.c2, in.L);
  k.c4 = class_k_bound(in.sigma_3, in.sigma_4, k.c1, k.c2, in.L);

  const double target1 = k.gamma / in.c_x;
  k.delta1 = class_k_inverse(in.sigma_1, in.sigma_2, k.c1, k.c2, target1);
  k.delta2 = class_k_inverse(in.sigma_3, in.sigma_4, k.c1, k.c2, in.lambda_q);
  k.delta1_residual = std::isfinite(k.delta1)
                          ? std::abs(class_k_bound(in.sigma_1, in.sigma_2, k.c1, k.c2, k.delta1) - target1)
                          : 0.0;
  k.delta2_residual = std::isfinite(k.delta2)
                          ? std::abs(class_k_bound(in.sigma_3, in.sigma_4, k.c1, k.c2, k.delta2) - in.lambda_q)
                          : 0.0;
  k.delta = std::min(k.delta1, k.delta2);
  k.L_below_delta = in.L < k.delta;
  return k;
}

CertificateReport appendix_constants(const CondensedMpc& cm, double L_psi, double L,
                                     double c_z, double c_x) {
  CertificateReport rep;
  CertificateInputs& in = rep.inputs;
  in.lambda_q = cm.cost.lambda_q();
  in.lambda_r = cm.cost.lambda_r();
  in.lambda_qhat = cm.terminal.lambda_qhat;
  in.sigma_phat = cm.terminal.sigma_phat;
  in.tau = cm.terminal.tau;
  in.L_psi = L_psi;
  in.L = L;
  in.c_z = c_z;
  in.c_x = c_x;
  in.sigma_A = linalg::max_singular_value(cm.model.A);
  in.sigma_B = linalg::max_singular_value(cm.model.B);
  const Matrix& Phat = cm.terminal.Phat;
  in.sigma_1 = linalg::max_singular_value(cm.Obar.transpose() * Phat * cm.Obar);
  in.sigma_2 = linalg::max_singular_value(cm.Obar.transpose() * Phat * cm.Tbar);
  in.sigma_3 = linalg::max_singular_value(cm.O.transpose() * cm.Qbar * cm.O);
  in.sigma_4 = linalg::max_singular_value(cm.O.transpose() * cm.Qbar * cm.T);
  rep.constants = compute_constants(in);
  return rep;
}

double max_rho_level(double lambda_q, double r_psi, double r) {
  const double rhat = std::min(r_psi, r);
  return lambda_q * rhat * rhat;
}

LyapunovCheck lyapunov_check(const Plant& plant, const Dictionary& dict,
                             const Controller& controller,
                             const std::function<double(const Vector&)>& V, double rho_level,
                             double sample_radius, int num_samples, std::uint64_t seed) {
  if (!(rho_level > 0.0)) throw InputError("lyapunov_check: level must be positive");
  if (!(sample_radius > 0.0)) throw InputError("lyapunov_check: radius must be positive");
  if (num_samples < 1) throw InputError("lyapunov_check: need at least one sample");
  LyapunovCheck check;
  check.alpha3_margin = std::numeric_limits<double>::infinity();
  for (const Vector& x : sampling::ball_with_shell(dict.n(), sample_radius, num_samples, seed)) {
    const double v = V(dict.lift(x));
    if (!(v < rho_level)) continue;
    ++check.num_in_level;
    controller.restart();
    const ControlOutput out = controller(x);
    if (out.status == SolveStatus::kInfeasible) {
      ++check.invariance_violations;
      continue;
    }
    const Vector xp = plant.step(x, out.u);
    const double vp = V(dict.lift(xp));
    check.alpha3_margin = std::min(check.alpha3_margin, (v - vp) / x.squaredNorm());
    if (!(vp < rho_level)) ++check.invariance_violations;
  }
  controller.restart();
  if (check.num_in_level == 0) {
    throw InputError("lyapunov_check: no sample inside the sublevel set, level too small");
  }
  return check;
}

DecayFit fit_decay_rate(std::span<const Vector> states) {
  if (states.size() < 10) throw InputError("fit_decay_rate: need at least 10 states");
  const double n0 = states.front().norm();
  if (!(n0 > 0.0)) throw InputError("fit_decay_rate: initial state must be nonzero");

  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double nk = states[k].norm();
    if (!(nk >= 1e-12) || !std::isfinite(nk)) break;
    t.push_back(static_cast<double>(k));
    y.push_back(std::log(nk / n0));
  }
  DecayFit fit;
  fit.samples_used = static_cast<int>(t.size());
  if (t.size() < 2) {
    fit.rho = 0.0;
    fit.c = 1.0;
    fit.certified = true;
    return fit;
  }
  const double count = static_cast<double>(t.size());
  double tm = 0.0;
  double ym = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    tm += t[k];
    ym += y[k];
  }
  tm /= count;
  ym /= count;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    stt += (t[k] - tm) * (t[k] - tm);
    sty += (t[k] - tm) * (y[k] - ym);
  }
  const double slope = sty / stt;
  double log_c = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) log_c = std::max(log_c, y[k] - slope * t[k]);
  fit.rho = std::exp(slope);
  fit.c = std::exp(log_c);
  fit.certified = fit.rho < 1.0;
  return fit;
}

DecayFit fit_decay_rate(const Trajectory& traj) { return fit_decay_rate(std::span<const Vector>(traj.states)); }

}  // namespace skmpc
