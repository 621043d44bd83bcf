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
#include <functional>
#include <span>
#include <vector>

#include "skmpc/controller.hpp"
#include "skmpc/model.hpp"
#include "skmpc/mpc.hpp"
#include "skmpc/trajectory.hpp"

namespace skmpc {

/// Sampled maximum of a ratio |g(x)| / |x| over a ball. This is a lower
/// bound on the true constant; `argmax_point` reproduces it.
struct LipschitzEstimate {
  double constant = 0.0;
  double radius = 0.0;
  int num_samples = 0;
  int skipped = 0;
  Vector argmax_point;
  std::uint64_t seed = 0;
};

/// max |Psi(x)| / |x| over samples in B_r \ {0}.
LipschitzEstimate estimate_lift_lipschitz(const Dictionary& dict, double r, int num_samples,
                                          std::uint64_t seed);

/// max |Psi(f(x, k(x))) - A Psi(x) - B k(x)| / |x| over samples in B_r \ {0}.
/// Samples where the controller does not report an optimal solve are skipped;
/// more than 10% skipped raises CoverageError.
LipschitzEstimate estimate_closed_loop_error(const Plant& plant, const LiftedModel& model,
                                             const Dictionary& dict, const Controller& controller,
                                             double r, int num_samples, std::uint64_t seed);

/// Same estimate over an explicit sample set (zero vectors are ignored).
LipschitzEstimate closed_loop_error_on(const Plant& plant, const LiftedModel& model,
                                       const Dictionary& dict, const Controller& controller,
                                       std::span<const Vector> samples);

struct CzEstimate {
  double c_z = 0.0;
  /// Largest V_N*(z)/|z|^2 seen on samples where the LQR candidate is feasible.
  double max_sampled_ratio = 0.0;
  int num_verified = 0;
  int num_excluded = 0;
};

/// c_z = sigma_max(sum_{k<N} (A_K^k)'(C'QC + K'RK)A_K^k + (A_K^N)' Phat A_K^N),
/// the cost matrix of the terminal-gain rollout, checked against sampled
/// optimal values.
CzEstimate estimate_cz(const CondensedMpc& cm, int num_samples, std::uint64_t seed,
                       const SolverOptions& opts = {});

/// Cost matrix of the terminal-gain rollout (before taking sigma_max).
Matrix lqr_candidate_cost_matrix(const CondensedMpc& cm);

/// alpha(L) = a L^2 + 2 (a c2 + b sqrt(c1)) L.
double class_k_bound(double a, double b, double c1, double c2, double L);
/// Positive root of class_k_bound(a, b, c1, c2, delta) = target.
double class_k_inverse(double a, double b, double c1, double c2, double target);

/// Every quantity entering the stability-margin ledger.
struct CertificateInputs {
  double lambda_q = 0.0;
  double lambda_r = 0.0;
  double lambda_qhat = 0.0;
  double sigma_phat = 0.0;
  double tau = 0.0;
  double L_psi = 0.0;
  double L = 0.0;
  double c_z = 0.0;
  double c_x = 0.0;
  double sigma_A = 0.0;
  double sigma_B = 0.0;
  double sigma_1 = 0.0;
  double sigma_2 = 0.0;
  double sigma_3 = 0.0;
  double sigma_4 = 0.0;
};

struct CertificateConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double gamma = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta = 0.0;
  /// |alpha_1(delta1) - gamma/c_x| and |alpha_2(delta2) - lambda_Q|.
  double delta1_residual = 0.0;
  double delta2_residual = 0.0;
  bool L_below_delta = false;
};

/// Pure function of the inputs.
CertificateConstants compute_constants(const CertificateInputs& in);

struct LyapunovCheck {
  double alpha3_margin = 0.0;
  int invariance_violations = 0;
  int num_in_level = 0;
};

struct DecayFit {
  double c = 1.0;
  double rho = 1.0;
  bool certified = false;
  int samples_used = 0;
};

struct CertificateReport {
  CertificateInputs inputs;
  CertificateConstants constants;
  double rho_level = 0.0;
  double r_psi = 0.0;
  double r = 0.0;
  LyapunovCheck lyapunov;
  DecayFit decay;
  Vector L_psi_argmax;
  Vector L_argmax;
};

/// Collects sigma_A, sigma_B and sigma_1..sigma_4 from the condensed
/// matrices and evaluates the ledger with c_x = `c_x`.
CertificateReport appendix_constants(const CondensedMpc& cm, double L_psi, double L,
                                     double c_z, double c_x);

/// lambda_Q * min(r_psi, r)^2.
double max_rho_level(double lambda_q, double r_psi, double r);

/// Samples x in B_{sample_radius}, keeps those with V(Psi(x)) < rho_level and
/// reports min [V(Psi(x)) - V(Psi(x+))]/|x|^2 and the count of successors
/// leaving the sublevel set. Throws InputError when no sample lands inside.
LyapunovCheck lyapunov_check(const Plant& plant, const Dictionary& dict,
                             const Controller& controller,
                             const std::function<double(const Vector&)>& V, double rho_level,
                             double sample_radius, int num_samples, std::uint64_t seed);

/// Fits |x_t| <= c rho^t |x_0|: rho from a least-squares line through
/// log(|x_t|/|x_0|), then the smallest c >= 1 covering every sample. Samples
/// stop at the 1e-12 floor.
DecayFit fit_decay_rate(std::span<const Vector> states);
DecayFit fit_decay_rate(const Trajectory& traj);

}  // namespace skmpc
