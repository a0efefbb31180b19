// ris-mimo-sim: link-level simulator for RIS-aided massive MIMO base stations
// Copyright (C) 2026 the ris-mimo-sim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <armadillo>
#include <cstddef>
#include <vector>

#include "rismimo/estimation.hpp"
#include "rismimo/geometry.hpp"
#include "rismimo/phase.hpp"
#include "rismimo/rng.hpp"

namespace rismimo {

/// Conjugate (maximum-ratio) beamformer w = conj(H * diag(phasors) * h_hat).
arma::cx_vec conjugate_beamformer(const arma::cx_mat &channel, const arma::cx_vec &phasors,
                                  const arma::cx_vec &channel_estimate);

/// Equal power split: eta_k = P_max / (K * ||w_k||^2), so the radiated sum
/// power is exactly P_max.
std::vector<double> allocate_downlink_power(double p_max_w,
                                            const std::vector<arma::cx_vec> &beamformers);

/// Same split with the instantaneous beamformer norm replaced by its
/// statistical mean tr(M R_k M^H), M = H*diag(phasors). Used for the closed
/// form bound, whose power coefficients are constants of the fading.
std::vector<double> allocate_downlink_power_expected(double p_max_w, const arma::cx_mat &channel,
                                                     const arma::cx_vec &phasors,
                                                     const std::vector<arma::cx_mat> &est_covs);

/// Downlink SINR of every UE for given beamformers and true channels.
std::vector<double> downlink_sinr(const arma::cx_mat &channel, const arma::cx_vec &phasors,
                                  const std::vector<arma::cx_vec> &true_channels,
                                  const std::vector<arma::cx_vec> &beamformers,
                                  const std::vector<double> &dl_powers_w, double noise_power_w);

double se_shannon(double sinr, double prelog);

struct MeanWithError {
    double mean = 0;
    double std_error = 0;
    std::size_t count = 0;
};

/// prelog * average of per-draw log2(1+sinr) samples, with the Monte-Carlo
/// standard error of the average. Throws std::invalid_argument when empty.
MeanWithError se_sample_mean(const std::vector<double> &log_terms, double prelog);

/// The Hermitian PSD coupling matrix A = (H Phi)^T conj(H Phi) appearing in
/// the closed-form SINR bound; trace(A) equals ||H||_F^2 for any unit-modulus
/// diagonal Phi.
arma::cx_mat a_phi_matrix(const arma::cx_mat &channel, const arma::cx_vec &phasors);

/// The closed-form pieces of the hardening bound for one UE.
struct HardeningClosedForm {
    double desired_signal_sq = 0;        // eta_k * tr^2(A R_k*)
    double beamforming_uncertainty = 0;  // eta_k * beta_k * tr(A R_k* A)
    std::vector<double> interference;    // E|UI_{k,j}|^2 for each j != k (index order: j)
    double sinr = 0;
};

HardeningClosedForm hardening_lb_closed_form(const arma::cx_mat &a_phi,
                                             const std::vector<arma::cx_mat> &est_covs,
                                             const std::vector<double> &betas,
                                             const std::vector<double> &dl_powers_w,
                                             const std::vector<double> &train_powers_w,
                                             const std::vector<std::vector<arma::uword>> &copilot,
                                             double noise_power_w, arma::uword user);

/// Closed-form hardening SINR lower bound for one UE.
double sinr_hardening_lb(const arma::cx_mat &a_phi, const std::vector<arma::cx_mat> &est_covs,
                         const std::vector<double> &betas, const std::vector<double> &dl_powers_w,
                         const std::vector<double> &train_powers_w,
                         const std::vector<std::vector<arma::uword>> &copilot,
                         double noise_power_w, arma::uword user);

/// Monte-Carlo estimates of the same DS/BU/UI decomposition, from joint draws
/// of channels, training noise, and the resulting estimates and beamformers.
/// Validates the closed form (and the A_Phi reconstruction) empirically.
struct HardeningTerms {
    double desired_signal_sq = 0;
    double ds_std_error = 0;
    double beamforming_uncertainty = 0;
    double bu_std_error = 0;
    std::vector<double> interference; // per j != k, same ordering as closed form
    std::vector<double> ui_std_error;
    std::size_t draws = 0;
    double sinr = 0; // DS^2 / (BU + sum UI + noise)
};

HardeningTerms lb_terms_monte_carlo(const arma::cx_mat &channel, const arma::cx_vec &phasors,
                                    const std::vector<UserLink> &users, const PilotBook &pilots,
                                    const TrainingConfigs &configs, const TruncatedBasis &basis,
                                    const std::vector<double> &dl_powers_w, double noise_power_w,
                                    arma::uword user, std::size_t draws, Rng &rng);

/// var(||H Phi h||^2) / E^2(||H Phi h||^2) over fresh h ~ CN(0, beta I).
/// Tends to zero only when the number of active elements grows.
double hardening_metric(const arma::cx_mat &channel, const arma::cx_vec &phasors, double beta,
                        std::size_t n_samples, Rng &rng);

} // namespace rismimo
