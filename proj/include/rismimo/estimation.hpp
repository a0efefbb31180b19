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
#include <vector>

#include "rismimo/geometry.hpp"
#include "rismimo/phase.hpp"
#include "rismimo/rng.hpp"

namespace rismimo {

/// Orthogonal real pilot sequences of length tau_p and squared norm tau_p
/// (rows of a +/-1 Hadamard matrix), assigned round-robin when there are more
/// UEs than sequences.
struct PilotBook {
    arma::uword tau_p = 0;
    arma::mat sequences;                  // tau_p x K, column k is UE k's pilot
    std::vector<arma::uword> assignment;  // UE -> Hadamard row index
    arma::mat cross;                      // K x K inner products rho_{j,k}, in {0, tau_p}
    std::vector<std::vector<arma::uword>> copilot; // P_k: UEs sharing UE k's pilot, k included
};

PilotBook make_pilot_book(arma::uword tau_p, arma::uword n_users);

/// The Q surface configurations cycled through during uplink training, each a
/// random draw from the quantized phase set.
struct TrainingConfigs {
    arma::uword n_configs = 0; // Q
    std::vector<RisPhaseConfig> configs;
    int phase_bits = 3;
    arma::vec phase_set;
};

/// Q defaults to ceil(N_R / N_A) so the stacked observation count Q*N_A is
/// never below the number of unknowns. Pass q_override > 0 to force Q.
TrainingConfigs draw_training_configs(arma::uword n_active, arma::uword n_ris, int phase_bits,
                                      Rng &rng, arma::uword q_override = 0);

/// Vertical stack of the per-configuration channels: block q is H * Phi_q.
arma::cx_mat stacked_training_matrix(const arma::cx_mat &channel, const TrainingConfigs &configs);

enum class EnergyMode {
    singular_sum,    // cumulative sum of singular values
    singular_sum_sq, // cumulative sum of squared singular values
};

/// Rank-q truncation of the stacked training matrix. q is the smallest count
/// whose cumulative singular-value energy reaches energy_fraction of the
/// total; singular values below the numerical-rank tolerance never count.
struct TruncatedBasis {
    arma::cx_mat left;       // (Q*N_A) x q
    arma::vec singular;      // q retained singular values, nonincreasing
    arma::cx_mat right;      // N_R x q
    arma::uword rank = 0;    // q
    arma::vec full_spectrum; // all singular values, for diagnostics
    double energy_fraction = 1.0;  // requested
    double retained_fraction = 1.0; // achieved, by the selected energy mode
};

TruncatedBasis truncated_svd(const arma::cx_mat &stacked, double energy_fraction,
                             EnergyMode mode = EnergyMode::singular_sum);

/// Physical simulation of the training phase: for each configuration q the
/// array observes Y_q = sum_k sqrt(eta_k) H Phi_q h_k phi_k^T + N_q and
/// projects along each UE's pilot. Returns the Q*N_A stacked observation per
/// UE.
std::vector<arma::cx_vec> simulate_uplink_training(const arma::cx_mat &channel,
                                                   const TrainingConfigs &configs,
                                                   const std::vector<UserLink> &users,
                                                   const PilotBook &pilots, double noise_power_w,
                                                   Rng &rng);

/// Closed-form equivalent of the projected observation:
/// y_k = sqrt(eta_k) tau_p Ht h_k + sum_{j copilot} sqrt(eta_j) rho_{j,k} Ht h_j (+ noise).
/// Used for validation; pass an empty noise vector for the noiseless case.
arma::cx_vec training_observation_exact(const arma::cx_mat &stacked,
                                        const std::vector<UserLink> &users,
                                        const PilotBook &pilots, arma::uword user,
                                        const arma::cx_vec &noise = arma::cx_vec());

struct ChannelEstimate {
    arma::cx_vec coeffs;    // estimated subspace coefficients, length q
    arma::cx_vec estimate;  // h_hat, length N_R
    arma::vec cov_spectrum; // d: R_hh = right * diag(d) * right^H
};

/// LMMSE estimate of UE `user` from its stacked observation. All second-order
/// statistics are diagonal in the truncated basis, so the filter is applied
/// per retained direction.
ChannelEstimate lmmse_estimate(const arma::cx_vec &stacked_obs, const TruncatedBasis &basis,
                               const std::vector<UserLink> &users, const PilotBook &pilots,
                               double noise_power_w, arma::uword user);

/// Spectrum d of the estimate covariance R_hh = right * diag(d) * right^H,
/// evaluated in closed form without observations.
arma::vec estimate_covariance_spectrum(const TruncatedBasis &basis,
                                       const std::vector<UserLink> &users, const PilotBook &pilots,
                                       double noise_power_w, arma::uword user);

/// Full N_R x N_R estimate covariance matrix (Hermitian PSD).
arma::cx_mat estimate_covariance(const TruncatedBasis &basis, const std::vector<UserLink> &users,
                                 const PilotBook &pilots, double noise_power_w, arma::uword user);

/// Convenience: simulate one training phase and estimate every UE's channel.
std::vector<ChannelEstimate> estimate_all_users(const arma::cx_mat &channel,
                                                const TrainingConfigs &configs,
                                                const TruncatedBasis &basis,
                                                const std::vector<UserLink> &users,
                                                const PilotBook &pilots, double noise_power_w,
                                                Rng &rng);

} // namespace rismimo
