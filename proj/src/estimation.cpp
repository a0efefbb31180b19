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

#include "rismimo/estimation.hpp"

#include <cmath>
#include <stdexcept>

#include "rismimo/common.hpp"

namespace rismimo {

namespace {

bool is_power_of_two(arma::uword n) { return n > 0 && (n & (n - 1)) == 0; }

/// Sylvester construction of the tau x tau +/-1 Hadamard matrix.
arma::mat hadamard(arma::uword tau) {
    arma::mat h(1, 1, arma::fill::ones);
    while (h.n_rows < tau) {
        const arma::uword n = h.n_rows;
        arma::mat next(2 * n, 2 * n);
        next.submat(0, 0, n - 1, n - 1) = h;
        next.submat(0, n, n - 1, 2 * n - 1) = h;
        next.submat(n, 0, 2 * n - 1, n - 1) = h;
        next.submat(n, n, 2 * n - 1, 2 * n - 1) = -h;
        h = next;
    }
    return h;
}

} // namespace

PilotBook make_pilot_book(arma::uword tau_p, arma::uword n_users) {
    if (!is_power_of_two(tau_p))
        throw std::invalid_argument("pilot length must be a power of two");
    if (n_users < 1)
        throw std::invalid_argument("need at least one user");

    const arma::mat h = hadamard(tau_p);
    PilotBook book;
    book.tau_p = tau_p;
    book.sequences.set_size(tau_p, n_users);
    book.assignment.resize(n_users);
    for (arma::uword k = 0; k < n_users; ++k) {
        book.assignment[k] = k % tau_p;
        book.sequences.col(k) = h.row(book.assignment[k]).t();
    }

    book.cross = book.sequences.t() * book.sequences; // exact: +/-1 integer sums
    book.copilot.resize(n_users);
    for (arma::uword k = 0; k < n_users; ++k)
        for (arma::uword j = 0; j < n_users; ++j)
            if (book.cross(j, k) != 0.0)
                book.copilot[k].push_back(j);
    return book;
}

TrainingConfigs draw_training_configs(arma::uword n_active, arma::uword n_ris, int phase_bits,
                                      Rng &rng, arma::uword q_override) {
    if (n_active < 1 || n_ris < 1)
        throw std::invalid_argument("element counts must be positive");
    TrainingConfigs tc;
    tc.phase_bits = phase_bits;
    tc.phase_set = quantized_phase_set(phase_bits);
    tc.n_configs = q_override > 0 ? q_override : (n_ris + n_active - 1) / n_active;
    if (tc.n_configs * n_active < n_ris)
        throw std::invalid_argument("training needs Q*N_A >= N_R observables");
    tc.configs.reserve(tc.n_configs);
    for (arma::uword q = 0; q < tc.n_configs; ++q)
        tc.configs.push_back(RisPhaseConfig::random(n_ris, tc.phase_set, rng));
    return tc;
}

arma::cx_mat stacked_training_matrix(const arma::cx_mat &channel, const TrainingConfigs &configs) {
    if (configs.configs.empty())
        throw std::invalid_argument("no training configurations");
    const arma::uword n_active = channel.n_rows;
    const arma::uword n_ris = channel.n_cols;
    arma::cx_mat stacked(configs.n_configs * n_active, n_ris);
    for (arma::uword q = 0; q < configs.n_configs; ++q) {
        if (configs.configs[q].phasors.n_elem != n_ris)
            throw std::invalid_argument("training configuration size mismatch");
        stacked.rows(q * n_active, (q + 1) * n_active - 1) =
            channel * arma::diagmat(configs.configs[q].phasors);
    }
    return stacked;
}

TruncatedBasis truncated_svd(const arma::cx_mat &stacked, double energy_fraction,
                             EnergyMode mode) {
    if (energy_fraction <= 0.0 || energy_fraction > 1.0)
        throw std::invalid_argument("energy fraction must lie in (0, 1]");

    arma::cx_mat u, v;
    arma::vec s;
    if (!arma::svd_econ(u, s, v, stacked))
        throw numeric_error("SVD of the stacked training matrix did not converge");

    // Singular values below the numerical-rank tolerance never count as energy
    // carriers, so energy_fraction = 1 retains exactly the numerical rank.
    const double tol =
        double(std::max(stacked.n_rows, stacked.n_cols)) * arma::datum::eps * (s.n_elem ? s(0) : 0.0);
    arma::uword num_rank = 0;
    while (num_rank < s.n_elem && s(num_rank) > tol)
        ++num_rank;

    arma::vec energy = (mode == EnergyMode::singular_sum) ? s : arma::square(s);
    const double total = arma::accu(energy);
    arma::uword q = 0;
    double cum = 0.0;
    while (q < s.n_elem) {
        cum += energy(q);
        ++q;
        if (cum >= energy_fraction * total)
            break;
    }
    q = std::min(q, num_rank);
    if (q == 0)
        throw numeric_error("stacked training matrix is numerically zero");

    TruncatedBasis basis;
    basis.left = u.cols(0, q - 1);
    basis.singular = s.subvec(0, q - 1);
    basis.right = v.cols(0, q - 1);
    basis.rank = q;
    basis.full_spectrum = s;
    basis.energy_fraction = energy_fraction;
    basis.retained_fraction = total > 0 ? arma::accu(energy.subvec(0, q - 1)) / total : 1.0;
    return basis;
}

std::vector<arma::cx_vec> simulate_uplink_training(const arma::cx_mat &channel,
                                                   const TrainingConfigs &configs,
                                                   const std::vector<UserLink> &users,
                                                   const PilotBook &pilots, double noise_power_w,
                                                   Rng &rng) {
    const arma::uword n_active = channel.n_rows;
    const arma::uword n_users = users.size();
    if (pilots.sequences.n_cols != n_users)
        throw std::invalid_argument("pilot book does not match the user count");

    std::vector<arma::cx_vec> stacked(n_users);
    for (arma::uword k = 0; k < n_users; ++k)
        stacked[k].set_size(configs.n_configs * n_active);

    for (arma::uword q = 0; q < configs.n_configs; ++q) {
        arma::cx_mat block = channel * arma::diagmat(configs.configs[q].phasors);
        arma::cx_mat y = rng.complex_gaussian_mat(n_active, pilots.tau_p, noise_power_w);
        for (arma::uword k = 0; k < n_users; ++k) {
            arma::cx_vec faded = std::sqrt(users[k].train_power_w) * (block * users[k].channel);
            y += faded * arma::conv_to<arma::cx_rowvec>::from(pilots.sequences.col(k).t());
        }
        for (arma::uword k = 0; k < n_users; ++k)
            stacked[k].subvec(q * n_active, (q + 1) * n_active - 1) =
                y * arma::conv_to<arma::cx_vec>::from(pilots.sequences.col(k));
    }
    return stacked;
}

arma::cx_vec training_observation_exact(const arma::cx_mat &stacked,
                                        const std::vector<UserLink> &users,
                                        const PilotBook &pilots, arma::uword user,
                                        const arma::cx_vec &noise) {
    arma::cx_vec y = std::sqrt(users[user].train_power_w) * double(pilots.tau_p) *
                     (stacked * users[user].channel);
    for (arma::uword j : pilots.copilot[user]) {
        if (j == user)
            continue;
        y += std::sqrt(users[j].train_power_w) * pilots.cross(j, user) *
             (stacked * users[j].channel);
    }
    if (noise.n_elem)
        y += noise;
    return y;
}

namespace {

/// Diagonal of R_yy in the truncated basis plus the cross-correlation scale;
/// shared by the estimator and the covariance evaluation.
struct LmmseDiagonals {
    arma::vec gain;     // per-direction filter: R_vy / R_yy
    arma::vec cov_spec; // per-direction estimate variance
};

LmmseDiagonals lmmse_diagonals(const TruncatedBasis &basis, const std::vector<UserLink> &users,
                               const PilotBook &pilots, double noise_power_w, arma::uword user) {
    const double tau_p = double(pilots.tau_p);
    double pilot_sum = 0; // sum_j eta_j beta_j rho_{j,k}^2
    for (arma::uword j : pilots.copilot[user]) {
        const double rho = pilots.cross(j, user);
        pilot_sum += users[j].train_power_w * users[j].beta * rho * rho;
    }
    const double signal_scale =
        std::sqrt(users[user].train_power_w) * tau_p * users[user].beta;

    LmmseDiagonals d;
    d.gain.set_size(basis.rank);
    d.cov_spec.set_size(basis.rank);
    for (arma::uword m = 0; m < basis.rank; ++m) {
        const double lam = basis.singular(m);
        double den = pilot_sum * lam * lam + noise_power_w * tau_p;
        if (den == 0.0) {
            // Only reachable with zero noise and a zero singular value that
            // slipped past the rank trim.
            const double trace_ryy =
                pilot_sum * arma::accu(arma::square(basis.singular)) +
                noise_power_w * tau_p * double(basis.rank);
            den = 1e-12 * trace_ryy;
            if (den == 0.0) {
                d.gain(m) = 0.0;
                d.cov_spec(m) = 0.0;
                continue;
            }
        }
        d.gain(m) = signal_scale * lam / den;
        d.cov_spec(m) = signal_scale * signal_scale * lam * lam / den;
    }
    return d;
}

} // namespace

ChannelEstimate lmmse_estimate(const arma::cx_vec &stacked_obs, const TruncatedBasis &basis,
                               const std::vector<UserLink> &users, const PilotBook &pilots,
                               double noise_power_w, arma::uword user) {
    if (stacked_obs.n_elem != basis.left.n_rows)
        throw std::invalid_argument("observation length does not match the basis");
    const LmmseDiagonals d = lmmse_diagonals(basis, users, pilots, noise_power_w, user);
    ChannelEstimate est;
    arma::cx_vec projected = basis.left.t() * stacked_obs; // y_bar
    est.coeffs = arma::conv_to<arma::cx_vec>::from(d.gain) % projected;
    est.estimate = basis.right * est.coeffs;
    est.cov_spectrum = d.cov_spec;
    return est;
}

arma::vec estimate_covariance_spectrum(const TruncatedBasis &basis,
                                       const std::vector<UserLink> &users, const PilotBook &pilots,
                                       double noise_power_w, arma::uword user) {
    return lmmse_diagonals(basis, users, pilots, noise_power_w, user).cov_spec;
}

arma::cx_mat estimate_covariance(const TruncatedBasis &basis, const std::vector<UserLink> &users,
                                 const PilotBook &pilots, double noise_power_w, arma::uword user) {
    const arma::vec spec = estimate_covariance_spectrum(basis, users, pilots, noise_power_w, user);
    return basis.right * arma::diagmat(arma::conv_to<arma::cx_vec>::from(spec)) * basis.right.t();
}

std::vector<ChannelEstimate> estimate_all_users(const arma::cx_mat &channel,
                                                const TrainingConfigs &configs,
                                                const TruncatedBasis &basis,
                                                const std::vector<UserLink> &users,
                                                const PilotBook &pilots, double noise_power_w,
                                                Rng &rng) {
    const auto obs = simulate_uplink_training(channel, configs, users, pilots, noise_power_w, rng);
    std::vector<ChannelEstimate> est(users.size());
    for (arma::uword k = 0; k < users.size(); ++k)
        est[k] = lmmse_estimate(obs[k], basis, users, pilots, noise_power_w, k);
    return est;
}

} // namespace rismimo
