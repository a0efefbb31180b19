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

#include "rismimo/performance.hpp"

#include <cmath>
#include <stdexcept>

#include "rismimo/common.hpp"

namespace rismimo {

arma::cx_vec conjugate_beamformer(const arma::cx_mat &channel, const arma::cx_vec &phasors,
                                  const arma::cx_vec &channel_estimate) {
    return arma::conj(compose_effective_channel(channel, phasors, channel_estimate));
}

std::vector<double> allocate_downlink_power(double p_max_w,
                                            const std::vector<arma::cx_vec> &beamformers) {
    if (p_max_w <= 0)
        throw std::invalid_argument("transmit power budget must be positive");
    const double k = double(beamformers.size());
    std::vector<double> powers(beamformers.size());
    for (std::size_t i = 0; i < beamformers.size(); ++i) {
        const double n2 = std::pow(arma::norm(beamformers[i]), 2);
        if (n2 <= 0)
            throw numeric_error("zero-norm beamformer: user channel vanished");
        powers[i] = p_max_w / (k * n2);
    }
    return powers;
}

std::vector<double> allocate_downlink_power_expected(double p_max_w, const arma::cx_mat &channel,
                                                     const arma::cx_vec &phasors,
                                                     const std::vector<arma::cx_mat> &est_covs) {
    if (p_max_w <= 0)
        throw std::invalid_argument("transmit power budget must be positive");
    const arma::cx_mat m = channel * arma::diagmat(phasors);
    const double k = double(est_covs.size());
    std::vector<double> powers(est_covs.size());
    for (std::size_t i = 0; i < est_covs.size(); ++i) {
        const double n2 = std::real(arma::trace(m * est_covs[i] * m.t()));
        if (n2 <= 0)
            throw numeric_error("zero expected beamformer power: estimate covariance vanished");
        powers[i] = p_max_w / (k * n2);
    }
    return powers;
}

std::vector<double> downlink_sinr(const arma::cx_mat &channel, const arma::cx_vec &phasors,
                                  const std::vector<arma::cx_vec> &true_channels,
                                  const std::vector<arma::cx_vec> &beamformers,
                                  const std::vector<double> &dl_powers_w, double noise_power_w) {
    const std::size_t k_users = true_channels.size();
    if (beamformers.size() != k_users || dl_powers_w.size() != k_users)
        throw std::invalid_argument("SINR evaluation: per-user input sizes mismatch");

    std::vector<double> sinr(k_users);
    std::vector<arma::cx_vec> effective(k_users);
    for (std::size_t k = 0; k < k_users; ++k)
        effective[k] = compose_effective_channel(channel, phasors, true_channels[k]);

    for (std::size_t k = 0; k < k_users; ++k) {
        double signal = 0, interference = 0;
        for (std::size_t j = 0; j < k_users; ++j) {
            // h_k^T Phi^T H^T w_j reduces to the plain dot of the composite
            // channel with the beamformer.
            const std::complex<double> gain = arma::dot(effective[k], beamformers[j]);
            const double p = dl_powers_w[j] * std::norm(gain);
            if (j == k)
                signal = p;
            else
                interference += p;
        }
        sinr[k] = signal / (interference + noise_power_w);
    }
    return sinr;
}

double se_shannon(double sinr, double prelog) {
    if (sinr < 0)
        throw std::invalid_argument("SINR must be nonnegative");
    return prelog * std::log2(1.0 + sinr);
}

MeanWithError se_sample_mean(const std::vector<double> &log_terms, double prelog) {
    if (log_terms.empty())
        throw std::invalid_argument("no SE samples to average");
    const double n = double(log_terms.size());
    double sum = 0, sum_sq = 0;
    for (double x : log_terms) {
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    MeanWithError r;
    r.count = log_terms.size();
    r.mean = prelog * mean;
    if (log_terms.size() > 1) {
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        r.std_error = prelog * std::sqrt(var / n);
    }
    return r;
}

arma::cx_mat a_phi_matrix(const arma::cx_mat &channel, const arma::cx_vec &phasors) {
    if (channel.n_cols != phasors.n_elem)
        throw std::invalid_argument("coupling matrix: dimension mismatch");
    const arma::cx_mat m = channel * arma::diagmat(phasors);
    // (H Phi)^T conj(H Phi) computed as conj(M^H M) to keep the product
    // Hermitian by construction.
    return arma::conj(m.t() * m);
}

namespace {

double real_trace_checked(const arma::cx_mat &product, double scale, const char *what) {
    const double value = std::real(arma::trace(product));
    if (value < -1e-9 * scale)
        throw numeric_error(std::string("trace term went negative: ") + what);
    return std::max(value, 0.0);
}

} // namespace

HardeningClosedForm hardening_lb_closed_form(const arma::cx_mat &a_phi,
                                             const std::vector<arma::cx_mat> &est_covs,
                                             const std::vector<double> &betas,
                                             const std::vector<double> &dl_powers_w,
                                             const std::vector<double> &train_powers_w,
                                             const std::vector<std::vector<arma::uword>> &copilot,
                                             double noise_power_w, arma::uword user) {
    const std::size_t k_users = est_covs.size();
    if (betas.size() != k_users || dl_powers_w.size() != k_users ||
        train_powers_w.size() != k_users || copilot.size() != k_users)
        throw std::invalid_argument("hardening bound: per-user input sizes mismatch");

    const double scale = std::real(arma::trace(a_phi)) + noise_power_w;

    // tr(A R_j*) and tr(A R_j* A) for every user, reused across the sums.
    std::vector<double> tr_ar(k_users), tr_ara(k_users);
    for (std::size_t j = 0; j < k_users; ++j) {
        const arma::cx_mat ar = a_phi * arma::conj(est_covs[j]);
        tr_ar[j] = real_trace_checked(ar, scale, "tr(A R*)");
        tr_ara[j] = real_trace_checked(ar * a_phi, scale, "tr(A R* A)");
    }

    std::vector<bool> is_copilot(k_users, false);
    for (arma::uword j : copilot[user])
        is_copilot[j] = true;

    HardeningClosedForm out;
    out.desired_signal_sq = dl_powers_w[user] * tr_ar[user] * tr_ar[user];
    out.beamforming_uncertainty = dl_powers_w[user] * betas[user] * tr_ara[user];

    out.interference.reserve(k_users - 1);
    double ui_sum = 0;
    for (std::size_t j = 0; j < k_users; ++j) {
        if (j == user)
            continue;
        double term;
        if (is_copilot[j]) {
            // Copilot estimates are collinear with user k's: the interference
            // carries the coherent tr^2 part scaled by the estimation ratio.
            const double ratio = (betas[j] * std::sqrt(train_powers_w[j])) /
                                 (betas[user] * std::sqrt(train_powers_w[user]));
            term = dl_powers_w[j] * ratio * ratio *
                   (tr_ar[user] * tr_ar[user] + betas[user] * tr_ara[user]);
        } else {
            term = dl_powers_w[j] * betas[user] * tr_ara[j];
        }
        out.interference.push_back(term);
        ui_sum += term;
    }

    out.sinr = out.desired_signal_sq /
               (out.beamforming_uncertainty + ui_sum + noise_power_w);
    return out;
}

double sinr_hardening_lb(const arma::cx_mat &a_phi, const std::vector<arma::cx_mat> &est_covs,
                         const std::vector<double> &betas, const std::vector<double> &dl_powers_w,
                         const std::vector<double> &train_powers_w,
                         const std::vector<std::vector<arma::uword>> &copilot,
                         double noise_power_w, arma::uword user) {
    return hardening_lb_closed_form(a_phi, est_covs, betas, dl_powers_w, train_powers_w, copilot,
                                    noise_power_w, user)
        .sinr;
}

HardeningTerms lb_terms_monte_carlo(const arma::cx_mat &channel, const arma::cx_vec &phasors,
                                    const std::vector<UserLink> &users, const PilotBook &pilots,
                                    const TrainingConfigs &configs, const TruncatedBasis &basis,
                                    const std::vector<double> &dl_powers_w, double noise_power_w,
                                    arma::uword user, std::size_t draws, Rng &rng) {
    if (draws < 1000)
        throw std::invalid_argument("Monte-Carlo term estimation needs at least 1e3 draws");
    const std::size_t k_users = users.size();
    std::vector<UserLink> local = users;

    // Streaming moments of the beamforming gains g_{k,j} = hbar_k^T w_j.
    std::complex<double> sum_gkk = 0;
    double sum_re_sq = 0, sum_im_sq = 0, sum_re_im = 0;
    double sum_abs2_kk = 0;
    std::vector<double> sum_abs2(k_users, 0.0), sum_abs4(k_users, 0.0);

    for (std::size_t d = 0; d < draws; ++d) {
        for (auto &u : local)
            u.channel = draw_small_scale(u.beta, channel.n_cols, rng);
        const auto est =
            estimate_all_users(channel, configs, basis, local, pilots, noise_power_w, rng);

        const arma::cx_vec effective =
            compose_effective_channel(channel, phasors, local[user].channel);
        for (std::size_t j = 0; j < k_users; ++j) {
            const arma::cx_vec w = conjugate_beamformer(channel, phasors, est[j].estimate);
            const std::complex<double> g = arma::dot(effective, w);
            const double a2 = std::norm(g);
            if (j == user) {
                sum_gkk += g;
                sum_re_sq += g.real() * g.real();
                sum_im_sq += g.imag() * g.imag();
                sum_re_im += g.real() * g.imag();
                sum_abs2_kk += a2;
            } else {
                sum_abs2[j] += a2;
                sum_abs4[j] += a2 * a2;
            }
        }
    }

    const double n = double(draws);
    const std::complex<double> mean_g = sum_gkk / n;
    const double eta_k = dl_powers_w[user];

    HardeningTerms t;
    t.draws = draws;
    t.desired_signal_sq = eta_k * std::norm(mean_g);

    // Delta-method standard error of |mean g|^2 from the covariance of the
    // sample means of (Re g, Im g).
    const double var_re = std::max(0.0, sum_re_sq / n - mean_g.real() * mean_g.real());
    const double var_im = std::max(0.0, sum_im_sq / n - mean_g.imag() * mean_g.imag());
    const double cov_ri = sum_re_im / n - mean_g.real() * mean_g.imag();
    const double dre = 2.0 * mean_g.real(), dim = 2.0 * mean_g.imag();
    t.ds_std_error = eta_k * std::sqrt(std::max(
                                 0.0, (dre * dre * var_re + dim * dim * var_im +
                                       2.0 * dre * dim * cov_ri) /
                                          n));

    const double var_g = std::max(0.0, sum_abs2_kk / n - std::norm(mean_g));
    t.beamforming_uncertainty = eta_k * var_g;
    t.bu_std_error = eta_k * var_g * std::sqrt(2.0 / n);

    double ui_sum = 0;
    for (std::size_t j = 0; j < k_users; ++j) {
        if (j == user)
            continue;
        const double mean_a2 = sum_abs2[j] / n;
        const double var_a2 = std::max(0.0, sum_abs4[j] / n - mean_a2 * mean_a2);
        t.interference.push_back(dl_powers_w[j] * mean_a2);
        t.ui_std_error.push_back(dl_powers_w[j] * std::sqrt(var_a2 / n));
        ui_sum += dl_powers_w[j] * mean_a2;
    }

    t.sinr = t.desired_signal_sq / (t.beamforming_uncertainty + ui_sum + noise_power_w);
    return t;
}

double hardening_metric(const arma::cx_mat &channel, const arma::cx_vec &phasors, double beta,
                        std::size_t n_samples, Rng &rng) {
    if (n_samples < 1000)
        throw std::invalid_argument("hardening metric needs at least 1e3 samples");
    double sum = 0, sum_sq = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const arma::cx_vec h = draw_small_scale(beta, channel.n_cols, rng);
        const double x = std::pow(arma::norm(compose_effective_channel(channel, phasors, h)), 2);
        sum += x;
        sum_sq += x * x;
    }
    const double n = double(n_samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return var / (mean * mean);
}

} // namespace rismimo
