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

#include "rismimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rismimo/common.hpp"

namespace rismimo {

DerivedParams derive_params(const ExperimentConfig &cfg) {
    DerivedParams d;
    d.channel_params.ris_efficiency = cfg.ris_efficiency;
    d.channel_params.carrier_hz = cfg.carrier_ghz * 1e9;
    d.channel_params.bandwidth_hz = cfg.bandwidth_mhz * 1e6;
    d.channel_params.noise_psd_dbm_hz = cfg.noise_psd_dbm_hz;
    d.channel_params.noise_figure_db = cfg.noise_figure_db;
    d.channel_params.pathloss.offset_db = cfg.pathloss_offset_db;
    d.channel_params.pathloss.distance_coeff_db = cfg.pathloss_distance_coeff_db;
    d.channel_params.pathloss.freq_coeff_db = cfg.pathloss_freq_coeff_db;
    d.channel_params.pathloss.min_distance_m = cfg.pathloss_min_distance_m;

    d.wavelength_m = d.channel_params.wavelength_m();
    d.noise_power_w = d.channel_params.noise_power_w();
    d.train_power_w = cfg.train_power_mw / 1000.0;
    d.p_max_w = dbw_to_watt(cfg.p_max_dbw);

    const double tau_ratio = double(cfg.tau_p) / double(cfg.tau_c);
    const arma::uword q = cfg.q_configs > 0
                              ? cfg.q_configs
                              : (cfg.n_ris + cfg.n_active - 1) / cfg.n_active;
    d.prelog_pcsi = cfg.prelog_pcsi;
    d.prelog_icsi_standard = 1.0 - tau_ratio;
    d.prelog_icsi_q_repeat = 1.0 - double(q) * tau_ratio;
    d.prelog_icsi =
        cfg.prelog_mode == "q_repeat" ? d.prelog_icsi_q_repeat : d.prelog_icsi_standard;
    if (d.prelog_icsi <= 0)
        throw config_error("training overhead leaves no room for downlink data");
    return d;
}

namespace {

EnergyMode energy_mode_of(const ExperimentConfig &cfg) {
    return cfg.energy_mode == "sum_squared" ? EnergyMode::singular_sum_sq
                                            : EnergyMode::singular_sum;
}

ModeSystem build_ris_mode(const ExperimentConfig &cfg, const DerivedParams &d, bool directional,
                          Rng &rng) {
    ModeSystem m;
    m.name = directional ? "dir" : "omni";

    const double lam = d.wavelength_m;
    const double d_r = cfg.ris_spacing_lambda * lam;
    const double separation = cfg.separation_lambda * lam;
    double d_a = cfg.active_spacing_lambda * lam;
    AntennaPattern array_pattern = AntennaPattern::omni(cfg.gain_omni_db);
    if (directional) {
        const double alpha = cfg.sector_half_angle_deg * arma::datum::pi / 180.0;
        array_pattern = AntennaPattern::directional(cfg.gain_dir_db, alpha, cfg.back_lobe_floor_db);
        d_a = directional_spacing(cfg.n_active, cfg.n_ris, d_r, separation, alpha);
    }
    const AntennaPattern ris_pattern = AntennaPattern::omni(cfg.gain_ris_db);

    m.geometry = build_geometry(cfg.n_active, cfg.n_ris, d_a, d_r, separation, lam);
    m.channel = build_channel_matrix(m.geometry, array_pattern, ris_pattern, d.channel_params).entries;
    m.train = draw_training_configs(cfg.n_active, cfg.n_ris, int(cfg.phase_bits), rng,
                                    cfg.q_configs);
    m.basis = truncated_svd(stacked_training_matrix(m.channel, m.train), cfg.energy_fraction,
                            energy_mode_of(cfg));
    return m;
}

ModeSystem build_baseline_mode(const ExperimentConfig &cfg, const DerivedParams &cfg_d) {
    (void)cfg_d;
    ModeSystem m;
    m.name = "baseline";
    m.channel = arma::cx_mat(cfg.n_active, cfg.n_active, arma::fill::eye);
    m.train.n_configs = 1;
    m.train.phase_bits = int(cfg.phase_bits);
    m.train.phase_set = quantized_phase_set(int(cfg.phase_bits));
    m.train.configs = {RisPhaseConfig::identity(cfg.n_active)};
    m.basis = truncated_svd(m.channel, 1.0);
    return m;
}

} // namespace

ExperimentContext build_experiment_context(const ExperimentConfig &cfg) {
    ExperimentContext ctx;
    ctx.cfg = cfg;
    ctx.derived = derive_params(cfg);
    ctx.pilots = make_pilot_book(cfg.tau_p, cfg.k_users);

    Rng setup = Rng::substream(cfg.seed, {kSetupStream});
    if (cfg.mode_omni)
        ctx.ris_modes.push_back(build_ris_mode(cfg, ctx.derived, false, setup));
    if (cfg.mode_directional)
        ctx.ris_modes.push_back(build_ris_mode(cfg, ctx.derived, true, setup));
    if (cfg.baseline)
        ctx.baseline = build_baseline_mode(cfg, ctx.derived);
    return ctx;
}

std::vector<UserLink> drop_users(const ExperimentConfig &cfg, const DerivedParams &derived,
                                 const PilotBook &pilots, Rng &rng) {
    if (cfg.drop_min_distance_m <= 0 || cfg.drop_min_distance_m >= cfg.drop_max_distance_m)
        throw config_error("drop distance range must satisfy 0 < min < max");
    if (pilots.sequences.n_cols != cfg.k_users)
        throw config_error("pilot book does not cover the configured user count");
    const double half_angle = cfg.drop_half_angle_deg * arma::datum::pi / 180.0;
    const double dh = cfg.height_bs_m - cfg.height_ue_m;

    std::vector<UserLink> users(cfg.k_users);
    for (arma::uword k = 0; k < cfg.k_users; ++k) {
        const double angle = rng.uniform(-half_angle, half_angle);
        const double dist = rng.uniform(cfg.drop_min_distance_m, cfg.drop_max_distance_m);
        UserLink &u = users[k];
        u.pos_x_m = dist * std::cos(angle);
        u.pos_y_m = dist * std::sin(angle);
        u.distance_3d_m = std::hypot(dist, dh);
        u.beta = pathloss_beta(u.distance_3d_m, derived.channel_params.pathloss,
                               derived.channel_params.carrier_hz);
        u.pilot = k;
        u.train_power_w = derived.train_power_w;
    }
    return users;
}

namespace {

/// Streaming per-user accumulator of log2(1+sinr) samples for one mode label.
struct SeAccumulator {
    std::vector<double> sum, sum_sq;
    std::size_t n = 0;

    void init(std::size_t k) {
        sum.assign(k, 0.0);
        sum_sq.assign(k, 0.0);
        n = 0;
    }
    void add(const std::vector<double> &sinr) {
        for (std::size_t k = 0; k < sinr.size(); ++k) {
            const double x = std::log2(1.0 + sinr[k]);
            sum[k] += x;
            sum_sq[k] += x * x;
        }
        ++n;
    }
    void finalize(double prelog, std::vector<double> &se, std::vector<double> &err) const {
        se.resize(sum.size());
        err.resize(sum.size());
        const double dn = double(n);
        for (std::size_t k = 0; k < sum.size(); ++k) {
            const double mean = sum[k] / dn;
            se[k] = prelog * mean;
            const double var =
                n > 1 ? std::max(0.0, (sum_sq[k] - dn * mean * mean) / (dn - 1.0)) : 0.0;
            err[k] = prelog * std::sqrt(var / dn);
        }
    }
};

std::vector<double> betas_of(const std::vector<UserLink> &users) {
    std::vector<double> b(users.size());
    for (std::size_t k = 0; k < users.size(); ++k)
        b[k] = users[k].beta;
    return b;
}

std::vector<double> train_powers_of(const std::vector<UserLink> &users) {
    std::vector<double> p(users.size());
    for (std::size_t k = 0; k < users.size(); ++k)
        p[k] = users[k].train_power_w;
    return p;
}

/// Closed-form hardening-bound SE for every user at a fixed reflection state.
std::vector<double> lb_se_all(const ExperimentContext &ctx, const ModeSystem &sys,
                              const std::vector<UserLink> &users, const arma::cx_vec &phasors,
                              double prelog) {
    const arma::uword k_users = users.size();
    std::vector<arma::cx_mat> covs(k_users);
    for (arma::uword k = 0; k < k_users; ++k)
        covs[k] = estimate_covariance(sys.basis, users, ctx.pilots, ctx.derived.noise_power_w, k);
    const auto eta =
        allocate_downlink_power_expected(ctx.derived.p_max_w, sys.channel, phasors, covs);
    const arma::cx_mat a = a_phi_matrix(sys.channel, phasors);
    std::vector<double> se(k_users);
    for (arma::uword k = 0; k < k_users; ++k) {
        const double sinr =
            sinr_hardening_lb(a, covs, betas_of(users), eta, train_powers_of(users),
                              ctx.pilots.copilot, ctx.derived.noise_power_w, k);
        se[k] = se_shannon(sinr, prelog);
    }
    return se;
}

std::vector<double> sinr_for_sources(const ModeSystem &sys, const arma::cx_vec &phasors,
                                     const std::vector<arma::cx_vec> &true_channels,
                                     const std::vector<arma::cx_vec> &beam_sources, double p_max_w,
                                     double noise_power_w) {
    std::vector<arma::cx_vec> w(beam_sources.size());
    for (std::size_t k = 0; k < beam_sources.size(); ++k)
        w[k] = conjugate_beamformer(sys.channel, phasors, beam_sources[k]);
    const auto eta = allocate_downlink_power(p_max_w, w);
    return downlink_sinr(sys.channel, phasors, true_channels, w, eta, noise_power_w);
}

arma::cx_mat columns_of(const std::vector<arma::cx_vec> &vs) {
    arma::cx_mat m(vs[0].n_elem, vs.size());
    for (std::size_t k = 0; k < vs.size(); ++k)
        m.col(k) = vs[k];
    return m;
}

struct ModeEval {
    // phi label -> accumulators per bound
    std::map<std::string, SeAccumulator> pcsi, ub;
    std::map<std::string, std::vector<double>> lb; // computed once per trial
};

} // namespace

void baseline_mmimo(const ExperimentContext &ctx, const std::vector<UserLink> &drop, Rng &rng,
                    TrialRecord &record) {
    const ExperimentConfig &cfg = ctx.cfg;
    const ModeSystem &sys = ctx.baseline;
    const double noise = ctx.derived.noise_power_w;
    const arma::cx_vec phasors = sys.train.configs[0].phasors; // identity

    std::vector<UserLink> users = drop;

    if (cfg.bound_lb)
        record.se["baseline.lb"] =
            lb_se_all(ctx, sys, users, phasors, ctx.derived.prelog_icsi_standard);

    SeAccumulator pcsi_acc, ub_acc;
    pcsi_acc.init(users.size());
    ub_acc.init(users.size());
    const bool need_est = cfg.bound_ub;

    for (std::uint64_t d = 0; d < cfg.draws; ++d) {
        std::vector<arma::cx_vec> h(users.size());
        for (std::size_t k = 0; k < users.size(); ++k) {
            users[k].channel = draw_small_scale(users[k].beta, cfg.n_active, rng);
            h[k] = users[k].channel;
        }
        if (cfg.bound_pcsi)
            pcsi_acc.add(sinr_for_sources(sys, phasors, h, h, ctx.derived.p_max_w, noise));
        if (need_est) {
            const auto est = estimate_all_users(sys.channel, sys.train, sys.basis, users,
                                                ctx.pilots, noise, rng);
            std::vector<arma::cx_vec> sources(users.size());
            for (std::size_t k = 0; k < users.size(); ++k)
                sources[k] = est[k].estimate;
            ub_acc.add(sinr_for_sources(sys, phasors, h, sources, ctx.derived.p_max_w, noise));
        }
    }
    if (cfg.bound_pcsi)
        pcsi_acc.finalize(ctx.derived.prelog_pcsi, record.se["baseline.pcsi"],
                          record.se_std_error["baseline.pcsi"]);
    if (cfg.bound_ub)
        ub_acc.finalize(ctx.derived.prelog_icsi_standard, record.se["baseline.ub"],
                        record.se_std_error["baseline.ub"]);
    record.trunc_rank["baseline"] = sys.basis.rank;
}

TrialRecord run_trial(const ExperimentContext &ctx, std::size_t trial_index) {
    const ExperimentConfig &cfg = ctx.cfg;
    const double noise = ctx.derived.noise_power_w;
    Rng rng = Rng::substream(cfg.seed, {kTrialStream, trial_index});

    TrialRecord rec;
    rec.trial = trial_index;
    std::vector<UserLink> drop = drop_users(cfg, ctx.derived, ctx.pilots, rng);
    for (const auto &u : drop) {
        rec.distance_m.push_back(std::hypot(u.pos_x_m, u.pos_y_m));
        rec.angle_rad.push_back(std::atan2(u.pos_y_m, u.pos_x_m));
    }

    struct PhiMode {
        std::string label;
        RisObjective obj;
        bool enabled;
    };
    const std::vector<PhiMode> opt_modes = {
        {"opt_f1", RisObjective::cross_correlation, cfg.phi_opt_f1},
        {"opt_f2", RisObjective::normalized_cross_correlation, cfg.phi_opt_f2},
    };

    for (const ModeSystem &sys : ctx.ris_modes) {
        std::vector<UserLink> users = drop;
        rec.trunc_rank[sys.name] = sys.basis.rank;

        const RisPhaseConfig phi_random =
            RisPhaseConfig::random(cfg.n_ris, sys.train.phase_set, rng);

        if (cfg.bound_lb && cfg.phi_random)
            rec.se["ris." + sys.name + ".random.lb"] =
                lb_se_all(ctx, sys, users, phi_random.phasors, ctx.derived.prelog_icsi);

        std::map<std::string, SeAccumulator> acc;
        auto acc_of = [&](const std::string &label) -> SeAccumulator & {
            auto it = acc.find(label);
            if (it == acc.end()) {
                it = acc.emplace(label, SeAccumulator{}).first;
                it->second.init(users.size());
            }
            return it->second;
        };

        const bool any_opt = cfg.phi_opt_f1 || cfg.phi_opt_f2;
        const bool need_est = cfg.bound_ub || (cfg.bound_lb && any_opt);

        for (std::uint64_t d = 0; d < cfg.draws; ++d) {
            std::vector<arma::cx_vec> h(users.size());
            for (std::size_t k = 0; k < users.size(); ++k) {
                users[k].channel = draw_small_scale(users[k].beta, cfg.n_ris, rng);
                h[k] = users[k].channel;
            }
            std::vector<arma::cx_vec> est_sources;
            if (need_est) {
                const auto est = estimate_all_users(sys.channel, sys.train, sys.basis, users,
                                                    ctx.pilots, noise, rng);
                est_sources.resize(users.size());
                for (std::size_t k = 0; k < users.size(); ++k)
                    est_sources[k] = est[k].estimate;
            }

            if (cfg.phi_random) {
                if (cfg.bound_pcsi)
                    acc_of("random.pcsi")
                        .add(sinr_for_sources(sys, phi_random.phasors, h, h, ctx.derived.p_max_w,
                                              noise));
                if (cfg.bound_ub)
                    acc_of("random.ub")
                        .add(sinr_for_sources(sys, phi_random.phasors, h, est_sources,
                                              ctx.derived.p_max_w, noise));
            }

            for (const auto &om : opt_modes) {
                if (!om.enabled)
                    continue;
                if (cfg.bound_pcsi) {
                    ObjectiveContext octx(sys.channel, columns_of(h), phi_random);
                    const auto opt = optimize_phases(octx, om.obj, sys.train.phase_set,
                                                     cfg.rel_tol, cfg.max_sweeps);
                    acc_of(om.label + ".pcsi")
                        .add(sinr_for_sources(sys, opt.config.phasors, h, h, ctx.derived.p_max_w,
                                              noise));
                    if (d == 0)
                        rec.opt_summary[sys.name + "." + om.label + ".pcsi"] = {
                            opt.initial_value, opt.final_value, opt.sweeps, opt.converged};
                }
                if (cfg.bound_ub || (cfg.bound_lb && d == 0)) {
                    ObjectiveContext octx(sys.channel, columns_of(est_sources), phi_random);
                    const auto opt = optimize_phases(octx, om.obj, sys.train.phase_set,
                                                     cfg.rel_tol, cfg.max_sweeps);
                    if (cfg.bound_ub)
                        acc_of(om.label + ".ub")
                            .add(sinr_for_sources(sys, opt.config.phasors, h, est_sources,
                                                  ctx.derived.p_max_w, noise));
                    if (d == 0) {
                        rec.opt_summary[sys.name + "." + om.label + ".icsi"] = {
                            opt.initial_value, opt.final_value, opt.sweeps, opt.converged};
                        // The bound needs a reflection state that is fixed
                        // over the fading; use the one optimized on the first
                        // draw's estimates.
                        if (cfg.bound_lb)
                            rec.se["ris." + sys.name + "." + om.label + ".lb"] = lb_se_all(
                                ctx, sys, users, opt.config.phasors, ctx.derived.prelog_icsi);
                    }
                }
            }
        }

        for (auto &[label, a] : acc) {
            const bool is_pcsi = label.ends_with(".pcsi");
            const double prelog =
                is_pcsi ? ctx.derived.prelog_pcsi : ctx.derived.prelog_icsi;
            const std::string full = "ris." + sys.name + "." + label;
            a.finalize(prelog, rec.se[full], rec.se_std_error[full]);
        }
    }

    if (cfg.baseline)
        baseline_mmimo(ctx, drop, rng, rec);
    return rec;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples) {
    if (samples.empty())
        throw std::invalid_argument("empirical CDF of an empty sample set");
    std::sort(samples.begin(), samples.end());
    std::vector<CdfPoint> cdf(samples.size());
    const double n = double(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        cdf[i] = {samples[i], double(i + 1) / n};
    return cdf;
}

namespace {

double percentile_sorted(const std::vector<double> &sorted, double p) {
    // Right-continuous inverse CDF: the ceil(p*n)-th order statistic.
    const std::size_t n = sorted.size();
    std::size_t idx = std::size_t(std::ceil(p * double(n)));
    idx = std::min(std::max<std::size_t>(idx, 1), n);
    return sorted[idx - 1];
}

} // namespace

Summary aggregate(const std::vector<TrialRecord> &records) {
    if (records.empty())
        throw std::invalid_argument("no trial records to aggregate");
    Summary s;
    for (const auto &rec : records) {
        if (rec.se.size() != records.front().se.size())
            throw std::invalid_argument("trial records carry mismatched mode sets");
        for (const auto &[label, _] : rec.se)
            if (!records.front().se.count(label))
                throw std::invalid_argument("trial records carry mismatched mode sets");
    }

    std::map<std::string, std::vector<double>> pooled;
    for (const auto &rec : records)
        for (const auto &[label, values] : rec.se)
            pooled[label].insert(pooled[label].end(), values.begin(), values.end());

    for (auto &[label, values] : pooled) {
        ModeStats st;
        st.count = values.size();
        double sum = 0, sum_sq = 0;
        for (double x : values) {
            sum += x;
            sum_sq += x * x;
        }
        const double n = double(values.size());
        st.mean = sum / n;
        const double var =
            values.size() > 1 ? std::max(0.0, (sum_sq - n * st.mean * st.mean) / (n - 1.0)) : 0.0;
        st.std_error = std::sqrt(var / n);
        st.cdf = empirical_cdf(values);
        std::vector<double> sorted(values);
        std::sort(sorted.begin(), sorted.end());
        st.median = percentile_sorted(sorted, 0.5);
        st.p05 = percentile_sorted(sorted, 0.05);
        s.modes.emplace(label, std::move(st));
    }
    s.trunc_rank = records.front().trunc_rank;
    return s;
}

std::vector<std::string> enabled_mode_labels(const ExperimentConfig &cfg) {
    std::vector<std::string> labels;
    std::vector<std::string> antennas;
    if (cfg.mode_omni)
        antennas.push_back("omni");
    if (cfg.mode_directional)
        antennas.push_back("dir");
    std::vector<std::string> phis;
    if (cfg.phi_random)
        phis.push_back("random");
    if (cfg.phi_opt_f1)
        phis.push_back("opt_f1");
    if (cfg.phi_opt_f2)
        phis.push_back("opt_f2");
    for (const auto &a : antennas) {
        for (const auto &p : phis) {
            if (cfg.bound_pcsi)
                labels.push_back("ris." + a + "." + p + ".pcsi");
            if (cfg.bound_ub)
                labels.push_back("ris." + a + "." + p + ".ub");
            if (cfg.bound_lb)
                labels.push_back("ris." + a + "." + p + ".lb");
        }
    }
    if (cfg.baseline) {
        if (cfg.bound_pcsi)
            labels.push_back("baseline.pcsi");
        if (cfg.bound_ub)
            labels.push_back("baseline.ub");
        if (cfg.bound_lb)
            labels.push_back("baseline.lb");
    }
    return labels;
}

ExperimentResult run_experiment(const ExperimentConfig &cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentContext ctx = build_experiment_context(cfg);

    ExperimentResult result;
    result.records.resize(cfg.trials);

    const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= cfg.trials || failed.load())
                break;
            try {
                result.records[t] = run_trial(ctx, t);
            } catch (const std::exception &e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true))
                    first_error = "trial " + std::to_string(t) + ": " + e.what();
                break;
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }
    if (failed.load())
        throw numeric_error(first_error);

    result.summary = aggregate(result.records);
    result.summary.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

} // namespace rismimo
