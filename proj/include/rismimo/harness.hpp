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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rismimo/estimation.hpp"
#include "rismimo/geometry.hpp"
#include "rismimo/performance.hpp"
#include "rismimo/ris_optimizer.hpp"

namespace rismimo {

/// Full experiment description in config-file units. Defaults reproduce the
/// reference simulation setup.
struct ExperimentConfig {
    // [system]
    std::uint64_t n_active = 16;
    std::uint64_t n_ris = 64;
    double carrier_ghz = 1.9;
    double bandwidth_mhz = 20.0;
    double separation_lambda = 5.0;      // D in wavelengths
    double active_spacing_lambda = 0.5;  // d_A (omni mode)
    double ris_spacing_lambda = 0.5;     // d_R
    double ris_efficiency = 1.0;         // rho

    // [antenna]
    double gain_omni_db = 3.0;
    double gain_ris_db = 3.0;
    double gain_dir_db = 10.0;
    double sector_half_angle_deg = 60.0;
    double back_lobe_floor_db = -std::numeric_limits<double>::infinity();

    // [noise]
    double noise_psd_dbm_hz = -174.0;
    double noise_figure_db = 5.0;

    // [pathloss]
    double pathloss_offset_db = 32.4;
    double pathloss_distance_coeff_db = 21.0;
    double pathloss_freq_coeff_db = 20.0;
    double pathloss_min_distance_m = 1.0;

    // [users]
    std::uint64_t k_users = 8;
    double drop_half_angle_deg = 60.0;
    double drop_min_distance_m = 10.0;
    double drop_max_distance_m = 400.0;
    double height_bs_m = 10.0;
    double height_ue_m = 1.5;
    double train_power_mw = 800.0;
    double p_max_dbw = 7.0;

    // [training]
    std::uint64_t tau_p = 16;
    std::uint64_t tau_c = 200;
    std::int64_t phase_bits = 3;
    double energy_fraction = 0.98;
    std::uint64_t q_configs = 0; // 0 = auto ceil(n_ris / n_active); resolved on load
    std::string energy_mode = "sum";      // "sum" | "sum_squared"
    std::string prelog_mode = "standard"; // "standard": 1 - tau_p/tau_c; "q_repeat": 1 - Q*tau_p/tau_c
    double prelog_pcsi = 1.0;

    // [optimizer]
    std::string objective = "f1"; // objective for optimize-demo
    double rel_tol = 1e-6;
    std::uint64_t max_sweeps = 50;

    // [run]
    std::uint64_t trials = 100;
    std::uint64_t draws = 100;
    bool mode_omni = true;
    bool mode_directional = true;
    bool phi_random = true;
    bool phi_opt_f1 = true;
    bool phi_opt_f2 = true;
    bool bound_pcsi = true;
    bool bound_ub = true;
    bool bound_lb = true;
    bool baseline = true;
    std::uint64_t seed = 1;
    std::uint64_t workers = 1;
};

/// Quantities derived from the config exactly once, in linear scale.
struct DerivedParams {
    double wavelength_m = 0;
    double noise_power_w = 0; // sigma^2, same at the array and at the UEs
    double train_power_w = 0;
    double p_max_w = 0;
    double prelog_pcsi = 1.0;
    double prelog_icsi = 0.92;          // value selected by prelog_mode
    double prelog_icsi_standard = 0.92; // 1 - tau_p/tau_c
    double prelog_icsi_q_repeat = 0.68; // 1 - Q*tau_p/tau_c
    ChannelModelParams channel_params;
};

DerivedParams derive_params(const ExperimentConfig &cfg);

/// Everything trial workers share read-only for one antenna mode: geometry,
/// deterministic channel, training configurations and the truncated basis.
struct ModeSystem {
    std::string name; // "omni" | "dir" | "baseline"
    arma::cx_mat channel;
    TrainingConfigs train;
    TruncatedBasis basis;
    SystemGeometry geometry; // unused by the baseline
};

struct ExperimentContext {
    ExperimentConfig cfg;
    DerivedParams derived;
    PilotBook pilots;
    std::vector<ModeSystem> ris_modes;
    ModeSystem baseline; // identity channel, valid when cfg.baseline
};

ExperimentContext build_experiment_context(const ExperimentConfig &cfg);

struct OptRunSummary {
    double initial = 0;
    double final_value = 0;
    std::size_t sweeps = 0;
    bool converged = false;
};

struct TrialRecord {
    std::size_t trial = 0;
    std::vector<double> distance_m;  // per user, horizontal drop distance
    std::vector<double> angle_rad;   // per user, drop angle
    std::map<std::string, arma::uword> trunc_rank; // per system name
    // mode label -> per-user SE (bit/s/Hz)
    std::map<std::string, std::vector<double>> se;
    // mode label -> per-user Monte-Carlo standard error (averaged modes only)
    std::map<std::string, std::vector<double>> se_std_error;
    // antenna.objective label -> optimizer summary of the first fading draw
    std::map<std::string, OptRunSummary> opt_summary;
};

/// Drop K users uniformly in angle over the sector and uniformly in
/// horizontal distance; beta comes from the pathloss on the 3D distance.
std::vector<UserLink> drop_users(const ExperimentConfig &cfg, const DerivedParams &derived,
                                 const PilotBook &pilots, Rng &rng);

/// One Monte-Carlo trial (user drop): runs training, estimation, phase
/// optimization and every enabled SE measure. Deterministic given
/// (config, master seed, trial index).
TrialRecord run_trial(const ExperimentContext &ctx, std::size_t trial_index);

/// Per-user SE of a conventional massive MIMO array with n_active antennas
/// (identity channel in place of the RIS cascade), same pilots and powers.
void baseline_mmimo(const ExperimentContext &ctx, const std::vector<UserLink> &drop, Rng &rng,
                    TrialRecord &record);

struct CdfPoint {
    double value = 0;
    double prob = 0;
};

/// Right-continuous empirical CDF; probabilities are rank/N.
std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

struct ModeStats {
    std::size_t count = 0;
    double mean = 0;
    double std_error = 0;
    double median = 0;
    double p05 = 0;
    std::vector<CdfPoint> cdf;
};

struct Summary {
    std::map<std::string, ModeStats> modes;
    std::map<std::string, arma::uword> trunc_rank;
    double runtime_seconds = 0;
};

/// Pool per-user SE samples across trials per mode and compute summary
/// statistics. Throws std::invalid_argument when records carry mismatched
/// mode sets.
Summary aggregate(const std::vector<TrialRecord> &records);

struct ExperimentResult {
    std::vector<TrialRecord> records;
    Summary summary;
};

/// Run all trials on `workers` threads. Output is a pure function of
/// (config, seed), independent of the worker count.
ExperimentResult run_experiment(const ExperimentConfig &cfg);

/// Mode labels are "ris.<antenna>.<phi>.<bound>" or "baseline.<bound>".
std::vector<std::string> enabled_mode_labels(const ExperimentConfig &cfg);

} // namespace rismimo
