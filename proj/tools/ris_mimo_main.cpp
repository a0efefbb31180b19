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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rismimo/common.hpp"
#include "rismimo/config.hpp"
#include "rismimo/harness.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

std::uint64_t fnv1a64(const std::string &bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> workers;
    std::string out_dir = "out";
};

rismimo::ExperimentConfig load(const CommonArgs &args) {
    rismimo::ExperimentConfig cfg; // absent config file means: all defaults
    if (!args.config_path.empty()) {
        if (!std::filesystem::exists(args.config_path))
            throw rismimo::config_error("cannot open config file: " + args.config_path);
        cfg = rismimo::load_config_text(read_file(std::filesystem::path(args.config_path)));
    }
    rismimo::apply_overrides(cfg, args.overrides);
    if (args.seed)
        cfg.seed = *args.seed;
    if (args.workers)
        cfg.workers = *args.workers;
    rismimo::resolve_config(cfg);
    return cfg;
}

nlohmann::json config_json(const rismimo::ExperimentConfig &cfg) {
    nlohmann::json j;
    std::istringstream in(rismimo::serialize_config(cfg));
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find(" = ");
        j[section][line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

void write_manifest(const std::filesystem::path &out_dir, const CommonArgs &args,
                    const rismimo::ExperimentConfig &cfg,
                    const nlohmann::json &checksums) {
    nlohmann::json m;
    m["config_path"] = args.config_path;
    m["resolved_config"] = config_json(cfg);
    m["seed"] = cfg.seed;
    m["workers"] = cfg.workers;
    m["output_dir"] = out_dir.string();
    m["checksums"] = checksums;
    write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

std::string results_csv(const rismimo::ExperimentResult &result,
                        const rismimo::ExperimentConfig &cfg) {
    const auto labels = rismimo::enabled_mode_labels(cfg);
    std::string csv = "trial,user,mode,se_bit_per_hz,trunc_rank,distance_m\n";
    char buf[160];
    for (const auto &rec : result.records) {
        for (const auto &label : labels) {
            const auto it = rec.se.find(label);
            if (it == rec.se.end())
                continue;
            const std::string sys =
                label.starts_with("baseline") ? "baseline"
                                              : label.substr(4, label.find('.', 4) - 4);
            const arma::uword rank = rec.trunc_rank.count(sys) ? rec.trunc_rank.at(sys) : 0;
            for (std::size_t k = 0; k < it->second.size(); ++k) {
                std::snprintf(buf, sizeof(buf), "%zu,%zu,%s,%.17g,%llu,%.17g\n", rec.trial, k,
                              label.c_str(), it->second[k],
                              static_cast<unsigned long long>(rank), rec.distance_m[k]);
                csv += buf;
            }
        }
    }
    return csv;
}

nlohmann::json summary_json(const rismimo::ExperimentResult &result,
                            const rismimo::ExperimentConfig &cfg) {
    const auto derived = rismimo::derive_params(cfg);
    nlohmann::json j;
    j["config"] = config_json(cfg);
    j["seed"] = cfg.seed;
    j["prelog"] = {{"pcsi", derived.prelog_pcsi},
                   {"icsi", derived.prelog_icsi},
                   {"icsi_standard", derived.prelog_icsi_standard},
                   {"icsi_q_repeat", derived.prelog_icsi_q_repeat}};
    for (const auto &[name, rank] : result.summary.trunc_rank)
        j["trunc_rank"][name] = rank;
    for (const auto &[label, st] : result.summary.modes) {
        nlohmann::json m;
        m["count"] = st.count;
        m["mean"] = st.mean;
        m["std_error"] = st.std_error;
        m["median"] = st.median;
        m["p05"] = st.p05;
        nlohmann::json values = nlohmann::json::array();
        nlohmann::json probs = nlohmann::json::array();
        for (const auto &pt : st.cdf) {
            values.push_back(pt.value);
            probs.push_back(pt.prob);
        }
        m["cdf_values"] = std::move(values);
        m["cdf_probs"] = std::move(probs);
        j["modes"][label] = std::move(m);
    }
    j["runtime_seconds"] = result.summary.runtime_seconds;
    return j;
}

int cmd_simulate(const CommonArgs &args) {
    const auto cfg = load(args);
    const std::filesystem::path out_dir(args.out_dir);
    std::filesystem::create_directories(out_dir);

    // Manifest goes first so a crashed run still records its exact inputs;
    // checksums are filled in after the results exist.
    write_manifest(out_dir, args, cfg, nlohmann::json::object());

    const auto result = rismimo::run_experiment(cfg);

    const std::string csv = results_csv(result, cfg);
    write_text(out_dir / "results.csv", csv);
    const std::string summary = summary_json(result, cfg).dump(2) + "\n";
    write_text(out_dir / "summary.json", summary);

    nlohmann::json checksums;
    checksums["results.csv"] = hex64(fnv1a64(csv));
    checksums["summary.json"] = hex64(fnv1a64(summary));
    write_manifest(out_dir, args, cfg, checksums);

    std::printf("wrote %s (%zu trials, %zu modes, %.1f s)\n",
                (out_dir / "results.csv").c_str(), result.records.size(),
                result.summary.modes.size(), result.summary.runtime_seconds);
    return 0;
}

int cmd_validate_lb(const CommonArgs &args, std::size_t draws) {
    auto cfg = load(args);
    using namespace rismimo;
    if (draws < 10000)
        throw config_error("validate-lb needs at least 1e4 draws");

    const auto ctx = build_experiment_context(cfg);
    const ModeSystem &sys = ctx.ris_modes.front();
    Rng rng = Rng::substream(cfg.seed, {kTrialStream, 0});
    std::vector<UserLink> users = drop_users(cfg, ctx.derived, ctx.pilots, rng);
    const RisPhaseConfig phi = RisPhaseConfig::random(cfg.n_ris, sys.train.phase_set, rng);

    const arma::uword k_users = users.size();
    std::vector<arma::cx_mat> covs(k_users);
    std::vector<double> betas(k_users), train_powers(k_users);
    for (arma::uword k = 0; k < k_users; ++k) {
        covs[k] = estimate_covariance(sys.basis, users, ctx.pilots, ctx.derived.noise_power_w, k);
        betas[k] = users[k].beta;
        train_powers[k] = users[k].train_power_w;
    }
    const auto eta =
        allocate_downlink_power_expected(ctx.derived.p_max_w, sys.channel, phi.phasors, covs);
    const arma::cx_mat a = a_phi_matrix(sys.channel, phi.phasors);

    bool ok = true;
    auto check = [&](const char *name, double closed, double mc, double se) {
        const double tol = 3.0 * se + 0.05 * std::abs(closed);
        const bool pass = std::abs(mc - closed) <= tol;
        ok = ok && pass;
        const double rel = closed != 0 ? (mc - closed) / closed : 0.0;
        std::printf("  %-12s closed=%.6e  mc=%.6e  rel=%+.3f%%  mc_se=%.2e  %s\n", name, closed,
                    mc, 100.0 * rel, se, pass ? "ok" : "DISAGREES");
    };

    for (arma::uword k = 0; k < k_users; ++k) {
        const auto cf = hardening_lb_closed_form(a, covs, betas, eta, train_powers,
                                                 ctx.pilots.copilot, ctx.derived.noise_power_w, k);
        const auto mc = lb_terms_monte_carlo(sys.channel, phi.phasors, users, ctx.pilots,
                                             sys.train, sys.basis, eta,
                                             ctx.derived.noise_power_w, k, draws, rng);
        std::printf("user %llu (beta=%.3e, %zu draws):\n", static_cast<unsigned long long>(k),
                    betas[k], draws);
        check("DS^2", cf.desired_signal_sq, mc.desired_signal_sq, mc.ds_std_error);
        check("E|BU|^2", cf.beamforming_uncertainty, mc.beamforming_uncertainty, mc.bu_std_error);
        for (std::size_t j = 0; j < cf.interference.size(); ++j) {
            char nm[32];
            std::snprintf(nm, sizeof(nm), "E|UI_%zu|^2", j);
            check(nm, cf.interference[j], mc.interference[j], mc.ui_std_error[j]);
        }
        check("sinr_lb", cf.sinr, mc.sinr, mc.sinr * 0.02); // combined-term guide band
    }
    std::printf("validate-lb: %s\n", ok ? "all terms agree" : "DISAGREEMENT detected");
    return ok ? 0 : kExitNumericError;
}

int cmd_optimize_demo(const CommonArgs &args) {
    auto cfg = load(args);
    using namespace rismimo;
    const std::filesystem::path out_dir(args.out_dir);
    std::filesystem::create_directories(out_dir);

    const auto ctx = build_experiment_context(cfg);
    const ModeSystem &sys =
        cfg.mode_directional ? ctx.ris_modes.back() : ctx.ris_modes.front();
    Rng rng = Rng::substream(cfg.seed, {kTrialStream, 0});
    std::vector<UserLink> users = drop_users(cfg, ctx.derived, ctx.pilots, rng);

    arma::cx_mat channels(cfg.n_ris, cfg.k_users);
    for (arma::uword k = 0; k < cfg.k_users; ++k)
        channels.col(k) = draw_small_scale(users[k].beta, cfg.n_ris, rng);

    const RisPhaseConfig start = RisPhaseConfig::random(cfg.n_ris, sys.train.phase_set, rng);
    const RisObjective obj = cfg.objective == "f2" ? RisObjective::normalized_cross_correlation
                                                   : RisObjective::cross_correlation;
    ObjectiveContext octx(sys.channel, channels, start);
    const auto result = optimize_phases(octx, obj, sys.train.phase_set, cfg.rel_tol,
                                        cfg.max_sweeps);

    std::string csv = "sweep,coordinate,objective\n";
    char buf[80];
    for (const auto &pt : result.trace) {
        std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g\n", pt.sweep, pt.coordinate, pt.value);
        csv += buf;
    }
    write_text(out_dir / "objective_trace.csv", csv);
    std::printf("objective %s on %s antenna: %.6e -> %.6e in %zu sweeps (%s)\n",
                cfg.objective.c_str(), sys.name.c_str(), result.initial_value,
                result.final_value, result.sweeps,
                result.converged ? "converged" : "sweep limit");
    std::printf("wrote %s\n", (out_dir / "objective_trace.csv").c_str());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    // Worker-level parallelism lives in the trial loop; keep the BLAS single
    // threaded so runs are reproducible across machines and core counts.
    setenv("OPENBLAS_NUM_THREADS", "1", 0);

    CLI::App app{"RIS-aided massive MIMO link-level simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    std::size_t lb_draws = 200000;

    auto add_common = [&](CLI::App *cmd, bool with_out) {
        cmd->add_option("--config", args.config_path, "experiment config file (INI)");
        cmd->add_option("--set", args.overrides, "override a config key, key=value")
            ->take_all();
        cmd->add_option("--seed", args.seed, "master seed (overrides config)");
        cmd->add_option("--workers", args.workers, "trial worker threads (overrides config)");
        if (with_out)
            cmd->add_option("--out", args.out_dir, "output directory");
    };

    CLI::App *sim = app.add_subcommand("simulate", "run the Monte-Carlo experiment");
    add_common(sim, true);
    CLI::App *val = app.add_subcommand("validate-lb",
                                       "compare the closed-form bound terms with Monte-Carlo");
    add_common(val, false);
    val->add_option("--draws", lb_draws, "Monte-Carlo draws (>= 1e4)");
    CLI::App *demo = app.add_subcommand("optimize-demo",
                                        "single-drop phase optimization trace");
    add_common(demo, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(args);
        if (val->parsed())
            return cmd_validate_lb(args, lb_draws);
        if (demo->parsed())
            return cmd_optimize_demo(args);
    } catch (const rismimo::config_error &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::invalid_argument &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumericError;
    }
    return 0;
}
