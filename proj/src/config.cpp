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

#include "rismimo/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "rismimo/common.hpp"

namespace rismimo {

namespace {

std::string trim(const std::string &s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

std::string format_double(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string &key, const std::string &v) {
    if (v == "inf")
        return std::numeric_limits<double>::infinity();
    if (v == "-inf")
        return -std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return x;
    } catch (const std::exception &) {
        throw config_error("key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

std::uint64_t parse_uint(const std::string &key, const std::string &v) {
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw config_error("key '" + key + "': cannot parse '" + v + "' as a nonnegative integer");
    return x;
}

std::int64_t parse_int(const std::string &key, const std::string &v) {
    std::int64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw config_error("key '" + key + "': cannot parse '" + v + "' as an integer");
    return x;
}

bool parse_bool(const std::string &key, const std::string &v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw config_error("key '" + key + "': cannot parse '" + v + "' as a boolean");
}

struct KeyEntry {
    const char *section;
    const char *key;
    std::function<void(ExperimentConfig &, const std::string &)> set;
    std::function<std::string(const ExperimentConfig &)> get;
};

#define FIELD_DOUBLE(SECTION, KEY, MEMBER)                                                      \
    KeyEntry {                                                                                  \
        SECTION, KEY,                                                                           \
            [](ExperimentConfig &c, const std::string &v) { c.MEMBER = parse_double(KEY, v); }, \
            [](const ExperimentConfig &c) { return format_double(c.MEMBER); }                   \
    }
#define FIELD_UINT(SECTION, KEY, MEMBER)                                                      \
    KeyEntry {                                                                                \
        SECTION, KEY,                                                                         \
            [](ExperimentConfig &c, const std::string &v) { c.MEMBER = parse_uint(KEY, v); }, \
            [](const ExperimentConfig &c) { return std::to_string(c.MEMBER); }                \
    }
#define FIELD_INT(SECTION, KEY, MEMBER)                                                      \
    KeyEntry {                                                                               \
        SECTION, KEY,                                                                        \
            [](ExperimentConfig &c, const std::string &v) { c.MEMBER = parse_int(KEY, v); }, \
            [](const ExperimentConfig &c) { return std::to_string(c.MEMBER); }               \
    }
#define FIELD_BOOL(SECTION, KEY, MEMBER)                                                      \
    KeyEntry {                                                                                \
        SECTION, KEY,                                                                         \
            [](ExperimentConfig &c, const std::string &v) { c.MEMBER = parse_bool(KEY, v); }, \
            [](const ExperimentConfig &c) { return c.MEMBER ? std::string("true")             \
                                                            : std::string("false"); }        \
    }
#define FIELD_STRING(SECTION, KEY, MEMBER)                                           \
    KeyEntry {                                                                       \
        SECTION, KEY, [](ExperimentConfig &c, const std::string &v) { c.MEMBER = v; }, \
            [](const ExperimentConfig &c) { return c.MEMBER; }                       \
    }

const std::vector<KeyEntry> &schema() {
    static const std::vector<KeyEntry> entries = {
        FIELD_UINT("system", "n_active", n_active),
        FIELD_UINT("system", "n_ris", n_ris),
        FIELD_DOUBLE("system", "carrier_ghz", carrier_ghz),
        FIELD_DOUBLE("system", "bandwidth_mhz", bandwidth_mhz),
        FIELD_DOUBLE("system", "separation_lambda", separation_lambda),
        FIELD_DOUBLE("system", "active_spacing_lambda", active_spacing_lambda),
        FIELD_DOUBLE("system", "ris_spacing_lambda", ris_spacing_lambda),
        FIELD_DOUBLE("system", "ris_efficiency", ris_efficiency),
        FIELD_DOUBLE("antenna", "gain_omni_db", gain_omni_db),
        FIELD_DOUBLE("antenna", "gain_ris_db", gain_ris_db),
        FIELD_DOUBLE("antenna", "gain_dir_db", gain_dir_db),
        FIELD_DOUBLE("antenna", "sector_half_angle_deg", sector_half_angle_deg),
        FIELD_DOUBLE("antenna", "back_lobe_floor_db", back_lobe_floor_db),
        FIELD_DOUBLE("noise", "noise_psd_dbm_hz", noise_psd_dbm_hz),
        FIELD_DOUBLE("noise", "noise_figure_db", noise_figure_db),
        FIELD_DOUBLE("pathloss", "pathloss_offset_db", pathloss_offset_db),
        FIELD_DOUBLE("pathloss", "pathloss_distance_coeff_db", pathloss_distance_coeff_db),
        FIELD_DOUBLE("pathloss", "pathloss_freq_coeff_db", pathloss_freq_coeff_db),
        FIELD_DOUBLE("pathloss", "pathloss_min_distance_m", pathloss_min_distance_m),
        FIELD_UINT("users", "k_users", k_users),
        FIELD_DOUBLE("users", "drop_half_angle_deg", drop_half_angle_deg),
        FIELD_DOUBLE("users", "drop_min_distance_m", drop_min_distance_m),
        FIELD_DOUBLE("users", "drop_max_distance_m", drop_max_distance_m),
        FIELD_DOUBLE("users", "height_bs_m", height_bs_m),
        FIELD_DOUBLE("users", "height_ue_m", height_ue_m),
        FIELD_DOUBLE("users", "train_power_mw", train_power_mw),
        FIELD_DOUBLE("users", "p_max_dbw", p_max_dbw),
        FIELD_UINT("training", "tau_p", tau_p),
        FIELD_UINT("training", "tau_c", tau_c),
        FIELD_INT("training", "phase_bits", phase_bits),
        FIELD_DOUBLE("training", "energy_fraction", energy_fraction),
        FIELD_UINT("training", "q_configs", q_configs),
        FIELD_STRING("training", "energy_mode", energy_mode),
        FIELD_STRING("training", "prelog_mode", prelog_mode),
        FIELD_DOUBLE("training", "prelog_pcsi", prelog_pcsi),
        FIELD_STRING("optimizer", "objective", objective),
        FIELD_DOUBLE("optimizer", "rel_tol", rel_tol),
        FIELD_UINT("optimizer", "max_sweeps", max_sweeps),
        FIELD_UINT("run", "trials", trials),
        FIELD_UINT("run", "draws", draws),
        FIELD_BOOL("run", "mode_omni", mode_omni),
        FIELD_BOOL("run", "mode_directional", mode_directional),
        FIELD_BOOL("run", "phi_random", phi_random),
        FIELD_BOOL("run", "phi_opt_f1", phi_opt_f1),
        FIELD_BOOL("run", "phi_opt_f2", phi_opt_f2),
        FIELD_BOOL("run", "bound_pcsi", bound_pcsi),
        FIELD_BOOL("run", "bound_ub", bound_ub),
        FIELD_BOOL("run", "bound_lb", bound_lb),
        FIELD_BOOL("run", "baseline", baseline),
        FIELD_UINT("run", "seed", seed),
        FIELD_UINT("run", "workers", workers),
    };
    return entries;
}

const KeyEntry *find_key(const std::string &key) {
    for (const auto &e : schema())
        if (key == e.key)
            return &e;
    return nullptr;
}

/// Keys whose name is a unit-less stem of a known key get a targeted error
/// instead of a plain rejection.
std::string unit_suffix_hint(const std::string &key) {
    static const char *suffixes[] = {"_db",  "_dbw", "_dbm_hz", "_mw",  "_m",
                                     "_ghz", "_mhz", "_deg",    "_lambda"};
    for (const auto &e : schema()) {
        const std::string known = e.key;
        for (const char *suf : suffixes) {
            if (known.size() > std::strlen(suf) &&
                known.compare(known.size() - std::strlen(suf), std::string::npos, suf) == 0 &&
                known.substr(0, known.size() - std::strlen(suf)) == key)
                return known;
        }
    }
    return {};
}

void assign(ExperimentConfig &cfg, const std::string &key, const std::string &value) {
    const KeyEntry *entry = find_key(key);
    if (!entry) {
        const std::string hint = unit_suffix_hint(key);
        if (!hint.empty())
            throw config_error("key '" + key + "' must carry its unit suffix: use '" + hint + "'");
        throw config_error("unknown key '" + key + "'");
    }
    entry->set(cfg, value);
}

bool known_section(const std::string &name) {
    for (const auto &e : schema())
        if (name == e.section)
            return true;
    return false;
}

} // namespace

ExperimentConfig load_config_text(const std::string &text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("line " + std::to_string(lineno) + ": malformed section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (!known_section(name))
                throw config_error("unknown section '" + name + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
        assign(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void resolve_config(ExperimentConfig &cfg) {
    if (cfg.n_active < 1 || cfg.n_ris <= cfg.n_active)
        throw config_error("need n_ris > n_active >= 1");
    if (cfg.carrier_ghz <= 0 || cfg.bandwidth_mhz <= 0 || cfg.separation_lambda <= 0 ||
        cfg.active_spacing_lambda <= 0 || cfg.ris_spacing_lambda <= 0)
        throw config_error("physical dimensions must be positive");
    if (cfg.ris_efficiency <= 0 || cfg.ris_efficiency > 1.0)
        throw config_error("ris_efficiency must lie in (0, 1]");
    if (cfg.k_users < 1)
        throw config_error("k_users must be at least 1");
    if (cfg.tau_p < 1 || (cfg.tau_p & (cfg.tau_p - 1)) != 0)
        throw config_error("tau_p must be a power of two");
    if (cfg.tau_c <= cfg.tau_p)
        throw config_error("tau_c must exceed tau_p");
    if (cfg.phase_bits < 1 || cfg.phase_bits > 16)
        throw config_error("phase_bits must lie in [1, 16]");
    if (cfg.energy_fraction <= 0 || cfg.energy_fraction > 1.0)
        throw config_error("energy_fraction must lie in (0, 1]");
    if (cfg.energy_mode != "sum" && cfg.energy_mode != "sum_squared")
        throw config_error("energy_mode must be 'sum' or 'sum_squared'");
    if (cfg.prelog_mode != "standard" && cfg.prelog_mode != "q_repeat")
        throw config_error("prelog_mode must be 'standard' or 'q_repeat'");
    if (cfg.prelog_pcsi <= 0 || cfg.prelog_pcsi > 1.0)
        throw config_error("prelog_pcsi must lie in (0, 1]");
    if (cfg.objective != "f1" && cfg.objective != "f2")
        throw config_error("objective must be 'f1' or 'f2'");
    if (cfg.rel_tol <= 0 || cfg.max_sweeps < 1)
        throw config_error("optimizer settings must be positive");
    if (cfg.trials < 1 || cfg.draws < 1)
        throw config_error("trials and draws must be at least 1");
    if (cfg.workers < 1)
        throw config_error("workers must be at least 1");
    if (!cfg.mode_omni && !cfg.mode_directional && !cfg.baseline)
        throw config_error("no system enabled: all antenna modes and the baseline are off");
    if (!cfg.bound_pcsi && !cfg.bound_ub && !cfg.bound_lb)
        throw config_error("no SE measure enabled");
    if (!cfg.phi_random && !cfg.phi_opt_f1 && !cfg.phi_opt_f2 && (cfg.mode_omni || cfg.mode_directional))
        throw config_error("no reflection mode enabled");

    if (cfg.q_configs == 0)
        cfg.q_configs = (cfg.n_ris + cfg.n_active - 1) / cfg.n_active;
    if (cfg.q_configs * cfg.n_active < cfg.n_ris)
        throw config_error("q_configs too small: need q_configs * n_active >= n_ris");
}

ExperimentConfig parse_config_text(const std::string &text) {
    ExperimentConfig cfg = load_config_text(text);
    resolve_config(cfg);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_overrides(ExperimentConfig &cfg, const std::vector<std::string> &overrides) {
    for (const auto &kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw config_error("override '" + kv + "' is not of the form key=value");
        assign(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    resolve_config(cfg);
}

std::string serialize_config(const ExperimentConfig &cfg) {
    std::string out;
    std::string section;
    for (const auto &e : schema()) {
        if (section != e.section) {
            if (!out.empty())
                out += "\n";
            section = e.section;
            out += "[" + section + "]\n";
        }
        out += std::string(e.key) + " = " + e.get(cfg) + "\n";
    }
    return out;
}

} // namespace rismimo
