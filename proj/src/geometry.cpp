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

#include "rismimo/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rismimo/common.hpp"

namespace rismimo {

namespace {

arma::vec centered_line(arma::uword n, double spacing) {
    arma::vec y(n);
    for (arma::uword i = 0; i < n; ++i)
        y(i) = (double(i) - double(n - 1) / 2.0) * spacing;
    return y;
}

} // namespace

bool SystemGeometry::element_far_field_ok(double active_elem_size_m, double ris_elem_size_m) const {
    const double a2 = active_elem_size_m * active_elem_size_m;
    const double r2 = ris_elem_size_m * ris_elem_size_m;
    const double limit = 2.0 * std::max(a2, r2) / wavelength_m;
    return distance.min() > limit;
}

SystemGeometry build_geometry(arma::uword n_active, arma::uword n_ris, double active_spacing_m,
                              double ris_spacing_m, double separation_m, double wavelength_m) {
    if (n_active < 1 || n_ris < 1)
        throw std::invalid_argument("geometry requires at least one element per line");
    if (active_spacing_m <= 0 || ris_spacing_m <= 0 || separation_m <= 0 || wavelength_m <= 0)
        throw std::invalid_argument("geometry dimensions must be positive");

    SystemGeometry g;
    g.n_active = n_active;
    g.n_ris = n_ris;
    g.separation_m = separation_m;
    g.active_spacing_m = active_spacing_m;
    g.ris_spacing_m = ris_spacing_m;
    g.wavelength_m = wavelength_m;
    g.active_y = centered_line(n_active, active_spacing_m);
    g.ris_y = centered_line(n_ris, ris_spacing_m);

    g.distance.set_size(n_active, n_ris);
    g.look_angle.set_size(n_active, n_ris);
    for (arma::uword i = 0; i < n_active; ++i) {
        for (arma::uword j = 0; j < n_ris; ++j) {
            const double dy = g.ris_y(j) - g.active_y(i);
            g.distance(i, j) = std::hypot(separation_m, dy);
            g.look_angle(i, j) = std::atan2(dy, separation_m);
        }
    }
    return g;
}

double directional_spacing(arma::uword n_active, arma::uword n_ris, double ris_spacing_m,
                           double separation_m, double sector_half_angle_rad) {
    if (n_active <= 2)
        throw std::invalid_argument("directional spacing needs at least 3 active elements");
    if (n_ris < 2 || ris_spacing_m <= 0 || separation_m <= 0 || sector_half_angle_rad <= 0)
        throw std::invalid_argument("directional spacing arguments must be positive");
    const double numerator =
        double(n_ris - 1) * ris_spacing_m - 2.0 * separation_m * std::tan(sector_half_angle_rad);
    if (numerator <= 0)
        throw std::invalid_argument(
            "radiation sector already covers the whole surface; use half-wavelength spacing");
    return numerator / double(n_active - 2);
}

AntennaPattern AntennaPattern::omni(double gain_db) {
    AntennaPattern p;
    p.kind = Kind::omni;
    p.gain_db = gain_db;
    return p;
}

AntennaPattern AntennaPattern::directional(double gain_db, double sector_half_angle_rad,
                                           double back_lobe_db) {
    if (sector_half_angle_rad <= 0 || sector_half_angle_rad >= arma::datum::pi / 2.0)
        throw std::invalid_argument("sector half-angle must lie in (0, pi/2)");
    AntennaPattern p;
    p.kind = Kind::directional;
    p.gain_db = gain_db;
    p.sector_half_angle_rad = sector_half_angle_rad;
    p.back_lobe_db = back_lobe_db;
    return p;
}

double antenna_gain(const AntennaPattern &pattern, double theta_rad) {
    if (pattern.kind == AntennaPattern::Kind::omni)
        return db_to_linear(pattern.gain_db);
    if (std::abs(theta_rad) <= pattern.sector_half_angle_rad)
        return db_to_linear(pattern.gain_db);
    return db_to_linear(pattern.back_lobe_db); // 10^(-inf/10) == 0
}

double ChannelModelParams::noise_power_w() const {
    const double noise_dbm =
        noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    return dbm_to_watt(noise_dbm);
}

ChannelMatrix build_channel_matrix(const SystemGeometry &geometry,
                                   const AntennaPattern &array_pattern,
                                   const AntennaPattern &ris_pattern,
                                   const ChannelModelParams &params) {
    if (params.ris_efficiency <= 0 || params.ris_efficiency > 1.0)
        throw std::invalid_argument("reflection efficiency must lie in (0, 1]");
    if (geometry.distance.n_elem == 0 || geometry.distance.min() <= 0)
        throw std::invalid_argument("invalid geometry: nonpositive element distance");

    const double lambda = geometry.wavelength_m;
    ChannelMatrix cm;
    cm.geometry = geometry;
    cm.entries.set_size(geometry.n_active, geometry.n_ris);
    for (arma::uword i = 0; i < geometry.n_active; ++i) {
        for (arma::uword j = 0; j < geometry.n_ris; ++j) {
            const double d = geometry.distance(i, j);
            const double theta = geometry.look_angle(i, j);
            const double g = params.ris_efficiency * antenna_gain(array_pattern, theta) *
                             antenna_gain(ris_pattern, theta);
            const double amp = std::sqrt(g) * lambda / (4.0 * arma::datum::pi * d);
            cm.entries(i, j) = std::polar(amp, -2.0 * arma::datum::pi * d / lambda);
        }
    }
    return cm;
}

double pathloss_beta(double distance_m, const PathlossParams &params, double carrier_hz) {
    double d = distance_m;
    if (d < params.min_distance_m) {
        std::fprintf(stderr, "warning: pathloss distance %.3f m clamped to %.3f m\n", d,
                     params.min_distance_m);
        d = params.min_distance_m;
    }
    const double pl_db = params.offset_db + params.distance_coeff_db * std::log10(d) +
                         params.freq_coeff_db * std::log10(carrier_hz / 1e9);
    return db_to_linear(-pl_db);
}

arma::cx_vec draw_small_scale(double beta, arma::uword n, Rng &rng) {
    if (beta < 0)
        throw std::invalid_argument("large-scale coefficient must be nonnegative");
    return rng.complex_gaussian_vec(n, beta);
}

arma::cx_vec compose_effective_channel(const arma::cx_mat &channel, const arma::cx_vec &phasors,
                                       const arma::cx_vec &user_channel) {
    if (channel.n_cols != phasors.n_elem || channel.n_cols != user_channel.n_elem)
        throw std::invalid_argument("composite channel: dimension mismatch");
    return channel * (phasors % user_channel);
}

} // namespace rismimo
