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

#include "rismimo/rng.hpp"

namespace rismimo {

/// 2D layout of the RIS-aided antenna structure. The RIS elements sit on the
/// x=0 vertical line and the active elements on the x=D line, both centered
/// on the array axis, so distance tables are symmetric under simultaneous
/// index reversal of both element ranges.
struct SystemGeometry {
    arma::uword n_active = 0; // N_A
    arma::uword n_ris = 0;    // N_R
    double separation_m = 0;  // D, array-to-RIS distance
    double active_spacing_m = 0;
    double ris_spacing_m = 0;
    double wavelength_m = 0;

    arma::vec active_y; // element y-coordinates at x = D
    arma::vec ris_y;    // element y-coordinates at x = 0
    arma::mat distance; // N_A x N_R pairwise Euclidean distances
    arma::mat look_angle; // N_A x N_R signed angle off array boresight, in (-pi/2, pi/2)

    /// Per-element far-field check: d_{i,j} > 2*max(da^2, dr^2)/lambda for
    /// all pairs, given physical element sizes. The whole surface need not be
    /// in the far field of the whole array.
    bool element_far_field_ok(double active_elem_size_m, double ris_elem_size_m) const;
};

SystemGeometry build_geometry(arma::uword n_active, arma::uword n_ris, double active_spacing_m,
                              double ris_spacing_m, double separation_m, double wavelength_m);

/// Active-element spacing that widens the array until the union of the
/// per-element radiation sectors spans the whole surface:
/// ((N_R-1)*d_R - 2*D*tan(alpha)) / (N_A - 2).
/// Throws std::invalid_argument when N_A <= 2 or when the sector already
/// covers the surface (numerator <= 0; use a half-wavelength spacing instead).
double directional_spacing(arma::uword n_active, arma::uword n_ris, double ris_spacing_m,
                           double separation_m, double sector_half_angle_rad);

struct AntennaPattern {
    enum class Kind { omni, directional };

    Kind kind = Kind::omni;
    double gain_db = 3.0;              // omni gain, or in-sector gain when directional
    double sector_half_angle_rad = 0;  // directional only, in (0, pi/2)
    double back_lobe_db = -arma::datum::inf; // out-of-sector floor; -inf means zero gain

    static AntennaPattern omni(double gain_db = 3.0);
    static AntennaPattern directional(double gain_db, double sector_half_angle_rad,
                                      double back_lobe_db = -arma::datum::inf);
};

/// Linear (not dB) gain of the pattern at look angle theta in [-pi, pi].
double antenna_gain(const AntennaPattern &pattern, double theta_rad);

struct PathlossParams {
    double offset_db = 32.4;
    double distance_coeff_db = 21.0; // dB per decade of distance
    double freq_coeff_db = 20.0;     // dB per decade of carrier frequency in GHz
    double min_distance_m = 1.0;     // shorter links are clamped (with a warning)
};

struct ChannelModelParams {
    double ris_efficiency = 1.0; // rho in (0, 1]
    double carrier_hz = 1.9e9;
    double bandwidth_hz = 20e6;
    double noise_psd_dbm_hz = -174.0;
    double noise_figure_db = 5.0;
    PathlossParams pathloss;

    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    /// Thermal noise power over the bandwidth including the receiver noise
    /// figure; the same front end is assumed at the array and at the UEs.
    double noise_power_w() const;
};

/// Deterministic RIS-to-array channel. Entry (i,j) is
/// sqrt(rho*G_A*G_R) * lambda/(4*pi*d_ij) * exp(-i*2*pi*d_ij/lambda).
struct ChannelMatrix {
    arma::cx_mat entries; // N_A x N_R
    SystemGeometry geometry;
};

ChannelMatrix build_channel_matrix(const SystemGeometry &geometry,
                                   const AntennaPattern &array_pattern,
                                   const AntennaPattern &ris_pattern,
                                   const ChannelModelParams &params);

/// Large-scale power gain beta = 10^(-PL/10) with
/// PL = offset + distance_coeff*log10(d_m) + freq_coeff*log10(f_GHz).
double pathloss_beta(double distance_m, const PathlossParams &params, double carrier_hz);

/// i.i.d. CN(0, beta) small-scale channel vector.
arma::cx_vec draw_small_scale(double beta, arma::uword n, Rng &rng);

/// Composite channel H * diag(phasors) * h seen by the array through the RIS.
arma::cx_vec compose_effective_channel(const arma::cx_mat &channel, const arma::cx_vec &phasors,
                                       const arma::cx_vec &user_channel);

/// One served UE: drop position, large-scale gain, small-scale channel (filled
/// per fading draw), pilot assignment and transmit powers.
struct UserLink {
    double pos_x_m = 0;
    double pos_y_m = 0;
    double distance_3d_m = 0;
    double beta = 0;             // large-scale power gain
    arma::cx_vec channel;        // h_k, length N_R (or N_A for the no-RIS baseline)
    arma::uword pilot = 0;       // index into the pilot book
    double train_power_w = 0;    // uplink pilot power
    double downlink_power_w = 0; // filled by power allocation
};

} // namespace rismimo
