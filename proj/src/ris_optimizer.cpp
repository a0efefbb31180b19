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

#include "rismimo/ris_optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rismimo/common.hpp"

namespace rismimo {

namespace {

double f1_from_gram(const arma::cx_mat &gram) {
    double sum = 0;
    for (arma::uword k = 0; k + 1 < gram.n_cols; ++k)
        for (arma::uword kp = k + 1; kp < gram.n_cols; ++kp)
            sum += std::abs(gram(k, kp));
    return sum;
}

double norm_sum_from_gram(const arma::cx_mat &gram) {
    return std::real(arma::trace(gram));
}

} // namespace

ObjectiveContext::ObjectiveContext(const arma::cx_mat &channel, const arma::cx_mat &user_channels,
                                   RisPhaseConfig start)
    : channel_(channel), user_channels_(user_channels), phases_(std::move(start)) {
    if (channel_.n_cols != user_channels_.n_rows)
        throw std::invalid_argument("optimizer: channel and user matrix sizes mismatch");
    if (phases_.phases.n_elem != channel_.n_cols)
        throw std::invalid_argument("optimizer: phase vector length mismatch");
    composite_ = channel_ * arma::diagmat(phases_.phasors) * user_channels_;
    gram_ = composite_.t() * composite_;
    current_value_ = f1_from_gram(gram_);
}

double ObjectiveContext::objective_from_gram(const arma::cx_mat &gram, RisObjective obj) const {
    const double f1 = f1_from_gram(gram);
    if (obj == RisObjective::cross_correlation)
        return f1;
    const double denom = norm_sum_from_gram(gram);
    if (denom <= 0)
        throw numeric_error("all composite channels vanished; normalized objective undefined");
    return f1 / denom;
}

double ObjectiveContext::objective(RisObjective obj) const {
    return objective_from_gram(gram_, obj);
}

ObjectiveContext::StepResult ObjectiveContext::coordinate_step(arma::uword coord,
                                                               const arma::vec &phase_set,
                                                               RisObjective obj) {
    if (phase_set.n_elem == 0)
        throw std::invalid_argument("empty candidate phase set");
    if (coord >= phases_.phases.n_elem)
        throw std::invalid_argument("coordinate index out of range");

    const std::complex<double> current_phasor = phases_.phasors(coord);
    const double current_angle = phases_.phases(coord);
    const double current_value = objective_from_gram(gram_, obj);

    // Rank-one structure of a single-element change: S' = S + delta * u * v,
    // so the Gram matrix moves by delta*p*v + conj(delta)*(p*v)^H +
    // |delta|^2*||u||^2*v^H*v with p = S^H u. Each candidate costs O(K^2)
    // instead of a full O(N_A*N_R*K) recompute.
    const arma::cx_vec u = channel_.col(coord);
    const arma::cx_rowvec v = user_channels_.row(coord);
    const arma::cx_vec p = composite_.t() * u;
    const arma::cx_mat pv = p * v;
    const arma::cx_mat vhv = v.t() * v;
    const double u2 = std::pow(arma::norm(u), 2);

    // Ties pick the lowest-index candidate angle, for determinism.
    double best_angle = current_angle;
    double best_value = std::numeric_limits<double>::infinity();
    arma::cx_mat best_gram;

    for (arma::uword c = 0; c < phase_set.n_elem; ++c) {
        const double angle = phase_set(c);
        double value;
        arma::cx_mat cand_gram;
        if (angle == current_angle) {
            value = current_value; // exact: no-change candidate
        } else {
            const std::complex<double> delta = std::polar(1.0, angle) - current_phasor;
            cand_gram = gram_ + delta * pv + std::conj(delta) * pv.t() +
                        std::norm(delta) * u2 * vhv;
            value = objective_from_gram(cand_gram, obj);
        }
        if (value < best_value) {
            best_value = value;
            best_angle = angle;
            best_gram = std::move(cand_gram);
        }
    }

    // A phase outside the declared set can only arise from a hand-built
    // context; never move uphill in that case.
    if (best_value > current_value) {
        best_value = current_value;
        best_angle = current_angle;
    }

    StepResult r;
    r.angle = best_angle;
    r.value = best_value;
    r.changed = (best_angle != current_angle);
    if (r.changed) {
        const std::complex<double> new_phasor = std::polar(1.0, best_angle);
        composite_ += u * ((new_phasor - current_phasor) * v);
        gram_ = std::move(best_gram);
        phases_.phases(coord) = best_angle;
        phases_.phasors(coord) = new_phasor;
    }
    return r;
}

void ObjectiveContext::resync_composite() {
    composite_ = channel_ * arma::diagmat(phases_.phasors) * user_channels_;
}

double ObjectiveContext::objective_from_scratch(RisObjective obj) const {
    const arma::cx_mat s = channel_ * arma::diagmat(phases_.phasors) * user_channels_;
    return objective_from_gram(s.t() * s, obj);
}

arma::cx_mat gram_matrix(const ObjectiveContext &ctx) { return ctx.gram(); }

double objective_f1(const ObjectiveContext &ctx) {
    return ctx.objective(RisObjective::cross_correlation);
}

double objective_f2(const ObjectiveContext &ctx) {
    return ctx.objective(RisObjective::normalized_cross_correlation);
}

OptimizeResult optimize_phases(ObjectiveContext &ctx, RisObjective obj,
                               const arma::vec &phase_set, double rel_tol,
                               std::size_t max_sweeps) {
    OptimizeResult result;
    result.initial_value = ctx.objective(obj);
    result.trace.push_back({0, -1, result.initial_value});

    double current = result.initial_value;
    for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        const double sweep_start = current;
        for (arma::uword i = 0; i < ctx.n_elements(); ++i) {
            const auto step = ctx.coordinate_step(i, phase_set, obj);
            current = step.value;
            result.trace.push_back({sweep, int(i), current});
        }
        result.sweeps = sweep;
        const double decrease = sweep_start - current;
        if (decrease <= rel_tol * std::max(std::abs(sweep_start), 1e-300)) {
            result.converged = true;
            break;
        }
        // Bound incremental drift; the tracked Gram and objective stay
        // untouched so the recorded trace remains exactly nonincreasing.
        ctx.resync_composite();
    }

    result.config = ctx.phases();
    result.final_value = current;
    return result;
}

} // namespace rismimo
