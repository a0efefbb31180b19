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
#include <vector>

#include "rismimo/phase.hpp"

namespace rismimo {

enum class RisObjective {
    cross_correlation,            // f1: sum of |h_k^H h_k'| over user pairs
    normalized_cross_correlation, // f2: f1 / sum of ||h_k||^2
};

/// State of one phase-shift optimization run: the composite channel matrix
/// S = H * diag(phasors) * Hbar and its Gram matrix are kept incrementally
/// up to date as single phases change, with a rank-one correction per
/// candidate instead of a full recompute.
class ObjectiveContext {
  public:
    /// user_channels: N_R x K matrix whose columns are the (true or
    /// estimated) UE channels the optimizer works with.
    ObjectiveContext(const arma::cx_mat &channel, const arma::cx_mat &user_channels,
                     RisPhaseConfig start);

    const RisPhaseConfig &phases() const { return phases_; }
    const arma::cx_mat &composite() const { return composite_; }
    arma::uword n_elements() const { return phases_.phases.n_elem; }
    arma::uword n_users() const { return user_channels_.n_cols; }

    const arma::cx_mat &gram() const { return gram_; }
    double objective(RisObjective obj) const;

    struct StepResult {
        double angle = 0;
        double value = 0;
        bool changed = false;
    };

    /// Exhaustive minimization over one element's phase, all others fixed.
    /// Ties select the lowest-index candidate angle; the returned value never
    /// exceeds the current objective because the current angle is a candidate.
    StepResult coordinate_step(arma::uword coord, const arma::vec &phase_set, RisObjective obj);

    /// Recompute the composite matrix from scratch (bounds incremental drift).
    void resync_composite();

    /// Fully recomputed objective, bypassing the incremental caches.
    double objective_from_scratch(RisObjective obj) const;

  private:
    double objective_from_gram(const arma::cx_mat &gram, RisObjective obj) const;

    arma::cx_mat channel_;       // H, N_A x N_R
    arma::cx_mat user_channels_; // Hbar, N_R x K
    RisPhaseConfig phases_;
    arma::cx_mat composite_; // S = H * diag(phasors) * Hbar, N_A x K
    arma::cx_mat gram_;      // K x K Gram of the composite columns
    double current_value_;   // tracked f1
    RisObjective tracked_obj_ = RisObjective::cross_correlation;
};

/// Spec-facing wrappers.
arma::cx_mat gram_matrix(const ObjectiveContext &ctx);
double objective_f1(const ObjectiveContext &ctx);
double objective_f2(const ObjectiveContext &ctx);

struct OptimizerTracePoint {
    std::size_t sweep = 0; // 0 is the starting point
    int coordinate = -1;   // -1 for the starting point
    double value = 0;
};

struct OptimizeResult {
    RisPhaseConfig config;
    std::vector<OptimizerTracePoint> trace; // value after every coordinate update
    std::size_t sweeps = 0;
    double initial_value = 0;
    double final_value = 0;
    bool converged = false;
};

/// Alternating coordinate descent: full sweeps of exhaustive per-element
/// minimization until the per-sweep relative decrease drops below rel_tol or
/// max_sweeps is reached. The objective is nonincreasing at every update.
OptimizeResult optimize_phases(ObjectiveContext &ctx, RisObjective obj,
                               const arma::vec &phase_set, double rel_tol = 1e-6,
                               std::size_t max_sweeps = 50);

} // namespace rismimo
