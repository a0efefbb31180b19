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

#include "rismimo/phase.hpp"

#include <stdexcept>

namespace rismimo {

arma::vec quantized_phase_set(int phase_bits) {
    if (phase_bits < 1)
        throw std::invalid_argument("phase_bits must be at least 1");
    if (phase_bits > 16)
        throw std::invalid_argument("phase_bits above 16 is not a plausible hardware depth");
    const arma::uword n = arma::uword(1) << phase_bits;
    arma::vec set(n);
    for (arma::uword m = 0; m < n; ++m)
        set(m) = 2.0 * arma::datum::pi * double(m) / double(n);
    return set;
}

RisPhaseConfig RisPhaseConfig::from_phases(const arma::vec &phases) {
    RisPhaseConfig cfg;
    cfg.phases = phases;
    cfg.phasors.set_size(phases.n_elem);
    for (arma::uword i = 0; i < phases.n_elem; ++i)
        cfg.phasors(i) = std::polar(1.0, phases(i));
    return cfg;
}

RisPhaseConfig RisPhaseConfig::random(arma::uword n_elements, const arma::vec &phase_set,
                                      Rng &rng) {
    if (phase_set.n_elem == 0)
        throw std::invalid_argument("phase set must not be empty");
    arma::vec phases(n_elements);
    for (arma::uword i = 0; i < n_elements; ++i)
        phases(i) = phase_set(rng.uniform_index(phase_set.n_elem));
    return from_phases(phases);
}

RisPhaseConfig RisPhaseConfig::identity(arma::uword n_elements) {
    return from_phases(arma::vec(n_elements, arma::fill::zeros));
}

} // namespace rismimo
