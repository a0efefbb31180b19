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

#include "rismimo/rng.hpp"

namespace rismimo {

/// The 2^bits uniformly spaced reflection angles a b-bit RIS element can apply.
arma::vec quantized_phase_set(int phase_bits);

/// One reflection state of the surface: per-element phase angles plus the
/// matching unit-modulus phasors (the diagonal of the reflection matrix).
struct RisPhaseConfig {
    arma::vec phases;     // radians, members of the declared quantized set
    arma::cx_vec phasors; // e^{i*phase}, modulus 1

    static RisPhaseConfig from_phases(const arma::vec &phases);
    static RisPhaseConfig random(arma::uword n_elements, const arma::vec &phase_set, Rng &rng);
    static RisPhaseConfig identity(arma::uword n_elements); // all phases 0
};

} // namespace rismimo
