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
#include <cstdint>
#include <initializer_list>
#include <random>

namespace rismimo {

/// SplitMix64 finalizer, used to derive statistically independent substream
/// seeds from a (master seed, path) key. Counter-based: the same key always
/// yields the same stream, independent of how many other streams exist.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Explicit-state random source. Every stochastic operation in the library
/// takes one of these by reference; there is no hidden global generator.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Stream for (master seed, path). Trials use {kTrialStream, trial index}
    /// so results do not depend on worker count or scheduling order.
    static Rng substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t s = splitmix64(master_seed);
        for (std::uint64_t id : path)
            s = splitmix64(s ^ id);
        return Rng(s);
    }

    double uniform() { return unit_(engine_); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }

    std::uint64_t uniform_index(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    double standard_normal() { return normal_(engine_); }

    /// CN(0, variance) vector: real and imaginary parts each N(0, variance/2).
    arma::cx_vec complex_gaussian_vec(arma::uword n, double variance) {
        const double s = std::sqrt(variance / 2.0);
        arma::cx_vec v(n);
        for (arma::uword i = 0; i < n; ++i)
            v(i) = std::complex<double>(s * normal_(engine_), s * normal_(engine_));
        return v;
    }

    arma::cx_mat complex_gaussian_mat(arma::uword rows, arma::uword cols, double variance) {
        const double s = std::sqrt(variance / 2.0);
        arma::cx_mat m(rows, cols);
        for (arma::uword j = 0; j < cols; ++j)
            for (arma::uword i = 0; i < rows; ++i)
                m(i, j) = std::complex<double>(s * normal_(engine_), s * normal_(engine_));
        return m;
    }

    std::mt19937_64 &engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Stream path tags.
inline constexpr std::uint64_t kSetupStream = 1;
inline constexpr std::uint64_t kTrialStream = 2;

} // namespace rismimo
