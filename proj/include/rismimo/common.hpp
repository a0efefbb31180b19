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

#include <cmath>
#include <stdexcept>
#include <string>

namespace rismimo {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Raised for malformed or inconsistent run configuration (CLI exit code 2).
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string &msg) : std::runtime_error(msg) {}
};

/// Raised when a numeric consistency check fails at run time (CLI exit code 3).
class numeric_error : public std::runtime_error {
  public:
    explicit numeric_error(const std::string &msg) : std::runtime_error(msg) {}
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double dbw_to_watt(double dbw) { return std::pow(10.0, dbw / 10.0); }

} // namespace rismimo
