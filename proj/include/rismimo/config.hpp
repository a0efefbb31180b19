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

#include <string>
#include <vector>

#include "rismimo/harness.hpp"

namespace rismimo {

/// Parse an INI-style `key = value` config (with optional [section] headers,
/// '#'/';' comments). Unknown keys and unknown sections are rejected by name;
/// keys missing their unit suffix get a targeted error. Missing keys keep the
/// documented defaults. The result is resolved (q_configs materialized) and
/// validated.
ExperimentConfig parse_config_text(const std::string &text);

/// Same, reading from a file. Throws config_error when the file is missing.
ExperimentConfig parse_config_file(const std::string &path);

/// Load without resolving, for use with overrides.
ExperimentConfig load_config_text(const std::string &text);

/// Apply `key=value` overrides (e.g. from --set flags), then call
/// resolve_config.
void apply_overrides(ExperimentConfig &cfg, const std::vector<std::string> &overrides);

/// Materialize derived defaults (q_configs) and validate ranges. Idempotent.
void resolve_config(ExperimentConfig &cfg);

/// Canonical serialization: fixed section and key order, full-precision
/// floats. parse(serialize(cfg)) reproduces cfg bit-exactly.
std::string serialize_config(const ExperimentConfig &cfg);

} // namespace rismimo
