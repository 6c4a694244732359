// Copyright 2026 The pastq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// File formats. Doubles are written with 17 significant digits so that a
// record survives a write/read cycle bit for bit.

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "pastq/effect.hpp"
#include "pastq/filter.hpp"
#include "pastq/hmm.hpp"
#include "pastq/model.hpp"

namespace pastq::io {

std::string format_double(double x);
/// Strict full-string parse; throws SchemaError on trailing garbage.
double parse_double(std::string_view text);

/// CSV with header `step,t,dY` (diffusive) or `step,t,dN_1,...,dN_c`.
void write_record_csv(std::ostream& os, const MeasurementRecord& record);
/// Sidecar: kind, dt, n_steps, seed, model_fingerprint, n_channels, scenario.
nlohmann::json record_metadata(const MeasurementRecord& record, const nlohmann::json& scenario);
/// Builds a record from CSV text plus its sidecar, validating both.
MeasurementRecord read_record(std::istream& csv, const nlohmann::json& metadata);

void save_record(const std::filesystem::path& csv_path, const std::filesystem::path& json_path,
                 const MeasurementRecord& record, const nlohmann::json& scenario);
MeasurementRecord load_record(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

/// Columns: t, log_norm, then re/im pairs m<r>_<c>_re, m<r>_<c>_im in row-major order.
void write_trajectory_csv(std::ostream& os, const StateTrajectory& traj);
void write_trajectory_csv(std::ostream& os, const EffectTrajectory& traj);

nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
/// Fields missing from `j` keep their values from `base`; unknown fields are a
/// SchemaError so that typos cannot silently fall back to defaults.
ScenarioConfig scenario_from_json(const nlohmann::json& j, const ScenarioConfig& base = {});

/// {"transition": [[...]], "emission": [[...]], "initial": [...]}, rows are
/// conditioned on the current hidden state.
nlohmann::json hmm_to_json(const HmmModel& model);
HmmModel hmm_from_json(const nlohmann::json& j);
Observations observations_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pastq::io
