// SPDX-License-Identifier: Apache-2.0
//
// trsim: multiuser time-reversal precoding simulator for discrete multipath channels
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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trsim/channel.hpp"
#include "trsim/precoder.hpp"

namespace trsim {

enum class ExperimentKind { peak_vs_shift, multiuser_sir, generate_ensemble, ingest_freq };

const char *to_string(ExperimentKind kind);

// Where the channel ensemble comes from: a CIRv1 file or the synthetic
// generator.
struct EnsembleSource {
    bool from_file = false;
    std::string path;  // when from_file
    SyntheticEnsembleParams synthetic;
    bool seed_explicit = false;  // config pinned its own ensemble seed
};

struct PeakVsShiftSettings {
    std::vector<ShiftDirection> directions = {ShiftDirection::right, ShiftDirection::left};
    std::vector<double> percents = {0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
};

struct MultiuserSirSettings {
    std::size_t n_users = 5;
    double schedule_step_percent = 3.0;
    std::vector<ShiftDirection> sweep_directions = {ShiftDirection::right, ShiftDirection::left};
    std::vector<double> sweep_percents = {12, 15, 18, 21, 24, 27, 30};
    bool include_plain_baseline = true;
    std::uint64_t combination_budget = 1085;
    std::optional<std::uint64_t> subset_seed;  // defaults to the run seed
};

struct IngestSettings {
    std::vector<std::string> inputs;  // FRv1 files
};

// Fully resolved run description. Defaults mirror the measurement geometry
// the synthetic ensemble imitates: 35 positions, 580 taps, five users at a
// 3 percent stagger, 1085 sampled subsets.
struct RunConfig {
    ExperimentKind experiment = ExperimentKind::peak_vs_shift;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    unsigned workers = 0;  // 0 = all hardware threads
    EnsembleSource ensemble;
    PeakVsShiftSettings peak_vs_shift;
    MultiuserSirSettings multiuser_sir;
    IngestSettings ingest;
};

// Parses and validates a JSON run config. Unknown keys, wrong types, and
// out-of-range values raise format_error naming the offending key path.
// Validation is complete before any computation starts.
RunConfig load_run_config(const std::string &path);
RunConfig run_config_from_json_text(const std::string &text, const std::string &origin);

// Canonical resolved form of the semantic config fields (sorted keys,
// round-trip number formatting). output_dir and workers are excluded: they
// cannot change result bytes. Equal digests imply byte-identical outputs.
std::string canonical_config_json(const RunConfig &config);
std::string config_digest(const RunConfig &config);

struct RunOutcome {
    std::vector<std::string> files;  // output names relative to output_dir
    std::string manifest_path;
    std::string config_digest;
    std::vector<std::string> warnings;
};

// Runs the configured experiment, writing CSV/data outputs plus a
// manifest.json that lists every file with its content digest. All writes
// are atomic; the manifest is written last.
RunOutcome run_experiment(const RunConfig &config);

}  // namespace trsim
