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
#include <string>
#include <vector>

#include "trsim/channel.hpp"
#include "trsim/metrics.hpp"

namespace trsim {

// One point of a shift sweep: a direction and a percentage of the filter
// length. (none, 0) is the unshifted reference point.
struct GridPoint {
    ShiftDirection direction = ShiftDirection::none;
    double percent = 0.0;
};

// --- single-user peak sweep -------------------------------------------

// Peak powers across a shift grid for one channel, normalized by that
// channel's unshifted peak power. Parallel to the grid.
struct PeakVsShiftTrace {
    std::string cir_id;
    std::vector<double> norm_signal_peak_power;
    std::vector<double> norm_image_peak_power;
};

struct PeakVsShiftResult {
    std::vector<GridPoint> grid;
    std::vector<PeakVsShiftTrace> traces;  // ensemble order
    PeakVsShiftTrace average;              // per-point mean over traces, id "_avg"
    std::vector<std::string> warnings;
};

PeakVsShiftResult run_peak_vs_shift(const ChannelEnsemble &ensemble,
                                    const std::vector<GridPoint> &grid, unsigned workers = 1);

// --- multiuser SIR sweep ----------------------------------------------

struct UserShift {
    ShiftDirection direction = ShiftDirection::none;
    double percent = 0.0;
};

// Per-user shift assignment, indexed by user (user k gets users[k]).
struct ShiftSchedule {
    std::vector<UserShift> users;
};

// Staggered assignment 0, step, 2*step, ... percent in one direction.
// Percent 0 collapses to none. step_percent * (n_users - 1) must stay
// below 100.
ShiftSchedule staggered_schedule(std::size_t n_users, double step_percent,
                                 ShiftDirection direction);

void validate_schedule(const ShiftSchedule &schedule, std::size_t n_users);

// Aggregates over all sampled channel subsets for one user at one sweep
// point. sir_db is in subset order; infinite entries (zero interference)
// are excluded from mean_finite_db and counted separately.
struct UserSirStats {
    std::vector<double> sir_db;
    std::size_t infinite_count = 0;
    double median_db = 0.0;
    double mean_finite_db = 0.0;
    double p10_db = 0.0;  // nearest-rank percentiles over all samples
    double p90_db = 0.0;
};

struct SweepCell {
    GridPoint point;
    std::vector<UserSirStats> users;  // user order
};

struct MultiuserSirParams {
    std::size_t n_users = 5;
    ShiftSchedule schedule;            // shifts for users 0 .. n_users-1
    std::vector<GridPoint> sweep;      // overrides the LAST user's shift
    std::uint64_t combination_budget = 1085;
    std::uint64_t subset_seed = 1;
};

struct MultiuserSirResult {
    std::size_t n_users = 0;
    std::vector<std::vector<std::uint32_t>> subsets;  // ensemble indices, ascending
    std::vector<SweepCell> cells;                     // sweep order
    std::vector<std::string> warnings;
};

// Assigns n_users channels per sampled subset (subset order = user order),
// builds the scheduled prefilters with the last user's shift swept over
// params.sweep, and measures every user's SIR at its own Signal peak.
// Channel subsets are shared across all sweep points, so cells are paired.
MultiuserSirResult run_multiuser_sir(const ChannelEnsemble &ensemble,
                                     const MultiuserSirParams &params, unsigned workers = 1);

// --- deterministic subset sampling (exposed for testing) ----------------

// Binomial coefficient, saturating at 2^63 instead of overflowing. Exact
// whenever the true value fits below the cap.
std::uint64_t binomial_count(std::uint64_t n, std::uint64_t k);

// rank-th k-subset of {0..n-1} in lexicographic order, ascending elements.
std::vector<std::uint32_t> combination_unrank(std::uint64_t rank, std::uint32_t n,
                                              std::uint32_t k);

// First `budget` entries of a seeded Fisher-Yates shuffle of the full
// lexicographic enumeration, computed sparsely in O(budget) memory. When
// budget exceeds the number of distinct subsets it is clamped and a warning
// is appended (if warnings is non-null).
std::vector<std::vector<std::uint32_t>> sample_combinations(std::uint32_t n, std::uint32_t k,
                                                            std::uint64_t budget,
                                                            std::uint64_t seed,
                                                            std::vector<std::string> *warnings);

}  // namespace trsim
