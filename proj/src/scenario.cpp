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

#include "trsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "trsim/parallel.hpp"
#include "trsim/rng.hpp"

namespace trsim {

namespace {

constexpr std::uint64_t kBinomialCap = 1ull << 63;

// Rethrows any failure for one channel with the channel's id prepended, so
// ensemble-level errors identify the element that caused them.
template <typename Fn>
void with_cir_context(const std::string &id, Fn &&fn) {
    try {
        fn();
    } catch (const std::exception &e) {
        throw std::runtime_error("cir '" + id + "': " + e.what());
    }
}

void validate_grid(const std::vector<GridPoint> &grid) {
    if (grid.empty()) throw std::invalid_argument("grid: needs at least one point");
    for (const GridPoint &g : grid) {
        if (!(g.percent >= 0.0 && g.percent <= 100.0))
            throw std::invalid_argument("grid: percent must lie in [0, 100]");
        if (g.direction == ShiftDirection::none && g.percent != 0.0)
            throw std::invalid_argument("grid: percent must be 0 when direction is none");
    }
}

double nearest_rank_percentile(std::vector<double> sorted_values, double pct) {
    const std::size_t n = sorted_values.size();
    std::size_t rank = std::size_t(std::ceil(pct / 100.0 * double(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return sorted_values[rank - 1];
}

UserSirStats summarize(std::vector<double> sir_db) {
    UserSirStats stats;
    stats.sir_db = std::move(sir_db);

    double finite_sum = 0.0;
    std::size_t finite_count = 0;
    for (const double v : stats.sir_db) {
        if (std::isinf(v)) {
            ++stats.infinite_count;
        } else {
            finite_sum += v;
            ++finite_count;
        }
    }
    stats.mean_finite_db = finite_count == 0 ? std::numeric_limits<double>::infinity()
                                             : finite_sum / double(finite_count);

    std::vector<double> sorted = stats.sir_db;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    stats.median_db =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    stats.p10_db = nearest_rank_percentile(sorted, 10.0);
    stats.p90_db = nearest_rank_percentile(sorted, 90.0);
    return stats;
}

}  // namespace

PeakVsShiftResult run_peak_vs_shift(const ChannelEnsemble &ensemble,
                                    const std::vector<GridPoint> &grid, unsigned workers) {
    validate_ensemble(ensemble);
    validate_grid(grid);
    const std::size_t n = ensemble.n_taps();

    PeakVsShiftResult result;
    result.grid = grid;
    result.traces.resize(ensemble.cirs.size());

    parallel_for(ensemble.cirs.size(), workers, [&](std::size_t c) {
        const Cir &h = ensemble.cirs[c];
        with_cir_context(h.id, [&]() {
            PeakVsShiftTrace trace;
            trace.cir_id = h.id;
            trace.norm_signal_peak_power.resize(grid.size());
            trace.norm_image_peak_power.resize(grid.size());

            // The unshifted peak amplitude (the channel's root energy) is
            // the normalizer for this trace.
            const double ref_amp =
                signal_image_split(h, ShiftSpec{ShiftDirection::none, 0}).signal_amp;
            const double ref_power = ref_amp * ref_amp;
            if (ref_power == 0.0)
                throw degenerate_channel_error("zero-energy channel");

            for (std::size_t g = 0; g < grid.size(); ++g) {
                const ShiftSpec spec =
                    shift_from_percent(grid[g].direction, grid[g].percent, n);
                const SignalImageSplit split = signal_image_split(h, spec);
                trace.norm_signal_peak_power[g] =
                    split.signal_amp * split.signal_amp / ref_power;
                trace.norm_image_peak_power[g] =
                    split.image_amp * split.image_amp / ref_power;
            }
            result.traces[c] = std::move(trace);
        });
    });

    result.average.cir_id = "_avg";
    result.average.norm_signal_peak_power.assign(grid.size(), 0.0);
    result.average.norm_image_peak_power.assign(grid.size(), 0.0);
    for (const PeakVsShiftTrace &trace : result.traces) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            result.average.norm_signal_peak_power[g] += trace.norm_signal_peak_power[g];
            result.average.norm_image_peak_power[g] += trace.norm_image_peak_power[g];
        }
    }
    const double count = double(result.traces.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        result.average.norm_signal_peak_power[g] /= count;
        result.average.norm_image_peak_power[g] /= count;
    }
    return result;
}

ShiftSchedule staggered_schedule(std::size_t n_users, double step_percent,
                                 ShiftDirection direction) {
    if (n_users < 1) throw std::invalid_argument("staggered_schedule: n_users must be >= 1");
    if (!(step_percent >= 0.0))
        throw std::invalid_argument("staggered_schedule: step_percent must be >= 0");
    if (step_percent * double(n_users - 1) >= 100.0)
        throw std::invalid_argument("staggered_schedule: schedule exceeds the filter length");

    ShiftSchedule schedule;
    schedule.users.resize(n_users);
    for (std::size_t u = 0; u < n_users; ++u) {
        const double pct = step_percent * double(u);
        schedule.users[u] =
            pct == 0.0 ? UserShift{ShiftDirection::none, 0.0} : UserShift{direction, pct};
    }
    return schedule;
}

void validate_schedule(const ShiftSchedule &schedule, std::size_t n_users) {
    if (schedule.users.size() != n_users)
        throw std::invalid_argument("schedule: needs one entry per user");
    for (const UserShift &s : schedule.users) {
        if (!(s.percent >= 0.0 && s.percent < 100.0))
            throw std::invalid_argument("schedule: percent must lie in [0, 100)");
        if (s.direction == ShiftDirection::none && s.percent != 0.0)
            throw std::invalid_argument("schedule: percent must be 0 when direction is none");
    }
}

std::uint64_t binomial_count(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i is integral at every step.
        const std::uint64_t num = n - k + i;
        if (result > kBinomialCap / num) return kBinomialCap;
        result = result * num / i;
        if (result >= kBinomialCap) return kBinomialCap;
    }
    return result;
}

std::vector<std::uint32_t> combination_unrank(std::uint64_t rank, std::uint32_t n,
                                              std::uint32_t k) {
    if (k > n) throw std::invalid_argument("combination_unrank: k must be <= n");
    if (k == 0) {
        if (rank != 0) throw std::invalid_argument("combination_unrank: rank out of range");
        return {};
    }
    if (rank >= binomial_count(n, k))
        throw std::invalid_argument("combination_unrank: rank out of range");

    std::vector<std::uint32_t> out;
    out.reserve(k);
    std::uint32_t next = 0;
    for (std::uint32_t pos = 0; pos < k; ++pos) {
        for (std::uint32_t x = next; x < n; ++x) {
            // Subsets starting with x continue with any (k-pos-1)-subset of
            // the values above x.
            const std::uint64_t block = binomial_count(n - 1 - x, k - pos - 1);
            if (rank < block) {
                out.push_back(x);
                next = x + 1;
                break;
            }
            rank -= block;
        }
    }
    return out;
}

std::vector<std::vector<std::uint32_t>> sample_combinations(std::uint32_t n, std::uint32_t k,
                                                            std::uint64_t budget,
                                                            std::uint64_t seed,
                                                            std::vector<std::string> *warnings) {
    if (k > n) throw std::invalid_argument("sample_combinations: k must be <= n");
    if (budget < 1) throw std::invalid_argument("sample_combinations: budget must be >= 1");

    const std::uint64_t count = binomial_count(n, k);
    std::uint64_t take = budget;
    if (take > count) {
        take = count;
        if (warnings)
            warnings->push_back("combination budget " + std::to_string(budget) +
                                " exceeds the " + std::to_string(count) +
                                " distinct subsets; clamped");
    }

    // Partial Fisher-Yates over the enumeration [0, count), storing only the
    // displaced entries, so memory stays O(take).
    Rng rng(seed);
    std::unordered_map<std::uint64_t, std::uint64_t> displaced;
    std::vector<std::vector<std::uint32_t>> out;
    out.reserve(take);
    for (std::uint64_t i = 0; i < take; ++i) {
        const std::uint64_t j = i + rng.uniform_below(count - i);
        const auto it_j = displaced.find(j);
        const std::uint64_t value_j = it_j == displaced.end() ? j : it_j->second;
        const auto it_i = displaced.find(i);
        const std::uint64_t value_i = it_i == displaced.end() ? i : it_i->second;
        displaced[j] = value_i;
        out.push_back(combination_unrank(value_j, n, k));
    }
    return out;
}

MultiuserSirResult run_multiuser_sir(const ChannelEnsemble &ensemble,
                                     const MultiuserSirParams &params, unsigned workers) {
    validate_ensemble(ensemble);
    if (params.n_users < 1)
        throw std::invalid_argument("run_multiuser_sir: n_users must be >= 1");
    if (ensemble.cirs.size() < params.n_users)
        throw std::invalid_argument("run_multiuser_sir: ensemble smaller than n_users");
    validate_schedule(params.schedule, params.n_users);
    validate_grid(params.sweep);
    const std::size_t n = ensemble.n_taps();
    const std::size_t n_users = params.n_users;

    MultiuserSirResult result;
    result.n_users = n_users;
    result.subsets =
        sample_combinations(std::uint32_t(ensemble.cirs.size()), std::uint32_t(n_users),
                            params.combination_budget, params.subset_seed, &result.warnings);
    const std::size_t n_subsets = result.subsets.size();
    const std::size_t n_cells = params.sweep.size();

    // sir[cell][user][subset]
    std::vector<std::vector<std::vector<double>>> sir(
        n_cells, std::vector<std::vector<double>>(n_users, std::vector<double>(n_subsets, 0.0)));

    parallel_for(n_subsets, workers, [&](std::size_t s) {
        const std::vector<std::uint32_t> &subset = result.subsets[s];

        // Shifts of users 0 .. n_users-2 are fixed across the sweep, so
        // their prefilters are built once per subset.
        std::vector<UserLink> links(n_users);
        std::vector<ShiftSpec> specs(n_users);
        for (std::size_t u = 0; u < n_users; ++u) {
            const Cir &h = ensemble.cirs[subset[u]];
            links[u].user_id = u;
            links[u].cir = h;
            if (u + 1 < n_users) {
                const UserShift &us = params.schedule.users[u];
                specs[u] = shift_from_percent(us.direction, us.percent, n);
                with_cir_context(h.id,
                                 [&]() { links[u].prefilter = build_prefilter(h, specs[u]); });
            }
        }

        for (std::size_t cell = 0; cell < n_cells; ++cell) {
            const GridPoint &point = params.sweep[cell];
            const std::size_t last = n_users - 1;
            specs[last] = shift_from_percent(point.direction, point.percent, n);
            with_cir_context(links[last].cir.id, [&]() {
                links[last].prefilter = build_prefilter(links[last].cir, specs[last]);
            });

            const cvec tx = compose_transmit([&links]() {
                std::vector<Prefilter> filters;
                filters.reserve(links.size());
                for (const UserLink &link : links) filters.push_back(link.prefilter);
                return filters;
            }());

            for (std::size_t u = 0; u < n_users; ++u) {
                const RxSignal rx = receive(tx, links, u);
                const PeakReport peak = locate_peaks(rx, specs[u], n);
                sir[cell][u][s] = compute_sir(rx, peak).sir_db;
            }
        }
    });

    result.cells.resize(n_cells);
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        result.cells[cell].point = params.sweep[cell];
        result.cells[cell].users.reserve(n_users);
        for (std::size_t u = 0; u < n_users; ++u)
            result.cells[cell].users.push_back(summarize(std::move(sir[cell][u])));
    }
    return result;
}

}  // namespace trsim
