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

#include "trsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trsim {

std::size_t expected_signal_index(const ShiftSpec &shift, std::size_t n_taps) {
    validate_shift(shift, n_taps);
    switch (shift.direction) {
        case ShiftDirection::none: return n_taps - 1;
        case ShiftDirection::right: return n_taps - 1 + shift.amount_taps;
        case ShiftDirection::left: return n_taps - 1 - shift.amount_taps;
    }
    throw std::invalid_argument("expected_signal_index: invalid direction");
}

std::optional<std::size_t> expected_image_index(const ShiftSpec &shift, std::size_t n_taps) {
    validate_shift(shift, n_taps);
    switch (shift.direction) {
        case ShiftDirection::none: return std::nullopt;
        case ShiftDirection::right: return shift.amount_taps - 1;
        case ShiftDirection::left: return 2 * n_taps - 1 - shift.amount_taps;
    }
    throw std::invalid_argument("expected_image_index: invalid direction");
}

PeakReport locate_peaks(const RxSignal &rx, const ShiftSpec &shift, std::size_t n_taps) {
    if (n_taps < 1) throw std::invalid_argument("locate_peaks: n_taps must be >= 1");
    const std::size_t out_len = 2 * n_taps - 1;
    if (rx.signal_part.size() != out_len)
        throw std::invalid_argument("locate_peaks: signal_part length does not match n_taps");

    PeakReport report;
    report.signal_peak_index = expected_signal_index(shift, n_taps);
    report.signal_peak_power = std::norm(rx.signal_part[report.signal_peak_index]);

    double no_shift_amp = std::abs(rx.signal_part[report.signal_peak_index]);
    if (const auto img = expected_image_index(shift, n_taps)) {
        report.image_peak_index = *img;
        report.image_peak_power = std::norm(rx.signal_part[*img]);
        no_shift_amp += std::abs(rx.signal_part[*img]);
    }
    report.no_shift_peak_power = no_shift_amp * no_shift_amp;

    std::size_t argmax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < out_len; ++i) {
        const double p = std::norm(rx.signal_part[i]);
        if (p > best) {
            best = p;
            argmax = i;
        }
    }
    report.argmax_matches_expected = argmax == report.signal_peak_index;
    return report;
}

SignalImageSplit signal_image_split(const Cir &h, const ShiftSpec &shift) {
    validate_cir(h);
    const std::size_t n = h.taps.size();
    validate_shift(shift, n);

    const Prefilter pf = build_prefilter(h, shift);
    const cvec y = convolve_auto(pf.taps, h.taps);

    SignalImageSplit split;
    split.signal_amp = std::abs(y[expected_signal_index(shift, n)]);
    if (const auto img = expected_image_index(shift, n)) split.image_amp = std::abs(y[*img]);
    return split;
}

SirReport compute_sir(const RxSignal &rx, const PeakReport &peak) {
    if (peak.signal_peak_index >= rx.signal_part.size() ||
        rx.interference_part.size() != rx.signal_part.size())
        throw std::invalid_argument("compute_sir: peak index outside the received signal");

    SirReport report;
    report.user_id = rx.user_id;
    report.signal_power_at_peak = std::norm(rx.signal_part[peak.signal_peak_index]);
    report.interference_power_at_peak = std::norm(rx.interference_part[peak.signal_peak_index]);
    if (report.interference_power_at_peak == 0.0)
        report.sir_db = std::numeric_limits<double>::infinity();
    else
        report.sir_db =
            10.0 * std::log10(report.signal_power_at_peak / report.interference_power_at_peak);
    return report;
}

Cdf empirical_cdf(const std::vector<double> &values) {
    if (values.empty()) throw std::invalid_argument("empirical_cdf: no values");

    Cdf cdf;
    std::vector<double> finite;
    finite.reserve(values.size());
    for (const double v : values) {
        if (std::isnan(v)) throw std::invalid_argument("empirical_cdf: NaN value");
        if (std::isinf(v))
            ++cdf.excluded_infinite;
        else
            finite.push_back(v);
    }
    if (finite.empty()) throw std::invalid_argument("empirical_cdf: no finite values");

    std::sort(finite.begin(), finite.end());
    const double n = double(finite.size());
    cdf.points.resize(finite.size());
    // Walk runs of equal values so ties share the final step height.
    std::size_t run_start = 0;
    for (std::size_t i = 0; i < finite.size(); ++i) {
        if (i + 1 < finite.size() && finite[i + 1] == finite[run_start]) continue;
        const double prob = double(i + 1) / n;
        for (std::size_t j = run_start; j <= i; ++j) cdf.points[j] = CdfPoint{finite[j], prob};
        run_start = i + 1;
    }
    return cdf;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: no values");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace trsim
