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

#include "trsim/precoder.hpp"

#include <cmath>
#include <stdexcept>

namespace trsim {

const char *to_string(ShiftDirection d) {
    switch (d) {
        case ShiftDirection::none: return "none";
        case ShiftDirection::left: return "left";
        case ShiftDirection::right: return "right";
    }
    throw std::invalid_argument("to_string: invalid ShiftDirection");
}

ShiftDirection shift_direction_from_string(std::string_view s) {
    if (s == "none") return ShiftDirection::none;
    if (s == "left") return ShiftDirection::left;
    if (s == "right") return ShiftDirection::right;
    throw std::invalid_argument("shift direction must be 'none', 'left' or 'right', got '" +
                                std::string(s) + "'");
}

void validate_shift(const ShiftSpec &spec, std::size_t n_taps) {
    if (n_taps < 1) throw std::invalid_argument("shift: n_taps must be >= 1");
    if (spec.direction == ShiftDirection::none) {
        if (spec.amount_taps != 0)
            throw std::invalid_argument("shift: amount must be 0 when direction is none");
        return;
    }
    if (spec.amount_taps < 1 || spec.amount_taps >= n_taps)
        throw std::invalid_argument("shift: amount must lie in [1, n_taps-1], got " +
                                    std::to_string(spec.amount_taps) + " for n_taps " +
                                    std::to_string(n_taps));
}

double Prefilter::energy() const {
    double e = 0.0;
    for (const cdouble &t : taps) e += std::norm(t);
    return e;
}

Prefilter time_reverse(const Cir &h) {
    validate_cir(h);
    const std::size_t n = h.taps.size();
    Prefilter p;
    p.taps.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.taps[i] = std::conj(h.taps[n - 1 - i]);
    p.source_id = h.id;
    return p;
}

Prefilter circular_shift(const Prefilter &p, const ShiftSpec &spec) {
    const std::size_t n = p.taps.size();
    if (n < 1) throw std::invalid_argument("circular_shift: empty prefilter");
    validate_shift(spec, n);
    validate_shift(p.shift, n);

    Prefilter out = p;
    if (spec.direction == ShiftDirection::none) return out;

    // Rotation as a net rightward offset; right l and left N-l coincide.
    const std::size_t delta = spec.direction == ShiftDirection::right
                                  ? spec.amount_taps
                                  : n - spec.amount_taps;
    for (std::size_t i = 0; i < n; ++i) out.taps[(i + delta) % n] = p.taps[i];

    std::size_t prior = 0;
    if (p.shift.direction == ShiftDirection::right)
        prior = p.shift.amount_taps;
    else if (p.shift.direction == ShiftDirection::left)
        prior = n - p.shift.amount_taps;
    const std::size_t net = (prior + delta) % n;

    if (net == 0)
        out.shift = ShiftSpec{ShiftDirection::none, 0};
    else if (spec.direction == ShiftDirection::left)
        out.shift = ShiftSpec{ShiftDirection::left, n - net};
    else
        out.shift = ShiftSpec{ShiftDirection::right, net};
    return out;
}

std::size_t percent_to_taps(double percent, std::size_t n_taps) {
    if (n_taps < 1) throw std::invalid_argument("percent_to_taps: n_taps must be >= 1");
    if (!(percent >= 0.0 && percent <= 100.0))
        throw std::invalid_argument("percent_to_taps: percent must lie in [0, 100]");
    const double raw = percent / 100.0 * double(n_taps);
    const auto rounded = std::size_t(std::llround(raw));  // rounds half away from zero
    return rounded > n_taps - 1 ? n_taps - 1 : rounded;
}

ShiftSpec shift_from_percent(ShiftDirection direction, double percent, std::size_t n_taps) {
    if (direction == ShiftDirection::none) {
        if (percent != 0.0)
            throw std::invalid_argument("shift_from_percent: percent must be 0 for none");
        return ShiftSpec{ShiftDirection::none, 0};
    }
    const std::size_t taps = percent_to_taps(percent, n_taps);
    if (taps == 0) return ShiftSpec{ShiftDirection::none, 0};
    return ShiftSpec{direction, taps};
}

Prefilter normalize_equal_power(const Prefilter &p) {
    if (p.taps.empty()) throw std::invalid_argument("normalize_equal_power: empty prefilter");
    const double e = p.energy();
    if (!std::isfinite(e))
        throw std::invalid_argument("normalize_equal_power: non-finite energy");
    if (e == 0.0)
        throw degenerate_channel_error("normalize_equal_power: zero-energy prefilter from '" +
                                       p.source_id + "'");
    Prefilter out = p;
    const double s = 1.0 / std::sqrt(e);
    for (cdouble &t : out.taps) t *= s;
    out.normalized = true;
    return out;
}

Prefilter build_prefilter(const Cir &h, const ShiftSpec &spec) {
    return circular_shift(normalize_equal_power(time_reverse(h)), spec);
}

cvec compose_transmit(const std::vector<Prefilter> &filters) {
    if (filters.empty()) throw std::invalid_argument("compose_transmit: no prefilters");
    const std::size_t n = filters.front().taps.size();
    for (const Prefilter &p : filters) {
        if (p.taps.size() != n)
            throw std::invalid_argument("compose_transmit: mixed prefilter lengths");
        if (!p.normalized)
            throw std::invalid_argument("compose_transmit: prefilter '" + p.source_id +
                                        "' is not normalized");
    }

    cvec sum(n, cdouble(0.0, 0.0));
    for (const Prefilter &p : filters)
        for (std::size_t i = 0; i < n; ++i) sum[i] += p.taps[i];

    double e = 0.0;
    for (const cdouble &t : sum) e += std::norm(t);
    if (e == 0.0) throw degenerate_sum_error("compose_transmit: prefilters cancel to zero");

    const double s = 1.0 / std::sqrt(e);
    for (cdouble &t : sum) t *= s;
    return sum;
}

}  // namespace trsim
