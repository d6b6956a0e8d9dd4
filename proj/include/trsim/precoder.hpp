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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "trsim/channel.hpp"
#include "trsim/common.hpp"

namespace trsim {

enum class ShiftDirection { none, left, right };

const char *to_string(ShiftDirection d);

// Parses "none" / "left" / "right"; throws std::invalid_argument otherwise.
ShiftDirection shift_direction_from_string(std::string_view s);

// A circular rotation applied to a prefilter. amount_taps must lie in
// [1, n_taps-1] when a direction is set and be exactly 0 for none, so every
// directed shift genuinely moves the filter.
struct ShiftSpec {
    ShiftDirection direction = ShiftDirection::none;
    std::size_t amount_taps = 0;
};

void validate_shift(const ShiftSpec &spec, std::size_t n_taps);

// Transmit-side filter derived from one channel. source_id names the Cir it
// was built from; shift records the net rotation applied so far.
struct Prefilter {
    cvec taps;
    std::string source_id;
    ShiftSpec shift;
    bool normalized = false;

    double energy() const;  // sum of |taps[i]|^2
};

// Matched filter for a channel: taps reversed in time and conjugated,
// out[i] = conj(h[N-1-i]). Not yet normalized or shifted.
Prefilter time_reverse(const Cir &h);

// Rotates the filter circularly. Right by l maps tap i to position
// (i + l) mod N; left by l is the inverse rotation. A pure permutation: the
// tap multiset, and so the energy, is unchanged. The result's shift field
// holds the net rotation, expressed in the direction applied last
// ((none, 0) when everything cancels).
Prefilter circular_shift(const Prefilter &p, const ShiftSpec &spec);

// Whole-tap shift for a percentage of the filter length: round(percent/100*N)
// half away from zero, clamped to [0, N-1]. percent must lie in [0, 100].
std::size_t percent_to_taps(double percent, std::size_t n_taps);

// ShiftSpec for a (direction, percent) pair; a zero-tap result collapses to
// (none, 0) so downstream invariants hold.
ShiftSpec shift_from_percent(ShiftDirection direction, double percent, std::size_t n_taps);

// Scales the filter to unit energy (equal transmit power across users).
// Throws degenerate_channel_error when the filter has zero energy.
Prefilter normalize_equal_power(const Prefilter &p);

// Canonical construction order for one user's filter:
// time-reverse, normalize, then shift.
Prefilter build_prefilter(const Cir &h, const ShiftSpec &spec);

// Element-wise sum of the (already normalized) per-user filters, rescaled so
// the composite has unit energy. Throws degenerate_sum_error on perfect
// cancellation.
cvec compose_transmit(const std::vector<Prefilter> &filters);

}  // namespace trsim
