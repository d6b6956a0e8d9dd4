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
#include <optional>
#include <vector>

#include "trsim/propagation.hpp"

namespace trsim {

// Peak readings of one received decomposition. A circularly shifted matched
// filter focuses the received energy at two instants: the "Signal" peak,
// where the taps the rotation left in place add coherently, and the "Image"
// peak, where the wrapped-around taps do. Both indices follow from the shift
// alone, so they are computed, not searched: a cross-term sidelobe can
// exceed the coherent peak, and an argmax would then read the wrong sample.
// argmax_matches_expected records whether the global argmax of
// |signal_part| happened to fall on the expected Signal index.
struct PeakReport {
    std::size_t signal_peak_index = 0;
    double signal_peak_power = 0.0;
    std::optional<std::size_t> image_peak_index;
    std::optional<double> image_peak_power;
    // Square of the coherent amplitude an unshifted filter would focus,
    // reconstructed as (|signal| + |image|)^2: rotation only splits the
    // matched-filter amplitude between the two peaks.
    double no_shift_peak_power = 0.0;
    bool argmax_matches_expected = false;
};

// Expected peak indices for a length-n channel under the given shift, on the
// 2n-1 sample convolution grid. With no shift the single peak sits at n-1;
// a right shift by l puts Signal at n-1+l and Image at l-1; a left shift by
// l puts Signal at n-1-l and Image at 2n-1-l. Signal and Image are always
// exactly n samples apart.
std::size_t expected_signal_index(const ShiftSpec &shift, std::size_t n_taps);
std::optional<std::size_t> expected_image_index(const ShiftSpec &shift, std::size_t n_taps);

// Reads the peaks of rx.signal_part for a user whose prefilter carried the
// given shift. n_taps is the channel length (rx holds 2*n_taps-1 samples).
PeakReport locate_peaks(const RxSignal &rx, const ShiftSpec &shift, std::size_t n_taps);

// Coherent Signal/Image peak amplitudes for a single channel and shift, with
// the prefilter built canonically (time-reverse, normalize, shift).
// signal_amp + image_amp equals the unshifted peak amplitude (the channel's
// root energy): the cross terms vanish identically at both peak indices.
struct SignalImageSplit {
    double signal_amp = 0.0;
    double image_amp = 0.0;
};

SignalImageSplit signal_image_split(const Cir &h, const ShiftSpec &shift);

// Signal-to-interference ratio measured at the Signal peak instant.
struct SirReport {
    std::size_t user_id = 0;
    double signal_power_at_peak = 0.0;
    double interference_power_at_peak = 0.0;
    double sir_db = 0.0;  // +inf when the interference sample is exactly 0
};

SirReport compute_sir(const RxSignal &rx, const PeakReport &peak);

// Right-continuous empirical distribution: probability is the fraction of
// values <= value, one point per finite sample (ties share the final step
// height). Infinite samples are excluded and counted; NaN is rejected.
struct CdfPoint {
    double value = 0.0;
    double probability = 0.0;
};

struct Cdf {
    std::vector<CdfPoint> points;
    std::size_t excluded_infinite = 0;
};

Cdf empirical_cdf(const std::vector<double> &values);

// Median with +/-inf participating in the ordering (the midpoint mean of an
// infinite and a finite value is infinite). values may be reordered.
double median(std::vector<double> values);

}  // namespace trsim
