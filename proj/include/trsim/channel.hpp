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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trsim/common.hpp"

namespace trsim {

// Discrete multipath channel impulse response. taps[i] is the complex gain
// of the path arriving i * tap_spacing seconds after the first bin.
struct Cir {
    cvec taps;
    double tap_spacing = 1.0;  // seconds per tap, > 0
    std::string id;

    double energy() const;  // sum of |taps[i]|^2
};

// Checks n_taps >= 1, finite taps, tap_spacing > 0. Throws
// std::invalid_argument naming the violated condition.
void validate_cir(const Cir &cir);

// Complex frequency response sampled on a uniform grid:
// gains[k] is the response at f_start + k * f_step.
struct FreqResponse {
    double f_start = 0.0;  // Hz
    double f_step = 0.0;   // Hz, > 0
    cvec gains;
};

// Builds a FreqResponse from explicit (frequency, gain) points. The grid
// must be strictly increasing and uniform to 1e-9 relative step tolerance.
FreqResponse freq_response_from_points(const std::vector<std::pair<double, cdouble>> &points);

// A set of responses measured or synthesized under one footing: identical
// tap count and spacing. seed is absent for ingested data.
struct ChannelEnsemble {
    std::vector<Cir> cirs;
    std::optional<std::int64_t> seed;

    std::size_t n_taps() const;
    double tap_spacing() const;
};

void validate_ensemble(const ChannelEnsemble &ensemble);

// Synthetic response with an exponential power decay profile:
//
//   taps[i] = g_i * exp(-(i - offset) / (2 * decay_constant))   i >= offset
//   taps[i] = g_i * noise_floor_amp                             i <  offset
//
// where g_i are i.i.d. CN(0,1) draws from a deterministic generator seeded
// with rng_seed. delay_offset_taps models the propagation delay before the
// first arrival that measured indoor responses show; noise_floor_amp sets
// the amplitude envelope of the pre-arrival bins. At the defaults (offset 0,
// floor 0) the profile is a pure exponential decaying from tap 0.
Cir generate_synthetic_cir(std::size_t n_taps, double decay_constant, std::uint64_t rng_seed,
                           std::size_t delay_offset_taps = 0, double noise_floor_amp = 0.0);

// Default tap spacing: a 580-bin response covering a 580 x 2.24 MHz
// measurement span has one tap per 1/(580 * 2.24e6) seconds.
inline constexpr double kDefaultTapSpacing = 1.0 / (580.0 * 2.24e6);

struct SyntheticEnsembleParams {
    std::size_t n_cirs = 35;
    std::size_t n_taps = 580;
    double decay_constant = 40.0;       // taps
    std::size_t delay_offset_taps = 105;
    double noise_floor_amp = 0.02;
    double tap_spacing = kDefaultTapSpacing;
    std::uint64_t seed = 1;
};

// Ensemble of independent synthetic responses. Element i uses the derived
// seed mix_seed(params.seed, i) and id "pos<i>" (zero padded), so any single
// element can be regenerated without the rest.
ChannelEnsemble generate_synthetic_ensemble(const SyntheticEnsembleParams &params);

// Tap sequence whose discrete Fourier transform equals the gain sequence
// (inverse transform of the gains). tap_spacing = 1 / (count * f_step).
// Requires at least 2 points.
Cir cir_from_freq_response(const FreqResponse &fr);

// Text file round-trip for ensembles ("CIRv1" format, see FORMATS.md).
// Values are written with full round-trip precision, so
// load(save(e)) == e exactly. Malformed input raises format_error naming
// the file and line. render_cir_file returns the file content; save writes
// it atomically.
std::string render_cir_file(const ChannelEnsemble &ensemble);
ChannelEnsemble load_cir_file(const std::string &path);
void save_cir_file(const ChannelEnsemble &ensemble, const std::string &path);

// Text file round-trip for frequency responses ("FRv1" format).
FreqResponse load_freq_response_file(const std::string &path);
void save_freq_response_file(const FreqResponse &fr, const std::string &path);

}  // namespace trsim
