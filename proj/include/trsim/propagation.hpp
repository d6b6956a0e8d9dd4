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
#include <span>
#include <vector>

#include "trsim/common.hpp"
#include "trsim/precoder.hpp"

namespace trsim {

// What one user receives during a simultaneous transmission, decomposed into
// the contribution of that user's own prefilter and everyone else's, both
// propagated through that user's channel. samples = signal + interference
// element-wise.
struct RxSignal {
    std::size_t user_id = 0;
    cvec samples;
    cvec signal_part;
    cvec interference_part;
};

// Full linear convolution, out[k] = sum_i a[i] * b[k-i], length |a|+|b|-1.
// Direct O(n^2) accumulation; this is the reference path.
cvec convolve(std::span<const cdouble> a, std::span<const cdouble> b);

// Same result via zero-padded radix-2 transforms. Agrees with convolve()
// to far better than 1e-9 relative error at the sizes used here.
cvec convolve_fast(std::span<const cdouble> a, std::span<const cdouble> b);

// Dispatches between the direct and transform paths on output size.
cvec convolve_auto(std::span<const cdouble> a, std::span<const cdouble> b);

// One downlink in a simultaneous transmission: the channel to a user and
// the normalized (possibly shifted) prefilter intended for that user.
struct UserLink {
    std::size_t user_id = 0;
    Cir cir;
    Prefilter prefilter;
};

// Checks: non-empty, consistent tap counts, each prefilter normalized and
// built from its own link's channel (matching source_id).
void validate_links(const std::vector<UserLink> &links);

// Propagates the composite waveform tx through target_user's channel and
// splits the result by contributing prefilter. tx must be the output of
// compose_transmit over exactly these links' prefilters (checked to 1e-9);
// the composite scale is re-derived from the links so the split parts sum
// to the received samples exactly.
RxSignal receive(std::span<const cdouble> tx, const std::vector<UserLink> &links,
                 std::size_t target_user);

}  // namespace trsim
