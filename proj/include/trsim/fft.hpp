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

#include "trsim/common.hpp"

namespace trsim::fft {

// Smallest power of two >= n (and >= 1).
std::size_t next_pow2(std::size_t n);

// In-place iterative radix-2 transform. data.size() must be a power of two.
// Forward uses exp(-j*2*pi*n*k/N); inverse uses exp(+j*2*pi*n*k/N) and
// scales by 1/N, so inverse(forward(x)) == x up to rounding.
void transform_pow2(cvec &data, bool inverse);

// Discrete Fourier transform of arbitrary length, same conventions as
// transform_pow2. Power-of-two sizes go through the radix-2 path directly;
// other sizes use Bluestein's chirp-z reduction to a padded radix-2 pass.
cvec dft(const cvec &x, bool inverse);

}  // namespace trsim::fft
