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

#include "trsim/fft.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace trsim::fft {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void transform_pow2(cvec &data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("transform_pow2: size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / double(len);
        const cdouble wlen(std::cos(ang), std::sin(ang));
        for (std::size_t base = 0; base < n; base += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cdouble u = data[base + k];
                const cdouble v = data[base + k + len / 2] * w;
                data[base + k] = u + v;
                data[base + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (inverse) {
        const double s = 1.0 / double(n);
        for (auto &x : data) x *= s;
    }
}

namespace {

// Chirp-z reduction: X_k = chirp_k * sum_m (x_m chirp_m) * conj(chirp_{k-m})
// with chirp_m = exp(sign*j*pi*m^2/n). The convolution runs on a circular
// grid of power-of-two size >= 2n-1, where negative lags wrap to the top.
cvec bluestein(const cvec &x, bool inverse) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    const std::size_t p = next_pow2(2 * n - 1);

    cvec chirp(n);
    for (std::size_t m = 0; m < n; ++m) {
        // m^2 reduced mod 2n keeps the phase argument small and exact.
        const std::uint64_t q = (std::uint64_t(m) * std::uint64_t(m)) % std::uint64_t(2 * n);
        const double ang = sign * std::numbers::pi * double(q) / double(n);
        chirp[m] = cdouble(std::cos(ang), std::sin(ang));
    }

    cvec a(p, cdouble(0.0, 0.0));
    for (std::size_t m = 0; m < n; ++m) a[m] = x[m] * chirp[m];

    cvec b(p, cdouble(0.0, 0.0));
    b[0] = std::conj(chirp[0]);
    for (std::size_t m = 1; m < n; ++m) {
        const cdouble v = std::conj(chirp[m]);
        b[m] = v;
        b[p - m] = v;
    }

    transform_pow2(a, false);
    transform_pow2(b, false);
    for (std::size_t i = 0; i < p; ++i) a[i] *= b[i];
    transform_pow2(a, true);

    cvec out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    if (inverse) {
        const double s = 1.0 / double(n);
        for (auto &v : out) v *= s;
    }
    return out;
}

}  // namespace

cvec dft(const cvec &x, bool inverse) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("dft: input must be non-empty");
    if ((n & (n - 1)) == 0) {
        cvec out = x;
        transform_pow2(out, inverse);
        return out;
    }
    return bluestein(x, inverse);
}

}  // namespace trsim::fft
