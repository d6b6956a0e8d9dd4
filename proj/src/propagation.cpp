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

#include "trsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trsim/fft.hpp"

namespace trsim {

namespace {

// Below this output length the direct sum beats the three padded transforms.
constexpr std::size_t kDirectThreshold = 96;

}  // namespace

cvec convolve(std::span<const cdouble> a, std::span<const cdouble> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("convolve: inputs must be non-empty");
    cvec out(a.size() + b.size() - 1, cdouble(0.0, 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        const cdouble ai = a[i];
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b[j];
    }
    return out;
}

cvec convolve_fast(std::span<const cdouble> a, std::span<const cdouble> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("convolve_fast: inputs must be non-empty");
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t p = fft::next_pow2(out_len);

    cvec fa(p, cdouble(0.0, 0.0));
    std::copy(a.begin(), a.end(), fa.begin());
    cvec fb(p, cdouble(0.0, 0.0));
    std::copy(b.begin(), b.end(), fb.begin());

    fft::transform_pow2(fa, false);
    fft::transform_pow2(fb, false);
    for (std::size_t i = 0; i < p; ++i) fa[i] *= fb[i];
    fft::transform_pow2(fa, true);

    fa.resize(out_len);
    return fa;
}

cvec convolve_auto(std::span<const cdouble> a, std::span<const cdouble> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("convolve_auto: inputs must be non-empty");
    const std::size_t out_len = a.size() + b.size() - 1;
    return out_len < kDirectThreshold ? convolve(a, b) : convolve_fast(a, b);
}

void validate_links(const std::vector<UserLink> &links) {
    if (links.empty()) throw std::invalid_argument("links: need at least one user");
    const std::size_t n = links.front().cir.taps.size();
    for (std::size_t a = 0; a < links.size(); ++a)
        for (std::size_t b = a + 1; b < links.size(); ++b)
            if (links[a].user_id == links[b].user_id)
                throw std::invalid_argument("links: duplicate user_id " +
                                            std::to_string(links[a].user_id));
    for (const UserLink &link : links) {
        validate_cir(link.cir);
        if (link.cir.taps.size() != n)
            throw std::invalid_argument("links: mixed channel tap counts");
        if (link.prefilter.taps.size() != n)
            throw std::invalid_argument("links: prefilter length does not match channel");
        if (!link.prefilter.normalized)
            throw std::invalid_argument("links: prefilter for user " +
                                        std::to_string(link.user_id) + " is not normalized");
        if (link.prefilter.source_id != link.cir.id)
            throw std::invalid_argument("links: prefilter source '" + link.prefilter.source_id +
                                        "' does not match channel '" + link.cir.id + "'");
    }
}

RxSignal receive(std::span<const cdouble> tx, const std::vector<UserLink> &links,
                 std::size_t target_user) {
    validate_links(links);
    std::size_t target = links.size();
    for (std::size_t k = 0; k < links.size(); ++k)
        if (links[k].user_id == target_user) target = k;
    if (target == links.size())
        throw std::invalid_argument("receive: no link for user " + std::to_string(target_user));

    const std::size_t n = links.front().cir.taps.size();
    if (tx.size() != n)
        throw std::invalid_argument("receive: tx length does not match the links");

    // Re-derive the composite normalization from the links themselves.
    cvec sum(n, cdouble(0.0, 0.0));
    for (const UserLink &link : links)
        for (std::size_t i = 0; i < n; ++i) sum[i] += link.prefilter.taps[i];
    double e = 0.0;
    for (const cdouble &t : sum) e += std::norm(t);
    if (e == 0.0) throw degenerate_sum_error("receive: prefilters cancel to zero");
    const double scale = 1.0 / std::sqrt(e);

    double max_diff = 0.0;
    double max_mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max_diff = std::max(max_diff, std::abs(tx[i] - sum[i] * scale));
        max_mag = std::max(max_mag, std::abs(tx[i]));
    }
    if (max_diff > 1e-9 * std::max(1.0, max_mag))
        throw std::invalid_argument("receive: tx is not the composite of these links' prefilters");

    const cvec &h = links[target].cir.taps;
    const std::size_t out_len = 2 * n - 1;

    RxSignal rx;
    rx.user_id = target_user;

    if (out_len < kDirectThreshold || links.size() == 1) {
        cvec scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = links[target].prefilter.taps[i] * scale;
        rx.signal_part = convolve_auto(scaled, h);
        rx.interference_part.assign(out_len, cdouble(0.0, 0.0));
        for (std::size_t k = 0; k < links.size(); ++k) {
            if (k == target) continue;
            for (std::size_t i = 0; i < n; ++i) scaled[i] = links[k].prefilter.taps[i] * scale;
            const cvec part = convolve_auto(scaled, h);
            for (std::size_t i = 0; i < out_len; ++i) rx.interference_part[i] += part[i];
        }
    } else {
        // One transform of the channel, one per prefilter, two inverses.
        const std::size_t p = fft::next_pow2(out_len);
        cvec ch(p, cdouble(0.0, 0.0));
        std::copy(h.begin(), h.end(), ch.begin());
        fft::transform_pow2(ch, false);

        cvec sig_spec;
        cvec interf_spec(p, cdouble(0.0, 0.0));
        cvec work(p);
        for (std::size_t k = 0; k < links.size(); ++k) {
            std::fill(work.begin(), work.end(), cdouble(0.0, 0.0));
            for (std::size_t i = 0; i < n; ++i) work[i] = links[k].prefilter.taps[i] * scale;
            fft::transform_pow2(work, false);
            if (k == target) {
                sig_spec = work;
                for (std::size_t i = 0; i < p; ++i) sig_spec[i] *= ch[i];
            } else {
                for (std::size_t i = 0; i < p; ++i) interf_spec[i] += work[i] * ch[i];
            }
        }
        fft::transform_pow2(sig_spec, true);
        sig_spec.resize(out_len);
        rx.signal_part = std::move(sig_spec);
        fft::transform_pow2(interf_spec, true);
        interf_spec.resize(out_len);
        rx.interference_part = std::move(interf_spec);
    }

    rx.samples.resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i)
        rx.samples[i] = rx.signal_part[i] + rx.interference_part[i];
    return rx;
}

}  // namespace trsim
