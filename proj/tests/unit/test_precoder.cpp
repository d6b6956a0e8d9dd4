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

#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "trsim/precoder.hpp"
#include "trsim/rng.hpp"

using trsim::cdouble;
using trsim::Cir;
using trsim::cvec;
using trsim::Prefilter;
using trsim::ShiftDirection;
using trsim::ShiftSpec;

namespace {

Cir make_cir(cvec taps, std::string id = "test") {
    Cir cir;
    cir.taps = std::move(taps);
    cir.tap_spacing = 1.0;
    cir.id = std::move(id);
    return cir;
}

Prefilter make_prefilter(cvec taps) {
    Prefilter p;
    p.taps = std::move(taps);
    p.source_id = "test";
    return p;
}

cvec random_taps(trsim::Rng &rng, std::size_t n) {
    cvec taps(n);
    for (auto &t : taps) t = rng.complex_normal();
    return taps;
}

// Exact multiset equality of taps: a circular shift must permute, never
// alter, the values.
bool same_tap_multiset(cvec a, cvec b) {
    auto key = [](const cdouble &x, const cdouble &y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    };
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    return a == b;
}

}  // namespace

TEST_CASE("time reversal conjugates and reverses") {
    const Cir h = make_cir({cdouble(1, 2), cdouble(3, -1)});
    const Prefilter p = trsim::time_reverse(h);
    REQUIRE(p.taps.size() == 2);
    CHECK(p.taps[0] == cdouble(3, 1));
    CHECK(p.taps[1] == cdouble(1, -2));
    CHECK(p.source_id == "test");
    CHECK_FALSE(p.normalized);
    CHECK(p.shift.direction == ShiftDirection::none);

    const Cir single = make_cir({cdouble(0, -5)});
    CHECK(trsim::time_reverse(single).taps[0] == cdouble(0, 5));
}

TEST_CASE("time reversal is an involution on the taps") {
    trsim::Rng rng(21);
    for (const std::size_t n : {1u, 2u, 7u, 32u}) {
        const Cir h = make_cir(random_taps(rng, n));
        const Prefilter once = trsim::time_reverse(h);
        const Prefilter twice = trsim::time_reverse(make_cir(once.taps));
        CHECK(twice.taps == h.taps);  // conj and reverse both cancel exactly
    }
}

TEST_CASE("circular shift rotates as labeled") {
    cvec taps;
    for (int i = 0; i < 7; ++i) taps.push_back(cdouble(double(i), 0.0));
    const Prefilter p = make_prefilter(taps);

    const Prefilter right3 = trsim::circular_shift(p, ShiftSpec{ShiftDirection::right, 3});
    const cvec want_right = {cdouble(4, 0), cdouble(5, 0), cdouble(6, 0), cdouble(0, 0),
                             cdouble(1, 0), cdouble(2, 0), cdouble(3, 0)};
    CHECK(right3.taps == want_right);
    CHECK(right3.shift.direction == ShiftDirection::right);
    CHECK(right3.shift.amount_taps == 3);

    const Prefilter left3 = trsim::circular_shift(p, ShiftSpec{ShiftDirection::left, 3});
    const cvec want_left = {cdouble(3, 0), cdouble(4, 0), cdouble(5, 0), cdouble(6, 0),
                            cdouble(0, 0), cdouble(1, 0), cdouble(2, 0)};
    CHECK(left3.taps == want_left);

    const Prefilter none = trsim::circular_shift(p, ShiftSpec{ShiftDirection::none, 0});
    CHECK(none.taps == p.taps);
}

TEST_CASE("opposite rotations of complementary amounts coincide") {
    trsim::Rng rng(22);
    const Prefilter p = make_prefilter(random_taps(rng, 11));
    for (std::size_t l = 1; l < 11; ++l) {
        const Prefilter right = trsim::circular_shift(p, ShiftSpec{ShiftDirection::right, l});
        const Prefilter left =
            trsim::circular_shift(p, ShiftSpec{ShiftDirection::left, 11 - l});
        CHECK(right.taps == left.taps);  // same permutation, exactly
        CHECK(same_tap_multiset(right.taps, p.taps));
    }
}

TEST_CASE("a shift and its inverse cancel") {
    trsim::Rng rng(23);
    const Prefilter p = make_prefilter(random_taps(rng, 9));
    const Prefilter there = trsim::circular_shift(p, ShiftSpec{ShiftDirection::right, 4});
    const Prefilter back = trsim::circular_shift(there, ShiftSpec{ShiftDirection::left, 4});
    CHECK(back.taps == p.taps);
    CHECK(back.shift.direction == ShiftDirection::none);
    CHECK(back.shift.amount_taps == 0);

    // Two rights compose into their sum.
    const Prefilter twice = trsim::circular_shift(there, ShiftSpec{ShiftDirection::right, 2});
    CHECK(twice.shift.direction == ShiftDirection::right);
    CHECK(twice.shift.amount_taps == 6);
}

TEST_CASE("shift amounts are bounded by the filter length") {
    const Prefilter p = make_prefilter(cvec(5, cdouble(1, 0)));
    CHECK_THROWS_AS(trsim::circular_shift(p, ShiftSpec{ShiftDirection::right, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(trsim::circular_shift(p, ShiftSpec{ShiftDirection::right, 5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(trsim::circular_shift(p, ShiftSpec{ShiftDirection::left, 6}),
                    std::invalid_argument);
    CHECK_THROWS_AS(trsim::circular_shift(p, ShiftSpec{ShiftDirection::none, 1}),
                    std::invalid_argument);
}

TEST_CASE("percent_to_taps rounds half away from zero and clamps") {
    CHECK(trsim::percent_to_taps(0.0, 580) == 0);
    CHECK(trsim::percent_to_taps(3.0, 580) == 17);    // 17.4 rounds down
    CHECK(trsim::percent_to_taps(40.0, 580) == 232);  // exact
    CHECK(trsim::percent_to_taps(25.0, 4) == 1);
    CHECK(trsim::percent_to_taps(25.0, 10) == 3);     // 2.5 rounds away from zero
    CHECK(trsim::percent_to_taps(100.0, 580) == 579); // clamped to n-1
    CHECK(trsim::percent_to_taps(100.0, 1) == 0);
    CHECK_THROWS_AS(trsim::percent_to_taps(-1.0, 580), std::invalid_argument);
    CHECK_THROWS_AS(trsim::percent_to_taps(101.0, 580), std::invalid_argument);
    CHECK_THROWS_AS(trsim::percent_to_taps(10.0, 0), std::invalid_argument);
}

TEST_CASE("shift_from_percent collapses zero-tap shifts to none") {
    const ShiftSpec s1 = trsim::shift_from_percent(ShiftDirection::right, 12.0, 580);
    CHECK(s1.direction == ShiftDirection::right);
    CHECK(s1.amount_taps == 70);  // 69.6 rounds to 70

    const ShiftSpec s2 = trsim::shift_from_percent(ShiftDirection::right, 0.0, 580);
    CHECK(s2.direction == ShiftDirection::none);
    CHECK(s2.amount_taps == 0);

    // 0.05% of 580 is 0.29 taps: rounds to zero, collapses to none.
    const ShiftSpec s3 = trsim::shift_from_percent(ShiftDirection::left, 0.05, 580);
    CHECK(s3.direction == ShiftDirection::none);

    CHECK_THROWS_AS(trsim::shift_from_percent(ShiftDirection::none, 5.0, 580),
                    std::invalid_argument);
}

TEST_CASE("normalization yields unit energy") {
    const Prefilter p = make_prefilter({cdouble(3, 0), cdouble(4, 0)});
    const Prefilter n = trsim::normalize_equal_power(p);
    CHECK(std::abs(n.taps[0] - cdouble(0.6, 0)) < 1e-15);
    CHECK(std::abs(n.taps[1] - cdouble(0.8, 0)) < 1e-15);
    CHECK(n.normalized);
    CHECK(std::abs(n.energy() - 1.0) < 1e-15);

    const Prefilter c = trsim::normalize_equal_power(make_prefilter({cdouble(1, 1), cdouble(0, 0)}));
    CHECK(std::abs(c.taps[0] - cdouble(1, 1) / std::sqrt(2.0)) < 1e-15);

    // Idempotent within rounding.
    const Prefilter again = trsim::normalize_equal_power(n);
    for (std::size_t i = 0; i < n.taps.size(); ++i)
        CHECK(std::abs(again.taps[i] - n.taps[i]) < 1e-15);
}

TEST_CASE("normalizing a zero filter reports a degenerate channel") {
    const Prefilter zero = make_prefilter(cvec(4, cdouble(0, 0)));
    CHECK_THROWS_AS(trsim::normalize_equal_power(zero), trsim::degenerate_channel_error);
}

TEST_CASE("build_prefilter applies reverse, normalize, shift in order") {
    const Cir h = make_cir({cdouble(2, 0), cdouble(1, 0)});
    const Prefilter p = trsim::build_prefilter(h, ShiftSpec{ShiftDirection::right, 1});
    // reversed: [1, 2]; normalized: [1, 2]/sqrt(5); right 1: [2, 1]/sqrt(5)
    const double s = 1.0 / std::sqrt(5.0);
    CHECK(std::abs(p.taps[0] - cdouble(2 * s, 0)) < 1e-15);
    CHECK(std::abs(p.taps[1] - cdouble(1 * s, 0)) < 1e-15);
    CHECK(p.normalized);
    CHECK(p.shift.direction == ShiftDirection::right);
    CHECK(p.source_id == "test");
}

TEST_CASE("composite keeps unit energy") {
    trsim::Rng rng(31);

    SUBCASE("single filter is returned rescaled only") {
        const Prefilter p = trsim::normalize_equal_power(make_prefilter(random_taps(rng, 16)));
        const cvec tx = trsim::compose_transmit({p});
        for (std::size_t i = 0; i < tx.size(); ++i)
            CHECK(std::abs(tx[i] - p.taps[i]) < 1e-12);
    }

    SUBCASE("orthogonal filters average their energy") {
        Prefilter e0 = make_prefilter({cdouble(1, 0), cdouble(0, 0)});
        Prefilter e1 = make_prefilter({cdouble(0, 0), cdouble(1, 0)});
        const cvec tx = trsim::compose_transmit(
            {trsim::normalize_equal_power(e0), trsim::normalize_equal_power(e1)});
        const double s = 1.0 / std::sqrt(2.0);
        CHECK(std::abs(tx[0] - cdouble(s, 0)) < 1e-15);
        CHECK(std::abs(tx[1] - cdouble(s, 0)) < 1e-15);
    }

    SUBCASE("random sets of one to five filters") {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t count = 1 + rng.uniform_below(5);
            const std::size_t n = 1 + rng.uniform_below(32);
            std::vector<Prefilter> filters;
            for (std::size_t k = 0; k < count; ++k)
                filters.push_back(trsim::normalize_equal_power(make_prefilter(random_taps(rng, n))));
            const cvec tx = trsim::compose_transmit(filters);
            double e = 0.0;
            for (const cdouble &t : tx) e += std::norm(t);
            CHECK(std::abs(e - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("composite rejects bad input sets") {
    trsim::Rng rng(32);
    const Prefilter a = trsim::normalize_equal_power(make_prefilter(random_taps(rng, 8)));
    const Prefilter b = trsim::normalize_equal_power(make_prefilter(random_taps(rng, 9)));
    CHECK_THROWS_AS(trsim::compose_transmit({a, b}), std::invalid_argument);

    const Prefilter raw = make_prefilter(random_taps(rng, 8));
    CHECK_THROWS_AS(trsim::compose_transmit({a, raw}), std::invalid_argument);
    CHECK_THROWS_AS(trsim::compose_transmit({}), std::invalid_argument);

    // Perfect cancellation is reported as a degenerate sum.
    Prefilter neg = a;
    for (auto &t : neg.taps) t = -t;
    CHECK_THROWS_AS(trsim::compose_transmit({a, neg}), trsim::degenerate_sum_error);
}
