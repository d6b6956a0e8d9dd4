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

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <doctest.h>

#include "trsim/channel.hpp"
#include "trsim/rng.hpp"
#include "trsim/textio.hpp"

namespace fs = std::filesystem;
using trsim::cdouble;
using trsim::ChannelEnsemble;
using trsim::Cir;
using trsim::cvec;
using trsim::FreqResponse;

namespace {

// Brute-force inverse transform oracle: x_m = (1/M) sum_k X_k e^{+j2pi km/M}.
// Written against the definition, independent of the transform code.
cvec brute_idft(const cvec &gains) {
    const std::size_t m_count = gains.size();
    cvec taps(m_count, cdouble(0.0, 0.0));
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t k = 0; k < m_count; ++k) {
            const double ang =
                2.0 * std::numbers::pi * double(k) * double(m) / double(m_count);
            taps[m] += gains[k] * cdouble(std::cos(ang), std::sin(ang));
        }
        taps[m] /= double(m_count);
    }
    return taps;
}

fs::path make_temp_dir(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("synthetic generation is deterministic in the seed") {
    const Cir a = trsim::generate_synthetic_cir(64, 8.0, 42);
    const Cir b = trsim::generate_synthetic_cir(64, 8.0, 42);
    REQUIRE(a.taps.size() == 64);
    CHECK(a.taps == b.taps);

    const Cir c = trsim::generate_synthetic_cir(64, 8.0, 43);
    CHECK(a.taps != c.taps);
}

TEST_CASE("synthetic generation validates its arguments") {
    CHECK_THROWS_AS(trsim::generate_synthetic_cir(0, 8.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(trsim::generate_synthetic_cir(8, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(trsim::generate_synthetic_cir(8, -2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(trsim::generate_synthetic_cir(8, 2.0, 1, 8), std::invalid_argument);
    CHECK_THROWS_AS(trsim::generate_synthetic_cir(8, 2.0, 1, 0, -0.1), std::invalid_argument);
}

TEST_CASE("exponential profile concentrates energy early") {
    // With decay constant 20 the power envelope e^{-i/20} holds ~99.3% of
    // its mass in the first 100 of 200 taps; averaged over many seeds the
    // sample fraction cannot drift below 90%.
    const int trials = 300;
    double fraction_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Cir cir = trsim::generate_synthetic_cir(200, 20.0, 1000 + std::uint64_t(t));
        double head = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < cir.taps.size(); ++i) {
            const double p = std::norm(cir.taps[i]);
            total += p;
            if (i < 100) head += p;
        }
        fraction_sum += head / total;
    }
    CHECK(fraction_sum / trials > 0.9);
}

TEST_CASE("per-tap mean power follows the decay envelope") {
    // Mean of |tap_i|^2 over draws is e^{-i/decay} exactly; with 20000 draws
    // the s.e. of each mean is env^2/sqrt(20000), so adjacent means must
    // order correctly well inside a five sigma band.
    const std::size_t n = 16;
    const double decay = 4.0;
    const int trials = 20000;
    std::vector<double> mean(n, 0.0);
    for (int t = 0; t < trials; ++t) {
        const Cir cir = trsim::generate_synthetic_cir(n, decay, 50000 + std::uint64_t(t));
        for (std::size_t i = 0; i < n; ++i) mean[i] += std::norm(cir.taps[i]) / trials;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double env_i = std::exp(-double(i) / decay);
        const double env_next = std::exp(-double(i + 1) / decay);
        // var(|g|^2) = 1 for CN(0,1), so var of the tap power is env^4.
        const double se = std::sqrt((env_i * env_i + env_next * env_next) / double(trials));
        CHECK(mean[i] > mean[i + 1] - 5.0 * se);
        CHECK(std::abs(mean[i] - env_i) < 5.0 * env_i / std::sqrt(double(trials)));
    }
}

TEST_CASE("delay offset moves the envelope without changing the draws") {
    const std::size_t n = 64;
    const double decay = 8.0;
    const std::size_t offset = 20;
    const double floor_amp = 0.01;
    const Cir plain = trsim::generate_synthetic_cir(n, decay, 7);
    const Cir delayed = trsim::generate_synthetic_cir(n, decay, 7, offset, floor_amp);

    // Same seed, same gain draws: after the offset the ratio to the plain
    // profile is the constant e^{offset/(2 decay)}.
    const double ratio = std::exp(double(offset) / (2.0 * decay));
    for (std::size_t i = offset; i < n; ++i) {
        CHECK(std::abs(delayed.taps[i] - plain.taps[i] * ratio) <=
              1e-12 * std::abs(delayed.taps[i]));
    }
    // Before the offset the envelope is the flat floor.
    for (std::size_t i = 0; i < offset; ++i) {
        const double env_plain = std::exp(-double(i) / (2.0 * decay));
        CHECK(std::abs(delayed.taps[i] - plain.taps[i] * (floor_amp / env_plain)) <=
              1e-12 * (std::abs(delayed.taps[i]) + 1e-300));
    }
}

TEST_CASE("ensembles assign derived seeds and padded ids") {
    trsim::SyntheticEnsembleParams params;
    params.n_cirs = 12;
    params.n_taps = 32;
    params.decay_constant = 5.0;
    params.delay_offset_taps = 0;
    params.noise_floor_amp = 0.0;
    params.seed = 9;
    const ChannelEnsemble ensemble = trsim::generate_synthetic_ensemble(params);
    REQUIRE(ensemble.cirs.size() == 12);
    CHECK(ensemble.cirs[0].id == "pos00");
    CHECK(ensemble.cirs[11].id == "pos11");
    CHECK(ensemble.n_taps() == 32);
    CHECK(ensemble.seed.has_value());

    // Element i depends only on (seed, i), not on the ensemble size.
    const Cir alone = trsim::generate_synthetic_cir(32, 5.0, trsim::mix_seed(9, 3));
    CHECK(ensemble.cirs[3].taps == alone.taps);
    CHECK(ensemble.cirs[0].taps != ensemble.cirs[1].taps);
}

TEST_CASE("ensemble validation rejects inconsistent members") {
    ChannelEnsemble e;
    e.cirs.push_back(Cir{cvec{cdouble(1, 0), cdouble(0, 0)}, 1.0, "a"});
    e.cirs.push_back(Cir{cvec{cdouble(1, 0)}, 1.0, "b"});
    CHECK_THROWS_AS(trsim::validate_ensemble(e), std::invalid_argument);

    e.cirs[1].taps = cvec{cdouble(1, 0), cdouble(2, 0)};
    e.cirs[1].tap_spacing = 2.0;
    CHECK_THROWS_AS(trsim::validate_ensemble(e), std::invalid_argument);

    e.cirs[1].tap_spacing = 1.0;
    CHECK_NOTHROW(trsim::validate_ensemble(e));

    ChannelEnsemble empty;
    CHECK_THROWS_AS(trsim::validate_ensemble(empty), std::invalid_argument);
}

TEST_CASE("flat spectrum transforms to an impulse") {
    FreqResponse fr;
    fr.f_start = 7e8;
    fr.f_step = 2.24e6;
    fr.gains.assign(16, cdouble(1.0, 0.0));
    const Cir cir = trsim::cir_from_freq_response(fr);
    REQUIRE(cir.taps.size() == 16);
    CHECK(std::abs(cir.taps[0] - cdouble(1.0, 0.0)) < 1e-12);
    for (std::size_t i = 1; i < 16; ++i) CHECK(std::abs(cir.taps[i]) < 1e-12);
    CHECK(cir.tap_spacing == doctest::Approx(1.0 / (16.0 * 2.24e6)).epsilon(1e-12));
}

TEST_CASE("linear spectral phase shifts the impulse") {
    // Gains e^{-j*2*pi*k*3/M} put the unit tap at index 3.
    const std::size_t m_count = 20;
    FreqResponse fr;
    fr.f_step = 1e6;
    fr.gains.resize(m_count);
    for (std::size_t k = 0; k < m_count; ++k) {
        const double ang = -2.0 * std::numbers::pi * double(k) * 3.0 / double(m_count);
        fr.gains[k] = cdouble(std::cos(ang), std::sin(ang));
    }
    const Cir cir = trsim::cir_from_freq_response(fr);
    for (std::size_t i = 0; i < m_count; ++i) {
        const cdouble want = i == 3 ? cdouble(1.0, 0.0) : cdouble(0.0, 0.0);
        CHECK(std::abs(cir.taps[i] - want) < 1e-12);
    }
}

TEST_CASE("cir_from_freq_response matches the brute-force inverse transform") {
    trsim::Rng rng(77);
    for (const std::size_t m_count : {2u, 5u, 16u, 37u}) {
        FreqResponse fr;
        fr.f_step = 2.24e6;
        fr.gains.resize(m_count);
        for (auto &g : fr.gains) g = rng.complex_normal();

        const Cir cir = trsim::cir_from_freq_response(fr);
        const cvec want = brute_idft(fr.gains);
        REQUIRE(cir.taps.size() == m_count);
        for (std::size_t i = 0; i < m_count; ++i)
            CHECK(std::abs(cir.taps[i] - want[i]) < 1e-9);

        // Tap energy equals gain energy / M (Parseval).
        double tap_energy = 0.0;
        for (const cdouble &t : cir.taps) tap_energy += std::norm(t);
        double gain_energy = 0.0;
        for (const cdouble &g : fr.gains) gain_energy += std::norm(g);
        CHECK(std::abs(tap_energy - gain_energy / double(m_count)) <=
              1e-9 * std::max(1.0, tap_energy));
    }
}

TEST_CASE("cir_from_freq_response needs at least two points") {
    FreqResponse fr;
    fr.f_step = 1e6;
    fr.gains.assign(1, cdouble(1.0, 0.0));
    CHECK_THROWS_AS(trsim::cir_from_freq_response(fr), std::invalid_argument);
    fr.gains.assign(4, cdouble(1.0, 0.0));
    fr.f_step = 0.0;
    CHECK_THROWS_AS(trsim::cir_from_freq_response(fr), std::invalid_argument);
}

TEST_CASE("freq_response_from_points checks the grid") {
    using Points = std::vector<std::pair<double, cdouble>>;
    const Points good = {{1e9, cdouble(1, 0)}, {1.001e9, cdouble(0, 1)}, {1.002e9, cdouble(2, 0)}};
    const FreqResponse fr = trsim::freq_response_from_points(good);
    CHECK(fr.f_start == 1e9);
    CHECK(fr.f_step == doctest::Approx(1e6).epsilon(1e-12));
    REQUIRE(fr.gains.size() == 3);
    CHECK(fr.gains[1] == cdouble(0, 1));

    const Points non_uniform = {{1e9, cdouble(1, 0)}, {1.001e9, cdouble(1, 0)},
                                {1.0025e9, cdouble(1, 0)}};
    CHECK_THROWS_AS(trsim::freq_response_from_points(non_uniform), std::invalid_argument);
    const Points decreasing = {{1.001e9, cdouble(1, 0)}, {1e9, cdouble(1, 0)}};
    CHECK_THROWS_AS(trsim::freq_response_from_points(decreasing), std::invalid_argument);
    CHECK_THROWS_AS(trsim::freq_response_from_points(Points{{1e9, cdouble(1, 0)}}),
                    std::invalid_argument);
}

TEST_CASE("cir files round-trip exactly") {
    const fs::path dir = make_temp_dir("trsim_channel_io");
    trsim::SyntheticEnsembleParams params;
    params.n_cirs = 3;
    params.n_taps = 17;
    params.decay_constant = 4.0;
    params.delay_offset_taps = 2;
    params.noise_floor_amp = 0.05;
    params.seed = 21;
    const ChannelEnsemble original = trsim::generate_synthetic_ensemble(params);

    const std::string path = (dir / "ensemble.cir").string();
    trsim::save_cir_file(original, path);
    const ChannelEnsemble loaded = trsim::load_cir_file(path);

    REQUIRE(loaded.cirs.size() == original.cirs.size());
    CHECK(loaded.seed == original.seed);
    for (std::size_t c = 0; c < loaded.cirs.size(); ++c) {
        CHECK(loaded.cirs[c].id == original.cirs[c].id);
        CHECK(loaded.cirs[c].tap_spacing == original.cirs[c].tap_spacing);
        CHECK(loaded.cirs[c].taps == original.cirs[c].taps);  // bit-exact
    }
    fs::remove_all(dir);
}

TEST_CASE("freq response files round-trip exactly") {
    const fs::path dir = make_temp_dir("trsim_fr_io");
    trsim::Rng rng(3);
    FreqResponse fr;
    fr.f_start = 7e8;
    fr.f_step = 2.24e6;
    fr.gains.resize(11);
    for (auto &g : fr.gains) g = rng.complex_normal();

    const std::string path = (dir / "resp.fr").string();
    trsim::save_freq_response_file(fr, path);
    const FreqResponse loaded = trsim::load_freq_response_file(path);
    CHECK(loaded.f_start == fr.f_start);
    CHECK(loaded.f_step == fr.f_step);
    CHECK(loaded.gains == fr.gains);
    fs::remove_all(dir);
}

TEST_CASE("malformed cir files name the offending line") {
    const fs::path dir = make_temp_dir("trsim_channel_bad");
    auto write_and_load = [&](const std::string &content) {
        const std::string path = (dir / "bad.cir").string();
        trsim::atomic_write_file(path, content);
        return trsim::load_cir_file(path);
    };

    CHECK_THROWS_AS(write_and_load(""), trsim::format_error);
    CHECK_THROWS_AS(write_and_load("bogus header\n"), trsim::format_error);
    CHECK_THROWS_AS(write_and_load("CIRv1 n_taps=2 tap_spacing=1 count=1 seed=none\n"),
                    trsim::format_error);  // missing blocks
    CHECK_THROWS_AS(
        write_and_load("CIRv1 n_taps=2 tap_spacing=1 count=1 seed=none\nid=a\n1 0\n"),
        trsim::format_error);  // truncated tap list
    CHECK_THROWS_AS(
        write_and_load("CIRv1 n_taps=1 tap_spacing=1 count=1 seed=none\nid=a\n1 zebra\n"),
        trsim::format_error);  // bad number
    CHECK_THROWS_AS(
        write_and_load("CIRv1 n_taps=1 tap_spacing=1 count=1 seed=none\nid=a\n1 0\n1 0\n"),
        trsim::format_error);  // trailing content
    CHECK_THROWS_AS(
        write_and_load("CIRv1 n_taps=1 tap_spacing=0 count=1 seed=none\nid=a\n1 0\n"),
        trsim::format_error);  // zero spacing
    CHECK_THROWS_AS(
        write_and_load("CIRv1 n_taps=1 tap_spacing=1 count=1 seed=maybe\nid=a\n1 0\n"),
        trsim::format_error);  // bad seed

    // The error message carries the file path and a 1-based line number.
    try {
        write_and_load("CIRv1 n_taps=1 tap_spacing=1 count=1 seed=none\nid=a\nnope 0\n");
        FAIL("expected format_error");
    } catch (const trsim::format_error &e) {
        const std::string msg = e.what();
        CHECK(msg.find("bad.cir:3") != std::string::npos);
    }

    // Windows line endings parse identically.
    const std::string crlf = "CIRv1 n_taps=1 tap_spacing=1 count=1 seed=7\r\nid=a\r\n1 -2\r\n";
    const std::string path = (dir / "crlf.cir").string();
    trsim::atomic_write_file(path, crlf);
    const ChannelEnsemble loaded = trsim::load_cir_file(path);
    REQUIRE(loaded.cirs.size() == 1);
    CHECK(loaded.cirs[0].taps[0] == cdouble(1.0, -2.0));
    CHECK(loaded.seed == std::optional<std::int64_t>(7));
    fs::remove_all(dir);
}

TEST_CASE("loading a missing file is an io error") {
    CHECK_THROWS_AS(trsim::load_cir_file("/nonexistent/trsim/nope.cir"), trsim::io_error);
    CHECK_THROWS_AS(trsim::load_freq_response_file("/nonexistent/trsim/nope.fr"),
                    trsim::io_error);
}
