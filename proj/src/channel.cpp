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

#include "trsim/channel.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "trsim/fft.hpp"
#include "trsim/rng.hpp"
#include "trsim/textio.hpp"

namespace trsim {

double Cir::energy() const {
    double e = 0.0;
    for (const cdouble &t : taps) e += std::norm(t);
    return e;
}

void validate_cir(const Cir &cir) {
    if (cir.taps.empty()) throw std::invalid_argument("cir: needs at least one tap");
    if (!(cir.tap_spacing > 0.0) || !std::isfinite(cir.tap_spacing))
        throw std::invalid_argument("cir: tap_spacing must be finite and > 0");
    for (const cdouble &t : cir.taps) {
        if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
            throw std::invalid_argument("cir: taps must be finite");
    }
}

FreqResponse freq_response_from_points(const std::vector<std::pair<double, cdouble>> &points) {
    if (points.size() < 2)
        throw std::invalid_argument("freq_response_from_points: need at least 2 points");
    const double step = points[1].first - points[0].first;
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument("freq_response_from_points: grid must be increasing");
    for (std::size_t k = 1; k < points.size(); ++k) {
        const double d = points[k].first - points[k - 1].first;
        if (std::abs(d - step) > 1e-9 * std::abs(step))
            throw std::invalid_argument("freq_response_from_points: grid must be uniform");
    }
    FreqResponse fr;
    fr.f_start = points.front().first;
    fr.f_step = step;
    fr.gains.reserve(points.size());
    for (const auto &p : points) fr.gains.push_back(p.second);
    return fr;
}

std::size_t ChannelEnsemble::n_taps() const {
    if (cirs.empty()) throw std::invalid_argument("ensemble: empty");
    return cirs.front().taps.size();
}

double ChannelEnsemble::tap_spacing() const {
    if (cirs.empty()) throw std::invalid_argument("ensemble: empty");
    return cirs.front().tap_spacing;
}

void validate_ensemble(const ChannelEnsemble &ensemble) {
    if (ensemble.cirs.empty()) throw std::invalid_argument("ensemble: needs at least one cir");
    const std::size_t n = ensemble.cirs.front().taps.size();
    const double spacing = ensemble.cirs.front().tap_spacing;
    for (const Cir &c : ensemble.cirs) {
        validate_cir(c);
        if (c.taps.size() != n)
            throw std::invalid_argument("ensemble: mixed tap counts");
        if (c.tap_spacing != spacing)
            throw std::invalid_argument("ensemble: mixed tap spacings");
    }
}

Cir generate_synthetic_cir(std::size_t n_taps, double decay_constant, std::uint64_t rng_seed,
                           std::size_t delay_offset_taps, double noise_floor_amp) {
    if (n_taps < 1) throw std::invalid_argument("generate_synthetic_cir: n_taps must be >= 1");
    if (!(decay_constant > 0.0) || !std::isfinite(decay_constant))
        throw std::invalid_argument("generate_synthetic_cir: decay_constant must be > 0");
    if (delay_offset_taps >= n_taps)
        throw std::invalid_argument("generate_synthetic_cir: delay_offset_taps must be < n_taps");
    if (noise_floor_amp < 0.0 || !std::isfinite(noise_floor_amp))
        throw std::invalid_argument("generate_synthetic_cir: noise_floor_amp must be >= 0");

    Rng rng(rng_seed);
    Cir cir;
    cir.taps.resize(n_taps);
    for (std::size_t i = 0; i < n_taps; ++i) {
        const cdouble g = rng.complex_normal();
        const double env = i < delay_offset_taps
                               ? noise_floor_amp
                               : std::exp(-double(i - delay_offset_taps) / (2.0 * decay_constant));
        cir.taps[i] = g * env;
    }
    return cir;
}

ChannelEnsemble generate_synthetic_ensemble(const SyntheticEnsembleParams &params) {
    if (params.n_cirs < 1)
        throw std::invalid_argument("generate_synthetic_ensemble: n_cirs must be >= 1");
    if (!(params.tap_spacing > 0.0) || !std::isfinite(params.tap_spacing))
        throw std::invalid_argument("generate_synthetic_ensemble: tap_spacing must be > 0");

    std::size_t width = 1;
    for (std::size_t v = params.n_cirs - 1; v >= 10; v /= 10) ++width;

    ChannelEnsemble ensemble;
    ensemble.seed = std::int64_t(params.seed);
    ensemble.cirs.reserve(params.n_cirs);
    for (std::size_t i = 0; i < params.n_cirs; ++i) {
        Cir c = generate_synthetic_cir(params.n_taps, params.decay_constant,
                                       mix_seed(params.seed, i), params.delay_offset_taps,
                                       params.noise_floor_amp);
        c.tap_spacing = params.tap_spacing;
        std::string num = std::to_string(i);
        c.id = "pos" + std::string(width - num.size(), '0') + num;
        ensemble.cirs.push_back(std::move(c));
    }
    validate_ensemble(ensemble);
    return ensemble;
}

Cir cir_from_freq_response(const FreqResponse &fr) {
    if (fr.gains.size() < 2)
        throw std::invalid_argument("cir_from_freq_response: need at least 2 points");
    if (!(fr.f_step > 0.0) || !std::isfinite(fr.f_step))
        throw std::invalid_argument("cir_from_freq_response: f_step must be > 0");
    Cir cir;
    cir.taps = fft::dft(fr.gains, /*inverse=*/true);
    cir.tap_spacing = 1.0 / (double(fr.gains.size()) * fr.f_step);
    return cir;
}

namespace {

// Splits text into lines, accepting both "\n" and "\r\n" endings. A final
// line without a terminator still counts.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        std::size_t end = nl;
        if (end > start && text[end - 1] == '\r') --end;
        lines.push_back(text.substr(start, end - start));
        start = nl + 1;
    }
    return lines;
}

[[noreturn]] void fail(const std::string &path, std::size_t line, const std::string &msg) {
    throw format_error(path + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (start < line.size()) {
        while (start < line.size() && line[start] == ' ') ++start;
        if (start >= line.size()) break;
        std::size_t end = start;
        while (end < line.size() && line[end] != ' ') ++end;
        fields.push_back(line.substr(start, end - start));
        start = end;
    }
    return fields;
}

// Strips an expected "key=" prefix and returns the value part.
std::string_view expect_kv(std::string_view field, std::string_view key, const std::string &path,
                           std::size_t line) {
    if (field.size() < key.size() + 1 || field.substr(0, key.size()) != key ||
        field[key.size()] != '=')
        fail(path, line, "expected " + std::string(key) + "=<value>, got '" + std::string(field) +
                             "'");
    return field.substr(key.size() + 1);
}

double parse_double_or_fail(std::string_view token, const std::string &what,
                            const std::string &path, std::size_t line) {
    double v = 0.0;
    if (!parse_double(token, v))
        fail(path, line, "invalid " + what + " '" + std::string(token) + "'");
    return v;
}

std::uint64_t parse_u64_or_fail(std::string_view token, const std::string &what,
                                const std::string &path, std::size_t line) {
    std::uint64_t v = 0;
    if (!parse_u64(token, v))
        fail(path, line, "invalid " + what + " '" + std::string(token) + "'");
    return v;
}

cdouble parse_complex_line(std::string_view line_text, const std::string &path,
                           std::size_t line) {
    const auto fields = split_fields(line_text);
    if (fields.size() != 2) fail(path, line, "expected '<re> <im>'");
    const double re = parse_double_or_fail(fields[0], "real part", path, line);
    const double im = parse_double_or_fail(fields[1], "imaginary part", path, line);
    return cdouble(re, im);
}

void validate_label(const std::string &id, const std::string &what) {
    if (id.empty()) throw std::invalid_argument(what + ": id must be non-empty");
    for (const char c : id) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
            throw std::invalid_argument(what + ": id must not contain whitespace: '" + id + "'");
    }
}

}  // namespace

ChannelEnsemble load_cir_file(const std::string &path) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);
    if (lines.empty()) fail(path, 1, "empty file");

    const auto header = split_fields(lines[0]);
    if (header.size() != 5 || header[0] != "CIRv1")
        fail(path, 1, "expected 'CIRv1 n_taps=<N> tap_spacing=<s> count=<K> seed=<int|none>'");
    const std::uint64_t n_taps =
        parse_u64_or_fail(expect_kv(header[1], "n_taps", path, 1), "n_taps", path, 1);
    const double spacing = parse_double_or_fail(expect_kv(header[2], "tap_spacing", path, 1),
                                                "tap_spacing", path, 1);
    const std::uint64_t count =
        parse_u64_or_fail(expect_kv(header[3], "count", path, 1), "count", path, 1);
    const std::string_view seed_tok = expect_kv(header[4], "seed", path, 1);

    if (n_taps < 1) fail(path, 1, "n_taps must be >= 1");
    if (count < 1) fail(path, 1, "count must be >= 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) fail(path, 1, "tap_spacing must be > 0");

    ChannelEnsemble ensemble;
    if (seed_tok != "none") {
        std::int64_t seed = 0;
        std::istringstream iss{std::string(seed_tok)};
        if (!(iss >> seed) || !iss.eof()) fail(path, 1, "seed must be an integer or 'none'");
        ensemble.seed = seed;
    }

    std::size_t ln = 1;  // 1-based index of the last consumed line
    ensemble.cirs.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        ++ln;
        if (ln > lines.size()) fail(path, ln, "missing 'id=<label>' for block " +
                                                  std::to_string(k + 1));
        const auto id_fields = split_fields(lines[ln - 1]);
        if (id_fields.size() != 1 || id_fields[0].substr(0, 3) != "id=")
            fail(path, ln, "expected 'id=<label>'");
        Cir cir;
        cir.id = std::string(expect_kv(id_fields[0], "id", path, ln));
        if (cir.id.empty()) fail(path, ln, "id must be non-empty");
        cir.tap_spacing = spacing;
        cir.taps.reserve(n_taps);
        for (std::uint64_t i = 0; i < n_taps; ++i) {
            ++ln;
            if (ln > lines.size())
                fail(path, ln, "missing tap " + std::to_string(i + 1) + " of " +
                                   std::to_string(n_taps) + " for id=" + cir.id);
            cir.taps.push_back(parse_complex_line(lines[ln - 1], path, ln));
        }
        ensemble.cirs.push_back(std::move(cir));
    }
    if (ln < lines.size()) fail(path, ln + 1, "unexpected trailing content");

    validate_ensemble(ensemble);
    return ensemble;
}

std::string render_cir_file(const ChannelEnsemble &ensemble) {
    validate_ensemble(ensemble);
    for (const Cir &c : ensemble.cirs) validate_label(c.id, "render_cir_file");

    std::string out;
    out += "CIRv1 n_taps=" + std::to_string(ensemble.n_taps());
    out += " tap_spacing=" + format_double_full(ensemble.tap_spacing());
    out += " count=" + std::to_string(ensemble.cirs.size());
    out += " seed=" + (ensemble.seed ? std::to_string(*ensemble.seed) : std::string("none"));
    out += "\n";
    for (const Cir &c : ensemble.cirs) {
        out += "id=" + c.id + "\n";
        for (const cdouble &t : c.taps)
            out += format_double_full(t.real()) + " " + format_double_full(t.imag()) + "\n";
    }
    return out;
}

void save_cir_file(const ChannelEnsemble &ensemble, const std::string &path) {
    atomic_write_file(path, render_cir_file(ensemble));
}

FreqResponse load_freq_response_file(const std::string &path) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);
    if (lines.empty()) fail(path, 1, "empty file");

    const auto header = split_fields(lines[0]);
    if (header.size() != 4 || header[0] != "FRv1")
        fail(path, 1, "expected 'FRv1 f_start=<Hz> f_step=<Hz> count=<M>'");
    FreqResponse fr;
    fr.f_start = parse_double_or_fail(expect_kv(header[1], "f_start", path, 1), "f_start", path, 1);
    fr.f_step = parse_double_or_fail(expect_kv(header[2], "f_step", path, 1), "f_step", path, 1);
    const std::uint64_t count =
        parse_u64_or_fail(expect_kv(header[3], "count", path, 1), "count", path, 1);
    if (!(fr.f_step > 0.0) || !std::isfinite(fr.f_step)) fail(path, 1, "f_step must be > 0");
    if (count < 1) fail(path, 1, "count must be >= 1");

    std::size_t ln = 1;
    fr.gains.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        ++ln;
        if (ln > lines.size())
            fail(path, ln, "missing gain " + std::to_string(k + 1) + " of " +
                               std::to_string(count));
        fr.gains.push_back(parse_complex_line(lines[ln - 1], path, ln));
    }
    if (ln < lines.size()) fail(path, ln + 1, "unexpected trailing content");
    return fr;
}

void save_freq_response_file(const FreqResponse &fr, const std::string &path) {
    if (fr.gains.empty()) throw std::invalid_argument("save_freq_response_file: no gains");
    if (!(fr.f_step > 0.0) || !std::isfinite(fr.f_step))
        throw std::invalid_argument("save_freq_response_file: f_step must be > 0");

    std::string out;
    out += "FRv1 f_start=" + format_double_full(fr.f_start);
    out += " f_step=" + format_double_full(fr.f_step);
    out += " count=" + std::to_string(fr.gains.size());
    out += "\n";
    for (const cdouble &g : fr.gains)
        out += format_double_full(g.real()) + " " + format_double_full(g.imag()) + "\n";
    atomic_write_file(path, out);
}

}  // namespace trsim
