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

#include "trsim/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "trsim/metrics.hpp"
#include "trsim/parallel.hpp"
#include "trsim/scenario.hpp"
#include "trsim/textio.hpp"

namespace trsim {

namespace {

using nlohmann::json;

const char *to_string_or_null(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::peak_vs_shift: return "peak_vs_shift";
        case ExperimentKind::multiuser_sir: return "multiuser_sir";
        case ExperimentKind::generate_ensemble: return "generate_ensemble";
        case ExperimentKind::ingest_freq: return "ingest_freq";
    }
    return nullptr;
}

[[noreturn]] void cfg_fail(const std::string &path, const std::string &msg) {
    throw format_error(path + ": " + msg);
}

std::string key_path(const std::string &base, const std::string &key) {
    return base.empty() ? key : base + "." + key;
}

void check_keys(const json &j, const std::string &base,
                std::initializer_list<const char *> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char *k : allowed)
            if (it.key() == k) known = true;
        if (!known) cfg_fail(key_path(base, it.key()), "unknown key");
    }
}

const json *find_key(const json &j, const char *key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

std::uint64_t get_u64(const json &j, const std::string &base, const char *key,
                      std::uint64_t fallback) {
    const json *v = find_key(j, key);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) cfg_fail(key_path(base, key), "expected a non-negative integer");
    return v->get<std::uint64_t>();
}

double get_double(const json &j, const std::string &base, const char *key, double fallback) {
    const json *v = find_key(j, key);
    if (!v) return fallback;
    if (!v->is_number()) cfg_fail(key_path(base, key), "expected a number");
    return v->get<double>();
}

bool get_bool(const json &j, const std::string &base, const char *key, bool fallback) {
    const json *v = find_key(j, key);
    if (!v) return fallback;
    if (!v->is_boolean()) cfg_fail(key_path(base, key), "expected true or false");
    return v->get<bool>();
}

std::string get_string(const json &j, const std::string &base, const char *key,
                       const std::string &fallback) {
    const json *v = find_key(j, key);
    if (!v) return fallback;
    if (!v->is_string()) cfg_fail(key_path(base, key), "expected a string");
    return v->get<std::string>();
}

std::vector<double> get_percent_array(const json &j, const std::string &base, const char *key,
                                      std::vector<double> fallback, bool allow_100) {
    const json *v = find_key(j, key);
    if (!v) return fallback;
    if (!v->is_array() || v->empty())
        cfg_fail(key_path(base, key), "expected a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(v->size());
    for (const json &e : *v) {
        if (!e.is_number()) cfg_fail(key_path(base, key), "expected a non-empty array of numbers");
        const double pct = e.get<double>();
        const bool in_range = pct >= 0.0 && (allow_100 ? pct <= 100.0 : pct < 100.0);
        if (!in_range)
            cfg_fail(key_path(base, key), "percent " + format_double_roundtrip(pct) +
                                              " outside " + (allow_100 ? "[0, 100]" : "[0, 100)"));
        if (std::find(out.begin(), out.end(), pct) != out.end())
            cfg_fail(key_path(base, key), "duplicate percent " + format_double_roundtrip(pct));
        out.push_back(pct);
    }
    return out;
}

std::vector<ShiftDirection> get_direction_array(const json &j, const std::string &base,
                                                const char *key,
                                                std::vector<ShiftDirection> fallback) {
    const json *v = find_key(j, key);
    if (!v) return fallback;
    if (!v->is_array() || v->empty())
        cfg_fail(key_path(base, key), "expected a non-empty array of directions");
    std::vector<ShiftDirection> out;
    out.reserve(v->size());
    for (const json &e : *v) {
        if (!e.is_string())
            cfg_fail(key_path(base, key), "expected a non-empty array of directions");
        ShiftDirection d = ShiftDirection::none;
        try {
            d = shift_direction_from_string(e.get<std::string>());
        } catch (const std::invalid_argument &ex) {
            cfg_fail(key_path(base, key), ex.what());
        }
        if (d == ShiftDirection::none)
            cfg_fail(key_path(base, key), "direction must be 'left' or 'right'");
        if (std::find(out.begin(), out.end(), d) != out.end())
            cfg_fail(key_path(base, key), "duplicate direction");
        out.push_back(d);
    }
    return out;
}

void parse_ensemble_section(const json &j, const std::string &base, EnsembleSource &out) {
    const std::string source = get_string(j, base, "source", "synthetic");
    if (source == "file") {
        check_keys(j, base, {"source", "path"});
        out.from_file = true;
        out.path = get_string(j, base, "path", "");
        if (out.path.empty()) cfg_fail(key_path(base, "path"), "required for a file source");
        return;
    }
    if (source != "synthetic")
        cfg_fail(key_path(base, "source"), "must be 'synthetic' or 'file'");

    check_keys(j, base,
               {"source", "n_cirs", "n_taps", "decay_constant", "delay_offset_taps",
                "noise_floor_amp", "tap_spacing", "seed"});
    SyntheticEnsembleParams &p = out.synthetic;
    p.n_cirs = std::size_t(get_u64(j, base, "n_cirs", p.n_cirs));
    if (p.n_cirs < 1) cfg_fail(key_path(base, "n_cirs"), "must be >= 1");
    p.n_taps = std::size_t(get_u64(j, base, "n_taps", p.n_taps));
    if (p.n_taps < 1) cfg_fail(key_path(base, "n_taps"), "must be >= 1");
    // Absent profile lengths scale with the window so the default profile
    // shape (decay 40/580 of the window, first arrival at 105/580) holds at
    // any n_taps.
    const double default_decay = double(p.n_taps) * (40.0 / 580.0);
    const auto default_offset = std::size_t(std::llround(double(p.n_taps) * (105.0 / 580.0)));
    p.decay_constant = get_double(j, base, "decay_constant", default_decay);
    if (!(p.decay_constant > 0.0) || !std::isfinite(p.decay_constant))
        cfg_fail(key_path(base, "decay_constant"), "must be finite and > 0");
    p.delay_offset_taps =
        std::size_t(get_u64(j, base, "delay_offset_taps", default_offset));
    if (p.delay_offset_taps >= p.n_taps)
        cfg_fail(key_path(base, "delay_offset_taps"), "must be < n_taps");
    p.noise_floor_amp = get_double(j, base, "noise_floor_amp", p.noise_floor_amp);
    if (p.noise_floor_amp < 0.0 || !std::isfinite(p.noise_floor_amp))
        cfg_fail(key_path(base, "noise_floor_amp"), "must be finite and >= 0");
    // Default spacing keeps the 2.24 MHz frequency resolution anchoring:
    // n_taps bins span 1 / (n_taps * 2.24e6) seconds each.
    p.tap_spacing = get_double(j, base, "tap_spacing", 1.0 / (double(p.n_taps) * 2.24e6));
    if (!(p.tap_spacing > 0.0) || !std::isfinite(p.tap_spacing))
        cfg_fail(key_path(base, "tap_spacing"), "must be finite and > 0");
    if (find_key(j, "seed")) {
        out.seed_explicit = true;
        p.seed = get_u64(j, base, "seed", p.seed);
    }
}

std::uint64_t effective_ensemble_seed(const RunConfig &cfg) {
    return cfg.ensemble.seed_explicit ? cfg.ensemble.synthetic.seed : cfg.seed;
}

std::uint64_t effective_subset_seed(const RunConfig &cfg) {
    return cfg.multiuser_sir.subset_seed ? *cfg.multiuser_sir.subset_seed : cfg.seed;
}

}  // namespace

const char *to_string(ExperimentKind kind) {
    const char *s = to_string_or_null(kind);
    if (!s) throw std::invalid_argument("to_string: invalid ExperimentKind");
    return s;
}

RunConfig run_config_from_json_text(const std::string &text, const std::string &origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        throw format_error(origin + ": invalid JSON: " + e.what());
    }
    if (!root.is_object()) throw format_error(origin + ": top level must be a JSON object");

    check_keys(root, "",
               {"experiment", "seed", "output_dir", "workers", "ensemble", "peak_vs_shift",
                "multiuser_sir", "ingest_freq"});

    RunConfig cfg;

    const json *exp = find_key(root, "experiment");
    if (!exp) cfg_fail("experiment", "required key missing");
    if (!exp->is_string()) cfg_fail("experiment", "expected a string");
    const std::string kind = exp->get<std::string>();
    if (kind == "peak_vs_shift")
        cfg.experiment = ExperimentKind::peak_vs_shift;
    else if (kind == "multiuser_sir")
        cfg.experiment = ExperimentKind::multiuser_sir;
    else if (kind == "generate_ensemble")
        cfg.experiment = ExperimentKind::generate_ensemble;
    else if (kind == "ingest_freq")
        cfg.experiment = ExperimentKind::ingest_freq;
    else
        cfg_fail("experiment",
                 "must be one of peak_vs_shift, multiuser_sir, generate_ensemble, ingest_freq");

    cfg.seed = get_u64(root, "", "seed", cfg.seed);
    cfg.output_dir = get_string(root, "", "output_dir", cfg.output_dir);
    if (cfg.output_dir.empty()) cfg_fail("output_dir", "must be non-empty");
    const std::uint64_t workers = get_u64(root, "", "workers", cfg.workers);
    if (workers > 4096) cfg_fail("workers", "must be <= 4096");
    cfg.workers = unsigned(workers);

    if (const json *e = find_key(root, "ensemble")) {
        if (!e->is_object()) cfg_fail("ensemble", "expected an object");
        parse_ensemble_section(*e, "ensemble", cfg.ensemble);
    }

    if (const json *s = find_key(root, "peak_vs_shift")) {
        if (!s->is_object()) cfg_fail("peak_vs_shift", "expected an object");
        check_keys(*s, "peak_vs_shift", {"directions", "percents"});
        cfg.peak_vs_shift.directions = get_direction_array(*s, "peak_vs_shift", "directions",
                                                           cfg.peak_vs_shift.directions);
        cfg.peak_vs_shift.percents = get_percent_array(*s, "peak_vs_shift", "percents",
                                                       cfg.peak_vs_shift.percents,
                                                       /*allow_100=*/true);
    }

    if (const json *s = find_key(root, "multiuser_sir")) {
        if (!s->is_object()) cfg_fail("multiuser_sir", "expected an object");
        check_keys(*s, "multiuser_sir",
                   {"n_users", "schedule_step_percent", "sweep_directions", "sweep_percents",
                    "include_plain_baseline", "combination_budget", "subset_seed"});
        MultiuserSirSettings &m = cfg.multiuser_sir;
        m.n_users = std::size_t(get_u64(*s, "multiuser_sir", "n_users", m.n_users));
        if (m.n_users < 1) cfg_fail("multiuser_sir.n_users", "must be >= 1");
        m.schedule_step_percent =
            get_double(*s, "multiuser_sir", "schedule_step_percent", m.schedule_step_percent);
        if (!(m.schedule_step_percent >= 0.0) || !std::isfinite(m.schedule_step_percent))
            cfg_fail("multiuser_sir.schedule_step_percent", "must be finite and >= 0");
        if (m.schedule_step_percent * double(m.n_users - 1) >= 100.0)
            cfg_fail("multiuser_sir.schedule_step_percent",
                     "staggered schedule reaches 100 percent of the filter length");
        m.sweep_directions = get_direction_array(*s, "multiuser_sir", "sweep_directions",
                                                 m.sweep_directions);
        m.sweep_percents = get_percent_array(*s, "multiuser_sir", "sweep_percents",
                                             m.sweep_percents, /*allow_100=*/false);
        m.include_plain_baseline = get_bool(*s, "multiuser_sir", "include_plain_baseline",
                                            m.include_plain_baseline);
        m.combination_budget =
            get_u64(*s, "multiuser_sir", "combination_budget", m.combination_budget);
        if (m.combination_budget < 1) cfg_fail("multiuser_sir.combination_budget", "must be >= 1");
        if (find_key(*s, "subset_seed"))
            m.subset_seed = get_u64(*s, "multiuser_sir", "subset_seed", 0);
    }

    if (const json *s = find_key(root, "ingest_freq")) {
        if (!s->is_object()) cfg_fail("ingest_freq", "expected an object");
        check_keys(*s, "ingest_freq", {"inputs"});
        const json *inputs = find_key(*s, "inputs");
        if (!inputs) cfg_fail("ingest_freq.inputs", "required key missing");
        if (!inputs->is_array() || inputs->empty())
            cfg_fail("ingest_freq.inputs", "expected a non-empty array of file paths");
        for (const json &e : *inputs) {
            if (!e.is_string() || e.get<std::string>().empty())
                cfg_fail("ingest_freq.inputs", "expected a non-empty array of file paths");
            cfg.ingest.inputs.push_back(e.get<std::string>());
        }
    }

    if (cfg.experiment == ExperimentKind::ingest_freq && cfg.ingest.inputs.empty())
        cfg_fail("ingest_freq.inputs", "required for the ingest_freq experiment");

    return cfg;
}

RunConfig load_run_config(const std::string &path) {
    return run_config_from_json_text(read_file(path), path);
}

std::string canonical_config_json(const RunConfig &cfg) {
    json canon;
    canon["experiment"] = to_string(cfg.experiment);
    canon["seed"] = cfg.seed;

    json ens;
    if (cfg.ensemble.from_file) {
        ens["source"] = "file";
        ens["path"] = cfg.ensemble.path;
    } else {
        const SyntheticEnsembleParams &p = cfg.ensemble.synthetic;
        ens["source"] = "synthetic";
        ens["n_cirs"] = p.n_cirs;
        ens["n_taps"] = p.n_taps;
        ens["decay_constant"] = p.decay_constant;
        ens["delay_offset_taps"] = p.delay_offset_taps;
        ens["noise_floor_amp"] = p.noise_floor_amp;
        ens["tap_spacing"] = p.tap_spacing;
        ens["seed"] = effective_ensemble_seed(cfg);
    }
    canon["ensemble"] = ens;

    switch (cfg.experiment) {
        case ExperimentKind::peak_vs_shift: {
            json s;
            json dirs = json::array();
            for (const ShiftDirection d : cfg.peak_vs_shift.directions) dirs.push_back(to_string(d));
            s["directions"] = dirs;
            s["percents"] = cfg.peak_vs_shift.percents;
            canon["peak_vs_shift"] = s;
            break;
        }
        case ExperimentKind::multiuser_sir: {
            const MultiuserSirSettings &m = cfg.multiuser_sir;
            json s;
            s["n_users"] = m.n_users;
            s["schedule_step_percent"] = m.schedule_step_percent;
            json dirs = json::array();
            for (const ShiftDirection d : m.sweep_directions) dirs.push_back(to_string(d));
            s["sweep_directions"] = dirs;
            s["sweep_percents"] = m.sweep_percents;
            s["include_plain_baseline"] = m.include_plain_baseline;
            s["combination_budget"] = m.combination_budget;
            s["subset_seed"] = effective_subset_seed(cfg);
            canon["multiuser_sir"] = s;
            break;
        }
        case ExperimentKind::generate_ensemble:
            break;
        case ExperimentKind::ingest_freq:
            canon["ingest_freq"] = json{{"inputs", cfg.ingest.inputs}};
            break;
    }
    return canon.dump();
}

std::string config_digest(const RunConfig &cfg) { return fnv1a64_hex(canonical_config_json(cfg)); }

namespace {

ChannelEnsemble resolve_ensemble(const RunConfig &cfg) {
    if (cfg.ensemble.from_file) return load_cir_file(cfg.ensemble.path);
    SyntheticEnsembleParams params = cfg.ensemble.synthetic;
    params.seed = effective_ensemble_seed(cfg);
    return generate_synthetic_ensemble(params);
}

// "12" for 12.0, "12p5" for 12.5: percent values made filename-safe.
std::string percent_tag(double percent) {
    std::string s = format_double_roundtrip(percent);
    for (char &c : s) {
        if (c == '.') c = 'p';
        if (c == '-') c = 'm';
    }
    return s;
}

std::string render_peak_vs_shift_csv(const PeakVsShiftResult &result) {
    std::string csv = "cir_id,direction,percent,norm_signal_peak_power,norm_image_peak_power\n";
    auto append_trace = [&](const PeakVsShiftTrace &trace) {
        for (std::size_t g = 0; g < result.grid.size(); ++g) {
            csv += trace.cir_id;
            csv += ',';
            csv += to_string(result.grid[g].direction);
            csv += ',';
            csv += format_double_roundtrip(result.grid[g].percent);
            csv += ',';
            csv += format_double_roundtrip(trace.norm_signal_peak_power[g]);
            csv += ',';
            csv += format_double_roundtrip(trace.norm_image_peak_power[g]);
            csv += '\n';
        }
    };
    for (const PeakVsShiftTrace &trace : result.traces) append_trace(trace);
    append_trace(result.average);
    return csv;
}

struct MergedSirResults {
    std::size_t n_users = 0;
    std::vector<std::vector<std::uint32_t>> subsets;
    std::vector<SweepCell> cells;
    std::vector<std::string> warnings;
};

// Baseline first, then each swept direction in config order. Every
// run_multiuser_sir call shares the subset seed, so subsets are identical
// across calls and the cells stay paired.
MergedSirResults run_all_sir_cells(const RunConfig &cfg, const ChannelEnsemble &ensemble,
                                   unsigned workers) {
    const MultiuserSirSettings &m = cfg.multiuser_sir;
    MergedSirResults merged;
    merged.n_users = m.n_users;

    auto absorb = [&](MultiuserSirResult &&r) {
        if (merged.subsets.empty())
            merged.subsets = std::move(r.subsets);
        else if (merged.subsets != r.subsets)
            throw std::runtime_error("multiuser_sir: subset sampling diverged between sweeps");
        for (SweepCell &cell : r.cells) merged.cells.push_back(std::move(cell));
        for (std::string &w : r.warnings) {
            if (std::find(merged.warnings.begin(), merged.warnings.end(), w) ==
                merged.warnings.end())
                merged.warnings.push_back(std::move(w));
        }
    };

    MultiuserSirParams params;
    params.n_users = m.n_users;
    params.combination_budget = m.combination_budget;
    params.subset_seed = effective_subset_seed(cfg);

    if (m.include_plain_baseline) {
        params.schedule = staggered_schedule(m.n_users, 0.0, ShiftDirection::none);
        params.sweep = {GridPoint{ShiftDirection::none, 0.0}};
        absorb(run_multiuser_sir(ensemble, params, workers));
    }
    for (const ShiftDirection d : m.sweep_directions) {
        params.schedule = staggered_schedule(m.n_users, m.schedule_step_percent, d);
        params.sweep.clear();
        for (const double pct : m.sweep_percents) params.sweep.push_back(GridPoint{d, pct});
        absorb(run_multiuser_sir(ensemble, params, workers));
    }
    return merged;
}

std::string render_subsets_csv(const MergedSirResults &merged, const ChannelEnsemble &ensemble) {
    std::string csv = "subset,user,cir_id\n";
    for (std::size_t s = 0; s < merged.subsets.size(); ++s) {
        for (std::size_t u = 0; u < merged.subsets[s].size(); ++u) {
            csv += std::to_string(s);
            csv += ',';
            csv += std::to_string(u + 1);
            csv += ',';
            csv += ensemble.cirs[merged.subsets[s][u]].id;
            csv += '\n';
        }
    }
    return csv;
}

std::string render_cell_csv(const SweepCell &cell) {
    std::string csv = "subset,user,sir_db\n";
    const std::size_t n_subsets = cell.users.empty() ? 0 : cell.users.front().sir_db.size();
    for (std::size_t s = 0; s < n_subsets; ++s) {
        for (std::size_t u = 0; u < cell.users.size(); ++u) {
            csv += std::to_string(s);
            csv += ',';
            csv += std::to_string(u + 1);
            csv += ',';
            csv += format_double_roundtrip(cell.users[u].sir_db[s]);
            csv += '\n';
        }
    }
    return csv;
}

std::string render_user_cdf_csv(const MergedSirResults &merged, std::size_t user) {
    std::string csv = "direction,percent,sir_db,cdf\n";
    for (const SweepCell &cell : merged.cells) {
        const UserSirStats &stats = cell.users[user];
        if (std::size_t(std::count_if(stats.sir_db.begin(), stats.sir_db.end(),
                                      [](double v) { return std::isinf(v); })) ==
            stats.sir_db.size())
            continue;  // no finite samples, nothing to plot
        const Cdf cdf = empirical_cdf(stats.sir_db);
        for (const CdfPoint &pt : cdf.points) {
            csv += to_string(cell.point.direction);
            csv += ',';
            csv += format_double_roundtrip(cell.point.percent);
            csv += ',';
            csv += format_double_roundtrip(pt.value);
            csv += ',';
            csv += format_double_roundtrip(pt.probability);
            csv += '\n';
        }
    }
    return csv;
}

std::string render_sir_summary_csv(const MergedSirResults &merged) {
    std::string csv =
        "direction,percent,user,n_total,n_infinite,median_sir_db,mean_finite_sir_db,"
        "p10_sir_db,p90_sir_db\n";
    for (const SweepCell &cell : merged.cells) {
        for (std::size_t u = 0; u < cell.users.size(); ++u) {
            const UserSirStats &stats = cell.users[u];
            csv += to_string(cell.point.direction);
            csv += ',';
            csv += format_double_roundtrip(cell.point.percent);
            csv += ',';
            csv += std::to_string(u + 1);
            csv += ',';
            csv += std::to_string(stats.sir_db.size());
            csv += ',';
            csv += std::to_string(stats.infinite_count);
            csv += ',';
            csv += format_double_roundtrip(stats.median_db);
            csv += ',';
            csv += format_double_roundtrip(stats.mean_finite_db);
            csv += ',';
            csv += format_double_roundtrip(stats.p10_db);
            csv += ',';
            csv += format_double_roundtrip(stats.p90_db);
            csv += '\n';
        }
    }
    return csv;
}

// Best swept shift for the swept (last) user per direction, by median SIR.
// Ties keep the earliest swept point.
std::string render_turnover_csv(const MergedSirResults &merged,
                                const std::vector<ShiftDirection> &directions) {
    std::string csv = "direction,user,best_percent,best_median_sir_db\n";
    for (const ShiftDirection d : directions) {
        bool found = false;
        double best_pct = 0.0;
        double best_median = -std::numeric_limits<double>::infinity();
        for (const SweepCell &cell : merged.cells) {
            if (cell.point.direction != d) continue;
            const double med = cell.users.back().median_db;
            if (!found || med > best_median) {
                found = true;
                best_median = med;
                best_pct = cell.point.percent;
            }
        }
        if (!found) continue;
        csv += to_string(d);
        csv += ',';
        csv += std::to_string(merged.n_users);
        csv += ',';
        csv += format_double_roundtrip(best_pct);
        csv += ',';
        csv += format_double_roundtrip(best_median);
        csv += '\n';
    }
    return csv;
}

}  // namespace

RunOutcome run_experiment(const RunConfig &cfg) {
    namespace fs = std::filesystem;
    const unsigned workers = cfg.workers == 0 ? default_workers() : cfg.workers;

    {
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        if (ec)
            throw io_error("cannot create output directory '" + cfg.output_dir +
                           "': " + ec.message());
    }

    RunOutcome outcome;
    outcome.config_digest = config_digest(cfg);

    // name -> content, in creation order; all writes happen at the end.
    std::vector<std::pair<std::string, std::string>> files;

    switch (cfg.experiment) {
        case ExperimentKind::peak_vs_shift: {
            const ChannelEnsemble ensemble = resolve_ensemble(cfg);
            std::vector<GridPoint> grid;
            for (const ShiftDirection d : cfg.peak_vs_shift.directions)
                for (const double pct : cfg.peak_vs_shift.percents)
                    grid.push_back(GridPoint{d, pct});
            PeakVsShiftResult result = run_peak_vs_shift(ensemble, grid, workers);
            outcome.warnings = std::move(result.warnings);
            files.emplace_back("peak_vs_shift.csv", render_peak_vs_shift_csv(result));
            break;
        }
        case ExperimentKind::multiuser_sir: {
            const ChannelEnsemble ensemble = resolve_ensemble(cfg);
            const MergedSirResults merged = run_all_sir_cells(cfg, ensemble, workers);
            outcome.warnings = merged.warnings;
            files.emplace_back("subsets.csv", render_subsets_csv(merged, ensemble));
            for (const SweepCell &cell : merged.cells) {
                const std::string name = "sir_" + std::string(to_string(cell.point.direction)) +
                                         "_" + percent_tag(cell.point.percent) + ".csv";
                files.emplace_back(name, render_cell_csv(cell));
            }
            for (std::size_t u = 0; u < merged.n_users; ++u)
                files.emplace_back("cdf_user" + std::to_string(u + 1) + ".csv",
                                   render_user_cdf_csv(merged, u));
            files.emplace_back("multiuser_sir_summary.csv", render_sir_summary_csv(merged));
            files.emplace_back("turnover.csv",
                               render_turnover_csv(merged, cfg.multiuser_sir.sweep_directions));
            break;
        }
        case ExperimentKind::generate_ensemble: {
            const ChannelEnsemble ensemble = resolve_ensemble(cfg);
            files.emplace_back("ensemble.cir", render_cir_file(ensemble));
            break;
        }
        case ExperimentKind::ingest_freq: {
            ChannelEnsemble ensemble;
            for (const std::string &input : cfg.ingest.inputs) {
                const FreqResponse fr = load_freq_response_file(input);
                Cir cir = cir_from_freq_response(fr);
                cir.id = fs::path(input).stem().string();
                if (cir.id.empty()) cir.id = "input" + std::to_string(ensemble.cirs.size());
                if (!ensemble.cirs.empty() &&
                    cir.taps.size() != ensemble.cirs.front().taps.size())
                    throw format_error(input + ": tap count " + std::to_string(cir.taps.size()) +
                                       " does not match the first input (" +
                                       std::to_string(ensemble.cirs.front().taps.size()) + ")");
                if (!ensemble.cirs.empty() &&
                    cir.tap_spacing != ensemble.cirs.front().tap_spacing)
                    throw format_error(input +
                                       ": tap spacing does not match the first input");
                ensemble.cirs.push_back(std::move(cir));
            }
            files.emplace_back("ingested.cir", render_cir_file(ensemble));
            break;
        }
    }

    std::sort(files.begin(), files.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });

    json manifest;
    manifest["format"] = "trsim-manifest-v1";
    manifest["experiment"] = to_string(cfg.experiment);
    manifest["seed"] = cfg.seed;
    manifest["config_digest"] = outcome.config_digest;
    manifest["warnings"] = outcome.warnings;
    json file_list = json::array();
    for (const auto &[name, content] : files) {
        atomic_write_file((fs::path(cfg.output_dir) / name).string(), content);
        outcome.files.push_back(name);
        file_list.push_back(json{{"name", name},
                                 {"bytes", content.size()},
                                 {"fnv1a64", fnv1a64_hex(content)}});
    }
    manifest["files"] = file_list;

    outcome.manifest_path = (fs::path(cfg.output_dir) / "manifest.json").string();
    atomic_write_file(outcome.manifest_path, manifest.dump(2) + "\n");
    return outcome;
}

}  // namespace trsim
