// Copyright 2026 The bfuf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Needs CLI11 and nlohmann/json on the include path.

#ifndef BFUF_CLI_HPP
#define BFUF_CLI_HPP

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bfuf/codes.hpp"
#include "bfuf/decoders.hpp"
#include "bfuf/harness.hpp"
#include "bfuf/selftest.hpp"

namespace bfuf {

class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Parses "a,b,c" or "start:stop:step" (inclusive of stop up to rounding).
inline std::vector<double> parse_grid(const std::string& text) {
    auto number = [&](const std::string& s) {
        size_t used = 0;
        double v;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + s + "' in '" + text + "'");
        }
        if (used != s.size() || !std::isfinite(v))
            throw ConfigError("cannot parse number '" + s + "' in '" + text + "'");
        return v;
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ':');)
            parts.push_back(part);
        if (parts.size() != 3)
            throw ConfigError("range '" + text + "' must be start:stop:step");
        double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
        if (!(step > 0) || stop < start)
            throw ConfigError("range '" + text + "' needs step > 0 and stop >= start");
        const auto count = static_cast<size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 100000)
            throw ConfigError("range '" + text + "' has too many points");
        for (size_t i = 0; i < count; ++i) {
            // Round to 12 significant digits so 0.08 + 3·0.005 prints as 0.095.
            double v = start + static_cast<double>(i) * step;
            out.push_back(std::stod(format_number(std::stod(std::to_string(v)))));
        }
    } else {
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ',');)
            if (!part.empty())
                out.push_back(number(part));
    }
    if (out.empty())
        throw ConfigError("empty grid '" + text + "'");
    return out;
}

struct CliConfig {
    std::string code;
    std::vector<size_t> sizes;
    size_t rounds = 0;
    std::string algorithm;
    std::string p = "0";
    std::string eps = "0";
    size_t shots = 10000;
    uint64_t seed = 1;
    unsigned threads = 0;
    std::string out;
    std::string format = "csv";
    std::string sector = "both";
    bool timing = false;
    bool parity_shortcut = false;
    double max_nonconverged = 0.0;
};

/// Builds the targets named by --code / --L / --T / --sector.
inline std::vector<Target> make_targets(const CliConfig& cfg) {
    const std::string& code = cfg.code;
    if (code.empty())
        throw ConfigError("--code is required");
    std::vector<Target> targets;
    if (code == "toric2d" || code == "toric3d") {
        if (cfg.sizes.empty())
            throw ConfigError("--L is required for " + code);
        for (size_t L : cfg.sizes) {
            try {
                targets.push_back(code == "toric2d" ? toric2d_target(L)
                                                    : toric3d_target(L, cfg.rounds ? cfg.rounds : L));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        return targets;
    }
    if (!cfg.sizes.empty())
        throw ConfigError("--L only applies to toric2d and toric3d");
    SectorChoice sector;
    try {
        sector = parse_sector_choice(cfg.sector);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    try {
        if (code.rfind("bicycle:", 0) == 0) {
            std::string ref = code.substr(8);
            BicycleSpec spec;
            if (std::filesystem::exists(ref))
                spec = load_bicycle_spec(ref);
            else if (auto builtin = builtin_bicycle_spec(ref))
                spec = *builtin;
            else
                throw ConfigError("no bicycle spec file or built-in code named '" + ref + "'");
            targets.push_back(code_target(build_bicycle(spec), sector));
        } else if (code.rfind("css:", 0) == 0) {
            targets.push_back(code_target(load_check_matrices(code.substr(4)), sector));
        } else {
            throw ConfigError("unknown --code '" + code + "' (toric2d, toric3d, bicycle:<spec>, css:<file>)");
        }
    } catch (const CodeError& e) {
        throw ConfigError(e.what());
    }
    return targets;
}

inline Algorithm resolve_algorithm(const CliConfig& cfg, const std::vector<Target>& targets) {
    bool topological = true;
    for (const auto& t : targets)
        for (const auto& g : t.sectors)
            topological &= g->tanner.every_data_degree_two();
    if (cfg.algorithm.empty())
        return topological ? Algorithm::improved : Algorithm::qldpc;
    Algorithm alg;
    try {
        alg = parse_algorithm(cfg.algorithm);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (alg != Algorithm::qldpc && !topological)
        throw ConfigError(
            std::string("algorithm '") + to_string(alg) +
            "' needs every qubit in exactly two checks; use --alg qldpc for this code");
    return alg;
}

inline nlohmann::ordered_json point_json(const PointResult& r) {
    nlohmann::ordered_json j;
    j["code"] = r.code;
    j["n"] = r.n;
    j["k"] = r.k;
    j["d"] = r.d ? nlohmann::ordered_json(*r.d) : nlohmann::ordered_json(nullptr);
    j["L"] = r.side ? nlohmann::ordered_json(r.side) : nlohmann::ordered_json(nullptr);
    j["alg"] = to_string(r.algorithm);
    if (!r.sector.empty())
        j["sector"] = r.sector;
    j["p"] = r.p;
    j["eps"] = r.epsilon;
    j["shots"] = r.shots;
    j["failures"] = r.failures;
    j["logical_rate"] = r.logical_rate();
    j["stderr"] = r.standard_error();
    j["mean_ns"] = r.timed ? nlohmann::ordered_json(r.mean_ns) : nlohmann::ordered_json(nullptr);
    j["p50_ns"] = r.timed ? nlohmann::ordered_json(r.p50_ns) : nlohmann::ordered_json(nullptr);
    j["visited_mean"] = r.visited_mean;
    j["nonconverged"] = r.nonconverged;
    return j;
}

inline void write_results(
    std::ostream& out, const std::string& format, const std::vector<PointResult>& rows,
    const std::vector<std::string>& notes) {
    if (format == "json") {
        nlohmann::ordered_json doc;
        doc["points"] = nlohmann::ordered_json::array();
        for (const auto& r : rows)
            doc["points"].push_back(point_json(r));
        doc["annotations"] = notes;
        out << doc.dump(2) << '\n';
        return;
    }
    write_csv(out, rows);
    for (const auto& n : notes)
        out << "# " << n << '\n';
}

namespace detail {

/// Crossing estimates per ε column (sweeps over several sizes) or a
/// pseudo-threshold per code (single size).
inline std::vector<std::string> sweep_notes(const std::vector<PointResult>& rows) {
    std::vector<std::string> notes;
    std::map<double, std::map<size_t, Curve>> by_eps;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_code;
    std::map<std::string, size_t> k_of;
    for (const auto& r : rows) {
        auto& c = by_eps[r.epsilon][r.side];
        c.size = r.side;
        c.p.push_back(r.p);
        c.rate.push_back(r.logical_rate());
        if (r.epsilon == 0.0) {
            by_code[r.code].first.push_back(r.p);
            by_code[r.code].second.push_back(r.logical_rate());
            k_of[r.code] = r.k;
        }
    }
    for (const auto& [eps, curves_by_size] : by_eps) {
        if (curves_by_size.size() < 2)
            continue;
        std::vector<Curve> curves;
        for (const auto& [size, c] : curves_by_size)
            curves.push_back(c);
        if (curves.front().p.size() < 3)
            continue;
        auto est = estimate_crossing(curves);
        notes.push_back("eps=" + format_number(eps) + ": " + est.summary());
    }
    if (notes.empty()) {
        for (const auto& [code, curve] : by_code) {
            if (curve.first.size() < 2)
                continue;
            auto pt = estimate_pseudothreshold(curve.first, curve.second, k_of[code]);
            std::string line = code + ": pseudo-threshold ";
            line += pt.found ? format_number(pt.p_star) : std::string("not bracketed");
            line += ", k-normalized ";
            line += pt.normalized_found ? format_number(pt.p_star_normalized) : std::string("not bracketed");
            notes.push_back(line);
        }
    }
    return notes;
}

inline std::vector<std::string> timing_notes(const std::vector<PointResult>& rows) {
    std::vector<std::string> notes;
    std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_p;
    for (const auto& r : rows) {
        if (!r.timed || r.mean_ns <= 0)
            continue;
        by_p[r.p].first.push_back(static_cast<double>(r.n));
        by_p[r.p].second.push_back(r.mean_ns);
    }
    for (const auto& [p, xy] : by_p) {
        if (xy.first.size() < 2)
            continue;
        char buf[96];
        std::snprintf(buf, sizeof buf, "p=%s: log-log slope of mean decode time vs n = %.3f",
                      format_number(p).c_str(), loglog_slope(xy.first, xy.second));
        notes.push_back(buf);
    }
    return notes;
}

}  // namespace detail

/// 2 if the fraction of non-convergent decodes over all rows exceeds
/// `tolerance`, else 0.
inline int nonconvergence_status(const std::vector<PointResult>& rows, double tolerance, std::ostream& err) {
    size_t shots = 0, nonconverged = 0;
    for (const auto& r : rows) {
        shots += r.shots;
        nonconverged += r.nonconverged;
    }
    if (shots && static_cast<double>(nonconverged) > tolerance * static_cast<double>(shots)) {
        err << "error: " << nonconverged << " of " << shots << " decodes did not converge\n";
        return 2;
    }
    return 0;
}

/// Entry point of the `bfuf` tool. Exit codes: 0 success, 1 configuration
/// error, 2 non-convergent decodes above --max-nonconv, 3 selftest failure.
inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Breadth-first union-find decoders for CSS codes", "bfuf"};
    app.require_subcommand(1);
    CliConfig cfg;

    auto add_common = [&](CLI::App* sub, bool grids) {
        sub->add_option("--code", cfg.code, "toric2d | toric3d | bicycle:<spec file or bb72..bb288> | css:<file>")
            ->required();
        sub->add_option("--L", cfg.sizes, "lattice sizes for toric codes")->delimiter(',');
        sub->add_option("--T", cfg.rounds, "measurement rounds for toric3d (default: L)");
        sub->add_option("--alg", cfg.algorithm, "simple | improved | variant | qldpc")
            ->check(CLI::IsMember({"simple", "improved", "variant", "qldpc"}));
        sub->add_option("--p", cfg.p, grids ? "Pauli rates: list a,b,c or start:stop:step" : "Pauli error rate");
        sub->add_option("--eps", cfg.eps, grids ? "erasure rates: list or start:stop:step" : "erasure rate");
        sub->add_option("--shots", cfg.shots, "shots per point")->check(CLI::PositiveNumber);
        sub->add_option("--seed", cfg.seed, "base seed");
        sub->add_option("--threads", cfg.threads, "worker threads (default: all cores)");
        sub->add_option("--out", cfg.out, "output file (default: stdout)");
        sub->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--sector", cfg.sector, "x | z | both (worst of the two); ignored for toric codes")
            ->check(CLI::IsMember({"x", "z", "both"}));
        sub->add_flag("--timing", cfg.timing, "record decode times (mean_ns, p50_ns)");
        sub->add_flag("--parity-shortcut", cfg.parity_shortcut, "qldpc: skip re-validation after valid merges");
        sub->add_option("--max-nonconv", cfg.max_nonconverged, "tolerated fraction of non-convergent decodes")
            ->check(CLI::Range(0.0, 1.0));
    };
    CLI::App* point = app.add_subcommand("point", "one (p, eps) point");
    CLI::App* sweep = app.add_subcommand("sweep", "p sweep over sizes with crossing estimate");
    CLI::App* grid = app.add_subcommand("grid", "p x eps grid");
    CLI::App* bench = app.add_subcommand("bench-time", "decode-time scaling over sizes");
    CLI::App* selftest = app.add_subcommand("selftest", "run the invariant suites");
    add_common(point, false);
    add_common(sweep, true);
    add_common(grid, true);
    add_common(bench, true);
    double selftest_scale = 1.0;
    selftest->add_option("--scale", selftest_scale, "sample-count multiplier")->check(CLI::Range(1e-6, 100.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    if (selftest->parsed()) {
        SelftestOptions opt;
        opt.scale = selftest_scale;
        bool ok = true;
        for (const auto& c : run_selftest(opt)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " (%.1fs)", c.seconds);
            out << (c.passed ? "PASS " : "FAIL ") << c.name << buf;
            if (!c.passed)
                out << ": " << c.detail;
            out << '\n';
            ok &= c.passed;
        }
        return ok ? 0 : 3;
    }

    std::vector<PointResult> rows;
    std::vector<std::string> notes;
    try {
        std::vector<double> ps = parse_grid(cfg.p), epss = parse_grid(cfg.eps);
        for (double v : ps)
            if (v < 0 || v > 1)
                throw ConfigError("--p values must lie in [0, 1]");
        for (double v : epss)
            if (v < 0 || v > 1)
                throw ConfigError("--eps values must lie in [0, 1]");
        std::vector<Target> targets = make_targets(cfg);
        Algorithm alg = resolve_algorithm(cfg, targets);
        RunOptions run;
        run.shots = cfg.shots;
        run.seed = cfg.seed;
        run.threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
        run.timing = cfg.timing;
        run.decoder.parity_shortcut = cfg.parity_shortcut;

        if (point->parsed()) {
            if (ps.size() != 1 || epss.size() != 1 || targets.size() != 1)
                throw ConfigError("point takes a single --p, --eps and --L; use sweep or grid for more");
            rows.push_back(run_point(targets[0], alg, ps[0], epss[0], run));
        } else if (sweep->parsed() || grid->parsed()) {
            for (const auto& t : targets) {
                auto part = run_grid(t, alg, ps, epss, run);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            if (sweep->parsed())
                notes = detail::sweep_notes(rows);
        } else if (bench->parsed()) {
            if (epss.size() != 1 || epss[0] != 0.0)
                throw ConfigError("bench-time runs at eps = 0");
            rows = benchmark_timing(targets, alg, ps, run);
            notes = detail::timing_notes(rows);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    if (cfg.out.empty()) {
        write_results(out, cfg.format, rows, notes);
    } else {
        std::ofstream file(cfg.out);
        if (!file) {
            err << "error: cannot write '" << cfg.out << "'\n";
            return 1;
        }
        write_results(file, cfg.format, rows, notes);
        for (const auto& n : notes)
            out << n << '\n';
    }

    return nonconvergence_status(rows, cfg.max_nonconverged, err);
}

inline int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"bfuf"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bfuf

#endif  // BFUF_CLI_HPP
