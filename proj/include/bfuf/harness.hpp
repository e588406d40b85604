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

#ifndef BFUF_HARNESS_HPP
#define BFUF_HARNESS_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bfuf/codes.hpp"
#include "bfuf/decoders.hpp"
#include "bfuf/noise.hpp"
#include "bfuf/verifier.hpp"

namespace bfuf {

// ---------------------------------------------------------------------------
// Targets: what gets decoded.

/// One code instance with the decoding graphs of the sectors to simulate.
/// With two sectors a point reports the worse of the two.
struct Target {
    std::string label;
    size_t n = 0;
    size_t k = 0;
    std::optional<size_t> d;
    size_t side = 0;  // lattice size L for toric codes, 0 otherwise
    std::vector<std::shared_ptr<const DecodingGraph>> sectors;
    std::vector<std::string> sector_names;
};

inline Target toric2d_target(size_t L) {
    auto g = std::make_shared<const DecodingGraph>(toric_2d_graph(L));
    return Target{"toric2d", g->n, g->k, g->d, L, {g}, {""}};
}

inline Target toric3d_target(size_t L, size_t T) {
    auto g = std::make_shared<const DecodingGraph>(build_toric_2plus1(L, T));
    return Target{"toric3d", g->n, g->k, g->d, L, {g}, {""}};
}

enum class SectorChoice { x, z, both };

inline SectorChoice parse_sector_choice(std::string_view s) {
    if (s == "x")
        return SectorChoice::x;
    if (s == "z")
        return SectorChoice::z;
    if (s == "both")
        return SectorChoice::both;
    throw std::invalid_argument("unknown sector '" + std::string(s) + "' (expected x, z or both)");
}

inline Target code_target(const CssCode& code, SectorChoice choice) {
    Target t;
    t.n = code.n;
    t.k = code.k;
    t.d = code.d;
    for (Sector s : {Sector::x, Sector::z}) {
        if ((choice == SectorChoice::x && s != Sector::x) || (choice == SectorChoice::z && s != Sector::z))
            continue;
        t.sectors.push_back(std::make_shared<const DecodingGraph>(decoding_graph(code, s)));
        t.sector_names.emplace_back(to_string(s));
    }
    t.label = code.name + "/" + (choice == SectorChoice::both ? "worst" : t.sector_names.front());
    return t;
}

// ---------------------------------------------------------------------------
// Monte Carlo points.

struct RunOptions {
    size_t shots = 1000;
    uint64_t seed = 1;
    unsigned threads = 1;
    bool timing = false;
    DecoderOptions decoder;
};

struct PointResult {
    std::string code;
    size_t n = 0;
    size_t k = 0;
    std::optional<size_t> d;
    size_t side = 0;
    Algorithm algorithm = Algorithm::improved;
    std::string sector;
    double p = 0.0;
    double epsilon = 0.0;
    size_t shots = 0;
    size_t failures = 0;
    size_t nonconverged = 0;
    double visited_mean = 0.0;
    size_t visited_max = 0;
    bool timed = false;
    double mean_ns = 0.0;
    double p50_ns = 0.0;

    double logical_rate() const {
        return shots ? static_cast<double>(failures) / static_cast<double>(shots) : 0.0;
    }
    double standard_error() const {
        if (!shots)
            return 0.0;
        double r = logical_rate();
        return std::sqrt(r * (1.0 - r) / static_cast<double>(shots));
    }
};

/// Seed of one (code, p, eps) point. The algorithm is deliberately not mixed
/// in, so that different decoders see identical shots.
inline uint64_t point_seed(uint64_t base, std::string_view label, double p, double epsilon) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    uint64_t state = base ^ h;
    uint64_t a = splitmix64(state);
    state = a ^ std::bit_cast<uint64_t>(p);
    uint64_t b = splitmix64(state);
    state = b ^ std::bit_cast<uint64_t>(epsilon);
    return splitmix64(state);
}

namespace detail {

struct ShotTally {
    size_t failures = 0;
    size_t nonconverged = 0;
    double visited_sum = 0.0;
    size_t visited_max = 0;
    std::vector<uint64_t> times;
};

inline ShotTally run_range(
    const DecodingGraph& graph, Algorithm algorithm, const NoiseParams& noise, size_t begin, size_t end,
    const RunOptions& options) {
    ShotTally tally;
    Decoder decoder(graph.tanner, algorithm, options.decoder);
    Shot shot;
    if (options.timing)
        tally.times.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) {
        Rng rng = Rng::for_shot(noise.seed, i);
        sample_shot(graph.tanner, graph.mechanisms, noise, rng, shot);
        const DecodeOutcome& out = decoder.decode(shot.syndrome, shot.erasures);
        tally.visited_sum += static_cast<double>(out.visited_count);
        tally.visited_max = std::max(tally.visited_max, out.visited_count);
        if (options.timing)
            tally.times.push_back(out.elapsed_ns);
        if (!out.converged()) {
            ++tally.nonconverged;
            ++tally.failures;
            continue;
        }
        if (is_failure(graph, shot, out.correction))
            ++tally.failures;
    }
    return tally;
}

inline ShotTally run_sector(
    const DecodingGraph& graph, Algorithm algorithm, const NoiseParams& noise, const RunOptions& options) {
    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.shots)));
    std::vector<ShotTally> parts(workers);
    auto bounds = [&](unsigned w) { return options.shots * w / workers; };
    if (workers == 1) {
        parts[0] = run_range(graph, algorithm, noise, 0, options.shots, options);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    parts[w] = run_range(graph, algorithm, noise, bounds(w), bounds(w + 1), options);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool)
            t.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }
    ShotTally total = std::move(parts[0]);
    for (unsigned w = 1; w < workers; ++w) {
        total.failures += parts[w].failures;
        total.nonconverged += parts[w].nonconverged;
        total.visited_sum += parts[w].visited_sum;
        total.visited_max = std::max(total.visited_max, parts[w].visited_max);
        total.times.insert(total.times.end(), parts[w].times.begin(), parts[w].times.end());
    }
    return total;
}

}  // namespace detail

/// Runs `options.shots` sample-decode-verify trials at (p, epsilon). Shot i
/// of a point always uses the same random stream, whatever the thread count.
/// Non-convergent decodes count as failures and are also tallied apart.
inline PointResult run_point(
    const Target& target, Algorithm algorithm, double p, double epsilon, const RunOptions& options) {
    NoiseParams noise{p, epsilon, 0};
    noise.validate();
    if (options.shots < 1)
        throw std::invalid_argument("shots must be at least 1");
    if (target.sectors.empty())
        throw std::invalid_argument("target has no decoding graph");
    PointResult best;
    bool have = false;
    for (size_t s = 0; s < target.sectors.size(); ++s) {
        const DecodingGraph& graph = *target.sectors[s];
        // Seeded by code name and sector, so a sector sees the same shots
        // whether it is run alone or as part of "both".
        const std::string base = target.label.substr(0, target.label.find('/'));
        std::string seed_label = base + "#" + target.sector_names[s] + "#" + std::to_string(target.side);
        noise.seed = point_seed(options.seed, seed_label, p, epsilon);
        detail::ShotTally tally = detail::run_sector(graph, algorithm, noise, options);
        PointResult r;
        r.code = target.label;
        r.n = target.n;
        r.k = target.k;
        r.d = target.d;
        r.side = target.side;
        r.algorithm = algorithm;
        r.sector = target.sector_names[s];
        r.p = p;
        r.epsilon = epsilon;
        r.shots = options.shots;
        r.failures = tally.failures;
        r.nonconverged = tally.nonconverged;
        r.visited_mean = tally.visited_sum / static_cast<double>(options.shots);
        r.visited_max = tally.visited_max;
        if (options.timing && !tally.times.empty()) {
            r.timed = true;
            double sum = 0.0;
            for (auto t : tally.times)
                sum += static_cast<double>(t);
            r.mean_ns = sum / static_cast<double>(tally.times.size());
            auto mid = tally.times.begin() + static_cast<std::ptrdiff_t>(tally.times.size() / 2);
            std::nth_element(tally.times.begin(), mid, tally.times.end());
            r.p50_ns = static_cast<double>(*mid);
        }
        if (!have || r.failures > best.failures) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

/// All points of a p × ε grid, p-major.
inline std::vector<PointResult> run_grid(
    const Target& target, Algorithm algorithm, const std::vector<double>& ps, const std::vector<double>& epsilons,
    const RunOptions& options) {
    if (ps.empty() || epsilons.empty())
        throw std::invalid_argument("run_grid: empty p or epsilon grid");
    std::vector<PointResult> out;
    for (double p : ps)
        for (double e : epsilons)
            out.push_back(run_point(target, algorithm, p, e, options));
    return out;
}

/// Decode-time table over code sizes at fixed p (ε = 0). Timing covers the
/// decode call only.
inline std::vector<PointResult> benchmark_timing(
    const std::vector<Target>& targets, Algorithm algorithm, const std::vector<double>& ps, RunOptions options) {
    options.timing = true;
    std::vector<PointResult> out;
    for (double p : ps)
        for (const auto& t : targets)
            out.push_back(run_point(t, algorithm, p, 0.0, options));
    return out;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("loglog_slope needs at least two (x, y) pairs");
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0))
            throw std::invalid_argument("loglog_slope needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0)
        throw std::invalid_argument("loglog_slope needs distinct x values");
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Threshold estimation.

/// Logical rate against p for one code size.
struct Curve {
    size_t size = 0;
    std::vector<double> p;
    std::vector<double> rate;
};

struct CrossingEstimate {
    bool found = false;
    bool clean = false;
    double estimate = std::numeric_limits<double>::quiet_NaN();
    double uncertainty = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> crossings;
    std::vector<size_t> crossings_per_pair;

    std::string summary() const {
        if (!clean)
            return "no clear threshold";
        char buf[96];
        std::snprintf(buf, sizeof buf, "threshold %.4f +/- %.4f", estimate, uncertainty);
        return buf;
    }
};

/// Crossings of every pair of curves, with log(rate) interpolated linearly in
/// p between grid points shared by both curves (points where either rate is
/// zero are skipped). The estimate is the median crossing and the uncertainty
/// half the spread. The result is clean when every pair crosses exactly once
/// and the half-spread is at most `clean_halfwidth`.
inline CrossingEstimate estimate_crossing(const std::vector<Curve>& curves, double clean_halfwidth = 0.005) {
    if (curves.size() < 2)
        throw std::invalid_argument("estimate_crossing needs at least two curves");
    CrossingEstimate est;
    bool every_pair_once = true;
    for (size_t a = 0; a < curves.size(); ++a) {
        for (size_t b = a + 1; b < curves.size(); ++b) {
            std::vector<double> ps, diff;
            for (size_t i = 0; i < curves[a].p.size(); ++i) {
                for (size_t j = 0; j < curves[b].p.size(); ++j) {
                    if (curves[b].p[j] != curves[a].p[i])
                        continue;
                    double ra = curves[a].rate[i], rb = curves[b].rate[j];
                    if (ra > 0 && rb > 0) {
                        ps.push_back(curves[a].p[i]);
                        diff.push_back(std::log(ra) - std::log(rb));
                    }
                }
            }
            size_t count = 0;
            for (size_t i = 0; i + 1 < ps.size(); ++i) {
                double d0 = diff[i], d1 = diff[i + 1];
                if ((d0 < 0 && d1 >= 0) || (d0 > 0 && d1 <= 0)) {
                    est.crossings.push_back(ps[i] + (ps[i + 1] - ps[i]) * d0 / (d0 - d1));
                    ++count;
                }
            }
            est.crossings_per_pair.push_back(count);
            every_pair_once &= count == 1;
        }
    }
    if (est.crossings.empty())
        return est;
    est.found = true;
    std::vector<double> sorted = est.crossings;
    std::sort(sorted.begin(), sorted.end());
    size_t m = sorted.size();
    est.estimate = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    est.uncertainty = 0.5 * (sorted.back() - sorted.front());
    est.clean = every_pair_once && est.uncertainty <= clean_halfwidth;
    return est;
}

struct PseudoThreshold {
    bool found = false;
    double p_star = std::numeric_limits<double>::quiet_NaN();
    /// Crossing with 1 − (1 − p)^k instead of p.
    bool normalized_found = false;
    double p_star_normalized = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

/// First upward crossing of log(rate) − log(reference(p)), interpolated
/// linearly in log(p).
template <class Reference>
std::optional<double> first_crossing_loglog(
    const std::vector<double>& p, const std::vector<double>& rate, Reference&& reference) {
    std::optional<double> prev_x, prev_f;
    for (size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0) || !(rate[i] > 0))
            continue;
        double x = std::log(p[i]);
        double f = std::log(rate[i]) - std::log(reference(p[i]));
        if (f == 0)
            return p[i];
        if (prev_f && *prev_f < 0 && f > 0)
            return std::exp(*prev_x + (x - *prev_x) * (*prev_f) / (*prev_f - f));
        prev_x = x;
        prev_f = f;
    }
    return std::nullopt;
}

}  // namespace detail

/// Physical rate at which the logical rate equals p, interpolated on a
/// log-log scale; requires a grid point on each side of the crossing.
inline PseudoThreshold estimate_pseudothreshold(
    const std::vector<double>& p, const std::vector<double>& rate, size_t k = 1) {
    if (p.size() != rate.size())
        throw std::invalid_argument("estimate_pseudothreshold: p and rate differ in length");
    PseudoThreshold out;
    if (auto c = detail::first_crossing_loglog(p, rate, [](double x) { return x; })) {
        out.found = true;
        out.p_star = *c;
    }
    const double kk = static_cast<double>(std::max<size_t>(k, 1));
    if (auto c = detail::first_crossing_loglog(
            p, rate, [kk](double x) { return -std::expm1(kk * std::log1p(-x)); })) {
        out.normalized_found = true;
        out.p_star_normalized = *c;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output.

inline const char* csv_header() {
    return "code,n,k,d,L,alg,p,eps,shots,failures,logical_rate,stderr,mean_ns,p50_ns,visited_mean,nonconverged";
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline void write_csv_row(std::ostream& out, const PointResult& r) {
    out << r.code << ',' << r.n << ',' << r.k << ',';
    if (r.d)
        out << *r.d;
    out << ',';
    if (r.side)
        out << r.side;
    out << ',' << to_string(r.algorithm) << ',' << format_number(r.p) << ',' << format_number(r.epsilon) << ','
        << r.shots << ',' << r.failures << ',' << format_number(r.logical_rate()) << ','
        << format_number(r.standard_error()) << ',';
    if (r.timed)
        out << format_number(r.mean_ns) << ',' << format_number(r.p50_ns);
    else
        out << ',';
    out << ',' << format_number(r.visited_mean) << ',' << r.nonconverged << '\n';
}

inline void write_csv(std::ostream& out, const std::vector<PointResult>& rows) {
    out << csv_header() << '\n';
    for (const auto& r : rows)
        write_csv_row(out, r);
}

}  // namespace bfuf

#endif  // BFUF_HARNESS_HPP
