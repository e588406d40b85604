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

// Acceptance runs. Every criterion prints its measurements and ends with one
// "criterion N: PASS|FAIL ..." line; a summary of those lines closes the run.
//
// Exit status is 0 once every selected criterion has been evaluated, whatever
// its verdict; --strict makes any FAIL an exit status of 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "bfuf/cli.hpp"
#include "bfuf/harness.hpp"
#include "bfuf/selftest.hpp"

namespace {

using namespace bfuf;

// Pinned targets and tolerances.
constexpr double kToric2dThreshold = 0.099, kToric2dTol = 0.005;
constexpr double kToric3dThreshold = 0.026, kToric3dTol = 0.004;
constexpr double kErasureThreshold = 0.50, kErasureTol = 0.02;
constexpr double kVariantThreshold = 0.085, kVariantTol = 0.005;
constexpr double kSigmas = 3.0;
constexpr double kPseudoRelTol = 0.20;
constexpr double kLinearSlopeMax = 1.15;
constexpr double kSuperlinearSlopeMin = 1.3;

// Pinned run sizes.
constexpr size_t kShotsC1 = 100000;
constexpr size_t kShotsC2 = 50000;
constexpr size_t kShotsC3 = 10000;
constexpr size_t kShotsC4 = 20000;
constexpr size_t kShotsC5Sizes = 20000;
constexpr size_t kShotsC5Eps = 10000;
constexpr size_t kShotsC7 = 100000;
constexpr size_t kShotsC10 = 20000;

struct Verdict {
    int id = 0;
    bool pass = false;
    std::string text;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double combined_sigma(const PointResult& a, const PointResult& b) {
    return std::hypot(a.standard_error(), b.standard_error());
}

class Runner {
   public:
    Runner(double scale, unsigned threads) : scale_(scale), threads_(threads) {}

    size_t shots(size_t n) const {
        return std::max<size_t>(100, static_cast<size_t>(static_cast<double>(n) * scale_));
    }

    /// Cached point; identical requests (e.g. criteria 7 and 10) share work.
    const PointResult& point(
        const Target& t, Algorithm alg, double p, double eps, size_t n_shots, uint64_t seed = 1) {
        auto key = std::make_tuple(t.label, t.side, t.n, alg, p, eps, n_shots, seed);
        auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
        RunOptions opt;
        opt.shots = n_shots;
        opt.seed = seed;
        opt.threads = threads_;
        return cache_.emplace(key, run_point(t, alg, p, eps, opt)).first->second;
    }

    std::vector<Curve> curves(
        const std::vector<Target>& targets, Algorithm alg, const std::vector<double>& ps, double eps,
        size_t n_shots) {
        std::vector<Curve> out;
        for (const auto& t : targets) {
            Curve c;
            c.size = t.side;
            for (double p : ps) {
                c.p.push_back(p);
                c.rate.push_back(point(t, alg, p, eps, n_shots).logical_rate());
            }
            out.push_back(std::move(c));
        }
        return out;
    }

   private:
    double scale_;
    unsigned threads_;
    std::map<std::tuple<std::string, size_t, size_t, Algorithm, double, double, size_t, uint64_t>, PointResult>
        cache_;
};

std::vector<Target> toric2d(const std::vector<size_t>& sizes) {
    std::vector<Target> out;
    for (auto L : sizes)
        out.push_back(toric2d_target(L));
    return out;
}

void print_curves(const std::vector<Curve>& curves, const char* axis) {
    for (const auto& c : curves) {
        std::printf("    L=%-3zu", c.size);
        for (size_t i = 0; i < c.p.size(); ++i)
            std::printf(" %s=%g:%.4g", axis, c.p[i], c.rate[i]);
        std::printf("\n");
    }
}

std::string crossing_text(const CrossingEstimate& est) {
    if (!est.found)
        return "no crossing";
    std::string s = fmt("%.4f", est.estimate) + " +/- " + fmt("%.4f", est.uncertainty);
    return s + (est.clean ? " (clean)" : " (not clean)");
}

Verdict threshold_criterion(
    int id, const std::string& what, const std::vector<Curve>& curves, double target, double tol,
    bool require_clean, const char* axis = "p") {
    print_curves(curves, axis);
    auto est = estimate_crossing(curves);
    bool pass = est.found && (!require_clean || est.clean) && std::abs(est.estimate - target) <= tol;
    return {id, pass,
            what + ": " + crossing_text(est) + ", target " + fmt("%.3f", target) + " +/- " + fmt("%.3f", tol)};
}

Verdict c1(Runner& r) {
    auto ps = parse_grid("0.08:0.12:0.005");
    auto curves = r.curves(toric2d({8, 16, 24, 32}), Algorithm::improved, ps, 0.0, r.shots(kShotsC1));
    return threshold_criterion(1, "2D toric threshold, improved", curves, kToric2dThreshold, kToric2dTol, true);
}

Verdict c2(Runner& r) {
    std::vector<Target> targets;
    for (size_t L : {6, 8, 10, 12})
        targets.push_back(toric3d_target(L, L));
    auto ps = parse_grid("0.020:0.032:0.002");
    auto curves = r.curves(targets, Algorithm::improved, ps, 0.0, r.shots(kShotsC2));
    return threshold_criterion(
        2, "(2+1)D toric threshold, improved, T = L", curves, kToric3dThreshold, kToric3dTol, true);
}

Verdict c3(Runner& r) {
    auto eps = parse_grid("0.44:0.56:0.01");
    std::vector<Curve> curves;
    for (const auto& t : toric2d({8, 16, 24, 32})) {
        Curve c;
        c.size = t.side;
        for (double e : eps) {
            c.p.push_back(e);
            c.rate.push_back(r.point(t, Algorithm::improved, 0.0, e, r.shots(kShotsC3)).logical_rate());
        }
        curves.push_back(std::move(c));
    }
    return threshold_criterion(
        3, "erasure-only onset (p = 0), improved", curves, kErasureThreshold, kErasureTol, false, "eps");
}

Verdict c4(Runner& r) {
    auto ps = parse_grid("0.07:0.10:0.005");
    auto curves = r.curves(toric2d({8, 16, 24, 32}), Algorithm::variant, ps, 0.0, r.shots(kShotsC4));
    return threshold_criterion(
        4, "variant threshold at eps = 0", curves, kVariantThreshold, kVariantTol, true);
}

Verdict c5(Runner& r) {
    const double eps = 0.15;
    auto ps = parse_grid("0.01:0.07:0.01");
    auto small = toric2d_target(16), large = toric2d_target(32), fixed = toric2d_target(64);
    auto fixed_ps = parse_grid("0.03,0.04");
    auto fixed_eps = parse_grid("0.05,0.1,0.15,0.2");

    // Larger code worse by more than kSigmas at some p.
    auto size_inversion = [&](Algorithm alg) {
        double best = 0;
        for (double p : ps) {
            const auto& a = r.point(small, alg, p, eps, r.shots(kShotsC5Sizes));
            const auto& b = r.point(large, alg, p, eps, r.shots(kShotsC5Sizes));
            double z = (b.logical_rate() - a.logical_rate()) / std::max(combined_sigma(a, b), 1e-12);
            std::printf("    %-8s eps=%.2f p=%.2f  L16 %.4f  L32 %.4f  z=%+.1f\n", to_string(alg), eps, p,
                        a.logical_rate(), b.logical_rate(), z);
            best = std::max(best, z);
        }
        return best;
    };
    // More erasures, fewer failures by more than kSigmas, at fixed L and p.
    auto eps_drop = [&](Algorithm alg) {
        double best = 0;
        for (double p : fixed_ps) {
            std::vector<const PointResult*> row;
            for (double e : fixed_eps)
                row.push_back(&r.point(fixed, alg, p, e, r.shots(kShotsC5Eps)));
            std::printf("    %-8s L=64 p=%.2f", to_string(alg), p);
            for (size_t i = 0; i < row.size(); ++i)
                std::printf("  eps=%.2f:%.4f", fixed_eps[i], row[i]->logical_rate());
            std::printf("\n");
            for (size_t i = 0; i < row.size(); ++i)
                for (size_t j = i + 1; j < row.size(); ++j) {
                    double d = row[i]->logical_rate() - row[j]->logical_rate();
                    best = std::max(best, d / std::max(combined_sigma(*row[i], *row[j]), 1e-12));
                }
        }
        return best;
    };
    double inv_variant = size_inversion(Algorithm::variant);
    double inv_improved = size_inversion(Algorithm::improved);
    double drop_variant = eps_drop(Algorithm::variant);
    double drop_improved = eps_drop(Algorithm::improved);
    bool pass = inv_variant > kSigmas && drop_variant > kSigmas && inv_improved <= kSigmas &&
                drop_improved <= kSigmas;
    std::string text = "variant pathologies: size inversion z=" + fmt("%.1f", inv_variant) +
                       ", erasure drop z=" + fmt("%.1f", drop_variant) + "; improved z=" + fmt("%.1f", inv_improved) +
                       " and z=" + fmt("%.1f", drop_improved) + " (need > 3 for variant, <= 3 for improved)";
    return {5, pass, text};
}

Verdict c6(Runner& r) {
    auto ps = parse_grid("0.08:0.12:0.005");
    auto targets = toric2d({8, 16, 24, 32});
    auto curves = r.curves(targets, Algorithm::simple, ps, 0.0, r.shots(kShotsC1));
    print_curves(curves, "p");
    auto est = estimate_crossing(curves);
    double worst_z = std::numeric_limits<double>::infinity();
    for (const auto& t : targets)
        for (double p : ps) {
            const auto& s = r.point(t, Algorithm::simple, p, 0.0, r.shots(kShotsC1));
            const auto& i = r.point(t, Algorithm::improved, p, 0.0, r.shots(kShotsC1));
            worst_z = std::min(worst_z, (s.logical_rate() - i.logical_rate()) / std::max(combined_sigma(s, i), 1e-12));
        }
    bool pass = !est.clean && worst_z > kSigmas;
    return {6, pass,
            "simple decoder: crossing " + crossing_text(est) + "; smallest excess over improved z=" +
                fmt("%.1f", worst_z) + " (need no clean crossing and z > 3 everywhere)"};
}

struct BicycleRef {
    const char* name;
    double pseudo;
};
constexpr BicycleRef kBicycles[] = {{"bb72", 0.019}, {"bb90", 0.030}, {"bb108", 0.028}};

std::vector<double> c7_grid() {
    return parse_grid("0.005:0.04:0.0025");
}

Verdict c7(Runner& r) {
    bool pass = true;
    std::string text = "bicycle pseudo-thresholds (worst sector):";
    for (const auto& ref : kBicycles) {
        auto t = code_target(build_bicycle(*builtin_bicycle_spec(ref.name)), SectorChoice::both);
        std::vector<double> ps = c7_grid(), rates;
        for (double p : ps)
            rates.push_back(r.point(t, Algorithm::qldpc, p, 0.0, r.shots(kShotsC7)).logical_rate());
        auto pt = estimate_pseudothreshold(ps, rates, t.k);
        std::printf("    %-6s", ref.name);
        for (size_t i = 0; i < ps.size(); ++i)
            std::printf(" %g:%.3g", ps[i], rates[i]);
        std::printf("\n    %-6s k-normalized crossing %s\n", ref.name,
                    pt.normalized_found ? fmt("%.4f", pt.p_star_normalized).c_str() : "not bracketed");
        bool ok = pt.found && std::abs(pt.p_star / ref.pseudo - 1.0) <= kPseudoRelTol;
        pass &= ok;
        text += std::string(" ") + ref.name + " " + (pt.found ? fmt("%.4f", pt.p_star) : "n/a") + " vs " +
                fmt("%.3f", ref.pseudo) + (ok ? "" : " (off)") + ";";
    }
    text += " tolerance +/- 20% relative";
    return {7, pass, text};
}

Verdict c8(Runner& r) {
    // Timing runs use one thread so that cores do not compete.
    const std::vector<size_t> sizes = {16, 32, 64, 128, 256};
    const std::vector<size_t> base_shots = {3000, 3000, 1000, 400, 200};
    bool pass = true;
    std::string text = "decode-time slopes vs n:";
    auto slope_of = [&](const std::vector<Target>& targets, const std::vector<size_t>& n_shots, Algorithm alg,
                        double p) {
        std::vector<double> n, t;
        for (size_t i = 0; i < targets.size(); ++i) {
            RunOptions opt;
            opt.shots = r.shots(n_shots[i]);
            opt.threads = 1;
            opt.timing = true;
            auto res = run_point(targets[i], alg, p, 0.0, opt);
            n.push_back(static_cast<double>(res.n));
            t.push_back(res.mean_ns);
            std::printf("    %-8s p=%-5g L=%-3zu n=%-6zu mean %.0f ns  visited %.1f\n", to_string(alg), p,
                        targets[i].side, res.n, res.mean_ns, res.visited_mean);
        }
        return loglog_slope(n, t);
    };
    auto targets = toric2d(sizes);
    for (Algorithm alg : {Algorithm::simple, Algorithm::improved})
        for (double p : {0.001, 0.01, 0.05}) {
            double s = slope_of(targets, base_shots, alg, p);
            bool ok = s <= kLinearSlopeMax;
            pass &= ok;
            text += std::string(" ") + to_string(alg) + "@" + fmt("%g", p) + "=" + fmt("%.2f", s) + (ok ? "" : "(!)");
        }
    double q = slope_of(toric2d({8, 16, 24, 32}), {200, 200, 200, 200}, Algorithm::qldpc, 0.08);
    pass &= q > kSuperlinearSlopeMin;
    text += " qldpc@0.08=" + fmt("%.2f", q) + "; need <= 1.15, qldpc > 1.3";

    RunOptions opt;
    opt.shots = r.shots(10000);
    opt.threads = 1;
    opt.timing = true;
    auto d10 = run_point(toric2d_target(10), Algorithm::improved, 0.01, 0.0, opt);
    std::printf("    improved L=10 p=0.01: mean %.2f us (reported, not gated)\n", d10.mean_ns / 1000.0);
    return {8, pass, text};
}

Verdict c9(Runner&) {
    bool pass = true;
    double total = 0;
    for (const auto& c : run_selftest()) {
        std::printf("    %s %s (%.1f s)%s%s\n", c.passed ? "ok  " : "FAIL", c.name.c_str(), c.seconds,
                    c.detail.empty() ? "" : ": ", c.detail.c_str());
        pass &= c.passed;
        total += c.seconds;
    }
    return {9, pass, "property suites " + std::string(pass ? "all passed" : "had failures") + " in " +
                         fmt("%.1f", total) + " s"};
}

Verdict c10(Runner& r) {
    auto t = code_target(build_bicycle(*builtin_bicycle_spec("bb108")), SectorChoice::both);
    auto ps = parse_grid("0:0.03:0.005");
    auto eps = parse_grid("0:0.2:0.05");
    const uint64_t seed = 2;  // independent of the criterion-7 shots
    std::vector<std::vector<const PointResult*>> g(ps.size());
    for (size_t i = 0; i < ps.size(); ++i) {
        std::printf("    p=%-6g", ps[i]);
        for (double e : eps) {
            g[i].push_back(&r.point(t, Algorithm::qldpc, ps[i], e, r.shots(kShotsC10), seed));
            std::printf(" %.4f", g[i].back()->logical_rate());
        }
        std::printf("\n");
    }
    double worst = 0;  // largest decrease along an axis, in combined sigmas
    auto check = [&](const PointResult& lo, const PointResult& hi) {
        double d = lo.logical_rate() - hi.logical_rate();
        if (d > 0)
            worst = std::max(worst, d / std::max(combined_sigma(lo, hi), 1e-12));
    };
    for (size_t i = 0; i < ps.size(); ++i)
        for (size_t j = 0; j < eps.size(); ++j) {
            if (i + 1 < ps.size())
                check(*g[i][j], *g[i + 1][j]);
            if (j + 1 < eps.size())
                check(*g[i][j], *g[i][j + 1]);
        }
    double worst_ref = 0;
    auto ref_ps = c7_grid();
    for (size_t i = 0; i < ps.size(); ++i) {
        bool shared = false;
        for (double q : ref_ps)
            shared |= q == ps[i];
        if (!shared)
            continue;
        const auto& ref = r.point(t, Algorithm::qldpc, ps[i], 0.0, r.shots(kShotsC7));
        double z = std::abs(ref.logical_rate() - g[i][0]->logical_rate()) /
                   std::max(combined_sigma(ref, *g[i][0]), 1e-12);
        worst_ref = std::max(worst_ref, z);
    }
    bool pass = worst <= kSigmas && worst_ref <= kSigmas;
    return {10, pass,
            "bb108 p x eps grid: largest decrease z=" + fmt("%.1f", worst) + ", eps=0 column vs criterion 7 z=" +
                fmt("%.1f", worst_ref) + " (need both <= 3)"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance runs for the bfuf decoders"};
    std::vector<int> only;
    double scale = 1.0;
    bool strict = false;
    std::string report;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--only", only, "criteria to run, e.g. 1,4 (default: all)")->delimiter(',')->check(CLI::Range(1, 10));
    app.add_option("--scale", scale, "multiply shot counts (values below 1 are for smoke runs only)")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "worker threads for Monte Carlo points")->check(CLI::PositiveNumber);
    app.add_flag("--strict", strict, "exit with status 1 if any criterion fails");
    app.add_option("--report", report, "also write the summary lines to this file");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Verdict(Runner&)>> criteria = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
    std::set<int> selected(only.begin(), only.end());
    Runner runner(scale, threads);
    if (scale != 1.0)
        std::printf("note: shot counts scaled by %g; verdicts are not acceptance results\n", scale);

    std::vector<Verdict> verdicts;
    for (size_t i = 0; i < criteria.size(); ++i) {
        int id = static_cast<int>(i + 1);
        if (!selected.empty() && !selected.count(id))
            continue;
        std::printf("criterion %d\n", id);
        std::fflush(stdout);
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i](runner);
        } catch (const std::exception& e) {
            v = {id, false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        v.text += fmt(" [%.0f s]", secs);
        std::printf("criterion %d: %s %s\n\n", v.id, v.pass ? "PASS" : "FAIL", v.text.c_str());
        std::fflush(stdout);
        verdicts.push_back(v);
    }

    std::printf("summary\n");
    std::ofstream file;
    if (!report.empty())
        file.open(report);
    bool all = true;
    for (const auto& v : verdicts) {
        std::string line = "criterion " + std::to_string(v.id) + ": " + (v.pass ? "PASS " : "FAIL ") + v.text;
        std::printf("%s\n", line.c_str());
        if (file)
            file << line << '\n';
        all &= v.pass;
    }
    return strict && !all ? 1 : 0;
}
