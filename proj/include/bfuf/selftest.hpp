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

#ifndef BFUF_SELFTEST_HPP
#define BFUF_SELFTEST_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bfuf/cluster_forest.hpp"
#include "bfuf/codes.hpp"
#include "bfuf/decoders.hpp"
#include "bfuf/gf2.hpp"
#include "bfuf/noise.hpp"
#include "bfuf/verifier.hpp"

namespace bfuf {

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct SelftestOptions {
    /// Multiplies every sample count; 1 gives the full suite.
    double scale = 1.0;
    uint64_t seed = 20240501;
};

namespace detail {

inline size_t scaled(double scale, size_t n) {
    return std::max<size_t>(1, static_cast<size_t>(static_cast<double>(n) * scale));
}

struct DecoderCase {
    std::string name;
    std::shared_ptr<const DecodingGraph> graph;
    Algorithm algorithm;
    double p_max;
    double eps_max;
};

inline std::vector<DecoderCase> decoder_cases() {
    std::vector<DecoderCase> cases;
    auto t2 = std::make_shared<const DecodingGraph>(toric_2d_graph(6));
    auto t3 = std::make_shared<const DecodingGraph>(build_toric_2plus1(4, 4));
    auto bb = build_bicycle(*builtin_bicycle_spec("bb72"));
    auto bx = std::make_shared<const DecodingGraph>(decoding_graph(bb, Sector::x));
    auto bz = std::make_shared<const DecodingGraph>(decoding_graph(bb, Sector::z));
    for (auto alg : {Algorithm::simple, Algorithm::improved, Algorithm::variant, Algorithm::qldpc}) {
        cases.push_back({std::string("toric2d L6 ") + to_string(alg), t2, alg, 0.15, 0.4});
        cases.push_back({std::string("toric3d L4 ") + to_string(alg), t3, alg, 0.05, 0.4});
    }
    cases.push_back({"bb72/x qldpc", bx, Algorithm::qldpc, 0.05, 0.3});
    cases.push_back({"bb72/z qldpc", bz, Algorithm::qldpc, 0.05, 0.3});
    return cases;
}

/// Syndrome satisfaction, support locality and end-of-run forest audits.
inline std::string check_decoders(const SelftestOptions& opt, size_t total_shots) {
    auto cases = decoder_cases();
    const size_t per_case = std::max<size_t>(1, total_shots / cases.size());
    for (size_t ci = 0; ci < cases.size(); ++ci) {
        const auto& c = cases[ci];
        const TannerGraph& g = c.graph->tanner;
        Decoder dec(g, c.algorithm);
        Shot shot;
        for (size_t i = 0; i < per_case; ++i) {
            Rng rng = Rng::for_shot(opt.seed + ci, i);
            NoiseParams noise{rng.uniform() * c.p_max, rng.uniform() * c.eps_max, 0};
            sample_shot(g, c.graph->mechanisms, noise, rng, shot);
            const DecodeOutcome& out = dec.decode(shot);
            std::string where = c.name + " shot " + std::to_string(i);
            if (!out.converged())
                return where + ": decoder did not converge";
            if (g.syndrome_of(out.correction) != shot.syndrome)
                return where + ": correction does not reproduce the syndrome";
            const ClusterForest& f = dec.forest();
            bool local = true;
            out.correction.for_each_one([&](size_t d) {
                if (c.algorithm == Algorithm::qldpc) {
                    uint32_t r = f.root_no_compress(static_cast<uint32_t>(d));
                    local &= f.touch_order(static_cast<uint32_t>(d)) != 0 && f.syndrome_count(r) > 0;
                } else {
                    local &= dec.traversal().visited[d] != 0;
                }
            });
            if (!local)
                return where + ": correction leaves the grown clusters";
            if (f.invalid_count() != 0)
                return where + ": invalid clusters left at return";
            if (i % 64 == 0) {
                if (auto err = f.audit(); !err.empty())
                    return where + ": forest audit: " + err;
            }
        }
    }
    return {};
}

inline std::string check_visited_bound(const SelftestOptions& opt, size_t shots) {
    std::vector<std::shared_ptr<const DecodingGraph>> graphs;
    for (size_t L : {4, 6, 8})
        graphs.push_back(std::make_shared<const DecodingGraph>(toric_2d_graph(L)));
    std::vector<Decoder> decoders;
    for (auto& g : graphs)
        decoders.emplace_back(g->tanner, Algorithm::improved);
    Shot shot;
    for (size_t i = 0; i < shots; ++i) {
        size_t which = i % graphs.size();
        const TannerGraph& g = graphs[which]->tanner;
        Rng rng = Rng::for_shot(opt.seed ^ 0x5157, i);
        NoiseParams noise{rng.uniform() * 0.15, rng.uniform() * 0.4, 0};
        sample_shot(g, graphs[which]->mechanisms, noise, rng, shot);
        const DecodeOutcome& out = decoders[which].decode(shot);
        if (out.visited_count > 2 * g.size())
            return "shot " + std::to_string(i) + " visited " + std::to_string(out.visited_count) + " of " +
                   std::to_string(g.size()) + " nodes";
    }
    return {};
}

inline std::string check_forest(const SelftestOptions& opt, size_t sequences) {
    for (size_t s = 0; s < sequences; ++s) {
        Rng rng = Rng::for_shot(opt.seed ^ 0xf0e57, s);
        const uint32_t n_data = 1 + static_cast<uint32_t>(rng() % 500);
        const uint32_t n_check = 1 + static_cast<uint32_t>(rng() % 500);
        const ForestMode mode = rng() & 1 ? ForestMode::qldpc : ForestMode::topological;
        ClusterForest f(n_data, n_check);
        TraversalState st;
        std::vector<uint32_t> syndromes;
        for (uint32_t c = 0; c < n_check; ++c)
            if (rng() % 3 == 0)
                syndromes.push_back(n_data + c);
        f.init(mode, syndromes, {}, st);
        const uint32_t n = n_data + n_check;
        for (int op = 0; op < 2000; ++op) {
            const uint32_t u = static_cast<uint32_t>(rng() % n);
            uint32_t a = f.find(u);
            uint32_t b = f.find(static_cast<uint32_t>(rng() % n));
            switch (rng() % 4) {
                case 0:
                case 1:
                    if (a != b)
                        f.merge(a, b);
                    break;
                case 2:
                    f.push_skipped(a, u);
                    if (rng() & 1)
                        f.drain_skipped(a, [](uint32_t) {});
                    break;
                case 3:
                    if (mode == ForestMode::qldpc)
                        f.set_valid(a, rng() & 1);
                    break;
            }
            if (op % 250 == 0)
                if (auto err = f.audit(); !err.empty())
                    return "sequence " + std::to_string(s) + " op " + std::to_string(op) + ": " + err;
        }
        if (auto err = f.audit(); !err.empty())
            return "sequence " + std::to_string(s) + ": " + err;
    }
    return {};
}

inline std::string check_solve(const SelftestOptions& opt, size_t trials) {
    for (size_t t = 0; t < trials; ++t) {
        Rng rng = Rng::for_shot(opt.seed ^ 0x501e, t);
        const size_t rows = 1 + rng() % 12, cols = 1 + rng() % 12;
        BitMatrix m(rows, cols);
        for (size_t r = 0; r < rows; ++r)
            for (size_t c = 0; c < cols; ++c)
                if (rng() & 1)
                    m.set(r, c);
        BitVector b(rows);
        for (size_t r = 0; r < rows; ++r)
            if (rng() & 1)
                b.set(r);
        bool exists = false;
        for (uint64_t x = 0; x < (uint64_t{1} << cols) && !exists; ++x) {
            BitVector v(cols);
            for (size_t c = 0; c < cols; ++c)
                if (x >> c & 1)
                    v.set(c);
            exists = m * v == b;
        }
        auto sol = solve(m, b);
        if (sol.has_value() != exists)
            return "trial " + std::to_string(t) + ": solve consistency disagrees with enumeration";
        if (sol && m * *sol != b)
            return "trial " + std::to_string(t) + ": returned x does not satisfy M·x = b";
    }
    return {};
}

inline BitVector random_kernel_element(const BitMatrix& kernel, Rng& rng) {
    BitVector r(kernel.cols());
    for (size_t i = 0; i < kernel.rows(); ++i)
        if (rng() & 1)
            r ^= kernel.row(i);
    return r;
}

inline bool failure_of_residual(const CssCode& code, Sector s, const BitVector& r) {
    Shot shot;
    shot.error = r;
    shot.syndrome.assign_zero(code.checks(s).rows());
    BitVector zero(code.n);
    return is_failure(code, s, shot, zero);
}

inline std::string check_failure_oracle(const SelftestOptions& opt, size_t bb_samples) {
    CssCode t2 = build_toric_2d(2);
    DecodingGraph sparse = toric_2d_graph(2);
    for (Sector s : {Sector::x, Sector::z}) {
        BitMatrix ker = nullspace_basis(t2.checks(s));
        for (uint64_t mask = 0; mask < (uint64_t{1} << ker.rows()); ++mask) {
            BitVector r(t2.n);
            for (size_t i = 0; i < ker.rows(); ++i)
                if (mask >> i & 1)
                    r ^= ker.row(i);
            bool oracle = oracle_failure(t2, s, r);
            if (failure_of_residual(t2, s, r) != oracle)
                return std::string("toric L2 sector ") + to_string(s) + ": pairing test disagrees with rank oracle";
            if (s == Sector::x && crosses_logical_cut(sparse, r) != oracle)
                return "toric L2: sparse cut test disagrees with rank oracle";
        }
    }
    CssCode bb = build_bicycle(*builtin_bicycle_spec("bb72"));
    for (Sector s : {Sector::x, Sector::z}) {
        BitMatrix ker = nullspace_basis(bb.checks(s));
        for (size_t i = 0; i < bb_samples; ++i) {
            Rng rng = Rng::for_shot(opt.seed ^ 0x0bac1e, i * 2 + (s == Sector::z));
            BitVector r = random_kernel_element(ker, rng);
            if (failure_of_residual(bb, s, r) != oracle_failure(bb, s, r))
                return std::string("bb72 sector ") + to_string(s) + " sample " + std::to_string(i) +
                       ": pairing test disagrees with rank oracle";
        }
    }
    return {};
}

inline std::string check_coset_invariance(const SelftestOptions& opt, size_t samples) {
    std::vector<CssCode> codes{build_toric_2d(4), build_bicycle(*builtin_bicycle_spec("bb72"))};
    for (const auto& code : codes) {
        for (Sector s : {Sector::x, Sector::z}) {
            BitMatrix ker = nullspace_basis(code.checks(s));
            const BitMatrix& stab = code.stabilizers(s);
            for (size_t i = 0; i < samples; ++i) {
                Rng rng = Rng::for_shot(opt.seed ^ 0xc05e7, i);
                BitVector r = random_kernel_element(ker, rng);
                BitVector moved = r;
                for (size_t j = 0; j < stab.rows(); ++j)
                    if (rng() & 1)
                        moved ^= stab.row(j);
                if (failure_of_residual(code, s, r) != failure_of_residual(code, s, moved))
                    return code.name + ": failure changes under a stabilizer";
            }
        }
    }
    return {};
}

}  // namespace detail

/// Property suites over all decoders and codes. Each check reports its own
/// pass/fail and timing.
inline std::vector<SelftestCheck> run_selftest(const SelftestOptions& opt = {}) {
    using Clock = std::chrono::steady_clock;
    std::vector<SelftestCheck> results;
    auto run = [&](std::string name, const std::function<std::string()>& fn) {
        SelftestCheck c;
        c.name = std::move(name);
        auto t0 = Clock::now();
        try {
            c.detail = fn();
            c.passed = c.detail.empty();
        } catch (const std::exception& e) {
            c.detail = std::string("exception: ") + e.what();
        }
        c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        results.push_back(std::move(c));
    };
    const double s = opt.scale;
    run("syndrome satisfaction, locality and audits (1e5 shots)",
        [&] { return detail::check_decoders(opt, detail::scaled(s, 100000)); });
    run("improved visited <= 2N (1e6 shots)", [&] { return detail::check_visited_bound(opt, detail::scaled(s, 1000000)); });
    run("forest audits on random operation sequences", [&] { return detail::check_forest(opt, detail::scaled(s, 200)); });
    run("GF(2) solve vs exhaustive enumeration", [&] { return detail::check_solve(opt, detail::scaled(s, 10000)); });
    run("is_failure vs rank oracle", [&] { return detail::check_failure_oracle(opt, detail::scaled(s, 10000)); });
    run("coset invariance of is_failure", [&] { return detail::check_coset_invariance(opt, detail::scaled(s, 1000)); });
    return results;
}

}  // namespace bfuf

#endif  // BFUF_SELFTEST_HPP
