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

#ifndef BFUF_CODES_HPP
#define BFUF_CODES_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bfuf/gf2.hpp"
#include "bfuf/tanner_graph.hpp"

namespace bfuf {

/// Which check matrix drives decoding. `x` decodes Z-type errors with the
/// X checks (h_x); `z` decodes X-type errors with the Z checks (h_z).
enum class Sector { x, z };

inline const char* to_string(Sector s) {
    return s == Sector::x ? "x" : "z";
}

struct CssCode {
    BitMatrix h_x;
    BitMatrix h_z;
    size_t n = 0;
    size_t k = 0;
    std::optional<size_t> d;
    BitMatrix logical_x;
    BitMatrix logical_z;
    std::string name;

    const BitMatrix& checks(Sector s) const {
        return s == Sector::x ? h_x : h_z;
    }
    /// Stabilizers that a residual of this sector must lie in.
    const BitMatrix& stabilizers(Sector s) const {
        return s == Sector::x ? h_z : h_x;
    }
    /// Logicals whose pairing with a residual of this sector flags failure.
    const BitMatrix& opposite_logicals(Sector s) const {
        return s == Sector::x ? logical_x : logical_z;
    }
};

class CodeError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class MechanismKind : uint8_t { space_like, time_like };
enum class Orientation : uint8_t { horizontal, vertical, temporal, none };

/// Per-data-node metadata of a decoding graph.
struct Mechanism {
    MechanismKind kind = MechanismKind::space_like;
    Orientation orientation = Orientation::none;
    int32_t x = 0;
    int32_t y = 0;
    int32_t t = 0;
    bool erasable = true;
};

/// A Tanner (or space-time syndrome) graph ready for decoding, together with
/// the logical cut sets used to classify residual errors: a residual is a
/// logical failure iff it overlaps some cut an odd number of times.
struct DecodingGraph {
    TannerGraph tanner;
    std::vector<Mechanism> mechanisms;
    std::vector<BitVector> logical_cuts;
    std::string name;
    size_t n = 0;
    size_t k = 0;
    std::optional<size_t> d;
    size_t side = 0;
    size_t rounds = 0;

    bool topological() const {
        return tanner.every_data_degree_two();
    }
};

// ---------------------------------------------------------------------------
// Toric codes.

namespace detail {

struct ToricLattice {
    uint32_t L;
    uint32_t wrap(int64_t v) const {
        int64_t m = v % static_cast<int64_t>(L);
        return static_cast<uint32_t>(m < 0 ? m + L : m);
    }
    /// Horizontal edge from vertex (x, y) to (x + 1, y).
    uint32_t h(int64_t x, int64_t y) const {
        return wrap(y) * L + wrap(x);
    }
    /// Vertical edge from vertex (x, y) to (x, y + 1).
    uint32_t v(int64_t x, int64_t y) const {
        return L * L + wrap(y) * L + wrap(x);
    }
    uint32_t vertex(int64_t x, int64_t y) const {
        return wrap(y) * L + wrap(x);
    }
    uint32_t qubits() const {
        return 2 * L * L;
    }
    /// The two vertex checks touched by a qubit.
    std::pair<uint32_t, uint32_t> endpoints(uint32_t q) const {
        uint32_t cell = q % (L * L);
        uint32_t x = cell % L, y = cell / L;
        if (q < L * L)
            return {vertex(x, y), vertex(x + 1, y)};
        return {vertex(x, y), vertex(x, y + 1)};
    }
};

inline void check_side(size_t L) {
    if (L < 2)
        throw std::invalid_argument("toric code side length must be at least 2, got " + std::to_string(L));
    if (L > 4096)
        throw std::invalid_argument("toric code side length too large: " + std::to_string(L));
}

}  // namespace detail

/// Toric code on the periodic L x L square lattice with qubits on edges.
/// h_x rows are vertex checks, h_z rows plaquette checks.
inline CssCode build_toric_2d(size_t side) {
    detail::check_side(side);
    detail::ToricLattice lat{static_cast<uint32_t>(side)};
    const uint32_t L = lat.L;
    std::vector<std::vector<uint32_t>> vertex_rows, plaquette_rows;
    for (uint32_t y = 0; y < L; ++y) {
        for (uint32_t x = 0; x < L; ++x) {
            vertex_rows.push_back({lat.h(x, y), lat.h(x - int64_t{1}, y), lat.v(x, y), lat.v(x, y - int64_t{1})});
            plaquette_rows.push_back({lat.h(x, y), lat.h(x, y + 1), lat.v(x, y), lat.v(x + 1, y)});
        }
    }
    CssCode code;
    code.n = lat.qubits();
    code.h_x = BitMatrix::from_sparse_rows(code.n, vertex_rows);
    code.h_z = BitMatrix::from_sparse_rows(code.n, plaquette_rows);
    code.k = 2;
    code.d = side;
    // Z logicals are primal winding cycles, X logicals dual winding cycles.
    code.logical_z = BitMatrix(2, code.n);
    code.logical_x = BitMatrix(2, code.n);
    for (uint32_t i = 0; i < L; ++i) {
        code.logical_z.set(0, lat.h(i, 0));
        code.logical_z.set(1, lat.v(0, i));
        code.logical_x.set(0, lat.h(0, i));
        code.logical_x.set(1, lat.v(i, 0));
    }
    code.name = "toric2d_L" + std::to_string(side);
    return code;
}

/// Syndrome graph of the 2D toric code for the vertex (X) checks, built
/// sparsely so that large lattices never materialize dense matrices.
/// Equivalent to decoding_graph(build_toric_2d(L), Sector::x).
inline DecodingGraph toric_2d_graph(size_t side) {
    detail::check_side(side);
    detail::ToricLattice lat{static_cast<uint32_t>(side)};
    const uint32_t L = lat.L;
    DecodingGraph g;
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    edges.reserve(2 * lat.qubits());
    g.mechanisms.resize(lat.qubits());
    for (uint32_t q = 0; q < lat.qubits(); ++q) {
        auto [a, b] = lat.endpoints(q);
        edges.emplace_back(q, a);
        edges.emplace_back(q, b);
        uint32_t cell = q % (L * L);
        g.mechanisms[q] = Mechanism{
            MechanismKind::space_like,
            q < L * L ? Orientation::horizontal : Orientation::vertical,
            static_cast<int32_t>(cell % L),
            static_cast<int32_t>(cell / L),
            0,
            true};
    }
    g.tanner = TannerGraph::from_edges(lat.qubits(), L * L, edges);
    BitVector seam_x(lat.qubits()), seam_y(lat.qubits());
    for (uint32_t i = 0; i < L; ++i) {
        seam_x.set(lat.h(0, i));
        seam_y.set(lat.v(i, 0));
    }
    g.logical_cuts = {std::move(seam_x), std::move(seam_y)};
    g.name = "toric2d_L" + std::to_string(side);
    g.n = lat.qubits();
    g.k = 2;
    g.d = side;
    g.side = side;
    g.rounds = 1;
    return g;
}

/// Space-time syndrome graph of the toric code with `rounds` repeated noisy
/// measurements of the vertex checks and periodic time. Check node (v, t)
/// has index t·L² + v; space-like mechanism (q, t) has data index t·2L² + q;
/// time-like mechanism (v, t), joining (v, t) and (v, t + 1 mod T), follows
/// after all space-like ones. With a single round time-like mechanisms would
/// be self-loops and are omitted.
inline DecodingGraph build_toric_2plus1(size_t side, size_t rounds) {
    detail::check_side(side);
    if (rounds < 1 || rounds > 4096)
        throw std::invalid_argument("number of rounds must be in [1, 4096], got " + std::to_string(rounds));
    detail::ToricLattice lat{static_cast<uint32_t>(side)};
    const uint32_t L = lat.L;
    const uint32_t T = static_cast<uint32_t>(rounds);
    const uint32_t per_layer_checks = L * L;
    const uint32_t space_like = lat.qubits() * T;
    const uint32_t time_like = T > 1 ? per_layer_checks * T : 0;
    const uint32_t n_data = space_like + time_like;
    const uint32_t n_check = per_layer_checks * T;

    DecodingGraph g;
    g.mechanisms.resize(n_data);
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    edges.reserve(2 * size_t{n_data});
    for (uint32_t t = 0; t < T; ++t) {
        for (uint32_t q = 0; q < lat.qubits(); ++q) {
            uint32_t id = t * lat.qubits() + q;
            auto [a, b] = lat.endpoints(q);
            edges.emplace_back(id, t * per_layer_checks + a);
            edges.emplace_back(id, t * per_layer_checks + b);
            uint32_t cell = q % (L * L);
            g.mechanisms[id] = Mechanism{
                MechanismKind::space_like,
                q < L * L ? Orientation::horizontal : Orientation::vertical,
                static_cast<int32_t>(cell % L),
                static_cast<int32_t>(cell / L),
                static_cast<int32_t>(t),
                true};
        }
    }
    if (T > 1) {
        for (uint32_t t = 0; t < T; ++t) {
            for (uint32_t v = 0; v < per_layer_checks; ++v) {
                uint32_t id = space_like + t * per_layer_checks + v;
                edges.emplace_back(id, t * per_layer_checks + v);
                edges.emplace_back(id, ((t + 1) % T) * per_layer_checks + v);
                g.mechanisms[id] = Mechanism{
                    MechanismKind::time_like,
                    Orientation::temporal,
                    static_cast<int32_t>(v % L),
                    static_cast<int32_t>(v / L),
                    static_cast<int32_t>(t),
                    false};
            }
        }
    }
    g.tanner = TannerGraph::from_edges(n_data, n_check, edges);
    // Spatial seams x = 0 and y = 0, every round.
    BitVector seam_x(n_data), seam_y(n_data);
    for (uint32_t t = 0; t < T; ++t) {
        for (uint32_t i = 0; i < L; ++i) {
            seam_x.set(t * lat.qubits() + lat.h(0, i));
            seam_y.set(t * lat.qubits() + lat.v(i, 0));
        }
    }
    g.logical_cuts = {std::move(seam_x), std::move(seam_y)};
    g.name = "toric3d_L" + std::to_string(side) + "_T" + std::to_string(rounds);
    g.n = lat.qubits();
    g.k = 2;
    g.d = side;
    g.side = side;
    g.rounds = rounds;
    return g;
}

// ---------------------------------------------------------------------------
// Generic CSS codes.

/// Logical operator bases for the CSS code (h_x, h_z): logical_z rows lie in
/// ker(h_x) outside rowspace(h_z), logical_x rows in ker(h_z) outside
/// rowspace(h_x), and logical_x · logical_zᵀ is the identity.
inline std::pair<BitMatrix, BitMatrix> compute_logicals(const BitMatrix& h_x, const BitMatrix& h_z) {
    if (h_x.cols() != h_z.cols())
        throw CodeError("h_x and h_z have different column counts");
    const size_t n = h_x.cols();

    auto pick = [n](const BitMatrix& kernel_of, const BitMatrix& modulo) {
        EchelonBasis span(n);
        for (size_t r = 0; r < modulo.rows(); ++r)
            span.insert(modulo.row(r));
        BitMatrix kernel = nullspace_basis(kernel_of);
        BitMatrix chosen(0, n);
        for (size_t r = 0; r < kernel.rows(); ++r) {
            BitVector v = kernel.row(r);
            if (span.insert(v))
                chosen.append_row(v);
        }
        return chosen;
    };

    BitMatrix logical_z = pick(h_x, h_z);
    BitMatrix logical_x = pick(h_z, h_x);
    if (logical_x.rows() != logical_z.rows())
        throw CodeError("inconsistent logical operator counts; is h_x·h_zᵀ = 0?");
    BitMatrix pairing = logical_x * logical_z.transposed();
    auto inv = inverse(pairing);
    if (!inv)
        throw CodeError("logical pairing matrix is singular; is h_x·h_zᵀ = 0?");
    logical_x = *inv * logical_x;
    return {std::move(logical_x), std::move(logical_z)};
}

/// Validates commutation, derives k and the logical bases.
inline CssCode make_css_code(BitMatrix h_x, BitMatrix h_z, std::string name, std::optional<size_t> d = {}) {
    if (h_x.cols() != h_z.cols())
        throw CodeError(
            "h_x has " + std::to_string(h_x.cols()) + " columns but h_z has " + std::to_string(h_z.cols()));
    if (!(h_x * h_z.transposed()).is_zero())
        throw CodeError("check matrices do not commute: h_x·h_zᵀ ≠ 0");
    CssCode code;
    code.n = h_x.cols();
    code.k = code.n - rank(h_x) - rank(h_z);
    auto [lx, lz] = compute_logicals(h_x, h_z);
    if (lx.rows() != code.k)
        throw CodeError("logical basis size does not match k");
    code.h_x = std::move(h_x);
    code.h_z = std::move(h_z);
    code.logical_x = std::move(lx);
    code.logical_z = std::move(lz);
    code.d = d;
    code.name = std::move(name);
    return code;
}

inline TannerGraph sector_tanner(const CssCode& code, Sector sector) {
    return TannerGraph::from_check_matrix(code.checks(sector));
}

inline DecodingGraph decoding_graph(const CssCode& code, Sector sector) {
    DecodingGraph g;
    g.tanner = sector_tanner(code, sector);
    g.mechanisms.assign(code.n, Mechanism{});
    const BitMatrix& logicals = code.opposite_logicals(sector);
    for (size_t r = 0; r < logicals.rows(); ++r)
        g.logical_cuts.push_back(logicals.row(r));
    g.name = code.name;
    g.n = code.n;
    g.k = code.k;
    g.d = code.d;
    return g;
}

// ---------------------------------------------------------------------------
// Bivariate bicycle codes.

struct Monomial {
    uint32_t x_power = 0;
    uint32_t y_power = 0;
};

struct BicycleSpec {
    std::string name;
    uint32_t l = 0;
    uint32_t m = 0;
    std::vector<Monomial> a;
    std::vector<Monomial> b;
    size_t n = 0;
    size_t k = 0;
    std::optional<size_t> d;
};

namespace detail {

/// Sum of monomials x^i y^j with x = S_l ⊗ I_m and y = I_l ⊗ S_m, where S is
/// the cyclic shift. Entry ((i, j), (i + a, j + b)) is set for x^a y^b.
inline BitMatrix bicycle_polynomial(uint32_t l, uint32_t m, const std::vector<Monomial>& terms) {
    const uint32_t size = l * m;
    BitMatrix out(size, size);
    for (auto t : terms) {
        for (uint32_t i = 0; i < l; ++i)
            for (uint32_t j = 0; j < m; ++j)
                out.flip(i * m + j, ((i + t.x_power) % l) * m + (j + t.y_power) % m);
    }
    return out;
}

}  // namespace detail

/// H_X = [A | B], H_Z = [Bᵀ | Aᵀ]. Fails if the declared n or k disagree
/// with the constructed code.
inline CssCode build_bicycle(const BicycleSpec& spec) {
    if (spec.l == 0 || spec.m == 0)
        throw CodeError("bicycle code needs positive l and m");
    if (spec.a.empty() || spec.b.empty())
        throw CodeError("bicycle code needs non-empty A and B polynomials");
    BicycleSpec reduced = spec;
    for (auto* terms : {&reduced.a, &reduced.b})
        for (auto& t : *terms)
            t = Monomial{t.x_power % spec.l, t.y_power % spec.m};
    BitMatrix a = detail::bicycle_polynomial(spec.l, spec.m, reduced.a);
    BitMatrix b = detail::bicycle_polynomial(spec.l, spec.m, reduced.b);
    BitMatrix h_x = BitMatrix::hstack(a, b);
    BitMatrix h_z = BitMatrix::hstack(b.transposed(), a.transposed());
    std::string name = spec.name.empty() ? "bicycle_n" + std::to_string(2 * spec.l * spec.m) : spec.name;
    CssCode code = make_css_code(std::move(h_x), std::move(h_z), std::move(name), spec.d);
    if (spec.n != 0 && spec.n != code.n)
        throw CodeError(
            "bicycle code " + code.name + ": declared n = " + std::to_string(spec.n) + " but built " +
            std::to_string(code.n));
    if (spec.n != 0 && spec.k != code.k)
        throw CodeError(
            "bicycle code " + code.name + ": declared k = " + std::to_string(spec.k) + " but computed " +
            std::to_string(code.k));
    return code;
}

/// Reads a bicycle spec:
///
///     # comment
///     name bb72
///     l 6
///     m 6
///     a 3,0 0,1 0,2     # x^3 + y + y^2, as (x power, y power) pairs
///     b 0,3 1,0 2,0
///     n 72
///     k 12
///     d 6
inline BicycleSpec parse_bicycle_spec(std::istream& in) {
    BicycleSpec spec;
    std::string line;
    size_t line_no = 0;
    bool have_l = false, have_m = false;
    auto fail = [&](const std::string& msg) {
        throw CodeError("bicycle spec line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key))
            continue;
        if (key == "name") {
            ss >> spec.name;
        } else if (key == "l" || key == "m" || key == "n" || key == "k" || key == "d") {
            long long value;
            if (!(ss >> value) || value < 0)
                fail("expected a non-negative integer after '" + key + "'");
            if (key == "l")
                spec.l = static_cast<uint32_t>(value), have_l = true;
            else if (key == "m")
                spec.m = static_cast<uint32_t>(value), have_m = true;
            else if (key == "n")
                spec.n = static_cast<size_t>(value);
            else if (key == "k")
                spec.k = static_cast<size_t>(value);
            else
                spec.d = static_cast<size_t>(value);
        } else if (key == "a" || key == "b") {
            auto& terms = key == "a" ? spec.a : spec.b;
            std::string token;
            while (ss >> token) {
                auto comma = token.find(',');
                if (comma == std::string::npos)
                    fail("monomial '" + token + "' is not of the form i,j");
                try {
                    terms.push_back(Monomial{
                        static_cast<uint32_t>(std::stoul(token.substr(0, comma))),
                        static_cast<uint32_t>(std::stoul(token.substr(comma + 1)))});
                } catch (const std::exception&) {
                    fail("monomial '" + token + "' is not of the form i,j");
                }
            }
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (!have_l || !have_m)
        throw CodeError("bicycle spec is missing l or m");
    return spec;
}

inline BicycleSpec load_bicycle_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw CodeError("cannot open bicycle spec file '" + path + "'");
    return parse_bicycle_spec(in);
}

/// The five bivariate bicycle codes [[72,12,6]], [[90,8,10]], [[108,8,10]],
/// [[144,12,12]] and [[288,12,18]], by name ("bb72" ... "bb288"). The same
/// data ships as text files under data/bicycle/.
inline std::vector<BicycleSpec> builtin_bicycle_specs() {
    auto spec = [](std::string name, uint32_t l, uint32_t m, std::vector<Monomial> a, std::vector<Monomial> b,
                   size_t n, size_t k, size_t d) { return BicycleSpec{std::move(name), l, m, a, b, n, k, d}; };
    const std::vector<Monomial> a_std{{3, 0}, {0, 1}, {0, 2}};
    const std::vector<Monomial> b_std{{0, 3}, {1, 0}, {2, 0}};
    return {
        spec("bb72", 6, 6, a_std, b_std, 72, 12, 6),
        spec("bb90", 15, 3, {{9, 0}, {0, 1}, {0, 2}}, {{0, 0}, {2, 0}, {7, 0}}, 90, 8, 10),
        spec("bb108", 9, 6, a_std, b_std, 108, 8, 10),
        spec("bb144", 12, 6, a_std, b_std, 144, 12, 12),
        spec("bb288", 12, 12, {{3, 0}, {0, 2}, {0, 7}}, b_std, 288, 12, 18),
    };
}

inline std::optional<BicycleSpec> builtin_bicycle_spec(std::string_view name) {
    for (auto& s : builtin_bicycle_specs())
        if (s.name == name)
            return s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sparse check-matrix text format: two blocks (H_X then H_Z), each a header
// line "n m" (n columns, m rows) followed by m lines of zero-based column
// indices separated by single spaces. An empty row is an empty line.

inline void write_check_matrices(std::ostream& out, const BitMatrix& h_x, const BitMatrix& h_z) {
    for (const BitMatrix* h : {&h_x, &h_z}) {
        out << h->cols() << ' ' << h->rows() << '\n';
        for (size_t r = 0; r < h->rows(); ++r) {
            auto support = h->row_support(r);
            for (size_t i = 0; i < support.size(); ++i)
                out << (i ? " " : "") << support[i];
            out << '\n';
        }
    }
}

inline std::pair<BitMatrix, BitMatrix> parse_check_matrices(std::istream& in) {
    size_t line_no = 0;
    auto read_block = [&](const char* label) {
        std::string line;
        do {
            if (!std::getline(in, line))
                throw CodeError(std::string("check-matrix file: missing ") + label + " header");
            ++line_no;
        } while (line.find_first_not_of(" \t\r") == std::string::npos);
        std::istringstream header(line);
        long long n, m;
        std::string extra;
        if (!(header >> n >> m) || n < 0 || m < 0 || (header >> extra))
            throw CodeError(
                "check-matrix file line " + std::to_string(line_no) + ": expected header 'n m' for " + label);
        std::vector<std::vector<uint32_t>> rows(static_cast<size_t>(m));
        for (auto& row : rows) {
            if (!std::getline(in, line))
                throw CodeError(std::string("check-matrix file: truncated ") + label + " block");
            ++line_no;
            std::istringstream ss(line);
            long long c;
            while (ss >> c) {
                if (c < 0 || c >= n)
                    throw CodeError(
                        "check-matrix file line " + std::to_string(line_no) + ": column " + std::to_string(c) +
                        " out of range");
                row.push_back(static_cast<uint32_t>(c));
            }
            ss.clear();
            std::string rest;
            if (ss >> rest)
                throw CodeError(
                    "check-matrix file line " + std::to_string(line_no) + ": unexpected token '" + rest + "'");
        }
        // Duplicate indices within a row would cancel; reject them instead.
        for (auto& row : rows) {
            std::vector<uint32_t> sorted = row;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw CodeError(std::string("check-matrix file: duplicate column index in ") + label);
        }
        return BitMatrix::from_sparse_rows(static_cast<size_t>(n), rows);
    };
    BitMatrix h_x = read_block("H_X");
    BitMatrix h_z = read_block("H_Z");
    return {std::move(h_x), std::move(h_z)};
}

inline CssCode load_check_matrices(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw CodeError("cannot open check-matrix file '" + path + "'");
    auto [h_x, h_z] = parse_check_matrices(in);
    std::string name = path;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos)
        name = name.substr(slash + 1);
    return make_css_code(std::move(h_x), std::move(h_z), name);
}

}  // namespace bfuf

#endif  // BFUF_CODES_HPP
