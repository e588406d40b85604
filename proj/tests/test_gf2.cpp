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

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "bfuf/codes.hpp"
#include "bfuf/gf2.hpp"

namespace bfuf {
namespace {

using Dense = std::vector<std::vector<int>>;

// Reference rank over plain int matrices.
size_t naive_rank(Dense m) {
    size_t r = 0;
    const size_t cols = m.empty() ? 0 : m[0].size();
    for (size_t c = 0; c < cols && r < m.size(); ++c) {
        size_t p = r;
        while (p < m.size() && !m[p][c])
            ++p;
        if (p == m.size())
            continue;
        std::swap(m[p], m[r]);
        for (size_t i = 0; i < m.size(); ++i)
            if (i != r && m[i][c])
                for (size_t j = 0; j < cols; ++j)
                    m[i][j] ^= m[r][j];
        ++r;
    }
    return r;
}

Dense to_dense(const BitMatrix& m) {
    Dense d(m.rows(), std::vector<int>(m.cols()));
    for (size_t r = 0; r < m.rows(); ++r)
        for (size_t c = 0; c < m.cols(); ++c)
            d[r][c] = m.get(r, c);
    return d;
}

BitMatrix random_matrix(std::mt19937_64& rng, size_t rows, size_t cols, double density = 0.5) {
    std::bernoulli_distribution bit(density);
    BitMatrix m(rows, cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            if (bit(rng))
                m.set(r, c);
    return m;
}

BitVector random_vector(std::mt19937_64& rng, size_t n) {
    BitVector v(n);
    for (size_t i = 0; i < n; ++i)
        if (rng() & 1)
            v.set(i);
    return v;
}

TEST(BitVector, BasicOps) {
    BitVector v = BitVector::from_bits({1, 0, 1, 1});
    EXPECT_EQ(v.count(), 3u);
    EXPECT_EQ(v.to_string(), "1011");
    BitVector w = BitVector::from_bits({1, 1, 0, 1});
    EXPECT_EQ((v ^ w).to_string(), "0110");
    EXPECT_FALSE(dot(v, w));
    BitVector big(130);
    big.set(0);
    big.set(64);
    big.set(129);
    EXPECT_EQ(big.ones(), (std::vector<uint32_t>{0, 64, 129}));
    EXPECT_THROW(v ^= big, std::invalid_argument);
}

TEST(Rank, Examples) {
    EXPECT_EQ(rank(BitMatrix::identity(3)), 3u);
    EXPECT_EQ(rank(BitMatrix::from_dense({{1, 1}, {1, 1}})), 1u);
    EXPECT_EQ(rank(build_toric_2d(2).h_z), 3u);
}

TEST(Rank, MatchesReferenceOnRandomMatrices) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 300; ++t) {
        size_t rows = 1 + rng() % 20, cols = 1 + rng() % 90;
        BitMatrix m = random_matrix(rng, rows, cols, t % 3 == 0 ? 0.1 : 0.5);
        size_t r = rank(m);
        EXPECT_EQ(r, naive_rank(to_dense(m)));
        EXPECT_LE(r, std::min(rows, cols));
    }
}

TEST(Rank, InvariantUnderRowOperations) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        size_t rows = 2 + rng() % 12, cols = 1 + rng() % 40;
        BitMatrix m = random_matrix(rng, rows, cols);
        size_t before = rank(m);
        size_t a = rng() % rows, b = rng() % rows;
        m.swap_rows(a, b);
        EXPECT_EQ(rank(m), before);
        if (a != b)
            m.xor_row_into(a, b);
        EXPECT_EQ(rank(m), before);
    }
}

TEST(Solve, Examples) {
    auto x = solve(BitMatrix::identity(4), BitVector::from_bits({0, 1, 0, 1}));
    ASSERT_TRUE(x);
    EXPECT_EQ(x->to_string(), "0101");

    auto y = solve(BitMatrix::from_dense({{1, 1}}), BitVector::from_bits({1}));
    ASSERT_TRUE(y);
    EXPECT_EQ(y->to_string(), "10");

    EXPECT_FALSE(solve(BitMatrix::from_dense({{1, 1}, {1, 1}}), BitVector::from_bits({1, 0})));
    EXPECT_THROW(solve(BitMatrix::identity(3), BitVector(2)), std::invalid_argument);
}

TEST(Solve, SolutionsSatisfyTheSystem) {
    std::mt19937_64 rng(3);
    size_t solved = 0;
    for (int t = 0; t < 10000; ++t) {
        size_t rows = 1 + rng() % 16, cols = 1 + rng() % 16;
        BitMatrix m = random_matrix(rng, rows, cols);
        BitVector b = random_vector(rng, rows);
        if (auto x = solve(m, b)) {
            ++solved;
            ASSERT_EQ(m * *x, b);
        }
    }
    EXPECT_GT(solved, 1000u);
}

TEST(Solve, ConsistencyMatchesExhaustiveSearch) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 2000; ++t) {
        size_t rows = 1 + rng() % 12, cols = 1 + rng() % 12;
        BitMatrix m = random_matrix(rng, rows, cols);
        BitVector b = random_vector(rng, rows);
        bool exists = false;
        for (uint32_t mask = 0; mask < (1u << cols) && !exists; ++mask) {
            BitVector x(cols);
            for (size_t i = 0; i < cols; ++i)
                if (mask >> i & 1)
                    x.set(i);
            exists = (m * x) == b;
        }
        ASSERT_EQ(solve(m, b).has_value(), exists);
    }
}

TEST(Solve, FreeVariablesAreZero) {
    // x0 + x2 = 1 and x1 + x2 = 0: pivots 0 and 1, x2 free.
    auto x = solve(BitMatrix::from_dense({{1, 0, 1}, {0, 1, 1}}), BitVector::from_bits({1, 0}));
    ASSERT_TRUE(x);
    EXPECT_EQ(x->to_string(), "100");
}

TEST(Nullspace, Examples) {
    EXPECT_EQ(nullspace_basis(BitMatrix::identity(3)).rows(), 0u);
    BitMatrix ns = nullspace_basis(BitMatrix::from_dense({{1, 1}}));
    ASSERT_EQ(ns.rows(), 1u);
    EXPECT_EQ(ns.row(0).to_string(), "11");
    EXPECT_EQ(nullspace_basis(build_toric_2d(2).h_x).rows(), 5u);
}

TEST(Nullspace, BasisIsIndependentAndInKernel) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 300; ++t) {
        size_t rows = 1 + rng() % 15, cols = 1 + rng() % 70;
        BitMatrix m = random_matrix(rng, rows, cols);
        BitMatrix ns = nullspace_basis(m);
        EXPECT_EQ(ns.rows(), cols - naive_rank(to_dense(m)));
        for (size_t r = 0; r < ns.rows(); ++r)
            EXPECT_TRUE((m * ns.row(r)).none());
        EXPECT_EQ(rank(ns), ns.rows());
    }
}

TEST(RowSpace, Examples) {
    BitMatrix m = BitMatrix::from_dense({{1, 1, 0}});
    EXPECT_TRUE(in_rowspace(m, BitVector(3)));
    EXPECT_FALSE(in_rowspace(m, BitVector::from_bits({0, 1, 1})));
    BitMatrix hz = build_toric_2d(2).h_z;
    EXPECT_TRUE(in_rowspace(hz, hz.row(0) ^ hz.row(1)));
    EXPECT_THROW(in_rowspace(m, BitVector(2)), std::invalid_argument);
}

TEST(RowSpace, EchelonBasisAgreesWithRank) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
        size_t rows = 1 + rng() % 10, cols = 1 + rng() % 30;
        BitMatrix m = random_matrix(rng, rows, cols, 0.3);
        EchelonBasis basis(cols);
        for (size_t r = 0; r < rows; ++r)
            basis.insert(m.row(r));
        EXPECT_EQ(basis.size(), rank(m));
        BitVector v = random_vector(rng, cols);
        EXPECT_EQ(basis.contains(v), in_rowspace(m, v));
    }
}

TEST(Inverse, RoundTrip) {
    std::mt19937_64 rng(19);
    int found = 0;
    for (int t = 0; t < 200; ++t) {
        size_t n = 1 + rng() % 12;
        BitMatrix m = random_matrix(rng, n, n);
        auto inv = inverse(m);
        EXPECT_EQ(inv.has_value(), rank(m) == n);
        if (inv) {
            ++found;
            EXPECT_EQ(m * *inv, BitMatrix::identity(n));
        }
    }
    EXPECT_GT(found, 20);
}

TEST(Matrix, TransposeAndProduct) {
    std::mt19937_64 rng(23);
    BitMatrix a = random_matrix(rng, 7, 70), b = random_matrix(rng, 70, 5);
    BitMatrix ab = a * b;
    for (size_t r = 0; r < 7; ++r)
        for (size_t c = 0; c < 5; ++c) {
            int s = 0;
            for (size_t k = 0; k < 70; ++k)
                s ^= a.get(r, k) & b.get(k, c);
            EXPECT_EQ(ab.get(r, c), s != 0);
        }
    EXPECT_EQ(a.transposed().transposed(), a);
    EXPECT_EQ((a * b).transposed(), b.transposed() * a.transposed());
}

}  // namespace
}  // namespace bfuf
