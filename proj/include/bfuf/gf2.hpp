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

#ifndef BFUF_GF2_HPP
#define BFUF_GF2_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bfuf {

/// Bit-packed vector over the two-element field.
///
/// Bits beyond `size()` in the last word are kept at zero so that word-wise
/// popcounts and comparisons are exact.
class BitVector {
   public:
    BitVector() = default;
    explicit BitVector(size_t n) : size_(n), words_((n + 63) / 64, 0) {
    }

    static BitVector from_bits(std::initializer_list<int> bits) {
        BitVector v(bits.size());
        size_t i = 0;
        for (int b : bits) {
            if (b & 1)
                v.set(i);
            ++i;
        }
        return v;
    }

    static BitVector from_indices(size_t n, std::span<const uint32_t> ones) {
        BitVector v(n);
        for (auto i : ones)
            v.flip(i);
        return v;
    }

    size_t size() const {
        return size_;
    }

    bool get(size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    bool operator[](size_t i) const {
        return get(i);
    }
    void set(size_t i, bool value = true) {
        uint64_t mask = uint64_t{1} << (i & 63);
        if (value)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    void flip(size_t i) {
        words_[i >> 6] ^= uint64_t{1} << (i & 63);
    }

    void clear() {
        std::fill(words_.begin(), words_.end(), 0);
    }

    /// Resizes and zeroes.
    void assign_zero(size_t n) {
        size_ = n;
        words_.assign((n + 63) / 64, 0);
    }

    BitVector& operator^=(const BitVector& other) {
        check_same_size(other);
        for (size_t w = 0; w < words_.size(); ++w)
            words_[w] ^= other.words_[w];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) {
        a ^= b;
        return a;
    }

    size_t count() const {
        size_t c = 0;
        for (auto w : words_)
            c += std::popcount(w);
        return c;
    }
    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](uint64_t w) { return w != 0; });
    }
    bool none() const {
        return !any();
    }

    std::span<uint64_t> words() {
        return words_;
    }
    std::span<const uint64_t> words() const {
        return words_;
    }

    template <class Fn>
    void for_each_one(Fn&& fn) const {
        for (size_t w = 0; w < words_.size(); ++w) {
            uint64_t word = words_[w];
            while (word) {
                size_t bit = std::countr_zero(word);
                fn(w * 64 + bit);
                word &= word - 1;
            }
        }
    }

    std::vector<uint32_t> ones() const {
        std::vector<uint32_t> out;
        for_each_one([&](size_t i) { out.push_back(static_cast<uint32_t>(i)); });
        return out;
    }

    /// Parity of the bitwise AND, i.e. the inner product over GF(2).
    friend bool dot(const BitVector& a, const BitVector& b) {
        a.check_same_size(b);
        uint64_t acc = 0;
        for (size_t w = 0; w < a.words_.size(); ++w)
            acc ^= a.words_[w] & b.words_[w];
        return std::popcount(acc) & 1;
    }

    friend bool operator==(const BitVector& a, const BitVector& b) = default;

    std::string to_string() const {
        std::string s(size_, '0');
        for_each_one([&](size_t i) { s[i] = '1'; });
        return s;
    }

   private:
    void check_same_size(const BitVector& other) const {
        if (other.size_ != size_)
            throw std::invalid_argument(
                "BitVector size mismatch: " + std::to_string(size_) + " vs " + std::to_string(other.size_));
    }

    size_t size_ = 0;
    std::vector<uint64_t> words_;
};

/// Dense row-major bit-packed matrix over the two-element field.
class BitMatrix {
   public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols) {
        reshape(rows, cols);
    }

    static BitMatrix identity(size_t n) {
        BitMatrix m(n, n);
        for (size_t i = 0; i < n; ++i)
            m.set(i, i);
        return m;
    }

    /// Builds a matrix from per-row lists of column indices (sparse rows).
    static BitMatrix from_sparse_rows(size_t cols, const std::vector<std::vector<uint32_t>>& rows) {
        BitMatrix m(rows.size(), cols);
        for (size_t r = 0; r < rows.size(); ++r) {
            for (auto c : rows[r]) {
                if (c >= cols)
                    throw std::invalid_argument(
                        "column index " + std::to_string(c) + " out of range for " + std::to_string(cols) +
                        " columns");
                m.flip(r, c);
            }
        }
        return m;
    }

    static BitMatrix from_dense(std::initializer_list<std::initializer_list<int>> rows) {
        size_t cols = rows.size() ? rows.begin()->size() : 0;
        BitMatrix m(rows.size(), cols);
        size_t r = 0;
        for (auto& row : rows) {
            if (row.size() != cols)
                throw std::invalid_argument("ragged dense matrix literal");
            size_t c = 0;
            for (int b : row) {
                if (b & 1)
                    m.set(r, c);
                ++c;
            }
            ++r;
        }
        return m;
    }

    /// Resizes to rows x cols and zeroes every entry, reusing storage.
    void reshape(size_t rows, size_t cols) {
        rows_ = rows;
        cols_ = cols;
        stride_ = (cols + 63) / 64;
        data_.assign(rows_ * stride_, 0);
    }

    size_t rows() const {
        return rows_;
    }
    size_t cols() const {
        return cols_;
    }
    size_t stride() const {
        return stride_;
    }

    bool get(size_t r, size_t c) const {
        return (data_[r * stride_ + (c >> 6)] >> (c & 63)) & 1;
    }
    void set(size_t r, size_t c, bool value = true) {
        uint64_t mask = uint64_t{1} << (c & 63);
        auto& w = data_[r * stride_ + (c >> 6)];
        w = value ? (w | mask) : (w & ~mask);
    }
    void flip(size_t r, size_t c) {
        data_[r * stride_ + (c >> 6)] ^= uint64_t{1} << (c & 63);
    }

    std::span<uint64_t> row_words(size_t r) {
        return {data_.data() + r * stride_, stride_};
    }
    std::span<const uint64_t> row_words(size_t r) const {
        return {data_.data() + r * stride_, stride_};
    }

    BitVector row(size_t r) const {
        BitVector v(cols_);
        std::copy_n(data_.begin() + r * stride_, stride_, v.words().begin());
        return v;
    }

    std::vector<uint32_t> row_support(size_t r) const {
        return row(r).ones();
    }

    void append_row(const BitVector& v) {
        if (v.size() != cols_)
            throw std::invalid_argument("append_row: length does not match column count");
        data_.insert(data_.end(), v.words().begin(), v.words().end());
        ++rows_;
    }

    void xor_row_into(size_t src, size_t dst) {
        uint64_t* d = data_.data() + dst * stride_;
        const uint64_t* s = data_.data() + src * stride_;
        for (size_t w = 0; w < stride_; ++w)
            d[w] ^= s[w];
    }

    void swap_rows(size_t a, size_t b) {
        if (a == b)
            return;
        std::swap_ranges(
            data_.begin() + a * stride_, data_.begin() + (a + 1) * stride_, data_.begin() + b * stride_);
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](uint64_t w) { return w == 0; });
    }

    size_t row_weight(size_t r) const {
        size_t c = 0;
        for (auto w : row_words(r))
            c += std::popcount(w);
        return c;
    }

    size_t col_weight(size_t c) const {
        size_t n = 0;
        for (size_t r = 0; r < rows_; ++r)
            n += get(r, c);
        return n;
    }

    BitMatrix transposed() const {
        BitMatrix t(cols_, rows_);
        for (size_t r = 0; r < rows_; ++r) {
            auto words = row_words(r);
            for (size_t w = 0; w < stride_; ++w) {
                uint64_t word = words[w];
                while (word) {
                    size_t c = w * 64 + std::countr_zero(word);
                    t.set(c, r);
                    word &= word - 1;
                }
            }
        }
        return t;
    }

    /// Matrix-vector product M·x.
    BitVector operator*(const BitVector& x) const {
        if (x.size() != cols_)
            throw std::invalid_argument(
                "matrix-vector dimension mismatch: " + std::to_string(cols_) + " columns vs vector length " +
                std::to_string(x.size()));
        BitVector out(rows_);
        auto xw = x.words();
        for (size_t r = 0; r < rows_; ++r) {
            uint64_t acc = 0;
            const uint64_t* rw = data_.data() + r * stride_;
            for (size_t w = 0; w < stride_; ++w)
                acc ^= rw[w] & xw[w];
            if (std::popcount(acc) & 1)
                out.set(r);
        }
        return out;
    }

    /// Matrix product A·B.
    friend BitMatrix operator*(const BitMatrix& a, const BitMatrix& b) {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("matrix product dimension mismatch");
        BitMatrix out(a.rows_, b.cols_);
        for (size_t r = 0; r < a.rows_; ++r) {
            uint64_t* dst = out.data_.data() + r * out.stride_;
            for (size_t k = 0; k < a.cols_; ++k) {
                if (!a.get(r, k))
                    continue;
                const uint64_t* src = b.data_.data() + k * b.stride_;
                for (size_t w = 0; w < b.stride_; ++w)
                    dst[w] ^= src[w];
            }
        }
        return out;
    }

    /// Vertical concatenation [top; bottom].
    static BitMatrix vstack(const BitMatrix& top, const BitMatrix& bottom) {
        if (top.cols_ != bottom.cols_)
            throw std::invalid_argument("vstack: column counts differ");
        BitMatrix out = top;
        out.data_.insert(out.data_.end(), bottom.data_.begin(), bottom.data_.end());
        out.rows_ += bottom.rows_;
        return out;
    }

    /// Horizontal concatenation [left | right].
    static BitMatrix hstack(const BitMatrix& left, const BitMatrix& right) {
        if (left.rows_ != right.rows_)
            throw std::invalid_argument("hstack: row counts differ");
        BitMatrix out(left.rows_, left.cols_ + right.cols_);
        for (size_t r = 0; r < left.rows_; ++r) {
            for (size_t c = 0; c < left.cols_; ++c)
                if (left.get(r, c))
                    out.set(r, c);
            for (size_t c = 0; c < right.cols_; ++c)
                if (right.get(r, c))
                    out.set(r, left.cols_ + c);
        }
        return out;
    }

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) = default;

   private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    size_t stride_ = 0;
    std::vector<uint64_t> data_;
};

/// Reduces `m` in place to reduced row echelon form, processing columns in
/// ascending order. When `rhs` is given it is carried along as an augmented
/// column (one bit per row). Returns the pivot column of each of the leading
/// `rank` rows.
inline std::vector<uint32_t> row_reduce(BitMatrix& m, BitVector* rhs = nullptr) {
    if (rhs && rhs->size() != m.rows())
        throw std::invalid_argument("row_reduce: right-hand side length does not match row count");
    std::vector<uint32_t> pivots;
    size_t rank = 0;
    const size_t rows = m.rows();
    for (size_t c = 0; c < m.cols() && rank < rows; ++c) {
        const size_t word = c >> 6;
        const uint64_t mask = uint64_t{1} << (c & 63);
        size_t pivot = rank;
        while (pivot < rows && !(m.row_words(pivot)[word] & mask))
            ++pivot;
        if (pivot == rows)
            continue;
        m.swap_rows(pivot, rank);
        if (rhs && pivot != rank) {
            bool a = rhs->get(pivot), b = rhs->get(rank);
            rhs->set(pivot, b);
            rhs->set(rank, a);
        }
        for (size_t r = 0; r < rows; ++r) {
            if (r != rank && (m.row_words(r)[word] & mask)) {
                m.xor_row_into(rank, r);
                if (rhs && rhs->get(rank))
                    rhs->flip(r);
            }
        }
        pivots.push_back(static_cast<uint32_t>(c));
        ++rank;
    }
    return pivots;
}

inline size_t rank(BitMatrix m) {
    return row_reduce(m).size();
}

/// Solves M·x = b in place (`m` and `b` are consumed as workspace). Free
/// variables are set to zero. Returns false if the system is inconsistent.
inline bool solve_in_place(BitMatrix& m, BitVector& b, BitVector& x) {
    auto pivots = row_reduce(m, &b);
    for (size_t r = pivots.size(); r < m.rows(); ++r)
        if (b.get(r))
            return false;
    x.assign_zero(m.cols());
    for (size_t r = 0; r < pivots.size(); ++r)
        if (b.get(r))
            x.set(pivots[r]);
    return true;
}

inline std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b) {
    if (b.size() != m.rows())
        throw std::invalid_argument(
            "solve: right-hand side length " + std::to_string(b.size()) + " does not match " +
            std::to_string(m.rows()) + " rows");
    BitMatrix work = m;
    BitVector rhs = b;
    BitVector x;
    if (!solve_in_place(work, rhs, x))
        return std::nullopt;
    return x;
}

/// Rows of the result form a basis of {x : M·x = 0}.
inline BitMatrix nullspace_basis(const BitMatrix& m) {
    BitMatrix work = m;
    auto pivots = row_reduce(work);
    std::vector<uint8_t> is_pivot(m.cols(), 0);
    for (auto p : pivots)
        is_pivot[p] = 1;
    BitMatrix basis(m.cols() - pivots.size(), m.cols());
    size_t out = 0;
    for (size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        basis.set(out, f);
        for (size_t r = 0; r < pivots.size(); ++r)
            if (work.get(r, f))
                basis.set(out, pivots[r]);
        ++out;
    }
    return basis;
}

inline bool in_rowspace(const BitMatrix& m, const BitVector& v) {
    if (v.size() != m.cols())
        throw std::invalid_argument("in_rowspace: vector length does not match column count");
    BitMatrix stacked = m;
    stacked.append_row(v);
    return rank(stacked) == rank(m);
}

/// Inverse of a square matrix, or nullopt when singular.
inline std::optional<BitMatrix> inverse(const BitMatrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("inverse: matrix is not square");
    const size_t n = m.rows();
    BitMatrix aug = BitMatrix::hstack(m, BitMatrix::identity(n));
    auto pivots = row_reduce(aug);
    if (pivots.size() < n || (n > 0 && pivots[n - 1] != n - 1))
        return std::nullopt;
    BitMatrix inv(n, n);
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c)
            if (aug.get(r, n + c))
                inv.set(r, c);
    return inv;
}

/// Incrementally maintained row-echelon basis; answers span-membership
/// queries and grows by one vector at a time.
class EchelonBasis {
   public:
    explicit EchelonBasis(size_t cols) : cols_(cols) {
    }

    /// Reduces `v` against the basis; returns true (and keeps the reduced
    /// vector) if it was independent.
    bool insert(BitVector v) {
        reduce(v);
        if (v.none())
            return false;
        size_t lead = 0;
        while (!v.get(lead))
            ++lead;
        rows_.push_back(std::move(v));
        leads_.push_back(lead);
        return true;
    }

    bool contains(BitVector v) const {
        reduce(v);
        return v.none();
    }

    size_t size() const {
        return rows_.size();
    }

   private:
    void reduce(BitVector& v) const {
        if (v.size() != cols_)
            throw std::invalid_argument("EchelonBasis: vector length mismatch");
        for (size_t i = 0; i < rows_.size(); ++i)
            if (v.get(leads_[i]))
                v ^= rows_[i];
    }

    size_t cols_;
    std::vector<BitVector> rows_;
    std::vector<size_t> leads_;
};

}  // namespace bfuf

#endif  // BFUF_GF2_HPP
