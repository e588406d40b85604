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

#ifndef BFUF_TANNER_GRAPH_HPP
#define BFUF_TANNER_GRAPH_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bfuf/gf2.hpp"

namespace bfuf {

/// Bipartite data/check adjacency in one flat index space: data nodes occupy
/// [0, n_data) and check nodes [n_data, n_data + n_check).
class TannerGraph {
   public:
    TannerGraph() = default;

    /// Builds the graph from (data, check) incidences; `check` is a check
    /// index in [0, n_check), not a flat node id. Neighbor order follows the
    /// order of `edges`.
    static TannerGraph from_edges(
        uint32_t n_data, uint32_t n_check, const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
        TannerGraph g;
        g.n_data_ = n_data;
        g.n_check_ = n_check;
        const size_t n = size_t{n_data} + n_check;
        std::vector<uint32_t> degree(n, 0);
        for (auto [d, c] : edges) {
            if (d >= n_data || c >= n_check)
                throw std::invalid_argument(
                    "edge (" + std::to_string(d) + ", " + std::to_string(c) + ") out of range");
            ++degree[d];
            ++degree[n_data + c];
        }
        g.offsets_.assign(n + 1, 0);
        for (size_t i = 0; i < n; ++i)
            g.offsets_[i + 1] = g.offsets_[i] + degree[i];
        g.adjacency_.resize(g.offsets_[n]);
        std::vector<uint32_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
        for (auto [d, c] : edges) {
            uint32_t check_node = n_data + c;
            g.adjacency_[fill[d]++] = check_node;
            g.adjacency_[fill[check_node]++] = d;
        }
        return g;
    }

    /// Column j becomes data node j, row i becomes check node n_data + i.
    static TannerGraph from_check_matrix(const BitMatrix& h) {
        std::vector<std::pair<uint32_t, uint32_t>> edges;
        for (size_t r = 0; r < h.rows(); ++r)
            for (auto c : h.row_support(r))
                edges.emplace_back(c, static_cast<uint32_t>(r));
        return from_edges(static_cast<uint32_t>(h.cols()), static_cast<uint32_t>(h.rows()), edges);
    }

    uint32_t n_data() const {
        return n_data_;
    }
    uint32_t n_check() const {
        return n_check_;
    }
    size_t size() const {
        return size_t{n_data_} + n_check_;
    }
    size_t edge_count() const {
        return adjacency_.size() / 2;
    }

    bool is_check(uint32_t node) const {
        return node >= n_data_;
    }
    uint32_t check_index(uint32_t node) const {
        return node - n_data_;
    }
    uint32_t check_node(uint32_t check) const {
        return n_data_ + check;
    }

    std::span<const uint32_t> neighbors(uint32_t node) const {
        return {adjacency_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
    }
    size_t degree(uint32_t node) const {
        return offsets_[node + 1] - offsets_[node];
    }

    /// True when every data node has exactly two check neighbors, i.e. the
    /// graph is the syndrome graph of a topological code.
    bool every_data_degree_two() const {
        for (uint32_t d = 0; d < n_data_; ++d)
            if (degree(d) != 2)
                return false;
        return true;
    }

    /// H·e computed from the adjacency; `error` has length n_data.
    BitVector syndrome_of(const BitVector& error) const {
        if (error.size() != n_data_)
            throw std::invalid_argument("syndrome_of: error length does not match data node count");
        BitVector s(n_check_);
        error.for_each_one([&](size_t d) {
            for (auto c : neighbors(static_cast<uint32_t>(d)))
                s.flip(c - n_data_);
        });
        return s;
    }

    /// Dense check matrix (n_check x n_data). Only sensible for small graphs.
    BitMatrix check_matrix() const {
        BitMatrix h(n_check_, n_data_);
        for (uint32_t d = 0; d < n_data_; ++d)
            for (auto c : neighbors(d))
                h.flip(c - n_data_, d);
        return h;
    }

    friend bool operator==(const TannerGraph&, const TannerGraph&) = default;

   private:
    uint32_t n_data_ = 0;
    uint32_t n_check_ = 0;
    std::vector<uint32_t> offsets_{0};
    std::vector<uint32_t> adjacency_;
};

}  // namespace bfuf

#endif  // BFUF_TANNER_GRAPH_HPP
