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

#ifndef BFUF_DECODERS_HPP
#define BFUF_DECODERS_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bfuf/cluster_forest.hpp"
#include "bfuf/gf2.hpp"
#include "bfuf/noise.hpp"
#include "bfuf/tanner_graph.hpp"

namespace bfuf {

enum class Algorithm { simple, improved, variant, qldpc };

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::simple:
            return "simple";
        case Algorithm::improved:
            return "improved";
        case Algorithm::variant:
            return "variant";
        case Algorithm::qldpc:
            return "qldpc";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "simple")
        return Algorithm::simple;
    if (s == "improved")
        return Algorithm::improved;
    if (s == "variant")
        return Algorithm::variant;
    if (s == "qldpc")
        return Algorithm::qldpc;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

enum class DecodeStatus { ok, non_convergent };

struct DecodeOutcome {
    BitVector correction;
    size_t visited_count = 0;
    size_t cluster_count = 0;
    size_t largest_cluster = 0;
    uint64_t elapsed_ns = 0;
    DecodeStatus status = DecodeStatus::ok;

    bool converged() const {
        return status == DecodeStatus::ok;
    }
};

struct DecoderOptions {
    /// qLDPC only: when a growth step absorbed nothing but valid clusters,
    /// keep the cluster invalid without re-running elimination. Exact for
    /// topological codes (parity cannot change), approximate otherwise.
    bool parity_shortcut = false;
    /// qLDPC only: assert that every data node of a validated cluster has
    /// all of its checks inside the cluster.
    bool check_boundary = true;
};

// ---------------------------------------------------------------------------
// Syndrome validation for topological codes.

namespace detail {

/// Merges every neighbor's cluster into the cluster of `node` and appends
/// unvisited neighbors to L. Returns true if anything changed.
inline bool grow_node(const TannerGraph& graph, ClusterForest& forest, TraversalState& state, uint32_t node) {
    bool changed = false;
    for (auto n : graph.neighbors(node)) {
        uint32_t r_node = forest.find(node);
        uint32_t r_n = forest.find(n);
        if (r_node != r_n) {
            forest.merge(r_node, r_n);
            changed = true;
        }
        changed |= state.visit(n);
    }
    return changed;
}

}  // namespace detail

/// Breadth-first growth from every entry of L, valid clusters included,
/// until no invalid cluster remains. Returns false if L is exhausted first.
inline bool validate_simple(const TannerGraph& graph, ClusterForest& forest, TraversalState& state) {
    while (forest.invalid_count() > 0) {
        if (state.pos == state.queue.size())
            return false;
        detail::grow_node(graph, forest, state, state.queue[state.pos]);
        ++state.pos;
        ++state.processed;
    }
    return true;
}

/// One growth step from every erasure, then breadth-first growth that skips
/// nodes of valid clusters. Skipped nodes are parked on their root and put
/// back at the end of L when an invalid cluster absorbs that root.
inline bool validate_improved(
    const TannerGraph& graph, ClusterForest& forest, TraversalState& state, size_t n_erasures) {
    auto& L = state.queue;
    while (state.pos < n_erasures) {
        detail::grow_node(graph, forest, state, L[state.pos]);
        ++state.pos;
        ++state.processed;
    }
    size_t idle = 0;
    while (forest.invalid_count() > 0) {
        if (state.pos == L.size()) {
            if (L.empty() || idle >= 2 * L.size())
                return false;
            state.pos = 0;
        }
        const uint32_t node = L[state.pos];
        bool changed = false;
        uint32_t root = forest.find(node);
        if (!forest.valid(root)) {
            for (auto n : graph.neighbors(node)) {
                uint32_t r_node = forest.find(node);
                uint32_t r_n = forest.find(n);
                if (r_node != r_n) {
                    if (forest.has_skipped(r_n))
                        forest.drain_skipped(r_n, [&](uint32_t s) { L.push_back(s); });
                    forest.merge(r_node, r_n);
                    changed = true;
                }
                changed |= state.visit(n);
            }
        } else {
            forest.push_skipped(root, node);
        }
        idle = changed ? 0 : idle + 1;
        ++state.pos;
        ++state.processed;
    }
    return true;
}

/// Like validate_improved but with a single global list of skipped nodes
/// that replaces L once L is exhausted. Erased nodes always grow.
inline bool validate_variant(
    const TannerGraph& graph, ClusterForest& forest, TraversalState& state, std::span<const uint8_t> erased) {
    std::vector<uint32_t> skipped;
    bool pass_changed = false;
    while (forest.invalid_count() > 0) {
        if (state.pos == state.queue.size()) {
            if (skipped.empty() || (!pass_changed && state.queue.empty()))
                return false;
            if (!pass_changed && state.processed > 0 && state.queue.size() == skipped.size())
                return false;
            state.queue.swap(skipped);
            skipped.clear();
            state.pos = 0;
            pass_changed = false;
        }
        const uint32_t node = state.queue[state.pos];
        const bool is_erased = node < erased.size() && erased[node];
        if (is_erased || !forest.valid(forest.find(node)))
            pass_changed |= detail::grow_node(graph, forest, state, node);
        else
            skipped.push_back(node);
        ++state.pos;
        ++state.processed;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Peeling.

/// Spanning-forest peeling decoder on the check graph of a cluster.
///
/// Edges are data nodes of degree two accepted by the caller's membership
/// predicate. The forest is grown breadth-first from each seed check, taking
/// erased edges before non-erased ones (0-1 BFS), so corrections stay inside
/// erasures whenever possible. Leaves are then peeled towards the root.
class Peeler {
   public:
    void resize(size_t nodes) {
        nodes_.assign(nodes, Node{});
    }

    /// `flags` holds the working syndrome bit of every check node touched
    /// by the seeds' components; it is read through `syndrome_bit` and the
    /// correction is toggled through `flip_data`.
    template <class Usable, class Erased, class SyndromeBit, class FlipData>
    void peel(
        const TannerGraph& graph, std::span<const uint32_t> seeds, Usable&& usable, Erased&& erased,
        SyndromeBit&& syndrome_bit, FlipData&& flip_data) {
        if (nodes_.size() != graph.size())
            resize(graph.size());
        for (auto seed : seeds) {
            if (nodes_[seed].state)
                continue;
            order_.clear();
            front_.clear();
            back_.clear();
            size_t back_pos = 0;
            discover(seed, 0, kNoNode, kNoNode);
            back_.push_back(seed);
            while (!front_.empty() || back_pos < back_.size()) {
                uint32_t c;
                if (!front_.empty()) {
                    c = front_.back();
                    front_.pop_back();
                } else {
                    c = back_[back_pos++];
                }
                if (nodes_[c].state == 2)
                    continue;
                nodes_[c].state = 2;
                order_.push_back(c);
                for (auto d : graph.neighbors(c)) {
                    if (graph.degree(d) != 2 || !usable(d))
                        continue;
                    auto ends = graph.neighbors(d);
                    uint32_t other = ends[0] == c ? ends[1] : ends[0];
                    if (other == c || nodes_[other].state == 2)
                        continue;
                    uint32_t w = erased(d) ? 0 : 1;
                    uint32_t nd = nodes_[c].dist + w;
                    if (nodes_[other].state == 0 || nd < nodes_[other].dist) {
                        discover(other, nd, d, c);
                        if (w == 0)
                            front_.push_back(other);
                        else
                            back_.push_back(other);
                    }
                }
            }
            for (size_t i = order_.size(); i-- > 1;) {
                const Node& c = nodes_[order_[i]];
                if (c.flag ^ syndrome_bit(order_[i])) {
                    flip_data(c.parent_edge);
                    nodes_[c.parent_node].flag ^= 1;
                }
            }
            if (nodes_[seed].flag ^ syndrome_bit(seed))
                throw std::logic_error("peeling reached a root with odd syndrome parity");
        }
        for (auto c : touched_)
            nodes_[c] = Node{};
        touched_.clear();
    }

   private:
    void discover(uint32_t node, uint32_t dist, uint32_t edge, uint32_t parent) {
        Node& n = nodes_[node];
        if (n.state == 0)
            touched_.push_back(node);
        n.state = 1;
        n.dist = dist;
        n.parent_edge = edge;
        n.parent_node = parent;
    }

    struct Node {
        uint32_t dist = 0;
        uint32_t parent_edge = kNoNode;
        uint32_t parent_node = kNoNode;
        uint8_t state = 0;  // 0 unseen, 1 discovered, 2 finalized
        uint8_t flag = 0;   // syndrome bit toggled by peeled edges
    };

    std::vector<Node> nodes_;
    std::vector<uint32_t> order_;
    std::vector<uint32_t> touched_;
    // 0-1 BFS deque: zero-weight pushes go on a stack served first.
    std::vector<uint32_t> front_;
    std::vector<uint32_t> back_;
};

/// Peels one valid cluster given by its node set. `syndrome` is indexed by
/// check index (length n_check); `erased` by data node (may be empty).
/// Returns a correction over all data nodes whose support lies inside the
/// cluster and which reproduces the cluster's syndrome.
inline BitVector peel_cluster(
    const TannerGraph& graph, std::span<const uint32_t> cluster_nodes, const BitVector& syndrome,
    const BitVector& erased) {
    if (syndrome.size() != graph.n_check())
        throw std::invalid_argument("peel_cluster: syndrome length does not match check count");
    std::vector<uint8_t> member(graph.size(), 0);
    std::vector<uint32_t> seeds;
    size_t parity = 0;
    for (auto v : cluster_nodes) {
        member[v] = 1;
        if (graph.is_check(v)) {
            seeds.push_back(v);
            parity += syndrome.get(graph.check_index(v));
        }
    }
    if (parity % 2)
        throw std::invalid_argument("peel_cluster: cluster has odd syndrome parity");
    BitVector correction(graph.n_data());
    Peeler peeler;
    peeler.peel(
        graph, seeds,
        [&](uint32_t d) {
            auto ends = graph.neighbors(d);
            return member[d] && member[ends[0]] && member[ends[1]];
        },
        [&](uint32_t d) { return erased.size() > 0 && erased.get(d); },
        [&](uint32_t c) { return syndrome.get(graph.check_index(c)); }, [&](uint32_t d) { correction.flip(d); });
    return correction;
}

// ---------------------------------------------------------------------------
// qLDPC cluster validation.

/// Scratch space for solving cluster equation systems; keeps the latest
/// solution of every cluster root.
class QldpcWorkspace {
   public:
    void resize(size_t nodes) {
        local_.assign(nodes, kNoNode);
        solutions_.assign(nodes, {});
        stamp_.assign(nodes, 0);
        stored_.clear();
    }

    std::span<const uint32_t> solution(uint32_t root) const {
        return solutions_[root];
    }
    uint32_t solution_stamp(uint32_t root) const {
        return stamp_[root];
    }

    void clear_solutions() {
        for (auto r : stored_) {
            solutions_[r].clear();
            stamp_[r] = 0;
        }
        stored_.clear();
    }

    size_t elimination_count = 0;

   private:
    friend bool validate_cluster_qldpc(
        const TannerGraph&, ClusterForest&, uint32_t, const BitVector&, QldpcWorkspace&, bool);

    std::vector<uint32_t> local_;
    std::vector<std::vector<uint32_t>> solutions_;
    std::vector<uint32_t> stamp_;
    std::vector<uint32_t> stored_;
    std::vector<uint32_t> rows_;
    std::vector<uint32_t> cols_;
    BitMatrix h_;
    BitVector rhs_;
    BitVector x_;
};

/// Solves σ_cl = H_cl·e_cl for the cluster rooted at `root`, where H_cl keeps
/// the rows of the cluster's checks and the columns of its data nodes, and
/// records validity on the forest. On success the solution (as data node
/// ids) is stored at the root in `ws`. `syndrome` is indexed by check index.
inline bool validate_cluster_qldpc(
    const TannerGraph& graph, ClusterForest& forest, uint32_t root, const BitVector& syndrome, QldpcWorkspace& ws,
    bool check_boundary = true) {
    if (!forest.is_root(root))
        throw std::logic_error("validate_cluster_qldpc requires a root");
    if (ws.local_.size() != graph.size())
        ws.resize(graph.size());
    auto store = [&](bool valid) {
        if (ws.stamp_[root] == 0)
            ws.stored_.push_back(root);
        ws.stamp_[root] = forest.size(root);
        forest.set_valid(root, valid);
        return valid;
    };
    ws.solutions_[root].clear();
    if (forest.syndrome_count(root) == 0)
        return store(true);

    ws.rows_.clear();
    ws.cols_.clear();
    forest.for_each_member(root, [&](uint32_t v) {
        if (graph.is_check(v)) {
            ws.local_[v] = static_cast<uint32_t>(ws.rows_.size());
            ws.rows_.push_back(v);
        } else {
            ws.local_[v] = static_cast<uint32_t>(ws.cols_.size());
            ws.cols_.push_back(v);
        }
    });
    auto release = [&] {
        for (auto v : ws.rows_)
            ws.local_[v] = kNoNode;
        for (auto v : ws.cols_)
            ws.local_[v] = kNoNode;
    };
    // Columns in the order nodes joined the shot's clusters (erasures first,
    // then outward from the syndromes); free variables of later columns are
    // zeroed, so the solution leans on the earliest ones.
    std::sort(ws.cols_.begin(), ws.cols_.end(), [&](uint32_t a, uint32_t b) {
        return forest.touch_order(a) < forest.touch_order(b);
    });
    for (size_t j = 0; j < ws.cols_.size(); ++j)
        ws.local_[ws.cols_[j]] = static_cast<uint32_t>(j);
    ws.h_.reshape(ws.rows_.size(), ws.cols_.size());
    for (size_t j = 0; j < ws.cols_.size(); ++j) {
        for (auto c : graph.neighbors(ws.cols_[j])) {
            uint32_t r = ws.local_[c];
            if (r == kNoNode || !graph.is_check(c)) {
                if (check_boundary) {
                    release();
                    throw std::logic_error(
                        "qLDPC cluster boundary contains data node " + std::to_string(ws.cols_[j]));
                }
                continue;
            }
            ws.h_.flip(r, j);
        }
    }
    ws.rhs_.assign_zero(ws.rows_.size());
    for (size_t r = 0; r < ws.rows_.size(); ++r)
        if (syndrome.get(graph.check_index(ws.rows_[r])))
            ws.rhs_.set(r);
    ++ws.elimination_count;
    bool ok = solve_in_place(ws.h_, ws.rhs_, ws.x_);
    if (ok)
        ws.x_.for_each_one([&](size_t j) { ws.solutions_[root].push_back(ws.cols_[j]); });
    release();
    return store(ok);
}

/// qLDPC validation: one Tanner step from every erasure (validating after
/// each), then for every L entry in an invalid cluster, absorb all first- and
/// second-order neighbors and revalidate. Valid-cluster entries are parked
/// per root and restored when their cluster is absorbed.
inline bool validate_qldpc(
    const TannerGraph& graph, ClusterForest& forest, TraversalState& state, size_t n_erasures,
    const BitVector& syndrome, QldpcWorkspace& ws, const DecoderOptions& options = {}) {
    auto& L = state.queue;
    while (state.pos < n_erasures) {
        const uint32_t node = L[state.pos];
        detail::grow_node(graph, forest, state, node);
        validate_cluster_qldpc(graph, forest, forest.find(node), syndrome, ws, options.check_boundary);
        ++state.pos;
        ++state.processed;
    }
    size_t idle = 0;
    while (forest.invalid_count() > 0) {
        if (state.pos == L.size()) {
            if (L.empty() || idle >= 2 * L.size())
                return false;
            state.pos = 0;
        }
        const uint32_t node = L[state.pos];
        bool changed = false;
        uint32_t root = forest.find(node);
        if (!forest.valid(root)) {
            bool absorbed_invalid = false;
            for (auto n : graph.neighbors(node)) {
                uint32_t r_n = forest.find(n);
                if (forest.find(node) == r_n)
                    continue;
                absorbed_invalid |= !forest.valid(r_n);
                forest.merge(forest.find(node), r_n);
                changed = true;
                for (auto n2 : graph.neighbors(n)) {
                    uint32_t r2 = forest.find(n2);
                    if (forest.has_skipped(r2))
                        forest.drain_skipped(r2, [&](uint32_t s) { L.push_back(s); });
                    uint32_t r_node = forest.find(node);
                    if (r_node != r2) {
                        absorbed_invalid |= !forest.valid(r2);
                        forest.merge(r_node, r2);
                    }
                    state.visit(n2);
                }
            }
            if (changed && (absorbed_invalid || !options.parity_shortcut))
                validate_cluster_qldpc(graph, forest, forest.find(node), syndrome, ws, options.check_boundary);
        } else {
            forest.push_skipped(root, node);
        }
        idle = changed ? 0 : idle + 1;
        ++state.pos;
        ++state.processed;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Full decoders.

/// Union-find decoder bound to one Tanner graph. Owns all scratch state; one
/// instance per thread.
class Decoder {
   public:
    Decoder(const TannerGraph& graph, Algorithm algorithm, DecoderOptions options = {})
        : graph_(&graph), algorithm_(algorithm), options_(options) {
        if (algorithm != Algorithm::qldpc && !graph.every_data_degree_two())
            throw std::invalid_argument(
                std::string("algorithm '") + to_string(algorithm) +
                "' needs a topological code (every data node in exactly two checks); use 'qldpc'");
        forest_.resize(graph.n_data(), graph.n_check());
        state_.resize(graph.size());
        peeler_.resize(graph.size());
        erased_.assign(graph.n_data(), 0);
        if (algorithm == Algorithm::qldpc)
            workspace_.resize(graph.size());
        outcome_.correction.assign_zero(graph.n_data());
    }

    Algorithm algorithm() const {
        return algorithm_;
    }
    const TannerGraph& graph() const {
        return *graph_;
    }

    /// Decodes one shot. `syndrome` is indexed by check index; `erasures`
    /// lists erased data nodes. The returned reference stays valid until
    /// the next call.
    const DecodeOutcome& decode(const BitVector& syndrome, std::span<const uint32_t> erasures) {
        auto start = std::chrono::steady_clock::now();
        run(syndrome, erasures);
        outcome_.elapsed_ns = static_cast<uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count());
        return outcome_;
    }

    const DecodeOutcome& decode(const Shot& shot) {
        return decode(shot.syndrome, shot.erasures);
    }

    const ClusterForest& forest() const {
        return forest_;
    }
    const TraversalState& traversal() const {
        return state_;
    }
    const QldpcWorkspace& workspace() const {
        return workspace_;
    }

   private:
    void run(const BitVector& syndrome, std::span<const uint32_t> erasures) {
        const TannerGraph& g = *graph_;
        if (syndrome.size() != g.n_check())
            throw std::invalid_argument("decode: syndrome length does not match check count");
        syndrome_nodes_.clear();
        syndrome.for_each_one([&](size_t c) { syndrome_nodes_.push_back(g.check_node(static_cast<uint32_t>(c))); });
        if (algorithm_ != Algorithm::qldpc && syndrome_nodes_.size() % 2)
            throw std::invalid_argument("decode: odd number of non-zero syndromes on a closed topological code");

        for (auto e : erased_list_)
            erased_[e] = 0;
        erased_list_.assign(erasures.begin(), erasures.end());
        for (auto e : erased_list_) {
            if (e >= g.n_data())
                throw std::invalid_argument("decode: erasure id out of range");
            erased_[e] = 1;
        }

        const ForestMode mode = algorithm_ == Algorithm::qldpc ? ForestMode::qldpc : ForestMode::topological;
        forest_.init(mode, syndrome_nodes_, erasures, state_);
        if (algorithm_ == Algorithm::qldpc)
            workspace_.clear_solutions();

        bool ok = false;
        switch (algorithm_) {
            case Algorithm::simple:
                ok = validate_simple(g, forest_, state_);
                break;
            case Algorithm::improved:
                ok = validate_improved(g, forest_, state_, erasures.size());
                break;
            case Algorithm::variant:
                ok = validate_variant(g, forest_, state_, erased_);
                break;
            case Algorithm::qldpc:
                ok = validate_qldpc(g, forest_, state_, erasures.size(), syndrome, workspace_, options_);
                break;
        }

        outcome_.correction.clear();
        outcome_.visited_count = state_.processed;
        outcome_.status = ok ? DecodeStatus::ok : DecodeStatus::non_convergent;
        collect_cluster_stats();
        if (!ok)
            return;
        if (algorithm_ == Algorithm::qldpc)
            collect_qldpc_solutions(syndrome);
        else
            peel_all(syndrome);
    }

    void collect_cluster_stats() {
        size_t clusters = 0, largest = 0;
        for (auto v : forest_.touched()) {
            if (forest_.is_root(v) && forest_.size(v) > 1) {
                ++clusters;
                largest = std::max<size_t>(largest, forest_.size(v));
            }
        }
        outcome_.cluster_count = clusters;
        outcome_.largest_cluster = largest;
    }

    void peel_all(const BitVector& syndrome) {
        const TannerGraph& g = *graph_;
        peeler_.peel(
            g, syndrome_nodes_,
            [&](uint32_t d) {
                auto ends = g.neighbors(d);
                uint32_t r = forest_.find(d);
                return forest_.find(ends[0]) == r && forest_.find(ends[1]) == r;
            },
            [&](uint32_t d) { return erased_[d] != 0; },
            [&](uint32_t c) { return syndrome.get(g.check_index(c)); },
            [&](uint32_t d) { outcome_.correction.flip(d); });
    }

    void collect_qldpc_solutions(const BitVector& syndrome) {
        for (auto v : forest_.touched()) {
            if (!forest_.is_root(v) || forest_.syndrome_count(v) == 0)
                continue;
            if (workspace_.solution_stamp(v) != forest_.size(v))
                validate_cluster_qldpc(*graph_, forest_, v, syndrome, workspace_, options_.check_boundary);
            for (auto d : workspace_.solution(v))
                outcome_.correction.flip(d);
        }
    }

    const TannerGraph* graph_;
    Algorithm algorithm_;
    DecoderOptions options_;
    ClusterForest forest_;
    TraversalState state_;
    Peeler peeler_;
    QldpcWorkspace workspace_;
    std::vector<uint8_t> erased_;
    std::vector<uint32_t> erased_list_;
    std::vector<uint32_t> syndrome_nodes_;
    DecodeOutcome outcome_;
};

/// Validation followed by peeling for topological codes.
inline DecodeOutcome decode_topological(const TannerGraph& graph, const Shot& shot, Algorithm algorithm) {
    if (algorithm == Algorithm::qldpc)
        throw std::invalid_argument("decode_topological: use decode_qldpc for the qLDPC algorithm");
    Decoder decoder(graph, algorithm);
    return decoder.decode(shot);
}

inline DecodeOutcome decode_qldpc(const TannerGraph& graph, const Shot& shot, DecoderOptions options = {}) {
    Decoder decoder(graph, Algorithm::qldpc, options);
    return decoder.decode(shot);
}

}  // namespace bfuf

#endif  // BFUF_DECODERS_HPP
