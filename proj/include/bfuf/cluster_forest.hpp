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

#ifndef BFUF_CLUSTER_FOREST_HPP
#define BFUF_CLUSTER_FOREST_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bfuf {

inline constexpr uint32_t kNoNode = std::numeric_limits<uint32_t>::max();

/// How cluster validity is decided: by syndrome parity (every data node has
/// two checks) or externally by solving the cluster's local linear system.
enum class ForestMode { topological, qldpc };

/// The breadth-first list L with its read position and visited bits.
///
/// `processed` counts every entry consumed from L over the whole run, which
/// can exceed `queue.size()` when the list is rescanned or replaced.
struct TraversalState {
    std::vector<uint32_t> queue;
    size_t pos = 0;
    size_t processed = 0;
    std::vector<uint8_t> visited;

    void resize(size_t nodes) {
        visited.assign(nodes, 0);
        marked_.clear();
        queue.clear();
        queue.reserve(nodes);
        pos = 0;
        processed = 0;
    }

    /// Marks `node` visited and appends it to L; no-op if already visited.
    bool visit(uint32_t node) {
        if (visited[node])
            return false;
        visited[node] = 1;
        marked_.push_back(node);
        queue.push_back(node);
        return true;
    }

    void reset() {
        for (auto n : marked_)
            visited[n] = 0;
        marked_.clear();
        queue.clear();
        pos = 0;
        processed = 0;
    }

    std::span<const uint32_t> visited_nodes() const {
        return marked_;
    }

   private:
    std::vector<uint32_t> marked_;
};

/// Union-find forest over the flat Tanner node space.
///
/// Roots carry the cluster size, the number of non-zero syndromes inside,
/// a validity flag and a list of skipped nodes. Every cluster also keeps a
/// circular member list so that qLDPC validation can enumerate it. Between
/// shots only nodes touched by the previous shot are restored.
class ClusterForest {
   public:
    ClusterForest() = default;
    ClusterForest(uint32_t n_data, uint32_t n_check) {
        resize(n_data, n_check);
    }

    void resize(uint32_t n_data, uint32_t n_check) {
        n_data_ = n_data;
        const size_t n = size_t{n_data} + n_check;
        if (n >= (size_t{1} << 29))
            throw std::length_error("cluster forest supports fewer than 2^29 nodes");
        s_.resize(n);
        touched_.clear();
        for (uint32_t i = 0; i < n; ++i)
            s_[i] = fresh(i);
        n_invalid_ = 0;
    }

    size_t node_count() const {
        return s_.size();
    }
    uint32_t n_data() const {
        return n_data_;
    }
    ForestMode mode() const {
        return mode_;
    }

    /// Resets the forest, marks non-zero syndromes and seeds L with the
    /// erasures followed by the syndromes.
    void init(
        ForestMode mode, std::span<const uint32_t> syndrome_nodes, std::span<const uint32_t> erasures,
        TraversalState& state) {
        reset();
        state.reset();
        if (state.visited.size() != node_count())
            state.resize(node_count());
        mode_ = mode;
        for (auto e : erasures) {
            if (e >= n_data_)
                throw std::invalid_argument("erasure id " + std::to_string(e) + " is not a data node");
            if (!state.visit(e))
                throw std::invalid_argument("duplicate erasure id " + std::to_string(e));
            touch(e);
        }
        for (auto s : syndrome_nodes) {
            if (s < n_data_ || s >= node_count())
                throw std::invalid_argument("syndrome id " + std::to_string(s) + " is not a check node");
            if (!state.visit(s))
                throw std::invalid_argument("duplicate syndrome id " + std::to_string(s));
            touch(s);
            s_[s].syndromes = 1;
            s_[s].is_syndrome = 1;
            s_[s].valid = 0;
        }
        n_invalid_ = syndrome_nodes.size();
    }

    /// Root of `node`, with full path compression.
    uint32_t find(uint32_t node) {
        uint32_t root = node;
        while (s_[root].parent != root)
            root = s_[root].parent;
        while (s_[node].parent != root) {
            uint32_t next = s_[node].parent;
            s_[node].parent = root;
            node = next;
        }
        return root;
    }

    uint32_t root_no_compress(uint32_t node) const {
        while (s_[node].parent != node)
            node = s_[node].parent;
        return node;
    }

    /// Number of parent hops from `node` to its root.
    size_t depth(uint32_t node) const {
        size_t d = 0;
        while (s_[node].parent != node) {
            node = s_[node].parent;
            ++d;
        }
        return d;
    }

    bool is_root(uint32_t node) const {
        return s_[node].parent == node;
    }

    /// Weighted union of two roots; the smaller tree goes under the larger,
    /// and on equal sizes `rb` survives. Returns the surviving root.
    uint32_t merge(uint32_t ra, uint32_t rb) {
        if (ra == rb || !is_root(ra) || !is_root(rb))
            throw std::logic_error("merge requires two distinct roots");
        uint32_t big = rb, small = ra;
        if (s_[ra].size > s_[rb].size)
            std::swap(big, small);
        touch(ra);
        touch(rb);
        const bool invalid_a = !s_[ra].valid;
        const bool invalid_b = !s_[rb].valid;
        s_[small].parent = big;
        s_[big].size += s_[small].size;
        s_[big].syndromes += s_[small].syndromes;
        bool invalid_new;
        if (mode_ == ForestMode::topological)
            invalid_new = s_[big].syndromes & 1;
        else
            invalid_new = invalid_a || invalid_b;  // provisional until validated
        s_[big].valid = !invalid_new;
        n_invalid_ = n_invalid_ + invalid_new - invalid_a - invalid_b;

        std::swap(s_[ra].member_next, s_[rb].member_next);

        if (s_[small].skip_head != kNoNode) {
            if (s_[big].skip_head == kNoNode) {
                s_[big].skip_head = s_[small].skip_head;
            } else {
                s_[s_[big].skip_tail].skip_next = s_[small].skip_head;
            }
            s_[big].skip_tail = s_[small].skip_tail;
            s_[small].skip_head = s_[small].skip_tail = kNoNode;
        }
        return big;
    }

    bool valid(uint32_t root) const {
        return s_[root].valid;
    }
    bool parity(uint32_t root) const {
        return s_[root].syndromes & 1;
    }
    uint32_t size(uint32_t root) const {
        return s_[root].size;
    }
    uint32_t syndrome_count(uint32_t root) const {
        return s_[root].syndromes;
    }
    size_t invalid_count() const {
        return n_invalid_;
    }

    /// Records the outcome of an external (qLDPC) validation of `root`. A
    /// cluster without non-zero syndromes is always valid.
    void set_valid(uint32_t root, bool valid) {
        if (mode_ != ForestMode::qldpc)
            throw std::logic_error("set_valid is only meaningful in qLDPC mode");
        if (!is_root(root))
            throw std::logic_error("set_valid requires a root");
        if (s_[root].syndromes == 0)
            valid = true;
        if (bool(s_[root].valid) == valid)
            return;
        touch(root);
        s_[root].valid = valid;
        if (valid)
            --n_invalid_;
        else
            ++n_invalid_;
    }

    void push_skipped(uint32_t root, uint32_t node) {
        if (s_[node].in_skip)
            return;
        s_[node].in_skip = 1;
        touch(root);
        touch(node);
        s_[node].skip_next = kNoNode;
        if (s_[root].skip_head == kNoNode)
            s_[root].skip_head = node;
        else
            s_[s_[root].skip_tail].skip_next = node;
        s_[root].skip_tail = node;
    }

    bool has_skipped(uint32_t root) const {
        return s_[root].skip_head != kNoNode;
    }

    /// Hands every skipped node of `root` to `sink` in insertion order and
    /// empties the list.
    template <class Sink>
    void drain_skipped(uint32_t root, Sink&& sink) {
        uint32_t node = s_[root].skip_head;
        s_[root].skip_head = s_[root].skip_tail = kNoNode;
        while (node != kNoNode) {
            uint32_t next = s_[node].skip_next;
            s_[node].skip_next = kNoNode;
            s_[node].in_skip = 0;
            sink(node);
            node = next;
        }
    }

    template <class Fn>
    void for_each_member(uint32_t root, Fn&& fn) const {
        uint32_t node = root;
        do {
            fn(node);
            node = s_[node].member_next;
        } while (node != root);
    }

    /// Nodes whose state differs (or may differ) from a fresh forest.
    std::span<const uint32_t> touched() const {
        return touched_;
    }

    void touch(uint32_t node) {
        if (!s_[node].touch_pos) {
            touched_.push_back(node);
            s_[node].touch_pos = static_cast<uint32_t>(touched_.size());
        }
    }

    /// 1 + position of `node` in touched(), or 0 if untouched this shot.
    uint32_t touch_order(uint32_t node) const {
        return s_[node].touch_pos;
    }

    void reset() {
        for (auto n : touched_) {
            s_[n] = fresh(n);
        }
        touched_.clear();
        n_invalid_ = 0;
    }

    /// Recomputes sizes, syndrome counts, validity and the invalid-cluster
    /// count from the parent pointers and compares them with the maintained
    /// values. Returns an empty string when consistent.
    std::string audit() const {
        const size_t n = node_count();
        std::vector<uint32_t> size(n, 0), syndromes(n, 0);
        for (uint32_t v = 0; v < n; ++v) {
            if (s_[v].parent >= n)
                return "parent out of range at " + std::to_string(v);
            size_t hops = 0;
            uint32_t r = v;
            while (s_[r].parent != r) {
                r = s_[r].parent;
                if (++hops > n)
                    return "cycle in parent pointers at " + std::to_string(v);
            }
            ++size[r];
            syndromes[r] += s_[v].is_syndrome;
        }
        size_t invalid = 0;
        for (uint32_t r = 0; r < n; ++r) {
            if (!is_root(r))
                continue;
            if (size[r] != s_[r].size)
                return "size mismatch at root " + std::to_string(r);
            if (syndromes[r] != s_[r].syndromes)
                return "syndrome count mismatch at root " + std::to_string(r);
            if (mode_ == ForestMode::topological && bool(s_[r].valid) != (syndromes[r] % 2 == 0))
                return "validity does not match parity at root " + std::to_string(r);
            if (!s_[r].valid && syndromes[r] == 0)
                return "invalid cluster without syndromes at root " + std::to_string(r);
            if (!s_[r].valid)
                ++invalid;
            size_t members = 0;
            bool foreign = false;
            for_each_member(r, [&](uint32_t m) {
                ++members;
                foreign |= root_no_compress(m) != r;
            });
            if (members != s_[r].size || foreign)
                return "member ring inconsistent at root " + std::to_string(r);
            for (uint32_t s = s_[r].skip_head; s != kNoNode; s = s_[s].skip_next)
                if (root_no_compress(s) != r)
                    return "skipped node outside its cluster at root " + std::to_string(r);
        }
        if (invalid != n_invalid_)
            return "invalid-cluster count " + std::to_string(n_invalid_) + " but recount gives " +
                   std::to_string(invalid);
        return {};
    }

   private:
    uint32_t n_data_ = 0;
    ForestMode mode_ = ForestMode::topological;
    // All per-node state in one record, so a node costs one cache line.
    struct Slot {
        uint32_t parent;
        uint32_t size;
        uint32_t syndromes;
        uint32_t member_next;
        uint32_t skip_head;
        uint32_t skip_tail;
        uint32_t skip_next;
        uint32_t touch_pos : 29;
        uint32_t valid : 1;
        uint32_t in_skip : 1;
        uint32_t is_syndrome : 1;
    };
    static_assert(sizeof(Slot) == 32);

    static Slot fresh(uint32_t node) {
        return Slot{node, 1, 0, node, kNoNode, kNoNode, kNoNode, 0, 1, 0, 0};
    }

    std::vector<Slot> s_;
    std::vector<uint32_t> touched_;
    size_t n_invalid_ = 0;
};

}  // namespace bfuf

#endif  // BFUF_CLUSTER_FOREST_HPP
