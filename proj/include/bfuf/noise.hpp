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

#ifndef BFUF_NOISE_HPP
#define BFUF_NOISE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfuf/codes.hpp"
#include "bfuf/gf2.hpp"
#include "bfuf/tanner_graph.hpp"

namespace bfuf {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** seeded through splitmix64. `for_shot` derives an independent
/// stream from (seed, shot index) so trials can run in any order.
class Rng {
   public:
    using result_type = uint64_t;

    explicit Rng(uint64_t seed = 0) {
        uint64_t sm = seed;
        for (auto& s : s_)
            s = splitmix64(sm);
    }

    static Rng for_shot(uint64_t seed, uint64_t shot_index) {
        uint64_t sm = seed;
        uint64_t a = splitmix64(sm);
        uint64_t mix = a ^ (shot_index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        return Rng(splitmix64(mix));
    }

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<uint64_t>::max();
    }

    result_type operator()() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

   private:
    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    uint64_t s_[4];
};

/// Integer threshold t with P(u < t) = p for u uniform on 64 bits. p = 1
/// maps to "always".
class BernoulliThreshold {
   public:
    explicit BernoulliThreshold(double p) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("probability out of range: " + std::to_string(p));
        always_ = p >= 1.0;
        threshold_ = always_ ? 0 : static_cast<uint64_t>(std::ldexp(p, 64));
    }
    bool operator()(Rng& rng) const {
        return always_ || rng() < threshold_;
    }

   private:
    uint64_t threshold_ = 0;
    bool always_ = false;
};

struct NoiseParams {
    double p = 0.0;
    double epsilon = 0.0;
    uint64_t seed = 0;

    void validate() const {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("Pauli error probability must be in [0, 1], got " + std::to_string(p));
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("erasure probability must be in [0, 1], got " + std::to_string(epsilon));
    }
};

struct Shot {
    std::vector<uint32_t> erasures;
    BitVector error;
    BitVector syndrome;
};

/// H·e for a dense check matrix.
inline BitVector extract_syndrome(const BitMatrix& h, const BitVector& error) {
    if (error.size() != h.cols())
        throw std::invalid_argument(
            "extract_syndrome: error length " + std::to_string(error.size()) + " does not match " +
            std::to_string(h.cols()) + " columns");
    return h * error;
}

inline BitVector extract_syndrome(const TannerGraph& graph, const BitVector& error) {
    return graph.syndrome_of(error);
}

/// Samples erasures and Pauli errors on every data node of `graph`.
///
/// Erasable nodes are erased with probability epsilon and then carry an
/// error with probability 1/2 (replacing the Pauli channel); every other
/// node carries an error with probability p. Check nodes are never erased.
/// An empty `mechanisms` means every data node is erasable.
inline void sample_shot(
    const TannerGraph& graph, const std::vector<Mechanism>& mechanisms, const NoiseParams& params, Rng& rng,
    Shot& out) {
    params.validate();
    const uint32_t n = graph.n_data();
    if (!mechanisms.empty() && mechanisms.size() != n)
        throw std::invalid_argument("sample_shot: mechanism metadata does not match data node count");
    BernoulliThreshold pauli(params.p);
    BernoulliThreshold erase(params.epsilon);
    const bool any_erasure = params.epsilon > 0.0;
    const bool any_pauli = params.p > 0.0;
    out.erasures.clear();
    out.error.assign_zero(n);
    out.syndrome.assign_zero(graph.n_check());
    for (uint32_t d = 0; d < n; ++d) {
        bool erasable = mechanisms.empty() || mechanisms[d].erasable;
        bool flipped;
        if (any_erasure && erasable && erase(rng)) {
            out.erasures.push_back(d);
            flipped = rng() >> 63;
        } else {
            flipped = any_pauli && pauli(rng);
        }
        if (flipped) {
            out.error.set(d);
            for (auto c : graph.neighbors(d))
                out.syndrome.flip(c - n);
        }
    }
}

inline Shot sample_shot(const DecodingGraph& graph, const NoiseParams& params, Rng& rng) {
    Shot shot;
    sample_shot(graph.tanner, graph.mechanisms, params, rng, shot);
    return shot;
}

}  // namespace bfuf

#endif  // BFUF_NOISE_HPP
