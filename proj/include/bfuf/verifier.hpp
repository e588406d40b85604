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

#ifndef BFUF_VERIFIER_HPP
#define BFUF_VERIFIER_HPP

#include <stdexcept>

#include "bfuf/codes.hpp"
#include "bfuf/decoders.hpp"
#include "bfuf/gf2.hpp"
#include "bfuf/noise.hpp"

namespace bfuf {

/// True iff `residual` overlaps some logical cut an odd number of times.
inline bool crosses_logical_cut(const DecodingGraph& graph, const BitVector& residual) {
    for (const auto& cut : graph.logical_cuts)
        if (dot(cut, residual))
            return true;
    return false;
}

/// Logical failure of a decoded shot. Throws std::logic_error if the
/// correction does not reproduce the shot's syndrome.
inline bool is_failure(const DecodingGraph& graph, const Shot& shot, const BitVector& correction) {
    if (graph.tanner.syndrome_of(correction) != shot.syndrome)
        throw std::logic_error("correction does not reproduce the syndrome of the shot");
    BitVector residual = shot.error;
    residual ^= correction;
    return crosses_logical_cut(graph, residual);
}

inline bool is_failure(const DecodingGraph& graph, const Shot& shot, const DecodeOutcome& outcome) {
    return is_failure(graph, shot, outcome.correction);
}

inline bool is_failure(const CssCode& code, Sector sector, const Shot& shot, const BitVector& correction) {
    if (extract_syndrome(code.checks(sector), correction) != shot.syndrome)
        throw std::logic_error("correction does not reproduce the syndrome of the shot");
    BitVector residual = shot.error;
    residual ^= correction;
    return (code.opposite_logicals(sector) * residual).any();
}

/// Rank-based reference: a kernel residual is harmless iff it lies in the
/// row space of the sector's stabilizers.
inline bool oracle_failure(const CssCode& code, Sector sector, const BitVector& residual) {
    if (extract_syndrome(code.checks(sector), residual).any())
        throw std::invalid_argument("oracle_failure: residual has a non-zero syndrome");
    return !in_rowspace(code.stabilizers(sector), residual);
}

}  // namespace bfuf

#endif  // BFUF_VERIFIER_HPP
