// SPDX-FileCopyrightText: Copyright (c) 2026 The mlffbench Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "mlff/common.hpp"
#include "mlff/counters.hpp"
#include "mlff/system.hpp"

#include <span>
#include <vector>

namespace mlff {

/// Directed neighbor pair. `d` points from the center i to the neighbor j.
struct Pair {
    Index i = 0;
    Index j = 0;
    double r = 0.0;
    Vec3 d = Vec3::Zero();

    friend bool operator==(const Pair&, const Pair&) = default;
};

/// All ordered pairs i != j with r_ij <= cutoff, sorted by (i, j) and grouped by
/// center: the pairs of atom i are pairs[offsets[i] .. offsets[i+1]).
struct PairList {
    double cutoff = 0.0;
    std::vector<Pair> pairs;
    std::vector<std::size_t> offsets;

    std::size_t num_atoms() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t size() const noexcept { return pairs.size(); }
    std::span<const Pair> of(Index center) const {
        const auto c = static_cast<std::size_t>(center);
        return {pairs.data() + offsets[c], offsets[c + 1] - offsets[c]};
    }
};

PairList build_pairs_bruteforce(const Coords3d& positions, double cutoff, OpCounters* counters = nullptr);
PairList build_pairs_celllist(const Coords3d& positions, double cutoff, OpCounters* counters = nullptr);

inline PairList build_pairs_bruteforce(const AtomicSystem& s, double cutoff, OpCounters* counters = nullptr) {
    return build_pairs_bruteforce(s.positions, cutoff, counters);
}
inline PairList build_pairs_celllist(const AtomicSystem& s, double cutoff, OpCounters* counters = nullptr) {
    return build_pairs_celllist(s.positions, cutoff, counters);
}

/// Angle triplet (j, i, k) at center i with j < k. `pair_ij` and `pair_ik` index
/// into the PairList the triplets were built from.
struct Triplet {
    Index center = 0;
    Index j = 0;
    Index k = 0;
    std::size_t pair_ij = 0;
    std::size_t pair_ik = 0;
    double theta = 0.0;  // radians, in [0, pi]
};

struct TripletList {
    double cutoff = 0.0;
    std::vector<Triplet> triplets;
    std::vector<std::size_t> offsets;  // grouped by center, like PairList

    std::size_t size() const noexcept { return triplets.size(); }
};

/// Every unordered neighbor pair {j, k} of each center with both legs within
/// `angular_cutoff`. Requires angular_cutoff <= pairs.cutoff.
TripletList build_triplets(const PairList& pairs, double angular_cutoff, OpCounters* counters = nullptr);

/// Angle between two legs from atan2(|a x b|, a . b).
double leg_angle(const Vec3& a, const Vec3& b);

struct NeighborStats {
    double mean = 0.0;          // M: ordered pairs per atom
    std::size_t max = 0;
    std::vector<std::size_t> histogram;  // histogram[m] = atoms with m neighbors
};

NeighborStats neighbor_stats(const PairList& pairs);

/// Mean number of neighbors within `radius` (<= pairs.cutoff) per atom.
double mean_neighbors_within(const PairList& pairs, double radius);

}  // namespace mlff
