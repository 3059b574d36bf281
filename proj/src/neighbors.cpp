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

#include "mlff/neighbors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace mlff {

namespace {

// Distance test per candidate: 3 sub, 3 mul + 2 add, one sqrt.
constexpr OpCost kCandidateCost{5, 3, 1};

void count_candidates(OpCounters* c, std::uint64_t candidates, std::uint64_t accepted) {
    if (c == nullptr) return;
    tally(c, kCandidateCost, candidates);
    c->gather_ops += candidates;
    c->scatter_ops += accepted;
    c->bytes_read += candidates * 3 * sizeof(double);
    c->bytes_written += accepted * sizeof(Pair);
}

void check_cutoff(double cutoff) {
    if (!(cutoff > 0.0)) throw ConfigError("neighbor cutoff must be positive");
}

}  // namespace

PairList build_pairs_bruteforce(const Coords3d& positions, double cutoff, OpCounters* counters) {
    check_cutoff(cutoff);
    const auto n = static_cast<Index>(positions.rows());
    PairList out;
    out.cutoff = cutoff;
    out.offsets.reserve(static_cast<std::size_t>(n) + 1);
    out.offsets.push_back(0);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const Vec3 d = (positions.row(j) - positions.row(i)).transpose();
            const double r = d.norm();
            if (r <= cutoff) out.pairs.push_back({i, j, r, d});
        }
        out.offsets.push_back(out.pairs.size());
    }
    const auto nn = static_cast<std::uint64_t>(n);
    count_candidates(counters, nn * (nn > 0 ? nn - 1 : 0), out.pairs.size());
    return out;
}

PairList build_pairs_celllist(const Coords3d& positions, double cutoff, OpCounters* counters) {
    check_cutoff(cutoff);
    const auto n = static_cast<Index>(positions.rows());
    PairList out;
    out.cutoff = cutoff;
    out.offsets.assign(1, 0);
    if (n == 0) return out;

    const Vec3 lo = positions.colwise().minCoeff().transpose();
    const Vec3 hi = positions.colwise().maxCoeff().transpose();
    std::array<long, 3> dims{};
    Vec3 edge;
    for (int d = 0; d < 3; ++d) {
        const double extent = hi[d] - lo[d];
        // Capped before the cast so far-flung coordinates cannot overflow.
        const double cells = std::min(std::floor(extent / cutoff), 1048576.0);
        dims[static_cast<std::size_t>(d)] = std::max(1L, static_cast<long>(cells));
    }
    // Bound the grid to O(N) cells for sparse inputs.
    while (dims[0] * dims[1] * dims[2] > 8L * n + 27) {
        for (auto& dim : dims) dim = std::max(1L, dim / 2);
    }
    for (int d = 0; d < 3; ++d) {
        const double extent = hi[d] - lo[d];
        edge[d] = std::max(cutoff, extent / static_cast<double>(dims[static_cast<std::size_t>(d)]));
    }
    auto cell_of = [&](Index i) {
        std::array<long, 3> c{};
        for (int d = 0; d < 3; ++d) {
            const auto dd = static_cast<std::size_t>(d);
            c[dd] = std::clamp(static_cast<long>((positions(i, d) - lo[d]) / edge[d]), 0L, dims[dd] - 1);
        }
        return c;
    };
    auto flat = [&](const std::array<long, 3>& c) { return (c[0] * dims[1] + c[1]) * dims[2] + c[2]; };

    // Counting sort of atoms into cells.
    const auto num_cells = static_cast<std::size_t>(dims[0] * dims[1] * dims[2]);
    std::vector<std::size_t> cell_start(num_cells + 1, 0);
    std::vector<long> atom_cell(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        atom_cell[static_cast<std::size_t>(i)] = flat(cell_of(i));
        ++cell_start[static_cast<std::size_t>(atom_cell[static_cast<std::size_t>(i)]) + 1];
    }
    for (std::size_t c = 0; c < num_cells; ++c) cell_start[c + 1] += cell_start[c];
    std::vector<Index> cell_atoms(static_cast<std::size_t>(n));
    {
        auto fill = cell_start;
        for (Index i = 0; i < n; ++i) {
            cell_atoms[fill[static_cast<std::size_t>(atom_cell[static_cast<std::size_t>(i)])]++] = i;
        }
    }

    std::uint64_t candidates = 0;
    std::vector<Pair> local;
    for (Index i = 0; i < n; ++i) {
        local.clear();
        const auto c = cell_of(i);
        for (long dx = -1; dx <= 1; ++dx) {
            const long x = c[0] + dx;
            if (x < 0 || x >= dims[0]) continue;
            for (long dy = -1; dy <= 1; ++dy) {
                const long y = c[1] + dy;
                if (y < 0 || y >= dims[1]) continue;
                for (long dz = -1; dz <= 1; ++dz) {
                    const long z = c[2] + dz;
                    if (z < 0 || z >= dims[2]) continue;
                    const auto cell = static_cast<std::size_t>(flat({x, y, z}));
                    for (std::size_t k = cell_start[cell]; k < cell_start[cell + 1]; ++k) {
                        const Index j = cell_atoms[k];
                        if (j == i) continue;
                        ++candidates;
                        const Vec3 d = (positions.row(j) - positions.row(i)).transpose();
                        const double r = d.norm();
                        if (r <= cutoff) local.push_back({i, j, r, d});
                    }
                }
            }
        }
        std::sort(local.begin(), local.end(), [](const Pair& a, const Pair& b) { return a.j < b.j; });
        out.pairs.insert(out.pairs.end(), local.begin(), local.end());
        out.offsets.push_back(out.pairs.size());
    }
    count_candidates(counters, candidates, out.pairs.size());
    return out;
}

double leg_angle(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

TripletList build_triplets(const PairList& pairs, double angular_cutoff, OpCounters* counters) {
    if (!(angular_cutoff > 0.0) || angular_cutoff > pairs.cutoff) {
        throw ConfigError("angular cutoff must be positive and not exceed the pair cutoff");
    }
    TripletList out;
    out.cutoff = angular_cutoff;
    out.offsets.assign(1, 0);
    std::vector<std::size_t> legs;
    const auto n = pairs.num_atoms();
    for (std::size_t i = 0; i < n; ++i) {
        legs.clear();
        for (std::size_t p = pairs.offsets[i]; p < pairs.offsets[i + 1]; ++p) {
            if (pairs.pairs[p].r <= angular_cutoff) legs.push_back(p);
        }
        for (std::size_t a = 0; a < legs.size(); ++a) {
            for (std::size_t b = a + 1; b < legs.size(); ++b) {
                const Pair& pj = pairs.pairs[legs[a]];
                const Pair& pk = pairs.pairs[legs[b]];
                out.triplets.push_back(
                    {static_cast<Index>(i), pj.j, pk.j, legs[a], legs[b], leg_angle(pj.d, pk.d)});
            }
        }
        out.offsets.push_back(out.triplets.size());
    }
    if (counters != nullptr) {
        // cross (6 mul, 3 sub), its norm (3 mul, 2 add, sqrt), dot (3 mul, 2 add), atan2
        tally(counters, OpCost{7, 12, 2}, out.triplets.size());
        counters->gather_ops += 2 * out.triplets.size();
        counters->bytes_read += 2 * out.triplets.size() * sizeof(Pair);
        counters->bytes_written += out.triplets.size() * sizeof(Triplet);
    }
    return out;
}

NeighborStats neighbor_stats(const PairList& pairs) {
    NeighborStats s;
    const auto n = pairs.num_atoms();
    if (n == 0) return s;
    s.mean = static_cast<double>(pairs.size()) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto m = pairs.offsets[i + 1] - pairs.offsets[i];
        s.max = std::max(s.max, m);
        if (s.histogram.size() <= m) s.histogram.resize(m + 1, 0);
        ++s.histogram[m];
    }
    return s;
}

double mean_neighbors_within(const PairList& pairs, double radius) {
    const auto n = pairs.num_atoms();
    if (n == 0) return 0.0;
    const auto within = std::count_if(pairs.pairs.begin(), pairs.pairs.end(),
                                      [radius](const Pair& p) { return p.r <= radius; });
    return static_cast<double>(within) / static_cast<double>(n);
}

}  // namespace mlff
