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
#include "mlff/neighbors.hpp"
#include "mlff/system.hpp"

#include <cmath>
#include <iosfwd>
#include <numbers>
#include <vector>

namespace mlff {

/// Smooth envelope 0.5 (cos(pi r / rc) + 1) for r <= rc, else 0.
template <typename Scalar>
Scalar cutoff_fn(Scalar r, Scalar rc) {
    if (r > rc) return Scalar(0);
    return Scalar(0.5) * (std::cos(std::numbers::pi_v<Scalar> * r / rc) + Scalar(1));
}

template <typename Scalar>
Scalar cutoff_fn_derivative(Scalar r, Scalar rc) {
    if (r > rc) return Scalar(0);
    return Scalar(-0.5) * std::numbers::pi_v<Scalar> / rc * std::sin(std::numbers::pi_v<Scalar> * r / rc);
}

/// Radial and angular symmetry-function grids.
///
/// Row layout of a descriptor: for each neighbor species s, the radial block
/// [s * |radial_shifts|, ...); then, for each unordered species pair (a <= b)
/// in triangular order, an angular block of |angular_shifts| x |angle_sections|
/// entries, shift-major.
struct AevParams {
    double radial_cutoff = 5.1;   // A
    double angular_cutoff = 3.5;  // A
    double radial_eta = 16.0;     // A^-2
    std::vector<double> radial_shifts;
    double angular_eta = 8.0;  // A^-2
    double zeta = 32.0;
    std::vector<double> angular_shifts;
    std::vector<double> angle_sections;  // radians
    int num_species = kNumElements;

    /// 16 radial shifts on [0.8, 5.1), 4 angular shifts on [0.8, 3.5), 8 angle
    /// sections on [0, pi): 7 * 16 + 28 * 32 = 1008 entries.
    static AevParams defaults();

    /// Evenly spaced grids of the given sizes on the same intervals.
    static AevParams with_grid(int radial, int angular_radial, int angle_sections,
                               double radial_cutoff = 5.1, double angular_cutoff = 3.5);

    std::size_t radial_size() const noexcept { return radial_shifts.size(); }
    std::size_t angular_size() const noexcept { return angular_shifts.size() * angle_sections.size(); }
    std::size_t species_pairs() const noexcept {
        const auto s = static_cast<std::size_t>(num_species);
        return s * (s + 1) / 2;
    }
    std::size_t radial_length() const noexcept { return static_cast<std::size_t>(num_species) * radial_size(); }
    std::size_t width() const noexcept { return radial_length() + species_pairs() * angular_size(); }

    /// Column of the first entry of the angular block for species (a, b).
    std::size_t angular_offset(int a, int b) const noexcept;

    void validate() const;
};

enum class AevStrategy {
    /// Materialize every per-pair and per-triplet term array, then scatter-add.
    Staged,
    /// One pass per center accumulating straight into the descriptor row.
    Fused,
};

struct Aev {
    RowMatrixXd values;  // N x width
    AevParams params;
};

/// Intermediates recorded by compute_aev for the adjoint pass.
struct AevTape {
    AevParams params;
    Coords3d positions;  // snapshot used to detect stale tapes
    std::vector<int> species;
    std::vector<Index> pair_i, pair_j;
    Eigen::VectorXd pair_r, pair_fc, pair_dfc;
    Coords3d pair_unit;
    std::vector<Index> tri_center;
    std::vector<std::size_t> tri_ij, tri_ik;
    Eigen::VectorXd tri_theta;
    bool valid = false;
};

struct AevResult {
    Aev aev;
    AevTape tape;
};

/// Pairs within the radial cutoff and triplets within the angular cutoff.
struct AevNeighbors {
    PairList pairs;
    TripletList triplets;
};

AevNeighbors build_aev_neighbors(const AtomicSystem& system, const AevParams& params,
                                 StageCounters* counters = nullptr);

/// Per-pair radial terms exp(-eta (R - Rs)^2) f_c(R), one row per pair and one
/// column per radial shift.
RowMatrixXd radial_terms(const PairList& pairs, const AevParams& params, OpCounters* counters = nullptr);

/// Per-triplet angular terms, one row per triplet, columns shift-major.
/// Throws SingularityError if a leg is shorter than kMinSeparation.
RowMatrixXd angular_terms(const TripletList& triplets, const PairList& pairs, const AevParams& params,
                          OpCounters* counters = nullptr);

/// Descriptors for every atom. Counters are written to "aev_radial" and
/// "aev_angular".
AevResult compute_aev(const AtomicSystem& system, const AevNeighbors& neighbors, const AevParams& params,
                      AevStrategy strategy, StageCounters* counters = nullptr);

/// Forces -sum_i dE/dG_i . dG_i/dr given dE/dG (N x width).
Coords3d aev_backward(const AevTape& tape, const RowMatrixXd& dE_dAev, const Coords3d& positions,
                      OpCounters* counters = nullptr);

void write_aev_csv(std::ostream& out, const Aev& aev);

}  // namespace mlff
