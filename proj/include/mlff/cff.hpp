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

#include "mlff/neighbors.hpp"
#include "mlff/potential.hpp"
#include "mlff/system.hpp"

#include <array>
#include <utility>
#include <vector>

namespace mlff {

struct LennardJones {
    double epsilon = 0.0;  // kcal/mol
    double sigma = 1.0;    // A
};

/// k (r - r0)^2
struct Bond {
    Index i, j;
    double k, r0;
};

/// k (theta - theta0)^2 with j the apex.
struct Angle {
    Index i, j, k;
    double k_theta, theta0;
};

/// (V/2) (1 + cos(n phi - phi0)) about the j-k axis.
struct Dihedral {
    Index i, j, k, l;
    double v;
    int n;
    double phi0;
};

struct CffParams {
    std::array<LennardJones, kNumElements> lj{};
    std::vector<double> charges;  // e
    std::vector<Bond> bonds;
    std::vector<Angle> angles;
    std::vector<Dihedral> dihedrals;
    /// Nonbonded pairs skipped (1-2 and 1-3 neighbours), stored with first < second.
    std::vector<std::pair<Index, Index>> exclusions;
    double cutoff = 10.0;  // A

    void validate(std::size_t num_atoms) const;
};

/// Coulomb constant in kcal A / (mol e^2).
inline constexpr double kCoulomb = 332.0637133;

/// Bonds between atoms closer than 1.2 x the sum of covalent radii.
std::vector<std::pair<Index, Index>> infer_bonds(const AtomicSystem& system);

/// Generic element LJ values, per-molecule neutral charges, and harmonic
/// bonds/angles at the current geometry with threefold torsions.
CffParams assign_default_params(const AtomicSystem& system);

struct CffOptions {
    /// When set, only terms touching at least one atom with active[i] == true
    /// are evaluated.
    const std::vector<bool>* active = nullptr;
};

// Per-pair costs of the nonbonded kernel, matching the arithmetic in cff.cpp.
// Core: LJ + Coulomb energy and radial force (26 arithmetic + 1 sqrt).
inline constexpr OpCost kNonbondedCoreCost{9, 17, 1};
// Smooth cutoff envelope applied on top of the core (10 arithmetic, cos + sin).
inline constexpr OpCost kNonbondedSwitchCost{2, 8, 2};

/// Bonded + switched nonbonded energy and analytic forces. `pairs` must be
/// built with params.cutoff. Counters land in result.counters under
/// "cff_nonbonded" (core), "cff_switch" and "cff_bonded".
PotentialResult cff_energy_forces(const AtomicSystem& system, const CffParams& params, const PairList& pairs,
                                  const CffOptions& options = {});

/// Nonbonded pairs (i < j, not excluded, within cutoff) the kernel would
/// evaluate under `options`.
std::size_t count_nonbonded_pairs(const CffParams& params, const PairList& pairs, const CffOptions& options = {});

}  // namespace mlff
