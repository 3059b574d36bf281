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

#include "mlff/cff.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <numeric>

namespace mlff {
namespace {

AtomicSystem peptide(int residues, int caps = 3) {
    WorkloadSpec spec;
    spec.residues = residues;
    spec.caps = caps;
    return generate_polyalanine(spec);
}

double cff_energy(const AtomicSystem& s, const CffParams& p, const CffOptions& o = {}) {
    return cff_energy_forces(s, p, build_pairs_celllist(s, p.cutoff), o).energy;
}

TEST(Cff, DimerMatchesClosedForm) {
    AtomicSystem s;
    s.species = {Element::C, Element::O};
    s.roles = {Role::Solute, Role::Solute};
    s.positions.resize(2, 3);
    s.positions << 0, 0, 0, 3.7, 0, 0;
    CffParams p;
    p.lj[static_cast<std::size_t>(index_of(Element::C))] = {0.086, 3.40};
    p.lj[static_cast<std::size_t>(index_of(Element::O))] = {0.21, 2.96};
    p.charges = {0.3, -0.3};
    const double r = 3.7;
    const double sigma = 0.5 * (3.40 + 2.96);
    const double eps = std::sqrt(0.086 * 0.21);
    const double lj = 4 * eps * (std::pow(sigma / r, 12) - std::pow(sigma / r, 6));
    const double coul = kCoulomb * 0.3 * -0.3 / r;
    const double sw = 0.5 * (1 + std::cos(std::numbers::pi * r / p.cutoff));
    const auto res = cff_energy_forces(s, p, build_pairs_celllist(s, p.cutoff));
    EXPECT_NEAR(res.energy, (lj + coul) * sw, 1e-12);
    EXPECT_NEAR(res.atomic_energies[0], res.energy / 2, 1e-14);
    // Force along the axis from the derivative of the closed form.
    const double h = 1e-5;
    auto e_at = [&](double x) {
        const double l = 4 * eps * (std::pow(sigma / x, 12) - std::pow(sigma / x, 6));
        return (l + kCoulomb * -0.09 / x) * 0.5 * (1 + std::cos(std::numbers::pi * x / p.cutoff));
    };
    const double f = -(e_at(r + h) - e_at(r - h)) / (2 * h);
    EXPECT_NEAR(res.forces(1, 0), f, 1e-7);
    EXPECT_NEAR(res.forces(0, 0), -f, 1e-7);
}

TEST(Cff, PairBeyondCutoffContributesNothing) {
    AtomicSystem s;
    s.species = {Element::O, Element::O};
    s.roles = {Role::Solute, Role::Solute};
    s.positions.resize(2, 3);
    s.positions << 0, 0, 0, 10.5, 0, 0;
    const auto p = assign_default_params(s);
    const auto res = cff_energy_forces(s, p, build_pairs_celllist(s, p.cutoff));
    EXPECT_EQ(res.energy, 0.0);
    EXPECT_EQ(res.forces.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Cff, ForcesMatchFiniteDifferences) {
    for (int residues : {1, 3}) {
        auto s = peptide(residues);
        const auto p = assign_default_params(s);
        // Move off the reference geometry so bonded terms are strained.
        Rng rng(residues);
        for (Eigen::Index i = 0; i < s.positions.rows(); ++i)
            for (int d = 0; d < 3; ++d) s.positions(i, d) += rng.uniform(-0.1, 0.1);
        const auto res = cff_energy_forces(s, p, build_pairs_celllist(s, p.cutoff));
        const auto fd = testing::fd_forces(s, [&](const AtomicSystem& x) { return cff_energy(x, p); });
        EXPECT_LT(testing::rel_max_err(res.forces, fd), 1e-8);
        EXPECT_LT(res.forces.colwise().sum().norm(), 1e-9);
        EXPECT_NEAR(res.atomic_energies.sum(), res.energy, 1e-9 * std::abs(res.energy));
    }
}

TEST(Cff, DihedralAndAngleGradientsOnTwistedChain) {
    AtomicSystem s;
    s.species = {Element::C, Element::C, Element::C, Element::C};
    s.roles.assign(4, Role::Solute);
    s.positions.resize(4, 3);
    s.positions << 0, 0, 0, 1.5, 0, 0, 2.0, 1.4, 0, 3.4, 1.6, 0.9;
    CffParams p;
    p.charges.assign(4, 0.0);
    p.angles = {{0, 1, 2, 50.0, 1.9}, {1, 2, 3, 40.0, 2.0}};
    p.dihedrals = {{0, 1, 2, 3, 1.3, 3, 0.4}, {0, 1, 2, 3, 0.7, 1, 0.0}};
    const auto res = cff_energy_forces(s, p, build_pairs_celllist(s, p.cutoff));
    const auto fd = testing::fd_forces(s, [&](const AtomicSystem& x) { return cff_energy(x, p); });
    EXPECT_LT(testing::rel_max_err(res.forces, fd), 1e-8);
}

TEST(Cff, DefaultParamsExcludeCloseNeighboursAndNeutralise) {
    const auto s = peptide(2, 2);
    const auto p = assign_default_params(s);
    const auto bonds = infer_bonds(s);
    EXPECT_EQ(p.bonds.size(), bonds.size());
    for (auto [i, j] : bonds) {
        const auto key = std::make_pair(std::min(i, j), std::max(i, j));
        EXPECT_NE(std::find(p.exclusions.begin(), p.exclusions.end(), key), p.exclusions.end());
    }
    for (const auto& a : p.angles) {
        const auto key = std::make_pair(std::min(a.i, a.k), std::max(a.i, a.k));
        EXPECT_NE(std::find(p.exclusions.begin(), p.exclusions.end(), key), p.exclusions.end());
    }
    EXPECT_NEAR(std::accumulate(p.charges.begin(), p.charges.end(), 0.0), 0.0, 1e-12);
    // At the reference geometry the harmonic terms are at rest.
    CffParams bonded_only = p;
    bonded_only.charges.assign(s.size(), 0.0);
    for (auto& lj : bonded_only.lj) lj.epsilon = 0.0;
    bonded_only.dihedrals.clear();
    EXPECT_NEAR(cff_energy(s, bonded_only), 0.0, 1e-20);
}

TEST(Cff, CountedOpsPerPairInBand) {
    const auto s = peptide(4);
    const auto p = assign_default_params(s);
    const auto pairs = build_pairs_celllist(s, p.cutoff);
    const auto res = cff_energy_forces(s, p, pairs);
    const auto n_pairs = count_nonbonded_pairs(p, pairs);
    // Independent count: unique pairs within cutoff minus exclusions.
    std::size_t expect = 0;
    for (Index i = 0; i < static_cast<Index>(s.size()); ++i)
        for (Index j = i + 1; j < static_cast<Index>(s.size()); ++j)
            if ((s.positions.row(i) - s.positions.row(j)).norm() <= p.cutoff &&
                std::find(p.exclusions.begin(), p.exclusions.end(), std::make_pair(i, j)) == p.exclusions.end()) {
                ++expect;
            }
    EXPECT_EQ(n_pairs, expect);
    const double per_pair =
        static_cast<double>(res.counters.at("cff_nonbonded").combined()) / static_cast<double>(n_pairs);
    EXPECT_GE(per_pair, 25.0);
    EXPECT_LE(per_pair, 30.0);
    EXPECT_EQ(res.counters.at("cff_nonbonded").scatter_ops, 4 * n_pairs);
}

TEST(Cff, ActiveMaskSelectsTerms) {
    const auto s = peptide(2);
    const auto p = assign_default_params(s);
    const auto pairs = build_pairs_celllist(s, p.cutoff);
    std::vector<bool> none(s.size(), false), all(s.size(), true);
    CffOptions o;
    o.active = &none;
    const auto r0 = cff_energy_forces(s, p, pairs, o);
    EXPECT_EQ(r0.energy, 0.0);
    EXPECT_EQ(r0.forces.cwiseAbs().maxCoeff(), 0.0);
    o.active = &all;
    EXPECT_EQ(cff_energy_forces(s, p, pairs, o).energy, cff_energy_forces(s, p, pairs).energy);
}

TEST(Cff, CoincidentAtomsThrow) {
    AtomicSystem s;
    s.species = {Element::O, Element::O};
    s.roles = {Role::Solute, Role::Solute};
    s.positions = Coords3d::Zero(2, 3);
    CffParams p;
    p.charges = {0.0, 0.0};
    EXPECT_THROW(cff_energy_forces(s, p, build_pairs_celllist(s, p.cutoff)), SingularityError);
}

TEST(Cff, RejectsMismatchedInputs) {
    const auto s = peptide(1);
    auto p = assign_default_params(s);
    EXPECT_THROW(cff_energy_forces(s, p, build_pairs_celllist(s, 5.0)), ConfigError);
    p.charges.pop_back();
    EXPECT_THROW(cff_energy_forces(s, p, build_pairs_celllist(s, p.cutoff)), ConfigError);
}

}  // namespace
}  // namespace mlff
