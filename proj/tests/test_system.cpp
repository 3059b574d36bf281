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
#include "mlff/neighbors.hpp"
#include "mlff/system.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

namespace mlff {
namespace {

using testing::min_distance;

std::size_t components(std::size_t n, const std::vector<std::pair<Index, Index>>& edges) {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [a, b] : edges) parent[find(static_cast<std::size_t>(a))] = find(static_cast<std::size_t>(b));
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += find(i) == i;
    return c;
}

TEST(Workload, AtomCountIsTenPerResiduePlusCaps) {
    for (int caps = 0; caps <= 3; ++caps) {
        for (int r : {1, 2, 7, 25}) {
            WorkloadSpec spec;
            spec.residues = r;
            spec.caps = caps;
            EXPECT_EQ(generate_polyalanine(spec).size(), static_cast<std::size_t>(10 * r + caps));
        }
    }
}

TEST(Workload, SingleResidueWithCapsHasThirteenAtoms) {
    WorkloadSpec spec;
    spec.residues = 1;
    EXPECT_EQ(generate_polyalanine(spec).size(), 13u);
}

TEST(Workload, RejectsBadSpecs) {
    WorkloadSpec spec;
    spec.residues = 0;
    EXPECT_THROW(generate_polyalanine(spec), ConfigError);
    spec.residues = 2;
    spec.caps = 4;
    EXPECT_THROW(generate_polyalanine(spec), ConfigError);
    spec.caps = -1;
    EXPECT_THROW(generate_polyalanine(spec), ConfigError);
}

TEST(Workload, HelixIsOneCovalentChainWithoutClashes) {
    for (int caps : {0, 3}) {
        WorkloadSpec spec;
        spec.residues = 30;
        spec.caps = caps;
        const auto s = generate_polyalanine(spec);
        EXPECT_GT(min_distance(s.positions), 0.95);
        const auto bonds = infer_bonds(s);
        EXPECT_EQ(bonds.size(), s.size() - 1);  // a tree
        EXPECT_EQ(components(s.size(), bonds), 1u);
        EXPECT_EQ(s.count(Role::Solute), s.size());
        EXPECT_FALSE(s.box.has_value());
    }
}

TEST(Workload, CompactGeometryHasNoClashes) {
    WorkloadSpec spec;
    spec.residues = 60;
    spec.geometry = Geometry::Compact;
    const auto s = generate_polyalanine(spec);
    EXPECT_EQ(s.size(), 603u);
    EXPECT_GT(min_distance(s.positions), 0.95);
    EXPECT_EQ(components(s.size(), infer_bonds(s)), 6u) << "one chain per 10-residue segment";
}

TEST(Workload, DeterministicForFixedSeed) {
    WorkloadSpec spec;
    spec.residues = 3;
    spec.solvated = true;
    const auto a = generate_polyalanine(spec);
    const auto b = generate_polyalanine(spec);
    EXPECT_EQ(a.positions, b.positions);
    EXPECT_EQ(a.species, b.species);
    spec.seed = 43;
    const auto c = generate_polyalanine(spec);
    EXPECT_NE(a.positions, c.positions);
}

TEST(Solvate, AddsWholeWatersOutsideExclusionInsideBox) {
    WorkloadSpec spec;
    spec.residues = 3;
    spec.solvated = true;
    spec.padding = 6.0;
    const auto s = generate_polyalanine(spec);
    const auto solute = s.indices_with(Role::Solute);
    const auto solvent = s.indices_with(Role::Solvent);
    ASSERT_EQ(solute.size(), 33u);
    ASSERT_GT(solvent.size(), 0u);
    ASSERT_EQ(solvent.size() % 3, 0u);
    for (std::size_t w = 0; w < solvent.size(); w += 3) {
        EXPECT_EQ(s.species[static_cast<std::size_t>(solvent[w])], Element::O);
        EXPECT_EQ(s.species[static_cast<std::size_t>(solvent[w + 1])], Element::H);
        EXPECT_EQ(s.species[static_cast<std::size_t>(solvent[w + 2])], Element::H);
        const double oh = (s.positions.row(solvent[w]) - s.positions.row(solvent[w + 1])).norm();
        EXPECT_NEAR(oh, 0.9572, 1e-12);
    }
    for (auto v : solvent)
        for (auto u : solute) EXPECT_GE((s.positions.row(v) - s.positions.row(u)).norm(), spec.exclusion_radius);
    ASSERT_TRUE(s.box.has_value());
    EXPECT_NO_THROW(s.validate());
    // Density of waters in the box is at most the lattice density.
    const double volume = s.box->extent().prod();
    EXPECT_LT(static_cast<double>(solvent.size() / 3) / volume, spec.water_density * 1.05);
}

TEST(Solvate, RejectsBadArguments) {
    WorkloadSpec spec;
    spec.residues = 1;
    const auto s = generate_polyalanine(spec);
    EXPECT_THROW(solvate(s, 0.0, 2.4, 5.0, 1), ConfigError);
    EXPECT_THROW(solvate(s, 0.03, 0.0, 5.0, 1), ConfigError);
    EXPECT_THROW(solvate(AtomicSystem{}, 0.03, 2.4, 5.0, 1), ConfigError);
}

TEST(Sweep, NineteenAscendingSizes) {
    const auto s = default_sweep_residues();
    ASSERT_EQ(s.size(), 19u);
    EXPECT_EQ(s.front(), 10);
    EXPECT_EQ(s.back(), 1000);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
}

TEST(Xyz, RoundTripIsExact) {
    WorkloadSpec spec;
    spec.residues = 2;
    spec.solvated = true;
    spec.padding = 4.0;
    const auto s = generate_polyalanine(spec);
    std::stringstream ss;
    format_system(ss, s, "test");
    const auto t = parse_system(ss);
    EXPECT_EQ(t.species, s.species);
    EXPECT_EQ(t.roles, s.roles);
    EXPECT_EQ(t.positions, s.positions);
    ASSERT_TRUE(t.box.has_value());
    EXPECT_EQ(t.box->lo, s.box->lo);
    EXPECT_EQ(t.box->hi, s.box->hi);
}

ParseError::Kind parse_kind(const std::string& text) {
    std::istringstream in(text);
    try {
        parse_system(in);
    } catch (const ParseError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for: " << text;
    return ParseError::Kind::Malformed;
}

TEST(Xyz, ReportsErrorKinds) {
    EXPECT_EQ(parse_kind("2\n\nH 0 0 0 solute\nXx 1 0 0 solute\n"), ParseError::Kind::UnknownElement);
    EXPECT_EQ(parse_kind("3\n\nH 0 0 0 solute\nH 1 0 0 solute\n"), ParseError::Kind::CountMismatch);
    EXPECT_EQ(parse_kind("1\n\nH 0 zero 0 solute\n"), ParseError::Kind::Malformed);
    EXPECT_EQ(parse_kind("one\n\n"), ParseError::Kind::Malformed);
}

TEST(System, SubsetAndTransform) {
    WorkloadSpec spec;
    spec.residues = 1;
    const auto s = generate_polyalanine(spec);
    const std::vector<Index> idx = {4, 0, 2};
    const auto sub = s.subset(idx);
    ASSERT_EQ(sub.size(), 3u);
    EXPECT_EQ(sub.species[0], s.species[4]);
    EXPECT_EQ(sub.positions.row(1), s.positions.row(0));

    Rng rng(5);
    const Eigen::Matrix3d r = testing::random_rotation(rng);
    const auto t = transformed(s, r, Vec3(1, 2, 3));
    EXPECT_NEAR(min_distance(t.positions), min_distance(s.positions), 1e-12);
}

TEST(RandomCluster, RespectsSeparation) {
    const auto s = random_cluster(80, 0.05, 9, 1.1);
    EXPECT_EQ(s.size(), 80u);
    EXPECT_GE(min_distance(s.positions), 1.1);
    EXPECT_THROW(random_cluster(200, 5.0, 1, 2.0), ConfigError);
}

TEST(Solvate, WatersKeepTheirDistance) {
    WorkloadSpec spec;
    spec.residues = 2;
    spec.solvated = true;
    spec.padding = 5.0;
    const auto s = generate_polyalanine(spec);
    const auto solvent = s.indices_with(Role::Solvent);
    ASSERT_GT(solvent.size(), 30u);
    const auto first = static_cast<Index>(s.count(Role::Solute));
    double closest = 1e9;
    for (auto i : solvent)
        for (auto j : solvent) {
            if ((i - first) / 3 == (j - first) / 3) continue;
            closest = std::min(closest, (s.positions.row(i) - s.positions.row(j)).norm());
        }
    EXPECT_GE(closest, 1.9);
    // Classical energy per atom stays moderate right after placement.
    const auto cff = assign_default_params(s);
    const auto res = cff_energy_forces(s, cff, build_pairs_celllist(s, cff.cutoff));
    EXPECT_LT(res.energy / static_cast<double>(s.size()), 2.0);
}

}  // namespace
}  // namespace mlff
