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

#include "mlff/aev.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace mlff {
namespace {

double fc(double r, double rc) { return r <= rc ? 0.5 * (std::cos(std::numbers::pi * r / rc) + 1.0) : 0.0; }

// Direct evaluation of the descriptor definition, one atom at a time.
RowMatrixXd reference_aev(const AtomicSystem& s, const AevParams& p) {
    const auto n = static_cast<Index>(s.size());
    const int ns = p.num_species;
    const auto nr = static_cast<int>(p.radial_shifts.size());
    const auto na = static_cast<int>(p.angular_shifts.size());
    const auto nt = static_cast<int>(p.angle_sections.size());
    // Angular block start for each unordered species pair, in (a, b >= a) order.
    std::vector<std::vector<int>> block(ns, std::vector<int>(ns));
    int next = ns * nr;
    for (int a = 0; a < ns; ++a)
        for (int b = a; b < ns; ++b) {
            block[a][b] = block[b][a] = next;
            next += na * nt;
        }
    RowMatrixXd g = RowMatrixXd::Zero(n, next);
    for (Index i = 0; i < n; ++i) {
        const Vec3 xi = s.positions.row(i).transpose();
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double r = (s.positions.row(j).transpose() - xi).norm();
            if (r > p.radial_cutoff) continue;
            const int sj = index_of(s.species[static_cast<std::size_t>(j)]);
            for (int k = 0; k < nr; ++k) {
                const double x = r - p.radial_shifts[static_cast<std::size_t>(k)];
                g(i, sj * nr + k) += std::exp(-p.radial_eta * x * x) * fc(r, p.radial_cutoff);
            }
        }
        for (Index j = 0; j < n; ++j) {
            for (Index k = j + 1; k < n; ++k) {
                if (j == i || k == i) continue;
                const Vec3 a = s.positions.row(j).transpose() - xi;
                const Vec3 b = s.positions.row(k).transpose() - xi;
                const double ra = a.norm(), rb = b.norm();
                if (ra > p.angular_cutoff || rb > p.angular_cutoff) continue;
                const double theta = std::acos(std::clamp(a.dot(b) / (ra * rb), -1.0, 1.0));
                const int off = block[index_of(s.species[static_cast<std::size_t>(j)])]
                                     [index_of(s.species[static_cast<std::size_t>(k)])];
                for (int r = 0; r < na; ++r)
                    for (int t = 0; t < nt; ++t) {
                        const double x = 0.5 * (ra + rb) - p.angular_shifts[static_cast<std::size_t>(r)];
                        g(i, off + r * nt + t) +=
                            std::pow(2.0, 1.0 - p.zeta) *
                            std::pow(1.0 + std::cos(theta - p.angle_sections[static_cast<std::size_t>(t)]), p.zeta) *
                            std::exp(-p.angular_eta * x * x) * fc(ra, p.angular_cutoff) * fc(rb, p.angular_cutoff);
                    }
            }
        }
    }
    return g;
}

TEST(AevParams, DefaultWidthIs1008) {
    const auto p = AevParams::defaults();
    EXPECT_EQ(p.radial_shifts.size(), 16u);
    EXPECT_EQ(p.angular_shifts.size(), 4u);
    EXPECT_EQ(p.angle_sections.size(), 8u);
    EXPECT_EQ(p.radial_length(), 7u * 16u);
    EXPECT_EQ(p.species_pairs(), 28u);
    EXPECT_EQ(p.width(), 1008u);
    EXPECT_DOUBLE_EQ(p.radial_shifts.front(), 0.8);
}

TEST(AevParams, AngularBlocksTileTheTail) {
    const auto p = AevParams::defaults();
    std::size_t expect = p.radial_length();
    for (int a = 0; a < p.num_species; ++a)
        for (int b = a; b < p.num_species; ++b) {
            EXPECT_EQ(p.angular_offset(a, b), expect);
            EXPECT_EQ(p.angular_offset(b, a), expect);
            expect += p.angular_size();
        }
    EXPECT_EQ(expect, p.width());
}

TEST(AevParams, Validation) {
    auto p = AevParams::defaults();
    p.angular_cutoff = 6.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = AevParams::defaults();
    p.radial_shifts.clear();
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Aev, MatchesDirectEvaluationForBothStrategies) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto s = random_cluster(25, 0.06, seed);
        const auto p = AevParams::defaults();
        const auto nb = build_aev_neighbors(s, p);
        const auto ref = reference_aev(s, p);
        for (auto strategy : {AevStrategy::Staged, AevStrategy::Fused}) {
            const auto out = compute_aev(s, nb, p, strategy);
            ASSERT_EQ(out.aev.values.cols(), 1008);
            EXPECT_LT((out.aev.values - ref).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Aev, CustomGridMatchesDirectEvaluation) {
    const auto s = random_cluster(20, 0.05, 8);
    const auto p = AevParams::with_grid(5, 3, 6, 4.0, 4.0);
    const auto out = compute_aev(s, build_aev_neighbors(s, p), p, AevStrategy::Staged);
    EXPECT_LT((out.aev.values - reference_aev(s, p)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Aev, NeighborAtCutoffContributesZero) {
    AtomicSystem s;
    s.species = {Element::C, Element::H};
    s.roles.assign(2, Role::Solute);
    s.positions.resize(2, 3);
    s.positions << 0, 0, 0, 5.1, 0, 0;
    const auto p = AevParams::defaults();
    const auto out = compute_aev(s, build_aev_neighbors(s, p), p, AevStrategy::Fused);
    EXPECT_LT(out.aev.values.cwiseAbs().maxCoeff(), 1e-30);
}

TEST(Aev, InvariantUnderRigidMotionAndPermutesWithAtoms) {
    const auto s = random_cluster(30, 0.08, 4);
    const auto p = AevParams::defaults();
    const auto g = compute_aev(s, build_aev_neighbors(s, p), p, AevStrategy::Fused).aev.values;
    Rng rng(17);
    for (int k = 0; k < 5; ++k) {
        const auto t = transformed(s, testing::random_rotation(rng), Vec3(rng.normal(), rng.normal(), rng.normal()));
        const auto gt = compute_aev(t, build_aev_neighbors(t, p), p, AevStrategy::Fused).aev.values;
        EXPECT_LT((gt - g).cwiseAbs().maxCoeff(), 1e-12);
    }
    std::vector<Index> perm(s.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Index>((i * 7 + 3) % perm.size());
    const auto sp = s.subset(perm);
    const auto gp = compute_aev(sp, build_aev_neighbors(sp, p), p, AevStrategy::Fused).aev.values;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        EXPECT_LT((gp.row(static_cast<Eigen::Index>(i)) - g.row(perm[i])).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Aev, AdjointMatchesFiniteDifferences) {
    const auto s = random_cluster(30, 0.08, 12);
    const auto p = AevParams::defaults();
    Rng rng(3);
    RowMatrixXd w(30, 1008);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-1, 1);
    auto energy = [&](const AtomicSystem& x) {
        return compute_aev(x, build_aev_neighbors(x, p), p, AevStrategy::Fused).aev.values.cwiseProduct(w).sum();
    };
    const auto res = compute_aev(s, build_aev_neighbors(s, p), p, AevStrategy::Staged);
    const Coords3d f = aev_backward(res.tape, w, s.positions);
    EXPECT_LT(testing::rel_max_err(f, testing::fd_forces(s, energy)), 1e-8);
    EXPECT_LT(f.colwise().sum().norm(), 1e-10 * f.cwiseAbs().maxCoeff());
}

TEST(Aev, StaleOrMisshapenTapeIsRejected) {
    const auto s = random_cluster(10, 0.05, 1);
    const auto p = AevParams::defaults();
    const auto res = compute_aev(s, build_aev_neighbors(s, p), p, AevStrategy::Fused);
    Coords3d moved = s.positions;
    moved(3, 1) += 1e-9;
    EXPECT_THROW(aev_backward(res.tape, RowMatrixXd::Zero(10, 1008), moved), StaleTapeError);
    EXPECT_THROW(aev_backward(res.tape, RowMatrixXd::Zero(10, 20), s.positions), ConfigError);
    EXPECT_THROW(aev_backward(AevTape{}, RowMatrixXd::Zero(10, 1008), s.positions), StaleTapeError);
}

TEST(Aev, UnsupportedSpeciesThrows) {
    auto p = AevParams::defaults();
    p.num_species = 4;  // H, C, N, O
    AtomicSystem s;
    s.species = {Element::C, Element::Cl};
    s.roles.assign(2, Role::Solute);
    s.positions.resize(2, 3);
    s.positions << 0, 0, 0, 1.8, 0, 0;
    EXPECT_THROW(compute_aev(s, build_aev_neighbors(s, p), p, AevStrategy::Fused), UnsupportedSpeciesError);
}

TEST(Aev, CountersTallyTermsPerPairAndTriplet) {
    const auto s = random_cluster(40, 0.07, 21);
    const auto p = AevParams::defaults();
    const auto nb = build_aev_neighbors(s, p);
    for (auto strategy : {AevStrategy::Staged, AevStrategy::Fused}) {
        StageCounters c;
        compute_aev(s, nb, p, strategy, &c);
        EXPECT_EQ(c.at("aev_radial").sf_terms, 16u * nb.pairs.size());
        EXPECT_EQ(c.at("aev_angular").sf_terms, 32u * nb.triplets.size());
    }
    StageCounters a, b;
    compute_aev(s, nb, p, AevStrategy::Staged, &a);
    compute_aev(s, nb, p, AevStrategy::Fused, &b);
    EXPECT_EQ(a.at("aev_angular").combined(), b.at("aev_angular").combined());
    EXPECT_GT(a.at("aev_angular").bytes_written, b.at("aev_angular").bytes_written);
}

TEST(Aev, EmptySystem) {
    AtomicSystem s;
    s.positions.resize(0, 3);
    const auto p = AevParams::defaults();
    const auto out = compute_aev(s, build_aev_neighbors(s, p), p, AevStrategy::Fused);
    EXPECT_EQ(out.aev.values.rows(), 0);
}

}  // namespace
}  // namespace mlff
