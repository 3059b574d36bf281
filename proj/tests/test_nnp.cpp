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

#include "mlff/model_io.hpp"
#include "mlff/nnp.hpp"
#include "mlff/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace mlff {
namespace {

RowMatrixXd random_rows(Index n, int width, std::uint64_t seed) {
    Rng rng(seed);
    RowMatrixXd g(n, width);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.uniform(0.0, 2.0);
    return g;
}

// Plain per-atom loop, written without the batched grouping.
double reference_atom_energy(const NnpModel& m, Element e, const Eigen::RowVectorXd& g) {
    const auto& members = m.networks[static_cast<std::size_t>(index_of(e))];
    double sum = 0.0;
    for (const auto& net : members) {
        std::vector<double> a(g.data(), g.data() + g.size());
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            const auto& w = net.weights[l];
            std::vector<double> next(static_cast<std::size_t>(w.cols()));
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                double z = net.biases[l](c);
                for (Eigen::Index r = 0; r < w.rows(); ++r) z += a[static_cast<std::size_t>(r)] * w(r, c);
                next[static_cast<std::size_t>(c)] = l + 1 < net.weights.size() ? m.alpha * std::log(1.0 + std::exp(z / m.alpha)) : z;
            }
            a = std::move(next);
        }
        sum += a[0];
    }
    return sum / static_cast<double>(members.size()) + m.energy_shift[static_cast<std::size_t>(index_of(e))];
}

TEST(Softplus, ValuesAndSlope) {
    EXPECT_DOUBLE_EQ(softplus(0.0, 0.1), 0.1 * std::log(2.0));
    EXPECT_DOUBLE_EQ(softplus(100.0, 0.1), 100.0);
    EXPECT_GT(softplus(-5.0, 0.1), 0.0);
    EXPECT_GE(softplus(-100.0, 0.1), 0.0);
    EXPECT_DOUBLE_EQ(softplus_derivative(0.0, 0.1), 0.5);
    const double h = 1e-6;
    for (double x : {-0.3, -0.05, 0.0, 0.02, 0.4}) {
        const double fd = (softplus(x + h, 0.1) - softplus(x - h, 0.1)) / (2 * h);
        EXPECT_NEAR(softplus_derivative(x, 0.1), fd, 1e-7);
    }
}

TEST(Nnp, DefaultWidthsCost676160PerAtom) {
    const auto w = default_nnp_widths();
    ASSERT_EQ(w.front(), 1008);
    ASSERT_EQ(w.back(), 1);
    std::uint64_t macs = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) macs += static_cast<std::uint64_t>(w[l]) * w[l + 1];
    EXPECT_EQ(2 * macs, 676160u);
    const auto model = init_model(1, w, 1);
    SpeciesHistogram h{};
    h[0] = 1;
    EXPECT_EQ(count_nnp_ops(model, h).flops, 676160u);
    h[1] = 4;
    const auto eight = init_model(1, {1008, 256, 192, 160, 1}, 8);
    EXPECT_EQ(count_nnp_ops(eight, h).flops, 5u * 8u * 676160u);
}

TEST(Nnp, ForwardMatchesPerAtomLoop) {
    auto model = init_model(5, {12, 7, 5, 1}, 3);
    model.energy_shift[1] = -2.5;
    const std::vector<Element> species{Element::H, Element::C, Element::C, Element::O, Element::N, Element::H};
    Aev aev{random_rows(6, 12, 9), AevParams::defaults()};
    const auto res = nnp_energy(aev, species, model);
    double total = 0.0;
    for (std::size_t i = 0; i < species.size(); ++i) {
        const double ref = reference_atom_energy(model, species[i], aev.values.row(static_cast<Eigen::Index>(i)));
        EXPECT_NEAR(res.atomic_energies(static_cast<Eigen::Index>(i)), ref, 1e-12);
        total += ref;
    }
    EXPECT_NEAR(res.energy, total, 1e-11);
}

TEST(Nnp, IdenticalMembersEqualOneMember) {
    const auto one = init_model(3, {10, 6, 1}, 1);
    auto two = one;
    two.ensemble_size = 2;
    for (auto& members : two.networks) members.push_back(members.front());
    const std::vector<Element> species{Element::C, Element::H, Element::S};
    Aev aev{random_rows(3, 10, 4), AevParams::defaults()};
    EXPECT_NEAR(nnp_energy(aev, species, one).energy, nnp_energy(aev, species, two).energy, 1e-13);
}

TEST(Nnp, BackwardMatchesFiniteDifferences) {
    const auto model = init_model(11, {14, 9, 6, 1}, 2);
    const std::vector<Element> species{Element::H, Element::C, Element::N, Element::O, Element::C};
    Aev aev{random_rows(5, 14, 2), AevParams::defaults()};
    const auto res = nnp_energy(aev, species, model);
    const RowMatrixXd grad = nnp_backward(res.tape, model);
    const double h = 1e-5;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < grad.rows(); ++i)
        for (Eigen::Index j = 0; j < grad.cols(); ++j) {
            Aev p = aev, m = aev;
            p.values(i, j) += h;
            m.values(i, j) -= h;
            const double fd = (nnp_energy(p, species, model).energy - nnp_energy(m, species, model).energy) / (2 * h);
            worst = std::max(worst, std::abs(fd - grad(i, j)));
        }
    EXPECT_LT(worst, 1e-8);
}

TEST(Nnp, CountersMatchClosedForm) {
    const auto model = init_model(2, {8, 4, 1}, 3);
    const std::vector<Element> species(7, Element::O);
    Aev aev{random_rows(7, 8, 1), AevParams::defaults()};
    OpCounters c;
    nnp_energy(aev, species, model, &c);
    EXPECT_EQ(c.macs, count_nnp_ops(model, species_histogram(species)).macs);
    EXPECT_EQ(c.macs, 7u * 3u * (8u * 4u + 4u));
}

TEST(Nnp, RejectsUnsupportedSpeciesAndWrongWidth) {
    auto model = init_model(1, {6, 3, 1}, 1);
    model.networks[static_cast<std::size_t>(index_of(Element::Cl))].clear();
    EXPECT_FALSE(model.supports(Element::Cl));
    const std::vector<Element> species{Element::C, Element::Cl};
    EXPECT_THROW(nnp_energy(Aev{random_rows(2, 6, 1), {}}, species, model), UnsupportedSpeciesError);
    const std::vector<Element> ok{Element::C, Element::H};
    EXPECT_THROW(nnp_energy(Aev{random_rows(2, 7, 1), {}}, ok, model), ConfigError);
    EXPECT_THROW(nnp_energy(Aev{random_rows(3, 6, 1), {}}, ok, model), ConfigError);
}

TEST(Nnp, TapeFromAnotherModelIsRejected) {
    const auto a = init_model(1, {6, 3, 1}, 1);
    const auto b = init_model(2, {6, 3, 1}, 1);
    const std::vector<Element> species{Element::C};
    const auto res = nnp_energy(Aev{random_rows(1, 6, 1), {}}, species, a);
    EXPECT_THROW(nnp_backward(res.tape, b), StaleTapeError);
    EXPECT_THROW(nnp_backward(NnpTape{}, a), StaleTapeError);
}

TEST(Nnp, InitIsDeterministicAndValidates) {
    const auto a = init_model(42, {6, 3, 1}, 2);
    const auto b = init_model(42, {6, 3, 1}, 2);
    const auto c = init_model(43, {6, 3, 1}, 2);
    EXPECT_EQ(a.networks[0][1].weights[0], b.networks[0][1].weights[0]);
    EXPECT_NE(a.networks[0][1].weights[0], c.networks[0][1].weights[0]);
    EXPECT_NE(a.networks[0][0].weights[0], a.networks[0][1].weights[0]);
    EXPECT_NO_THROW(a.validate());
    EXPECT_THROW(init_model(1, {6, 3, 2}, 1), ConfigError);
    EXPECT_THROW(init_model(1, {6, 1}, 0), ConfigError);
}

TEST(ModelIo, NnpRoundTripIsBitExact) {
    auto model = init_model(9, {10, 5, 1}, 2);
    model.energy_shift[2] = 1.0 / 3.0;
    model.networks[static_cast<std::size_t>(index_of(Element::F))].clear();
    std::stringstream buf;
    save_model(buf, model);
    EXPECT_EQ(peek_model_kind(buf), ModelKind::ElementMlp);
    buf.seekg(0);
    const auto back = load_nnp_model(buf);
    EXPECT_EQ(back.widths, model.widths);
    EXPECT_EQ(back.ensemble_size, 2);
    EXPECT_EQ(back.alpha, model.alpha);
    EXPECT_EQ(back.energy_shift, model.energy_shift);
    EXPECT_FALSE(back.supports(Element::F));
    for (std::size_t e = 0; e < model.networks.size(); ++e) {
        ASSERT_EQ(back.networks[e].size(), model.networks[e].size());
        for (std::size_t m = 0; m < model.networks[e].size(); ++m)
            for (std::size_t l = 0; l < 2; ++l) {
                EXPECT_EQ(back.networks[e][m].weights[l], model.networks[e][m].weights[l]);
                EXPECT_EQ(back.networks[e][m].biases[l], model.networks[e][m].biases[l]);
            }
    }
}

TEST(ModelIo, RejectsBadFiles) {
    std::stringstream junk("definitely not a model");
    EXPECT_THROW(load_nnp_model(junk), Error);
    const auto model = init_model(9, {10, 5, 1}, 1);
    std::stringstream buf;
    save_model(buf, model);
    const std::string bytes = buf.str();
    std::stringstream cut(bytes.substr(0, bytes.size() / 2));
    EXPECT_THROW(load_nnp_model(cut), Error);
    std::stringstream whole(bytes);
    EXPECT_THROW(load_et_model(whole), Error);
    EXPECT_THROW(load_nnp_model(std::filesystem::path("/nonexistent/model.bin")), Error);
}

}  // namespace
}  // namespace mlff
