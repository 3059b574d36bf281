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

#include "mlff/nnp.hpp"

#include "mlff/random.hpp"

#include <cmath>
#include <string>

namespace mlff {

std::vector<int> MlpParams::widths() const {
    std::vector<int> w;
    if (weights.empty()) return w;
    w.push_back(static_cast<int>(weights.front().rows()));
    for (const auto& m : weights) w.push_back(static_cast<int>(m.cols()));
    return w;
}

std::vector<int> default_nnp_widths() { return {1008, 256, 192, 160, 1}; }

void NnpModel::validate() const {
    if (widths.size() < 2 || widths.back() != 1) throw ConfigError("MLP widths must end in 1");
    for (int w : widths)
        if (w < 1) throw ConfigError("MLP widths must be positive");
    if (ensemble_size < 1) throw ConfigError("ensemble size must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("activation alpha must be positive");
    for (const auto& members : networks) {
        if (members.empty()) continue;
        if (static_cast<int>(members.size()) != ensemble_size) throw ConfigError("ensemble size mismatch");
        for (const auto& net : members) {
            if (net.widths() != widths) throw ConfigError("ensemble member widths differ");
            for (std::size_t l = 0; l < net.weights.size(); ++l) {
                if (!net.weights[l].allFinite() || !net.biases[l].allFinite()) {
                    throw ConfigError("MLP parameters must be finite");
                }
                if (net.biases[l].size() != net.weights[l].cols()) throw ConfigError("bias width mismatch");
            }
        }
    }
}

NnpModel init_model(std::uint64_t seed, const std::vector<int>& widths, int ensemble_size) {
    NnpModel model;
    model.widths = widths;
    model.ensemble_size = ensemble_size;
    if (widths.size() < 2 || widths.back() != 1) throw ConfigError("MLP widths must end in 1");
    if (ensemble_size < 1) throw ConfigError("ensemble size must be >= 1");
    for (int e = 0; e < kNumElements; ++e) {
        auto& members = model.networks[static_cast<std::size_t>(e)];
        for (int m = 0; m < ensemble_size; ++m) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(e * 1000 + m)));
            MlpParams net;
            for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
                const int in = widths[l], out = widths[l + 1];
                const double bound = std::sqrt(3.0 / in);
                Eigen::MatrixXd w(in, out);
                for (int r = 0; r < in; ++r)
                    for (int c = 0; c < out; ++c) w(r, c) = rng.uniform(-bound, bound);
                net.weights.push_back(std::move(w));
                net.biases.push_back(Eigen::RowVectorXd::Zero(out));
            }
            members.push_back(std::move(net));
        }
    }
    return model;
}

SpeciesHistogram species_histogram(std::span<const Element> species) {
    SpeciesHistogram h{};
    for (auto e : species) ++h[static_cast<std::size_t>(index_of(e))];
    return h;
}

NnpOpCount count_nnp_ops(const NnpModel& model, const SpeciesHistogram& histogram) {
    std::uint64_t per_atom = 0;
    for (std::size_t l = 0; l + 1 < model.widths.size(); ++l) {
        per_atom += static_cast<std::uint64_t>(model.widths[l]) * static_cast<std::uint64_t>(model.widths[l + 1]);
    }
    std::uint64_t atoms = 0;
    for (auto n : histogram) atoms += n;
    NnpOpCount c;
    c.macs = per_atom * atoms * static_cast<std::uint64_t>(model.ensemble_size);
    c.flops = 2 * c.macs;
    return c;
}

namespace {

void count_layer(OpCounters* c, std::uint64_t rows, std::uint64_t in, std::uint64_t out, bool hidden) {
    if (c == nullptr) return;
    const auto macs = rows * in * out;
    c->macs += macs;
    c->flops_mul += macs;
    c->flops_add += macs + rows * out;  // plus bias
    if (hidden) {
        // softplus: div, exp, log1p, mul
        c->flops_mul += 2 * rows * out;
        c->transcendental_ops += 2 * rows * out;
    }
    c->bytes_read += (rows * in + in * out + out) * sizeof(double);
    c->bytes_written += rows * out * sizeof(double);
}

}  // namespace

NnpResult nnp_energy(const Aev& aev, std::span<const Element> species, const NnpModel& model,
                     OpCounters* counters) {
    const auto n = species.size();
    if (static_cast<std::size_t>(aev.values.rows()) != n) throw ConfigError("descriptor rows do not match atoms");
    if (static_cast<int>(aev.values.cols()) != model.widths.front()) {
        throw ConfigError("descriptor width " + std::to_string(aev.values.cols()) + " does not match model input " +
                          std::to_string(model.widths.front()));
    }
    for (auto e : species) {
        if (!model.supports(e)) {
            throw UnsupportedSpeciesError("no network for element " + std::string(symbol(e)));
        }
    }

    NnpResult res;
    res.atomic_energies = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    res.tape.model = &model;
    res.tape.num_atoms = n;
    const double inv_ens = 1.0 / model.ensemble_size;

    for (int e = 0; e < kNumElements; ++e) {
        NnpTape::Group group;
        group.element = e;
        for (std::size_t i = 0; i < n; ++i)
            if (index_of(species[i]) == e) group.atoms.push_back(static_cast<Index>(i));
        if (group.atoms.empty()) continue;
        const auto rows = static_cast<Eigen::Index>(group.atoms.size());

        RowMatrixXd x(rows, aev.values.cols());
        for (Eigen::Index r = 0; r < rows; ++r) x.row(r) = aev.values.row(group.atoms[static_cast<std::size_t>(r)]);
        if (counters) counters->gather_ops += static_cast<std::uint64_t>(rows);

        Eigen::VectorXd sum = Eigen::VectorXd::Zero(rows);
        for (const auto& net : model.networks[static_cast<std::size_t>(e)]) {
            std::vector<RowMatrixXd> pre;
            RowMatrixXd a = x;
            const auto nl = net.weights.size();
            for (std::size_t l = 0; l < nl; ++l) {
                RowMatrixXd z = a * net.weights[l];
                z.rowwise() += net.biases[l];
                const bool hidden = l + 1 < nl;
                count_layer(counters, static_cast<std::uint64_t>(rows), static_cast<std::uint64_t>(net.weights[l].rows()),
                            static_cast<std::uint64_t>(net.weights[l].cols()), hidden);
                if (hidden) {
                    a = z.unaryExpr([alpha = model.alpha](double v) { return softplus(v, alpha); });
                    pre.push_back(std::move(z));
                } else {
                    sum += z.col(0);
                }
            }
            group.pre_activations.push_back(std::move(pre));
        }
        const double shift = model.energy_shift[static_cast<std::size_t>(e)];
        for (Eigen::Index r = 0; r < rows; ++r) {
            res.atomic_energies[group.atoms[static_cast<std::size_t>(r)]] = sum[r] * inv_ens + shift;
        }
        if (counters) {
            counters->flops_add += static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(model.ensemble_size);
            counters->flops_mul += static_cast<std::uint64_t>(rows);
            counters->scatter_ops += static_cast<std::uint64_t>(rows);
        }
        res.tape.groups.push_back(std::move(group));
    }
    res.energy = res.atomic_energies.sum();
    res.tape.valid = true;
    return res;
}

RowMatrixXd nnp_backward(const NnpTape& tape, const NnpModel& model, OpCounters* counters) {
    if (!tape.valid) throw StaleTapeError("network tape is empty");
    if (tape.model != &model) throw StaleTapeError("network tape was recorded with a different model");
    const auto width = static_cast<Eigen::Index>(model.widths.front());
    RowMatrixXd grad = RowMatrixXd::Zero(static_cast<Eigen::Index>(tape.num_atoms), width);
    const double inv_ens = 1.0 / model.ensemble_size;

    for (const auto& group : tape.groups) {
        const auto rows = static_cast<Eigen::Index>(group.atoms.size());
        const auto& members = model.networks[static_cast<std::size_t>(group.element)];
        RowMatrixXd acc = RowMatrixXd::Zero(rows, width);
        for (std::size_t m = 0; m < members.size(); ++m) {
            const auto& net = members[m];
            const auto& pre = group.pre_activations[m];
            RowMatrixXd delta = RowMatrixXd::Constant(rows, 1, inv_ens);
            for (std::size_t l = net.weights.size(); l-- > 0;) {
                RowMatrixXd up = delta * net.weights[l].transpose();
                if (counters) {
                    const auto macs = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(net.weights[l].size());
                    counters->macs += macs;
                    counters->flops_mul += macs;
                    counters->flops_add += macs;
                    counters->bytes_read += (static_cast<std::uint64_t>(delta.size()) +
                                             static_cast<std::uint64_t>(net.weights[l].size())) * sizeof(double);
                }
                if (l == 0) {
                    acc += up;
                    break;
                }
                const auto& z = pre[l - 1];
                delta = up.cwiseProduct(z.unaryExpr([alpha = model.alpha](double v) {
                    return softplus_derivative(v, alpha);
                }));
                if (counters) {
                    counters->flops_mul += 2 * static_cast<std::uint64_t>(z.size());
                    counters->flops_add += static_cast<std::uint64_t>(z.size());
                    counters->transcendental_ops += static_cast<std::uint64_t>(z.size());
                    counters->bytes_read += static_cast<std::uint64_t>(z.size()) * sizeof(double);
                }
            }
        }
        for (Eigen::Index r = 0; r < rows; ++r) grad.row(group.atoms[static_cast<std::size_t>(r)]) = acc.row(r);
        if (counters) {
            counters->scatter_ops += static_cast<std::uint64_t>(rows);
            counters->bytes_written += static_cast<std::uint64_t>(acc.size()) * sizeof(double);
        }
    }
    return grad;
}

}  // namespace mlff
