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

#include "mlff/aev.hpp"
#include "mlff/common.hpp"
#include "mlff/counters.hpp"
#include "mlff/element.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace mlff {

/// alpha * log(1 + exp(x / alpha)), overflow-safe.
template <typename Scalar>
Scalar softplus(Scalar x, Scalar alpha) {
    const Scalar t = x / alpha;
    if (t > Scalar(30)) return x + alpha * std::log1p(std::exp(-t));
    return alpha * std::log1p(std::exp(t));
}

/// d/dx softplus = logistic(x / alpha).
template <typename Scalar>
Scalar softplus_derivative(Scalar x, Scalar alpha) {
    const Scalar t = x / alpha;
    if (t >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-t));
    const Scalar e = std::exp(t);
    return e / (Scalar(1) + e);
}

/// One feed-forward network: a_{l+1} = act(a_l W_l + b_l), no activation on the
/// final layer. W_l is (in x out).
struct MlpParams {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::RowVectorXd> biases;

    std::vector<int> widths() const;
};

/// Per-element ensembles of MLPs mapping a descriptor row to an atomic energy.
struct NnpModel {
    std::vector<int> widths;
    int ensemble_size = 1;
    double alpha = 0.1;  // softplus sharpness
    std::array<std::vector<MlpParams>, kNumElements> networks;  // empty: element unsupported
    std::array<double, kNumElements> energy_shift{};             // kcal/mol

    bool supports(Element e) const noexcept { return !networks[static_cast<std::size_t>(index_of(e))].empty(); }
    void validate() const;
};

std::vector<int> default_nnp_widths();

/// Fan-in scaled uniform weights, zero biases. Same seed, same model, bit for bit.
NnpModel init_model(std::uint64_t seed, const std::vector<int>& widths = default_nnp_widths(),
                    int ensemble_size = 1);

struct NnpTape {
    const NnpModel* model = nullptr;
    std::size_t num_atoms = 0;
    struct Group {
        int element = 0;
        std::vector<Index> atoms;
        std::vector<std::vector<RowMatrixXd>> pre_activations;  // [member][hidden layer]
    };
    std::vector<Group> groups;
    bool valid = false;
};

struct NnpResult {
    double energy = 0.0;
    Eigen::VectorXd atomic_energies;  // ensemble mean plus element shift
    NnpTape tape;
};

/// Routes each descriptor row to its element's ensemble. The model must outlive
/// the returned tape.
NnpResult nnp_energy(const Aev& aev, std::span<const Element> species, const NnpModel& model,
                     OpCounters* counters = nullptr);

/// dE/dG (N x width) by reverse accumulation through every layer.
RowMatrixXd nnp_backward(const NnpTape& tape, const NnpModel& model, OpCounters* counters = nullptr);

struct NnpOpCount {
    std::uint64_t macs = 0;   // multiply-accumulates in the layer products
    std::uint64_t flops = 0;  // 2 * macs (multiply and add counted separately)
};

using SpeciesHistogram = std::array<std::size_t, kNumElements>;

SpeciesHistogram species_histogram(std::span<const Element> species);

/// Forward-pass layer-product cost: sum over atoms and layers of in * out,
/// times the ensemble size.
NnpOpCount count_nnp_ops(const NnpModel& model, const SpeciesHistogram& histogram);

}  // namespace mlff
