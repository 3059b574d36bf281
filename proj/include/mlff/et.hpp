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
#include "mlff/element.hpp"
#include "mlff/neighbors.hpp"
#include "mlff/system.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace mlff {

template <typename Scalar>
Scalar silu(Scalar x) {
    return x / (Scalar(1) + std::exp(-x));
}

template <typename Scalar>
Scalar silu_derivative(Scalar x) {
    const Scalar s = Scalar(1) / (Scalar(1) + std::exp(-x));
    return s * (Scalar(1) + x * (Scalar(1) - s));
}

struct EtConfig {
    int channels = 64;  // C
    int heads = 4;      // H
    int layers = 2;     // L
    int rbf_count = 32;
    double cutoff = 5.0;  // A

    int head_dim() const noexcept { return channels / heads; }
    void validate() const;
};

/// Projections of one attention layer. Channel maps are (C x C), applied as
/// row-vector times matrix; the RBF projection is (rbf_count x C).
struct EtLayerParams {
    Eigen::MatrixXd query, key, value, vector_message, vector_mix, rbf_projection;
};

struct EtParams {
    EtConfig config;
    Eigen::MatrixXd embedding;  // kNumElements x C
    std::vector<EtLayerParams> layers;
    Eigen::MatrixXd readout_hidden;  // 2C x C
    Eigen::RowVectorXd readout_bias;  // C
    Eigen::VectorXd readout_out;      // C
    double readout_out_bias = 0.0;
    Eigen::VectorXd rbf_centers;  // evenly spaced on [0, cutoff]
    double rbf_beta = 0.0;        // Gaussian width parameter, A^-2

    void validate() const;
};

EtParams init_et(std::uint64_t seed, const EtConfig& config = {});

/// Scalar features h (N x C) and vector features v, one N x C block per
/// Cartesian component.
struct EtState {
    RowMatrixXd h;
    std::array<RowMatrixXd, 3> v;
};

/// Directed edges (center i, neighbor j) within the model cutoff.
struct EdgeEncoding {
    std::vector<Index> center, neighbor;
    Eigen::VectorXd r, fc, dfc;
    Coords3d unit;      // (r_j - r_i) / r_ij
    RowMatrixXd phi;    // E x rbf_count, cutoff-enveloped Gaussians
    RowMatrixXd dphi;   // d phi / d r

    std::size_t size() const noexcept { return center.size(); }
};

EtState embed(std::span<const Element> species, const EtParams& params);

/// Throws SingularityError for coincident atoms.
EdgeEncoding encode_edges(const Coords3d& positions, const PairList& pairs, const EtParams& params,
                          OpCounters* counters = nullptr);

/// Values one layer's backward pass needs.
struct EtLayerTape {
    EtState input;
    RowMatrixXd query, key, value, message;  // node projections, N x C
    std::array<RowMatrixXd, 3> mixed;        // v W_mix per component, N x C
    RowMatrixXd gate;                        // E x C, RBF projection per edge
    RowMatrixXd score;                       // E x H, pre-activation attention
};

/// One attention layer with residual update. Edge work (attention and message
/// passing) is counted into `edge_counters`, node projections into
/// `node_counters`.
EtState et_layer(const EtState& state, const EdgeEncoding& edges, const EtLayerParams& layer, const EtConfig& config,
                 EtLayerTape* tape = nullptr, OpCounters* edge_counters = nullptr,
                 OpCounters* node_counters = nullptr);

struct EtTape {
    const EtParams* params = nullptr;
    Coords3d positions;
    EdgeEncoding edges;
    std::vector<EtLayerTape> layers;
    EtState final_state;
    RowMatrixXd vector_norm;    // N x C
    RowMatrixXd readout_pre;    // N x C
    bool valid = false;
};

struct EtResult {
    double energy = 0.0;
    Eigen::VectorXd atomic_energies;
    EtTape tape;
};

/// Counters go to "et_edges", "et_layer" (edge work, all layers), "et_node"
/// and "et_readout".
EtResult et_energy(const AtomicSystem& system, const PairList& pairs, const EtParams& params,
                   StageCounters* counters = nullptr);

/// -dE/dr through readout, every layer, the edge encoding and the distances.
/// Counters go to "et_backward".
Coords3d et_forces(const EtTape& tape, const EtParams& params, const Coords3d& positions,
                   StageCounters* counters = nullptr);

}  // namespace mlff
