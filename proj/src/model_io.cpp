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

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

// Payloads after the common header:
//
// Element MLP ensemble:
//   u32 layer-width count, u32 widths[...], u32 ensemble size, f64 alpha,
//   u32 element mask (bit e set = element e has networks), f64 shifts[7],
//   then for each present element, member and layer: W (in x out), b (out).
//
// Equivariant transformer:
//   u32 channels, heads, layers, rbf_count; f64 cutoff, rbf_beta;
//   f64 rbf_centers[rbf_count]; embedding (7 x C);
//   per layer: query, key, value, vector_message, vector_mix (C x C),
//              rbf_projection (rbf_count x C);
//   readout_hidden (2C x C), readout_bias (C), readout_out (C), f64 out bias.

static_assert(std::endian::native == std::endian::little, "model I/O assumes a little-endian host");

namespace mlff {

namespace {

constexpr char kMagic[8] = {'M', 'L', 'F', 'F', 'M', 'D', 'L', '\0'};
constexpr std::uint32_t kMaxDim = 1u << 20;

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("model file is truncated");
    return v;
}

std::uint32_t get_dim(std::istream& in) {
    const auto v = get<std::uint32_t>(in);
    if (v > kMaxDim) throw Error("model file has an implausible dimension");
    return v;
}

template <typename Derived>
void put_matrix(std::ostream& out, const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

template <typename Derived>
void get_matrix(std::istream& in, Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get<double>(in);
}

void put_header(std::ostream& out, ModelKind kind) {
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kModelFormatVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(kind));
}

ModelKind read_header(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw Error("not a model file");
    const auto version = get<std::uint32_t>(in);
    if (version != kModelFormatVersion) throw Error("unsupported model format version " + std::to_string(version));
    const auto tag = get<std::uint32_t>(in);
    if (tag != 1 && tag != 2) throw Error("unknown model type tag " + std::to_string(tag));
    return static_cast<ModelKind>(tag);
}

void expect(std::istream& in, ModelKind want) {
    if (read_header(in) != want) throw Error("model file holds a different model type");
}

void check_written(const std::ostream& out) {
    if (!out) throw Error("failed writing model");
}

}  // namespace

void save_model(std::ostream& out, const NnpModel& model) {
    model.validate();
    put_header(out, ModelKind::ElementMlp);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.widths.size()));
    for (int w : model.widths) put<std::uint32_t>(out, static_cast<std::uint32_t>(w));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.ensemble_size));
    put<double>(out, model.alpha);
    std::uint32_t mask = 0;
    for (int e = 0; e < kNumElements; ++e)
        if (!model.networks[static_cast<std::size_t>(e)].empty()) mask |= 1u << e;
    put<std::uint32_t>(out, mask);
    for (double s : model.energy_shift) put<double>(out, s);
    for (const auto& members : model.networks) {
        for (const auto& net : members) {
            for (std::size_t l = 0; l < net.weights.size(); ++l) {
                put_matrix(out, net.weights[l]);
                put_matrix(out, net.biases[l]);
            }
        }
    }
    check_written(out);
}

NnpModel load_nnp_model(std::istream& in) {
    expect(in, ModelKind::ElementMlp);
    NnpModel model;
    const auto nw = get_dim(in);
    for (std::uint32_t k = 0; k < nw; ++k) model.widths.push_back(static_cast<int>(get_dim(in)));
    model.ensemble_size = static_cast<int>(get_dim(in));
    model.alpha = get<double>(in);
    const auto mask = get<std::uint32_t>(in);
    for (auto& s : model.energy_shift) s = get<double>(in);
    if (model.widths.size() < 2) throw Error("model file has too few layers");
    for (int e = 0; e < kNumElements; ++e) {
        if ((mask & (1u << e)) == 0) continue;
        auto& members = model.networks[static_cast<std::size_t>(e)];
        for (int m = 0; m < model.ensemble_size; ++m) {
            MlpParams net;
            for (std::size_t l = 0; l + 1 < model.widths.size(); ++l) {
                Eigen::MatrixXd w(model.widths[l], model.widths[l + 1]);
                Eigen::RowVectorXd b(model.widths[l + 1]);
                get_matrix(in, w);
                get_matrix(in, b);
                net.weights.push_back(std::move(w));
                net.biases.push_back(std::move(b));
            }
            members.push_back(std::move(net));
        }
    }
    try {
        model.validate();
    } catch (const ConfigError& e) {
        throw Error(std::string("invalid model file: ") + e.what());
    }
    return model;
}

void save_model(std::ostream& out, const EtParams& params) {
    params.validate();
    const auto& cfg = params.config;
    put_header(out, ModelKind::EquivariantTransformer);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.channels));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.heads));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.layers));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.rbf_count));
    put<double>(out, cfg.cutoff);
    put<double>(out, params.rbf_beta);
    put_matrix(out, params.rbf_centers);
    put_matrix(out, params.embedding);
    for (const auto& l : params.layers) {
        put_matrix(out, l.query);
        put_matrix(out, l.key);
        put_matrix(out, l.value);
        put_matrix(out, l.vector_message);
        put_matrix(out, l.vector_mix);
        put_matrix(out, l.rbf_projection);
    }
    put_matrix(out, params.readout_hidden);
    put_matrix(out, params.readout_bias);
    put_matrix(out, params.readout_out);
    put<double>(out, params.readout_out_bias);
    check_written(out);
}

EtParams load_et_model(std::istream& in) {
    expect(in, ModelKind::EquivariantTransformer);
    EtParams p;
    auto& cfg = p.config;
    cfg.channels = static_cast<int>(get_dim(in));
    cfg.heads = static_cast<int>(get_dim(in));
    cfg.layers = static_cast<int>(get_dim(in));
    cfg.rbf_count = static_cast<int>(get_dim(in));
    cfg.cutoff = get<double>(in);
    p.rbf_beta = get<double>(in);
    const int c = cfg.channels;
    const int k = cfg.rbf_count;
    p.rbf_centers.resize(k);
    get_matrix(in, p.rbf_centers);
    p.embedding.resize(kNumElements, c);
    get_matrix(in, p.embedding);
    for (int i = 0; i < cfg.layers; ++i) {
        EtLayerParams l;
        for (auto* m : {&l.query, &l.key, &l.value, &l.vector_message, &l.vector_mix}) {
            m->resize(c, c);
            get_matrix(in, *m);
        }
        l.rbf_projection.resize(k, c);
        get_matrix(in, l.rbf_projection);
        p.layers.push_back(std::move(l));
    }
    p.readout_hidden.resize(2 * c, c);
    get_matrix(in, p.readout_hidden);
    p.readout_bias.resize(c);
    get_matrix(in, p.readout_bias);
    p.readout_out.resize(c);
    get_matrix(in, p.readout_out);
    p.readout_out_bias = get<double>(in);
    try {
        p.validate();
    } catch (const ConfigError& e) {
        throw Error(std::string("invalid model file: ") + e.what());
    }
    return p;
}

ModelKind peek_model_kind(std::istream& in) { return read_header(in); }

void save_model(const std::filesystem::path& path, const NnpModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    save_model(out, model);
}

void save_model(const std::filesystem::path& path, const EtParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    save_model(out, params);
}

NnpModel load_nnp_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return load_nnp_model(in);
}

EtParams load_et_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return load_et_model(in);
}

}  // namespace mlff
