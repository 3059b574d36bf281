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

#include "mlff/et.hpp"

#include "mlff/aev.hpp"
#include "mlff/random.hpp"

#include <cmath>
#include <string>

namespace mlff {

namespace {

// Keeps the per-channel vector norm differentiable where v vanishes.
constexpr double kNormFloor2 = 1e-24;

Eigen::MatrixXd uniform_matrix(Rng& rng, int rows, int cols, double bound) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
    return m;
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

void EtConfig::validate() const {
    if (channels < 1 || heads < 1) throw ConfigError("channels and heads must be positive");
    if (channels % heads != 0) throw ConfigError("channels must be divisible by heads");
    if (layers < 0) throw ConfigError("layer count must be non-negative");
    if (rbf_count < 1) throw ConfigError("rbf_count must be positive");
    if (!(cutoff > 0.0)) throw ConfigError("cutoff must be positive");
}

void EtParams::validate() const {
    config.validate();
    const int c = config.channels;
    if (embedding.rows() != kNumElements || embedding.cols() != c) throw ConfigError("embedding shape");
    if (static_cast<int>(layers.size()) != config.layers) throw ConfigError("layer count mismatch");
    for (const auto& l : layers) {
        for (const auto* m : {&l.query, &l.key, &l.value, &l.vector_message, &l.vector_mix}) {
            if (m->rows() != c || m->cols() != c || !all_finite(*m)) throw ConfigError("layer projection shape");
        }
        if (l.rbf_projection.rows() != config.rbf_count || l.rbf_projection.cols() != c ||
            !all_finite(l.rbf_projection)) {
            throw ConfigError("rbf projection shape");
        }
    }
    if (readout_hidden.rows() != 2 * c || readout_hidden.cols() != c || readout_bias.size() != c ||
        readout_out.size() != c) {
        throw ConfigError("readout shape");
    }
    if (!all_finite(embedding) || !all_finite(readout_hidden) || !readout_bias.allFinite() ||
        !readout_out.allFinite() || !std::isfinite(readout_out_bias)) {
        throw ConfigError("parameters must be finite");
    }
    if (rbf_centers.size() != config.rbf_count || !rbf_centers.allFinite()) throw ConfigError("rbf centers");
    if (rbf_centers.minCoeff() < 0.0 || rbf_centers.maxCoeff() > config.cutoff) {
        throw ConfigError("rbf centers must lie in [0, cutoff]");
    }
    if (!(rbf_beta > 0.0)) throw ConfigError("rbf width must be positive");
}

EtParams init_et(std::uint64_t seed, const EtConfig& config) {
    config.validate();
    const int c = config.channels;
    const int k = config.rbf_count;
    EtParams p;
    p.config = config;
    Rng rng(derive_seed(seed, 7001));
    p.embedding = uniform_matrix(rng, kNumElements, c, 1.0);
    const double bc = std::sqrt(3.0 / c);
    for (int l = 0; l < config.layers; ++l) {
        Rng lr(derive_seed(seed, 7100 + static_cast<std::uint64_t>(l)));
        EtLayerParams layer;
        layer.query = uniform_matrix(lr, c, c, bc);
        layer.key = uniform_matrix(lr, c, c, bc);
        layer.value = uniform_matrix(lr, c, c, bc);
        layer.vector_message = uniform_matrix(lr, c, c, bc);
        layer.vector_mix = uniform_matrix(lr, c, c, bc);
        layer.rbf_projection = uniform_matrix(lr, k, c, std::sqrt(3.0 / k));
        p.layers.push_back(std::move(layer));
    }
    Rng rr(derive_seed(seed, 7900));
    p.readout_hidden = uniform_matrix(rr, 2 * c, c, std::sqrt(3.0 / (2 * c)));
    p.readout_bias = Eigen::RowVectorXd::Zero(c);
    p.readout_out = uniform_matrix(rr, c, 1, bc).col(0);
    p.readout_out_bias = 0.0;
    p.rbf_centers = Eigen::VectorXd::LinSpaced(k, 0.0, config.cutoff);
    const double spacing = k > 1 ? config.cutoff / (k - 1) : config.cutoff;
    p.rbf_beta = 0.5 / (spacing * spacing);
    return p;
}

EtState embed(std::span<const Element> species, const EtParams& params) {
    const auto n = static_cast<Eigen::Index>(species.size());
    const int c = params.config.channels;
    EtState s;
    s.h.resize(n, c);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int e = index_of(species[static_cast<std::size_t>(i)]);
        if (e < 0 || e >= params.embedding.rows()) {
            throw UnsupportedSpeciesError("no embedding for element " + std::string(symbol(species[static_cast<std::size_t>(i)])));
        }
        s.h.row(i) = params.embedding.row(e);
    }
    for (auto& vd : s.v) vd = RowMatrixXd::Zero(n, c);
    return s;
}

EdgeEncoding encode_edges(const Coords3d& positions, const PairList& pairs, const EtParams& params,
                          OpCounters* counters) {
    const double rc = params.config.cutoff;
    const int k = params.config.rbf_count;
    if (pairs.cutoff < rc) throw ConfigError("pair list cutoff is shorter than the model cutoff");
    if (pairs.num_atoms() != static_cast<std::size_t>(positions.rows())) {
        throw ConfigError("pair list does not match the coordinates");
    }
    EdgeEncoding e;
    for (const auto& p : pairs.pairs) {
        if (p.r > rc) continue;
        if (p.r < kMinSeparation) {
            throw SingularityError("coincident atoms " + std::to_string(p.i) + " and " + std::to_string(p.j));
        }
        e.center.push_back(p.i);
        e.neighbor.push_back(p.j);
    }
    const auto m = static_cast<Eigen::Index>(e.center.size());
    e.r.resize(m);
    e.fc.resize(m);
    e.dfc.resize(m);
    e.unit.resize(m, 3);
    e.phi.resize(m, k);
    e.dphi.resize(m, k);
    for (Eigen::Index q = 0; q < m; ++q) {
        const Vec3 d = positions.row(e.neighbor[static_cast<std::size_t>(q)]).transpose() -
                       positions.row(e.center[static_cast<std::size_t>(q)]).transpose();
        const double r = d.norm();
        e.r[q] = r;
        e.unit.row(q) = (d / r).transpose();
        const double fc = cutoff_fn(r, rc);
        const double dfc = cutoff_fn_derivative(r, rc);
        e.fc[q] = fc;
        e.dfc[q] = dfc;
        for (int b = 0; b < k; ++b) {
            const double x = r - params.rbf_centers[b];
            const double g = std::exp(-params.rbf_beta * x * x);
            e.phi(q, b) = g * fc;
            e.dphi(q, b) = g * (dfc - 2.0 * params.rbf_beta * x * fc);
        }
    }
    const auto edges = static_cast<std::uint64_t>(m);
    tally(counters, OpCost{5, 7, 3}, edges);  // displacement, norm, unit, cutoff and its slope
    tally(counters, OpCost{3, 9, 1}, edges * static_cast<std::uint64_t>(k));
    if (counters) {
        counters->gather_ops += 2 * edges;
        counters->bytes_read += edges * 6 * sizeof(double);
        counters->bytes_written += edges * (6 + 2 * static_cast<std::uint64_t>(k)) * sizeof(double);
    }
    return e;
}

EtState et_layer(const EtState& state, const EdgeEncoding& edges, const EtLayerParams& layer, const EtConfig& config,
                 EtLayerTape* tape, OpCounters* edge_counters, OpCounters* node_counters) {
    const int c = config.channels;
    const int nh = config.heads;
    const int hd = config.head_dim();
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
    const auto n = state.h.rows();
    const auto m = static_cast<Eigen::Index>(edges.size());

    RowMatrixXd q = state.h * layer.query;
    RowMatrixXd kk = state.h * layer.key;
    RowMatrixXd val = state.h * layer.value;
    RowMatrixXd msg = state.h * layer.vector_message;
    std::array<RowMatrixXd, 3> mixed;
    for (int d = 0; d < 3; ++d) mixed[static_cast<std::size_t>(d)] = state.v[static_cast<std::size_t>(d)] * layer.vector_mix;
    RowMatrixXd gate = edges.phi * layer.rbf_projection;
    if (node_counters) {
        const auto macs = 7 * static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(c);
        node_counters->macs += macs;
        node_counters->flops_mul += macs;
        node_counters->flops_add += macs;
        node_counters->bytes_read += (7 * static_cast<std::uint64_t>(n * c) + 7 * static_cast<std::uint64_t>(c * c)) * sizeof(double);
        node_counters->bytes_written += 7 * static_cast<std::uint64_t>(n * c) * sizeof(double);
    }

    EtState out = state;
    RowMatrixXd score(m, nh);
    for (Eigen::Index e = 0; e < m; ++e) {
        const auto i = edges.center[static_cast<std::size_t>(e)];
        const auto j = edges.neighbor[static_cast<std::size_t>(e)];
        const double fc = edges.fc[e];
        const Vec3 u = edges.unit.row(e).transpose();
        for (int a = 0; a < nh; ++a) {
            double s = 0.0;
            for (int ch = a * hd; ch < (a + 1) * hd; ++ch) s += q(i, ch) * kk(j, ch) * gate(e, ch);
            s *= inv_sqrt;
            score(e, a) = s;
            const double alpha = silu(s) * fc;
            for (int ch = a * hd; ch < (a + 1) * hd; ++ch) {
                out.h(i, ch) += alpha * val(j, ch);
                for (int d = 0; d < 3; ++d) {
                    out.v[static_cast<std::size_t>(d)](i, ch) +=
                        alpha * (mixed[static_cast<std::size_t>(d)](j, ch) + u[d] * msg(j, ch));
                }
            }
        }
    }
    if (edge_counters) {
        const auto ue = static_cast<std::uint64_t>(m);
        const auto uc = static_cast<std::uint64_t>(c);
        const auto gate_macs = ue * static_cast<std::uint64_t>(edges.phi.cols()) * uc;
        edge_counters->macs += gate_macs;
        edge_counters->flops_mul += gate_macs;
        edge_counters->flops_add += gate_macs;
        // Per channel: score product (2 mul, 1 add), scalar message (1 mul, 1 add),
        // vector message (3 x (2 mul, 2 add)).
        tally(edge_counters, OpCost{8, 9, 0}, ue * uc);
        // Per head: scale, silu (add, div, mul), envelope.
        tally(edge_counters, OpCost{1, 4, 1}, ue * static_cast<std::uint64_t>(nh));
        edge_counters->gather_ops += ue * 6;
        edge_counters->scatter_ops += ue * 4;
        edge_counters->bytes_read += ue * (7 * uc + 4) * sizeof(double);
        edge_counters->bytes_written += ue * 4 * uc * sizeof(double);
    }

    if (tape) {
        tape->input = state;
        tape->query = std::move(q);
        tape->key = std::move(kk);
        tape->value = std::move(val);
        tape->message = std::move(msg);
        tape->mixed = std::move(mixed);
        tape->gate = std::move(gate);
        tape->score = std::move(score);
    }
    return out;
}

EtResult et_energy(const AtomicSystem& system, const PairList& pairs, const EtParams& params, StageCounters* counters) {
    params.validate();
    const int c = params.config.channels;
    const auto n = static_cast<Eigen::Index>(system.size());
    auto stage = [&](const char* name) -> OpCounters* { return counters ? &(*counters)[name] : nullptr; };

    EtResult res;
    res.tape.params = &params;
    res.tape.positions = system.positions;
    res.tape.edges = encode_edges(system.positions, pairs, params, stage("et_edges"));
    EtState state = embed(system.species, params);
    for (const auto& layer : params.layers) {
        EtLayerTape lt;
        state = et_layer(state, res.tape.edges, layer, params.config, &lt, stage("et_layer"), stage("et_node"));
        res.tape.layers.push_back(std::move(lt));
    }

    RowMatrixXd x(n, 2 * c);
    RowMatrixXd norm(n, c);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int ch = 0; ch < c; ++ch) {
            double s2 = kNormFloor2;
            for (const auto& vd : state.v) s2 += vd(i, ch) * vd(i, ch);
            norm(i, ch) = std::sqrt(s2);
        }
    }
    x.leftCols(c) = state.h;
    x.rightCols(c) = norm;
    RowMatrixXd z = x * params.readout_hidden;
    z.rowwise() += params.readout_bias;
    const RowMatrixXd act = z.unaryExpr([](double t) { return silu(t); });
    res.atomic_energies = (act * params.readout_out).array() + params.readout_out_bias;
    res.energy = res.atomic_energies.sum();
    if (OpCounters* rc = stage("et_readout")) {
        const auto un = static_cast<std::uint64_t>(n);
        const auto uc = static_cast<std::uint64_t>(c);
        tally(rc, OpCost{3, 3, 1}, un * uc);  // norms
        const auto macs = un * (2 * uc * uc + uc);
        rc->macs += macs;
        rc->flops_mul += macs;
        rc->flops_add += macs + un * (uc + 1);
        tally(rc, OpCost{1, 2, 1}, un * uc);  // silu
        rc->bytes_read += (un * 4 * uc + 2 * uc * uc + 2 * uc) * sizeof(double);
        rc->bytes_written += un * (2 * uc + 1) * sizeof(double);
    }

    res.tape.final_state = std::move(state);
    res.tape.vector_norm = std::move(norm);
    res.tape.readout_pre = std::move(z);
    res.tape.valid = true;
    return res;
}

Coords3d et_forces(const EtTape& tape, const EtParams& params, const Coords3d& positions, StageCounters* counters) {
    if (!tape.valid) throw StaleTapeError("transformer tape is empty");
    if (tape.params != &params) throw StaleTapeError("transformer tape was recorded with different parameters");
    if (positions.rows() != tape.positions.rows() || positions != tape.positions) {
        throw StaleTapeError("positions changed since the forward pass");
    }
    const auto& cfg = params.config;
    const int c = cfg.channels;
    const int nh = cfg.heads;
    const int hd = cfg.head_dim();
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
    const auto n = positions.rows();
    const auto& edges = tape.edges;
    const auto m = static_cast<Eigen::Index>(edges.size());
    OpCounters* oc = counters ? &(*counters)["et_backward"] : nullptr;

    // Readout.
    const RowMatrixXd dz = tape.readout_pre.unaryExpr([](double t) { return silu_derivative(t); }).array().rowwise() *
                           params.readout_out.transpose().array();
    const RowMatrixXd dx = dz * params.readout_hidden.transpose();
    RowMatrixXd dh = dx.leftCols(c);
    std::array<RowMatrixXd, 3> dv;
    for (std::size_t d = 0; d < 3; ++d) {
        dv[d] = dx.rightCols(c).cwiseProduct(tape.final_state.v[d]).cwiseQuotient(tape.vector_norm);
    }
    if (oc) {
        const auto un = static_cast<std::uint64_t>(n);
        const auto uc = static_cast<std::uint64_t>(c);
        const auto macs = un * 2 * uc * uc;
        oc->macs += macs;
        oc->flops_mul += macs + un * uc * 8;
        oc->flops_add += macs + un * uc * 2;
        oc->transcendental_ops += un * uc;
        oc->bytes_read += (un * 5 * uc + 2 * uc * uc + uc) * sizeof(double);
        oc->bytes_written += un * 5 * uc * sizeof(double);
    }

    Eigen::VectorXd dr = Eigen::VectorXd::Zero(m);  // dE/dr per edge, through phi and fc
    Coords3d du = Coords3d::Zero(m, 3);             // dE/d(unit direction) per edge

    for (std::size_t l = tape.layers.size(); l-- > 0;) {
        const auto& lt = tape.layers[l];
        const auto& layer = params.layers[l];
        RowMatrixXd dq = RowMatrixXd::Zero(n, c), dk = RowMatrixXd::Zero(n, c);
        RowMatrixXd dval = RowMatrixXd::Zero(n, c), dmsg = RowMatrixXd::Zero(n, c);
        std::array<RowMatrixXd, 3> dmix;
        for (auto& x : dmix) x = RowMatrixXd::Zero(n, c);
        RowMatrixXd dgate(m, c);

        for (Eigen::Index e = 0; e < m; ++e) {
            const auto i = edges.center[static_cast<std::size_t>(e)];
            const auto j = edges.neighbor[static_cast<std::size_t>(e)];
            const double fc = edges.fc[e];
            const Vec3 u = edges.unit.row(e).transpose();
            Vec3 du_e = Vec3::Zero();
            for (int a = 0; a < nh; ++a) {
                const double s = lt.score(e, a);
                const double alpha = silu(s) * fc;
                double dalpha = 0.0;
                for (int ch = a * hd; ch < (a + 1) * hd; ++ch) {
                    const double gh = dh(i, ch);
                    dalpha += gh * lt.value(j, ch);
                    dval(j, ch) += alpha * gh;
                    double gu = 0.0;
                    for (int d = 0; d < 3; ++d) {
                        const double gv = dv[static_cast<std::size_t>(d)](i, ch);
                        dalpha += gv * (lt.mixed[static_cast<std::size_t>(d)](j, ch) + u[d] * lt.message(j, ch));
                        dmix[static_cast<std::size_t>(d)](j, ch) += alpha * gv;
                        gu += gv * u[d];
                        du_e[d] += alpha * gv * lt.message(j, ch);
                    }
                    dmsg(j, ch) += alpha * gu;
                }
                dr[e] += dalpha * silu(s) * edges.dfc[e];
                const double ds = dalpha * silu_derivative(s) * fc * inv_sqrt;
                for (int ch = a * hd; ch < (a + 1) * hd; ++ch) {
                    const double qk = lt.query(i, ch) * lt.key(j, ch);
                    dq(i, ch) += ds * lt.key(j, ch) * lt.gate(e, ch);
                    dk(j, ch) += ds * lt.query(i, ch) * lt.gate(e, ch);
                    dgate(e, ch) = ds * qk;
                }
            }
            du.row(e) += du_e.transpose();
        }
        // Gate -> phi -> r.
        const RowMatrixXd dphi = dgate * layer.rbf_projection.transpose();
        dr += dphi.cwiseProduct(edges.dphi).rowwise().sum();

        // Node projections back onto the layer input, plus the residual path.
        dh += dq * layer.query.transpose() + dk * layer.key.transpose() + dval * layer.value.transpose() +
              dmsg * layer.vector_message.transpose();
        for (std::size_t d = 0; d < 3; ++d) dv[d] += dmix[d] * layer.vector_mix.transpose();

        if (oc) {
            const auto ue = static_cast<std::uint64_t>(m);
            const auto uc = static_cast<std::uint64_t>(c);
            const auto un = static_cast<std::uint64_t>(n);
            const auto edge_macs = 2 * ue * static_cast<std::uint64_t>(cfg.rbf_count) * uc;
            const auto node_macs = 7 * un * uc * uc;
            oc->macs += edge_macs + node_macs;
            oc->flops_mul += edge_macs + node_macs;
            oc->flops_add += edge_macs + node_macs;
            tally(oc, OpCost{14, 24, 0}, ue * uc);
            tally(oc, OpCost{2, 6, 2}, ue * static_cast<std::uint64_t>(nh));
            oc->gather_ops += ue * 8;
            oc->scatter_ops += ue * 7;
            oc->bytes_read += (ue * (12 * uc + static_cast<std::uint64_t>(nh) + 4) + un * 11 * uc +
                               7 * uc * uc + static_cast<std::uint64_t>(cfg.rbf_count) * uc) * sizeof(double);
            oc->bytes_written += (ue * (8 * uc + 4) + un * 9 * uc) * sizeof(double);
        }
    }

    // Distances and directions back to coordinates.
    Coords3d grad = Coords3d::Zero(n, 3);
    for (Eigen::Index e = 0; e < m; ++e) {
        const Vec3 u = edges.unit.row(e).transpose();
        const Vec3 g = du.row(e).transpose();
        const Vec3 gd = dr[e] * u + (g - g.dot(u) * u) / edges.r[e];
        grad.row(edges.neighbor[static_cast<std::size_t>(e)]) += gd.transpose();
        grad.row(edges.center[static_cast<std::size_t>(e)]) -= gd.transpose();
    }
    if (oc) {
        tally(oc, OpCost{12, 13, 0}, static_cast<std::uint64_t>(m));
        oc->scatter_ops += 2 * static_cast<std::uint64_t>(m);
        oc->bytes_read += static_cast<std::uint64_t>(m) * 8 * sizeof(double);
        oc->bytes_written += static_cast<std::uint64_t>(m) * 6 * sizeof(double);
    }
    return -grad;
}

}  // namespace mlff
