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

#include "mlff/costmodel.hpp"

#include "json.hpp"

#include <cmath>
#include <ostream>

namespace mlff {

double predict_cff_flops(double n, double m) { return 25.0 * n * m / 2.0; }

double predict_aev_flops(double n, double m) { return predict_aev_flops(n, m, m); }

double predict_aev_flops(double n, double m_radial, double m_angular) {
    return n * (16.0 * m_radial + 16.0 * m_angular * m_angular);
}

double predict_et_layer_flops(double n, double k, double heads, double channels, double c0) {
    return c0 * n * k * heads * channels;
}

double calibrate_et_c0(double counted_layer_ops, double edges, double heads, double channels) {
    const double denom = edges * heads * channels;
    if (!(denom > 0.0)) throw ConfigError("calibration needs a reference system with edges");
    return counted_layer_ops / denom;
}

std::optional<double> RatioReport::ratio() const {
    if (atoms == 0 || cff_nonbonded_ops == 0) return std::nullopt;
    return static_cast<double>(ani_ops()) / static_cast<double>(cff_nonbonded_ops);
}

std::optional<double> RatioReport::ratio_total() const {
    if (atoms == 0 || cff_total_ops() == 0) return std::nullopt;
    return static_cast<double>(ani_ops()) / static_cast<double>(cff_total_ops());
}

RatioReport mlff_vs_cff_ratio(const AtomicSystem& system, const CffParams& cff, const NnpModel& model,
                              const AevParams& aev) {
    RatioReport rep;
    rep.atoms = system.size();
    rep.ensemble_size = model.ensemble_size;
    if (system.empty()) return rep;

    const auto pairs = build_pairs_celllist(system, cff.cutoff);
    const auto classical = cff_energy_forces(system, cff, pairs);
    auto stage_ops = [](const StageCounters& sc, const char* name) -> std::uint64_t {
        const auto it = sc.find(name);
        return it == sc.end() ? 0 : it->second.combined();
    };
    rep.cff_pairs = count_nonbonded_pairs(cff, pairs);
    rep.cff_nonbonded_ops = stage_ops(classical.counters, "cff_nonbonded") + stage_ops(classical.counters, "cff_switch");
    rep.cff_bonded_ops = stage_ops(classical.counters, "cff_bonded");

    StageCounters sc;
    const auto nb = build_aev_neighbors(system, aev);
    const auto desc = compute_aev(system, nb, aev, AevStrategy::Fused, &sc);
    rep.aev_ops = stage_ops(sc, "aev_radial") + stage_ops(sc, "aev_angular");
    OpCounters net;
    nnp_energy(desc.aev, system.species, model, &net);
    rep.nnp_ops = net.combined();
    return rep;
}

namespace {

constexpr double kWord = 8.0;   // f64
constexpr double kIndex = 4.0;  // i32

struct Traffic {
    MemoryTraffic t;
    void read(const std::string& what, double elements, double width = kWord) {
        t.read_bytes += elements * width;
        t.components[what] += elements * width;
    }
    void write(const std::string& what, double elements, double width = kWord) {
        t.write_bytes += elements * width;
        t.components[what] += elements * width;
    }
};

double nnp_weight_elements(const std::vector<int>& w) {
    double s = 0.0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) s += static_cast<double>(w[l]) * w[l + 1] + w[l + 1];
    return s;
}

double nnp_hidden_elements(const std::vector<int>& w) {
    double s = 0.0;
    for (std::size_t l = 1; l + 1 < w.size(); ++l) s += w[l];
    return s;
}

// Neighbors inside the angular cutoff at the density implied by M radial ones.
double angular_neighbors(double m, const AevParams& p) {
    const double s = p.angular_cutoff / p.radial_cutoff;
    return m * s * s * s;
}

void aev_forward_terms(Traffic& tr, double n, double m, const AevParams& p) {
    const double pairs = n * m;
    const double ma = angular_neighbors(m, p);
    const double triplets = n * ma * ma / 2.0;
    const double radial = static_cast<double>(p.radial_shifts.size());
    const double angular = static_cast<double>(p.angular_size());
    // Per pair: distance, envelope, species; one term per shift.
    tr.read("radial", pairs * 3.0);
    tr.write("radial", pairs * radial);
    // Per triplet: two legs (distance, envelope, direction) and one term per
    // (shift, section).
    tr.read("angular", triplets * 10.0);
    tr.write("angular", triplets * angular);
    tr.write("descriptor", n * static_cast<double>(p.width()));
}

}  // namespace

const std::vector<std::string>& traffic_stages() {
    static const std::vector<std::string> stages = {"pairs",       "aev_forward", "aev_backward", "nnp_forward",
                                                    "nnp_backward", "et_forward", "et_backward",  "cff"};
    return stages;
}

MemoryTraffic estimate_memory_traffic(const std::string& stage, double n, double m, const TrafficParams& params) {
    if (n < 0.0 || m < 0.0) throw ConfigError("atom and neighbor counts must be non-negative");
    Traffic tr;
    const double pairs = n * m;
    if (stage == "pairs") {
        tr.read("positions", n * 3.0);
        tr.read("positions", pairs * 3.0);  // neighbor coordinates per candidate
        tr.write("pairs", pairs * 4.0);     // r and displacement
        tr.write("pairs", pairs * 2.0, kIndex);
    } else if (stage == "aev_forward") {
        tr.read("positions", pairs * 6.0);
        aev_forward_terms(tr, n, m, params.aev);
    } else if (stage == "aev_backward") {
        const auto& p = params.aev;
        const double ma = angular_neighbors(m, p);
        const double triplets = n * ma * ma / 2.0;
        // Re-derive every forward term from the tape, then read dE/dG and
        // scatter pair and triplet gradients.
        aev_forward_terms(tr, n, m, p);
        tr.read("tape", pairs * 6.0 + triplets * 3.0);
        tr.read("gradient", n * static_cast<double>(p.width()));
        tr.write("gradient", pairs * 3.0 * 2.0 + triplets * 3.0 * 3.0);
        tr.write("forces", n * 3.0);
    } else if (stage == "nnp_forward" || stage == "nnp_backward") {
        const auto& w = params.nnp_widths;
        if (w.size() < 2) throw ConfigError("network widths need at least two layers");
        const double ens = params.ensemble_size;
        tr.read("descriptor", n * w.front());
        tr.read("weights", n * ens * nnp_weight_elements(w));
        tr.write("activations", n * ens * (nnp_hidden_elements(w) + 1.0));
        if (stage == "nnp_backward") {
            tr.read("tape", n * ens * nnp_hidden_elements(w));
            tr.read("weights", n * ens * nnp_weight_elements(w));
            tr.write("gradient", n * w.front());
        }
    } else if (stage == "et_forward" || stage == "et_backward") {
        const auto& c = params.et;
        const double ch = c.channels;
        const double layers = c.layers;
        const double k = c.rbf_count;
        // Weights are only streamed when there is at least one atom.
        const double active = n > 0.0 ? 1.0 : 0.0;
        tr.read("positions", pairs * 6.0);
        tr.write("edges", pairs * (6.0 + 2.0 * k));
        // Per layer: seven node projections, then each edge gathers seven
        // channel rows of its neighbor and the gate, and scatters four rows.
        tr.read("weights", active * layers * (7.0 * ch * ch + k * ch));
        tr.read("activations", layers * n * 4.0 * ch + layers * pairs * (7.0 * ch + k));
        tr.write("activations", layers * n * 7.0 * ch + layers * pairs * 4.0 * ch);
        tr.read("weights", active * (2.0 * ch * ch + ch));
        tr.write("activations", n * 2.0 * ch);
        if (stage == "et_backward") {
            tr.read("tape", layers * (n * 11.0 * ch + pairs * (ch + c.heads)) + pairs * (6.0 + 2.0 * k));
            tr.read("weights", active * layers * (7.0 * ch * ch + k * ch));
            tr.write("gradient", layers * (n * 9.0 * ch + pairs * ch) + pairs * 4.0);
            tr.write("forces", n * 3.0);
        }
    } else if (stage == "cff") {
        const double unique = pairs / 2.0;
        tr.read("positions", unique * 6.0);
        tr.read("pairs", unique * 4.0);  // charges and LJ parameters
        tr.write("forces", unique * 6.0);
    } else {
        throw ConfigError("unknown stage '" + stage + "'");
    }
    return tr.t;
}

void write_cost_report_json(std::ostream& out, const CostReport& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = CostReport::kSchemaVersion;
    auto& stages = j["stages"];
    stages = nlohmann::ordered_json::object();
    for (const auto& [name, s] : report.stages) {
        nlohmann::ordered_json e;
        e["analytic_flops"] = s.analytic_flops;
        if (s.counted_flops) {
            e["counted_flops"] = *s.counted_flops;
        } else {
            e["counted_flops"] = nullptr;
        }
        e["analytic_bytes"] = s.analytic_bytes;
        e["inputs"] = {{"n", s.inputs.n},           {"m", s.inputs.m},           {"heads", s.inputs.heads},
                       {"channels", s.inputs.channels}, {"layers", s.inputs.layers}, {"ensemble", s.inputs.ensemble}};
        stages[name] = std::move(e);
    }
    out << j.dump(2) << '\n';
}

void write_cost_report_csv(std::ostream& out, const CostReport& report, bool header) {
    if (header) out << "stage,analytic_flops,counted_flops,analytic_bytes,n,m,heads,channels,layers,ensemble\n";
    for (const auto& [name, s] : report.stages) {
        out << name << ',' << s.analytic_flops << ',';
        if (s.counted_flops) out << *s.counted_flops;
        out << ',' << s.analytic_bytes << ',' << s.inputs.n << ',' << s.inputs.m << ',' << s.inputs.heads << ','
            << s.inputs.channels << ',' << s.inputs.layers << ',' << s.inputs.ensemble << '\n';
    }
}

}  // namespace mlff
