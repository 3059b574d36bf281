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
#include "mlff/cff.hpp"
#include "mlff/et.hpp"
#include "mlff/nnp.hpp"
#include "mlff/system.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlff {

/// Short-range nonbonded work of a classical force field: 25 FLOPs for each of
/// the N*M/2 unique pairs.
double predict_cff_flops(double n, double m);

/// Descriptor work: 16 radial terms per neighbor plus 32 angular terms per
/// unordered neighbor pair, N (16 M + 16 M^2).
double predict_aev_flops(double n, double m);

/// Same count with separate neighbor numbers inside the radial and the
/// (shorter) angular cutoff: N (16 M_rad + 16 M_ang^2).
double predict_aev_flops(double n, double m_radial, double m_angular);

/// c0 * N * k * H * C for one attention layer.
double predict_et_layer_flops(double n, double k, double heads, double channels, double c0);

/// One-point calibration of c0 from a counted layer on a reference system
/// with `edges` = N * k directed edges.
double calibrate_et_c0(double counted_layer_ops, double edges, double heads, double channels);

/// Operation totals of one ANI (descriptor + network forward) and one
/// classical evaluation on the same system.
struct RatioReport {
    std::size_t atoms = 0;
    std::size_t cff_pairs = 0;            // evaluated nonbonded pairs
    std::uint64_t cff_nonbonded_ops = 0;  // core kernel plus cutoff envelope
    std::uint64_t cff_bonded_ops = 0;
    std::uint64_t aev_ops = 0;
    std::uint64_t nnp_ops = 0;
    int ensemble_size = 1;

    std::uint64_t ani_ops() const noexcept { return aev_ops + nnp_ops; }
    std::uint64_t cff_total_ops() const noexcept { return cff_nonbonded_ops + cff_bonded_ops; }
    /// ani_ops / cff_nonbonded_ops; absent when there is nothing to compare.
    std::optional<double> ratio() const;
    std::optional<double> ratio_total() const;
};

/// Runs both pipelines once with counters on and compares combined operation
/// counts (arithmetic plus transcendental).
RatioReport mlff_vs_cff_ratio(const AtomicSystem& system, const CffParams& cff, const NnpModel& model,
                              const AevParams& aev = AevParams::defaults());

/// Everything the byte models need besides N and M.
struct TrafficParams {
    AevParams aev = AevParams::defaults();
    std::vector<int> nnp_widths = default_nnp_widths();
    int ensemble_size = 1;
    EtConfig et;
    double cff_cutoff = 10.0;
};

/// Algorithmic memory traffic: array elements touched, times their width.
/// `components` splits the total by origin ("positions", "pairs", "radial",
/// "angular", "descriptor", "tape", "gradient", "weights", "activations",
/// "edges", "forces").
struct MemoryTraffic {
    double read_bytes = 0.0;
    double write_bytes = 0.0;
    std::map<std::string, double> components;

    double total() const noexcept { return read_bytes + write_bytes; }
};

/// Stages: pairs, aev_forward, aev_backward, nnp_forward, nnp_backward,
/// et_forward, et_backward, cff. M is the mean neighbor count within the
/// stage's own cutoff (the radial cutoff for the descriptor stages); neighbors
/// inside the angular cutoff are scaled from it at uniform density.
/// Throws ConfigError for an unknown stage.
MemoryTraffic estimate_memory_traffic(const std::string& stage, double n, double m,
                                      const TrafficParams& params = {});

const std::vector<std::string>& traffic_stages();

struct CostInputs {
    double n = 0, m = 0, heads = 0, channels = 0, layers = 0, ensemble = 0;
};

struct StageCost {
    double analytic_flops = 0.0;
    std::optional<std::uint64_t> counted_flops;  // only for executed stages
    double analytic_bytes = 0.0;
    CostInputs inputs;
};

struct CostReport {
    static constexpr int kSchemaVersion = 1;
    std::map<std::string, StageCost> stages;
};

void write_cost_report_json(std::ostream& out, const CostReport& report);
/// Columns: stage, analytic_flops, counted_flops, analytic_bytes, n, m, heads,
/// channels, layers, ensemble.
void write_cost_report_csv(std::ostream& out, const CostReport& report, bool header = true);

}  // namespace mlff
