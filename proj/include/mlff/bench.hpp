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
#include "mlff/costmodel.hpp"
#include "mlff/md.hpp"
#include "mlff/system.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlff {

enum class ModelChoice { Ani, Et, Cff };
std::string_view to_string(ModelChoice m);
ModelChoice model_choice_from_string(std::string_view s);

std::string_view to_string(AevStrategy s);
AevStrategy aev_strategy_from_string(std::string_view s);

/// Settings shared by every verb. Loadable from a flat "key = value" file;
/// see apply_config_value for the keys.
struct BenchConfig {
    WorkloadSpec workload;
    std::vector<int> sizes;  // residue counts; empty means the default sweep
    ModelChoice model = ModelChoice::Ani;
    std::vector<AevStrategy> strategies{AevStrategy::Fused};
    int reps = 5;
    bool deterministic = true;
    std::filesystem::path out = "bench_out";
    std::vector<std::string> stages;  // empty: every stage of the chosen model

    std::uint64_t model_seed = 7;
    int ensemble_size = 8;
    std::filesystem::path model_path;  // load instead of seeding when set
    AevParams aev = AevParams::defaults();
    EtConfig et;
    SimConfig sim;

    void validate() const;
    std::vector<int> sweep() const;
};

/// Known keys:
///   workload.residues workload.geometry (helix|compact) workload.caps
///   workload.solvated workload.water_density workload.exclusion_radius
///   workload.padding workload.seed
///   sizes (comma list) model (ani|et|cff) strategy (staged|fused|both)
///   reps deterministic out stages (comma list)
///   model.seed model.ensemble model.path
///   aev.radial_cutoff aev.angular_cutoff aev.radial_shifts aev.angular_shifts
///   aev.sections
///   et.channels et.heads et.layers et.rbf_count et.cutoff
///   md.mode (cff|mlff|cml) md.dt md.steps md.warmup md.temperature md.seed
///   md.dump_every
/// Throws ConfigError for unknown keys or unparsable values.
void apply_config_value(BenchConfig& config, const std::string& key, const std::string& value);

/// '#' starts a comment; blank lines are ignored.
BenchConfig parse_bench_config(std::istream& in, BenchConfig base = {});
BenchConfig load_bench_config(const std::filesystem::path& path, BenchConfig base = {});

/// Environment description attached to every report.
struct RunEnvironment {
    std::string hardware;
    std::string build_flags;
    bool deterministic = true;
};
RunEnvironment describe_environment(bool deterministic);

/// Stage names understood by stage-bench.
const std::vector<std::string>& bench_stages(ModelChoice model);

struct TimingRow {
    int size = 0;  // residues
    std::size_t atoms = 0;
    std::string stage;
    std::string strategy;  // "-" where the stage has no strategy
    double median_s = 0.0;
    double min_s = 0.0;
    std::uint64_t flops = 0;  // counted arithmetic + transcendental ops
    std::uint64_t bytes = 0;  // counted bytes read + written
};

struct TimingReport {
    static constexpr int kSchemaVersion = 1;
    RunEnvironment environment;
    std::vector<TimingRow> rows;
    std::map<int, CostReport> costs;  // by size
};

/// Writes one file per size; returns the paths in ascending size order.
std::vector<std::filesystem::path> cmd_gen(const BenchConfig& config);

/// Times each stage over config.reps repetitions after one discarded warmup.
/// Staged and fused descriptors are compared before timing; a mismatch throws
/// VerificationError.
TimingReport cmd_stage_bench(const BenchConfig& config);

class VerificationError : public Error {
public:
    using Error::Error;
};

/// Columns: size, atoms, stage, strategy, median_s, flops, bytes.
void write_timing_csv(std::ostream& out, const TimingReport& report);
void write_timing_json(std::ostream& out, const TimingReport& report);

struct MdReport {
    SimMode mode = SimMode::CFFsys;
    std::string provider;
    std::size_t atoms = 0;
    std::size_t solute_atoms = 0;
    TrajectoryStats stats;
    RunEnvironment environment;
};

/// Builds the workload for config.sim.mode (the solute alone for MLFFsys, a
/// solvated system for CMLsys and for CFFsys when workload.solvated is set),
/// then integrates.
MdReport cmd_md(const BenchConfig& config);

void write_md_json(std::ostream& out, const MdReport& report);
/// Columns: step, potential, kinetic, total.
void write_energy_csv(std::ostream& out, const TrajectoryStats& stats);

/// Ratio report for the configured workload with an ensemble of
/// config.ensemble_size networks.
RatioReport cmd_ratio(const BenchConfig& config);
void write_ratio_json(std::ostream& out, const RatioReport& report);

/// Shared network weights for a configuration (seeded or loaded).
std::shared_ptr<const NnpModel> bench_nnp_model(const BenchConfig& config);
std::shared_ptr<const EtParams> bench_et_model(const BenchConfig& config);

}  // namespace mlff
