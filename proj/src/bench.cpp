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

#include "mlff/bench.hpp"

#include "mlff/model_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#ifndef MLFF_BUILD_FLAGS
#define MLFF_BUILD_FLAGS "unknown"
#endif

namespace mlff {

namespace {

using Clock = std::chrono::steady_clock;
using json = nlohmann::ordered_json;

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("bad value '" + v + "' for " + key);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("bad boolean '" + v + "' for " + key);
}

template <typename F>
double time_call(F&& f) {
    const auto t0 = Clock::now();
    f();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t ops_of(const StageCounters& c, std::initializer_list<const char*> names, bool bytes) {
    std::uint64_t s = 0;
    for (const char* n : names) {
        const auto it = c.find(n);
        if (it != c.end()) s += bytes ? it->second.bytes() : it->second.combined();
    }
    return s;
}

json stats_json(const TrajectoryStats& s) {
    json j;
    j["steps"] = s.steps;
    j["timed_steps"] = s.timed_steps;
    j["dt_fs"] = s.dt;
    j["elapsed_s"] = s.elapsed_seconds;
    j["ns_per_day"] = s.ns_per_day;
    json per_step = json::object();
    for (const auto& [name, t] : s.stage_seconds) {
        per_step[name] = s.timed_steps > 0 ? t / s.timed_steps : 0.0;
    }
    j["stage_seconds_per_step"] = per_step;
    json counters = json::object();
    for (const auto& [name, c] : s.counters) {
        counters[name] = {{"flops", c.flops()}, {"transcendental", c.transcendental_ops}, {"bytes", c.bytes()}};
    }
    j["counters_last_step"] = counters;
    if (!s.total.empty()) {
        const auto d = energy_drift(s.total);
        j["initial_total_energy"] = d.initial;
        j["energy_drift"] = d.secular;
        j["max_energy_deviation"] = d.max_deviation;
    }
    return j;
}

json environment_json(const RunEnvironment& e) {
    return {{"hardware", e.hardware}, {"build_flags", e.build_flags}, {"deterministic", e.deterministic}};
}

}  // namespace

std::string_view to_string(ModelChoice m) {
    switch (m) {
        case ModelChoice::Ani: return "ani";
        case ModelChoice::Et: return "et";
        case ModelChoice::Cff: return "cff";
    }
    return "?";
}

ModelChoice model_choice_from_string(std::string_view s) {
    if (s == "ani") return ModelChoice::Ani;
    if (s == "et") return ModelChoice::Et;
    if (s == "cff") return ModelChoice::Cff;
    throw ConfigError("unknown model '" + std::string(s) + "' (expected ani, et or cff)");
}

std::string_view to_string(AevStrategy s) { return s == AevStrategy::Staged ? "staged" : "fused"; }

AevStrategy aev_strategy_from_string(std::string_view s) {
    if (s == "staged") return AevStrategy::Staged;
    if (s == "fused") return AevStrategy::Fused;
    throw ConfigError("unknown strategy '" + std::string(s) + "' (expected staged or fused)");
}

void BenchConfig::validate() const {
    workload.validate();
    if (reps < 1) throw ConfigError("reps must be >= 1");
    for (int s : sizes)
        if (s < 1) throw ConfigError("sweep sizes must be positive");
    if (strategies.empty()) throw ConfigError("at least one strategy is required");
    if (ensemble_size < 1) throw ConfigError("ensemble size must be >= 1");
    const auto& known = bench_stages(model);
    for (const auto& s : stages) {
        if (std::find(known.begin(), known.end(), s) == known.end()) {
            throw ConfigError("unknown stage '" + s + "' for model " + std::string(to_string(model)));
        }
    }
    aev.validate();
    et.validate();
    sim.validate();
}

std::vector<int> BenchConfig::sweep() const {
    std::vector<int> s = sizes.empty() ? default_sweep_residues() : sizes;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

void apply_config_value(BenchConfig& c, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    auto& w = c.workload;
    if (key == "workload.residues") w.residues = parse_number<int>(key, v);
    else if (key == "workload.geometry") {
        if (v == "helix") w.geometry = Geometry::Helix;
        else if (v == "compact") w.geometry = Geometry::Compact;
        else throw ConfigError("unknown geometry '" + v + "'");
    } else if (key == "workload.caps") w.caps = parse_number<int>(key, v);
    else if (key == "workload.solvated") w.solvated = parse_bool(key, v);
    else if (key == "workload.water_density") w.water_density = parse_number<double>(key, v);
    else if (key == "workload.exclusion_radius") w.exclusion_radius = parse_number<double>(key, v);
    else if (key == "workload.padding") w.padding = parse_number<double>(key, v);
    else if (key == "workload.seed") w.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "sizes") {
        c.sizes.clear();
        for (const auto& s : split(v, ',')) c.sizes.push_back(parse_number<int>(key, s));
    } else if (key == "model") c.model = model_choice_from_string(v);
    else if (key == "strategy") {
        if (v == "both") c.strategies = {AevStrategy::Staged, AevStrategy::Fused};
        else c.strategies = {aev_strategy_from_string(v)};
    } else if (key == "reps") c.reps = parse_number<int>(key, v);
    else if (key == "deterministic") c.deterministic = parse_bool(key, v);
    else if (key == "out") c.out = v;
    else if (key == "stages") c.stages = split(v, ',');
    else if (key == "model.seed") c.model_seed = parse_number<std::uint64_t>(key, v);
    else if (key == "model.ensemble") c.ensemble_size = parse_number<int>(key, v);
    else if (key == "model.path") c.model_path = v;
    else if (key == "aev.radial_cutoff" || key == "aev.angular_cutoff" || key == "aev.radial_shifts" ||
             key == "aev.angular_shifts" || key == "aev.sections") {
        double rcr = c.aev.radial_cutoff, rca = c.aev.angular_cutoff;
        int nr = static_cast<int>(c.aev.radial_shifts.size());
        int na = static_cast<int>(c.aev.angular_shifts.size());
        int ns = static_cast<int>(c.aev.angle_sections.size());
        if (key == "aev.radial_cutoff") rcr = parse_number<double>(key, v);
        if (key == "aev.angular_cutoff") rca = parse_number<double>(key, v);
        if (key == "aev.radial_shifts") nr = parse_number<int>(key, v);
        if (key == "aev.angular_shifts") na = parse_number<int>(key, v);
        if (key == "aev.sections") ns = parse_number<int>(key, v);
        c.aev = AevParams::with_grid(nr, na, ns, rcr, rca);
    } else if (key == "et.channels") c.et.channels = parse_number<int>(key, v);
    else if (key == "et.heads") c.et.heads = parse_number<int>(key, v);
    else if (key == "et.layers") c.et.layers = parse_number<int>(key, v);
    else if (key == "et.rbf_count") c.et.rbf_count = parse_number<int>(key, v);
    else if (key == "et.cutoff") c.et.cutoff = parse_number<double>(key, v);
    else if (key == "md.mode") c.sim.mode = sim_mode_from_string(v);
    else if (key == "md.dt") c.sim.dt = parse_number<double>(key, v);
    else if (key == "md.steps") c.sim.steps = parse_number<int>(key, v);
    else if (key == "md.warmup") c.sim.warmup_steps = parse_number<int>(key, v);
    else if (key == "md.temperature") c.sim.temperature = parse_number<double>(key, v);
    else if (key == "md.seed") c.sim.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "md.dump_every") c.sim.dump_every = parse_number<int>(key, v);
    else throw ConfigError("unknown config key '" + key + "'");
}

BenchConfig parse_bench_config(std::istream& in, BenchConfig base) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        apply_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

BenchConfig load_bench_config(const std::filesystem::path& path, BenchConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_bench_config(in, std::move(base));
}

RunEnvironment describe_environment(bool deterministic) {
    RunEnvironment e;
    std::string cpu = "unknown cpu";
    std::ifstream info("/proc/cpuinfo");
    std::string line;
    while (std::getline(info, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) cpu = trim(line.substr(colon + 1));
            break;
        }
    }
    e.hardware = cpu + ", " + std::to_string(std::thread::hardware_concurrency()) + " hardware threads, 1 used";
    e.build_flags = MLFF_BUILD_FLAGS;
    e.deterministic = deterministic;
    return e;
}

const std::vector<std::string>& bench_stages(ModelChoice model) {
    static const std::vector<std::string> ani = {"neighbors", "aev_forward", "energy_forward", "force_backward"};
    static const std::vector<std::string> et = {"neighbors", "et_forward", "et_backward"};
    static const std::vector<std::string> cff = {"neighbors", "cff"};
    switch (model) {
        case ModelChoice::Ani: return ani;
        case ModelChoice::Et: return et;
        case ModelChoice::Cff: return cff;
    }
    return ani;
}

std::shared_ptr<const NnpModel> bench_nnp_model(const BenchConfig& config) {
    if (!config.model_path.empty()) return std::make_shared<const NnpModel>(load_nnp_model(config.model_path));
    std::vector<int> widths = default_nnp_widths();
    widths.front() = static_cast<int>(config.aev.width());
    return std::make_shared<const NnpModel>(init_model(config.model_seed, widths, config.ensemble_size));
}

std::shared_ptr<const EtParams> bench_et_model(const BenchConfig& config) {
    if (!config.model_path.empty()) return std::make_shared<const EtParams>(load_et_model(config.model_path));
    return std::make_shared<const EtParams>(init_et(config.model_seed, config.et));
}

std::vector<std::filesystem::path> cmd_gen(const BenchConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.out);
    std::vector<std::filesystem::path> files;
    for (int residues : config.sweep()) {
        WorkloadSpec spec = config.workload;
        spec.residues = residues;
        const auto sys = generate_polyalanine(spec);
        auto path = config.out / ("polyala_" + std::to_string(residues) + ".xyz");
        write_system(sys, path, "residues=" + std::to_string(residues) + " seed=" + std::to_string(spec.seed));
        files.push_back(std::move(path));
    }
    return files;
}

TimingReport cmd_stage_bench(const BenchConfig& config) {
    config.validate();
    TimingReport report;
    report.environment = describe_environment(config.deterministic);
    const auto& stages = config.stages.empty() ? bench_stages(config.model) : config.stages;

    std::shared_ptr<const NnpModel> nnp;
    std::shared_ptr<const EtParams> et;
    if (config.model == ModelChoice::Ani) nnp = bench_nnp_model(config);
    if (config.model == ModelChoice::Et) et = bench_et_model(config);

    std::optional<double> et_c0;  // calibrated on the first (smallest) size, then frozen

    for (int residues : config.sweep()) {
        WorkloadSpec spec = config.workload;
        spec.residues = residues;
        const AtomicSystem sys = generate_polyalanine(spec);
        const auto n = sys.size();

        // Median and minimum over reps after one discarded run.
        auto measure = [&](const std::string& stage, const std::string& strategy, auto&& fn, std::uint64_t flops,
                           std::uint64_t bytes) {
            fn();
            std::vector<double> t;
            for (int r = 0; r < config.reps; ++r) t.push_back(time_call(fn));
            std::sort(t.begin(), t.end());
            const std::size_t mid = t.size() / 2;
            const double median = t.size() % 2 ? t[mid] : 0.5 * (t[mid - 1] + t[mid]);
            report.rows.push_back({residues, n, stage, strategy, median, t.front(), flops, bytes});
        };
        auto wants = [&](const char* s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };
        CostReport cost;

        if (config.model == ModelChoice::Ani) {
            const auto& p = config.aev;
            StageCounters nc;
            const auto nb = build_aev_neighbors(sys, p, &nc);
            const double m_rad = neighbor_stats(nb.pairs).mean;
            const double m_ang = n ? 2.0 * static_cast<double>(nb.triplets.size()) / static_cast<double>(n) : 0.0;

            StageCounters staged_c, fused_c;
            const auto staged = compute_aev(sys, nb, p, AevStrategy::Staged, &staged_c);
            const auto fused = compute_aev(sys, nb, p, AevStrategy::Fused, &fused_c);
            const double diff = n ? (staged.aev.values - fused.aev.values).cwiseAbs().maxCoeff() : 0.0;
            if (!(diff <= 1e-10)) {
                throw VerificationError("staged and fused descriptors differ by " + std::to_string(diff));
            }
            OpCounters fwd, bwd;
            const auto net = nnp_energy(fused.aev, sys.species, *nnp, &fwd);
            const RowMatrixXd grad = nnp_backward(net.tape, *nnp, &bwd);
            aev_backward(fused.tape, grad, sys.positions, &bwd);

            if (wants("neighbors")) {
                measure("neighbors", "-", [&] { (void)build_aev_neighbors(sys, p); }, ops_of(nc, {"neighbors"}, false),
                        ops_of(nc, {"neighbors"}, true));
            }
            if (wants("aev_forward")) {
                for (auto strategy : config.strategies) {
                    const auto& c = strategy == AevStrategy::Staged ? staged_c : fused_c;
                    measure("aev_forward", std::string(to_string(strategy)),
                            [&] { (void)compute_aev(sys, nb, p, strategy); }, ops_of(c, {"aev_radial", "aev_angular"}, false),
                            ops_of(c, {"aev_radial", "aev_angular"}, true));
                }
            }
            if (wants("energy_forward")) {
                measure("energy_forward", "-", [&] { (void)nnp_energy(fused.aev, sys.species, *nnp); }, fwd.combined(),
                        fwd.bytes());
            }
            if (wants("force_backward")) {
                measure("force_backward", "-",
                        [&] {
                            const RowMatrixXd g = nnp_backward(net.tape, *nnp);
                            (void)aev_backward(fused.tape, g, sys.positions);
                        },
                        bwd.combined(), bwd.bytes());
            }
            const CostInputs in{static_cast<double>(n), m_rad, 0, 0, 0, static_cast<double>(nnp->ensemble_size)};
            TrafficParams tp;
            tp.aev = p;
            tp.nnp_widths = nnp->widths;
            tp.ensemble_size = nnp->ensemble_size;
            const auto dn = static_cast<double>(n);
            cost.stages["aev_radial"] = {dn * 16.0 * m_rad, ops_of(fused_c, {"aev_radial"}, false), 0.0, in};
            cost.stages["aev_angular"] = {dn * 16.0 * m_ang * m_ang, ops_of(fused_c, {"aev_angular"}, false), 0.0, in};
            cost.stages["aev_forward"] = {predict_aev_flops(dn, m_rad, m_ang),
                                          ops_of(fused_c, {"aev_radial", "aev_angular"}, false),
                                          estimate_memory_traffic("aev_forward", dn, m_rad, tp).total(), in};
            const auto nnp_ops = count_nnp_ops(*nnp, species_histogram(sys.species));
            cost.stages["nnp_forward"] = {static_cast<double>(nnp_ops.flops), fwd.combined(),
                                          estimate_memory_traffic("nnp_forward", dn, m_rad, tp).total(), in};
        } else if (config.model == ModelChoice::Et) {
            OpCounters pc;
            const auto pairs = build_pairs_celllist(sys, et->config.cutoff, &pc);
            StageCounters fc;
            const auto out = et_energy(sys, pairs, *et, &fc);
            StageCounters bc;
            et_forces(out.tape, *et, sys.positions, &bc);
            if (wants("neighbors")) {
                measure("neighbors", "-", [&] { (void)build_pairs_celllist(sys, et->config.cutoff); }, pc.combined(),
                        pc.bytes());
            }
            if (wants("et_forward")) {
                measure("et_forward", "-", [&] { (void)et_energy(sys, pairs, *et); },
                        ops_of(fc, {"et_edges", "et_layer", "et_node", "et_readout"}, false),
                        ops_of(fc, {"et_edges", "et_layer", "et_node", "et_readout"}, true));
            }
            if (wants("et_backward")) {
                measure("et_backward", "-", [&] { (void)et_forces(out.tape, *et, sys.positions); },
                        ops_of(bc, {"et_backward"}, false), ops_of(bc, {"et_backward"}, true));
            }
            const auto& cfg = et->config;
            const double dn = static_cast<double>(n);
            const double k = n ? static_cast<double>(out.tape.edges.size()) / dn : 0.0;
            const CostInputs in{dn, k, static_cast<double>(cfg.heads), static_cast<double>(cfg.channels),
                                static_cast<double>(cfg.layers), 0};
            TrafficParams tp;
            tp.et = cfg;
            const double counted_layer = static_cast<double>(ops_of(fc, {"et_layer"}, false)) / std::max(1, cfg.layers);
            if (!et_c0 && out.tape.edges.size()) {
                et_c0 = calibrate_et_c0(counted_layer, dn * k, cfg.heads, cfg.channels);
            }
            cost.stages["et_layer"] = {predict_et_layer_flops(dn, k, cfg.heads, cfg.channels, et_c0.value_or(0.0)),
                                       static_cast<std::uint64_t>(counted_layer),
                                       estimate_memory_traffic("et_forward", dn, k, tp).total(), in};
        } else {
            const auto params = assign_default_params(sys);
            OpCounters pc;
            const auto pairs = build_pairs_celllist(sys, params.cutoff, &pc);
            const auto res = cff_energy_forces(sys, params, pairs);
            if (wants("neighbors")) {
                measure("neighbors", "-", [&] { (void)build_pairs_celllist(sys, params.cutoff); }, pc.combined(),
                        pc.bytes());
            }
            if (wants("cff")) {
                measure("cff", "-", [&] { (void)cff_energy_forces(sys, params, pairs); },
                        ops_of(res.counters, {"cff_nonbonded", "cff_switch", "cff_bonded"}, false),
                        ops_of(res.counters, {"cff_nonbonded", "cff_switch", "cff_bonded"}, true));
            }
            const double dn = static_cast<double>(n);
            const double m = n ? 2.0 * static_cast<double>(count_nonbonded_pairs(params, pairs)) / dn : 0.0;
            const CostInputs in{dn, m, 0, 0, 0, 0};
            TrafficParams tp;
            tp.cff_cutoff = params.cutoff;
            cost.stages["cff"] = {predict_cff_flops(dn, m), ops_of(res.counters, {"cff_nonbonded"}, false),
                                  estimate_memory_traffic("cff", dn, m, tp).total(), in};
        }
        report.costs[residues] = std::move(cost);
    }
    return report;
}

void write_timing_csv(std::ostream& out, const TimingReport& report) {
    out << "size,atoms,stage,strategy,median_s,flops,bytes\n";
    for (const auto& r : report.rows) {
        out << r.size << ',' << r.atoms << ',' << r.stage << ',' << r.strategy << ',' << r.median_s << ','
            << r.flops << ',' << r.bytes << '\n';
    }
}

void write_timing_json(std::ostream& out, const TimingReport& report) {
    json j;
    j["schema_version"] = TimingReport::kSchemaVersion;
    j["environment"] = environment_json(report.environment);
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"size", r.size},
                        {"atoms", r.atoms},
                        {"stage", r.stage},
                        {"strategy", r.strategy},
                        {"median_s", r.median_s},
                        {"min_s", r.min_s},
                        {"flops", r.flops},
                        {"bytes", r.bytes}});
    }
    j["rows"] = std::move(rows);
    json costs = json::object();
    for (const auto& [size, c] : report.costs) {
        std::ostringstream s;
        write_cost_report_json(s, c);
        costs[std::to_string(size)] = json::parse(s.str());
    }
    j["cost"] = std::move(costs);
    out << j.dump(2) << '\n';
}

MdReport cmd_md(const BenchConfig& config) {
    config.validate();
    WorkloadSpec spec = config.workload;
    if (!config.sizes.empty()) spec.residues = config.sizes.front();
    const SimMode mode = config.sim.mode;
    spec.solvated = mode == SimMode::CMLsys || (mode == SimMode::CFFsys && spec.solvated);
    if (mode == SimMode::MLFFsys) spec.solvated = false;
    const AtomicSystem sys = generate_polyalanine(spec);

    std::optional<CffParams> cff;
    if (mode != SimMode::MLFFsys) cff = assign_default_params(sys);
    std::shared_ptr<const ForceProvider> mlff;
    if (mode != SimMode::CFFsys) {
        switch (config.model) {
            case ModelChoice::Ani:
                mlff = std::make_shared<AniProvider>(bench_nnp_model(config), config.aev, config.strategies.front());
                break;
            case ModelChoice::Et: mlff = std::make_shared<EtProvider>(bench_et_model(config)); break;
            case ModelChoice::Cff: throw ConfigError(std::string(to_string(mode)) + " needs model ani or et");
        }
    }
    const auto provider = compose_forces(mode, sys, cff ? &*cff : nullptr, mlff);

    MdReport rep;
    rep.mode = mode;
    rep.provider = provider->name();
    rep.atoms = sys.size();
    rep.solute_atoms = sys.count(Role::Solute);
    rep.environment = describe_environment(config.deterministic);
    rep.stats = integrate(sys, *provider, config.sim);
    return rep;
}

void write_md_json(std::ostream& out, const MdReport& r) {
    json j;
    j["schema_version"] = TimingReport::kSchemaVersion;
    j["mode"] = std::string(to_string(r.mode));
    j["provider"] = r.provider;
    j["atoms"] = r.atoms;
    j["solute_atoms"] = r.solute_atoms;
    j["environment"] = environment_json(r.environment);
    j["trajectory"] = stats_json(r.stats);
    out << j.dump(2) << '\n';
}

void write_energy_csv(std::ostream& out, const TrajectoryStats& s) {
    out << "step,potential,kinetic,total\n";
    out.precision(17);
    for (std::size_t k = 0; k < s.total.size(); ++k) {
        out << k << ',' << s.potential[k] << ',' << s.kinetic[k] << ',' << s.total[k] << '\n';
    }
}

RatioReport cmd_ratio(const BenchConfig& config) {
    config.validate();
    WorkloadSpec spec = config.workload;
    if (!config.sizes.empty()) spec.residues = config.sizes.front();
    const auto sys = generate_polyalanine(spec);
    const auto cff = assign_default_params(sys);
    return mlff_vs_cff_ratio(sys, cff, *bench_nnp_model(config), config.aev);
}

void write_ratio_json(std::ostream& out, const RatioReport& r) {
    json j;
    j["schema_version"] = TimingReport::kSchemaVersion;
    j["atoms"] = r.atoms;
    j["ensemble_size"] = r.ensemble_size;
    j["cff_pairs"] = r.cff_pairs;
    j["cff_nonbonded_ops"] = r.cff_nonbonded_ops;
    j["cff_bonded_ops"] = r.cff_bonded_ops;
    j["aev_ops"] = r.aev_ops;
    j["nnp_ops"] = r.nnp_ops;
    j["ani_ops"] = r.ani_ops();
    if (const auto q = r.ratio()) {
        j["ratio"] = *q;
    } else {
        j["ratio"] = nullptr;
    }
    if (const auto q = r.ratio_total()) {
        j["ratio_vs_all_cff_terms"] = *q;
    } else {
        j["ratio_vs_all_cff_terms"] = nullptr;
    }
    out << j.dump(2) << '\n';
}

}  // namespace mlff
