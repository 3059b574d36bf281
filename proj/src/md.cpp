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

#include "mlff/md.hpp"

#include "mlff/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace mlff {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Index> selected(const std::vector<bool>* mask, std::size_t n) {
    std::vector<Index> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (mask == nullptr || (*mask)[i]) idx.push_back(static_cast<Index>(i));
    return idx;
}

void check_mask(const std::vector<bool>* mask, std::size_t n) {
    if (mask && mask->size() != n) throw ConfigError("atom mask length does not match the system");
}

/// Scatters a result computed on a subset back onto the full system.
PotentialResult expand(PotentialResult sub, const std::vector<Index>& idx, std::size_t n) {
    if (idx.size() == n) return sub;
    PotentialResult full = PotentialResult::zeros(n);
    full.energy = sub.energy;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        full.atomic_energies[idx[k]] = sub.atomic_energies[r];
        full.forces.row(idx[k]) = sub.forces.row(r);
    }
    full.counters = std::move(sub.counters);
    full.stage_seconds = std::move(sub.stage_seconds);
    return full;
}

}  // namespace

std::string_view to_string(SimMode mode) {
    switch (mode) {
        case SimMode::CFFsys: return "CFFsys";
        case SimMode::MLFFsys: return "MLFFsys";
        case SimMode::CMLsys: return "CMLsys";
    }
    return "?";
}

SimMode sim_mode_from_string(std::string_view s) {
    if (s == "cff" || s == "CFFsys") return SimMode::CFFsys;
    if (s == "mlff" || s == "MLFFsys") return SimMode::MLFFsys;
    if (s == "cml" || s == "CMLsys") return SimMode::CMLsys;
    throw ConfigError("unknown simulation mode '" + std::string(s) + "'");
}

PotentialResult CffProvider::evaluate(const AtomicSystem& system, const std::vector<bool>* mask) const {
    check_mask(mask, system.size());
    auto t0 = Clock::now();
    OpCounters nc;
    const auto pairs = build_pairs_celllist(system, params_.cutoff, &nc);
    const double t_pairs = seconds_since(t0);
    t0 = Clock::now();
    CffOptions opt;
    opt.active = mask;
    auto res = cff_energy_forces(system, params_, pairs, opt);
    res.stage_seconds["cff"] += seconds_since(t0);
    res.stage_seconds["cff_neighbors"] += t_pairs;
    res.counters["cff_neighbors"] += nc;
    return res;
}

AniProvider::AniProvider(std::shared_ptr<const NnpModel> model, AevParams params, AevStrategy strategy)
    : model_(std::move(model)), params_(std::move(params)), strategy_(strategy) {
    if (!model_) throw ConfigError("missing network model");
    params_.validate();
    model_->validate();
    if (static_cast<std::size_t>(model_->widths.front()) != params_.width()) {
        throw ConfigError("network input width does not match the descriptor width");
    }
}

PotentialResult AniProvider::evaluate(const AtomicSystem& system, const std::vector<bool>* mask) const {
    check_mask(mask, system.size());
    const auto idx = selected(mask, system.size());
    const AtomicSystem sub = idx.size() == system.size() ? system : system.subset(idx);
    PotentialResult res;
    if (sub.empty()) return PotentialResult::zeros(system.size());

    auto t0 = Clock::now();
    const auto nb = build_aev_neighbors(sub, params_, &res.counters);
    res.stage_seconds["neighbors"] = seconds_since(t0);

    t0 = Clock::now();
    const auto desc = compute_aev(sub, nb, params_, strategy_, &res.counters);
    res.stage_seconds["aev_forward"] = seconds_since(t0);

    t0 = Clock::now();
    const auto net = nnp_energy(desc.aev, sub.species, *model_, &res.counters["nnp_forward"]);
    res.stage_seconds["energy_forward"] = seconds_since(t0);

    t0 = Clock::now();
    const RowMatrixXd grad = nnp_backward(net.tape, *model_, &res.counters["nnp_backward"]);
    res.forces = aev_backward(desc.tape, grad, sub.positions, &res.counters["aev_backward"]);
    res.stage_seconds["force_backward"] = seconds_since(t0);

    res.energy = net.energy;
    res.atomic_energies = net.atomic_energies;
    return expand(std::move(res), idx, system.size());
}

EtProvider::EtProvider(std::shared_ptr<const EtParams> params) : params_(std::move(params)) {
    if (!params_) throw ConfigError("missing transformer parameters");
    params_->validate();
}

PotentialResult EtProvider::evaluate(const AtomicSystem& system, const std::vector<bool>* mask) const {
    check_mask(mask, system.size());
    const auto idx = selected(mask, system.size());
    const AtomicSystem sub = idx.size() == system.size() ? system : system.subset(idx);
    PotentialResult res;
    if (sub.empty()) return PotentialResult::zeros(system.size());

    auto t0 = Clock::now();
    const auto pairs = build_pairs_celllist(sub, params_->config.cutoff, &res.counters["neighbors"]);
    res.stage_seconds["neighbors"] = seconds_since(t0);

    t0 = Clock::now();
    const auto out = et_energy(sub, pairs, *params_, &res.counters);
    res.stage_seconds["et_forward"] = seconds_since(t0);

    t0 = Clock::now();
    res.forces = et_forces(out.tape, *params_, sub.positions, &res.counters);
    res.stage_seconds["et_backward"] = seconds_since(t0);

    res.energy = out.energy;
    res.atomic_energies = out.atomic_energies;
    return expand(std::move(res), idx, system.size());
}

PotentialResult CompositeProvider::evaluate(const AtomicSystem& system, const std::vector<bool>* mask) const {
    check_mask(mask, system.size());
    PotentialResult total = PotentialResult::zeros(system.size());
    for (const auto& part : parts_) {
        std::vector<bool> m = part.mask.empty() ? std::vector<bool>(system.size(), true) : part.mask;
        check_mask(&m, system.size());
        if (mask)
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = m[i] && (*mask)[i];
        total += part.provider->evaluate(system, &m);
    }
    return total;
}

std::string CompositeProvider::name() const {
    std::string s;
    for (const auto& p : parts_) s += (s.empty() ? "" : "+") + p.provider->name();
    return s;
}

std::shared_ptr<const ForceProvider> compose_forces(SimMode mode, const AtomicSystem& system, const CffParams* cff,
                                                    std::shared_ptr<const ForceProvider> mlff) {
    const auto n = system.size();
    std::vector<bool> solute(n), solvent(n);
    for (std::size_t i = 0; i < n; ++i) {
        solute[i] = system.roles[i] == Role::Solute;
        solvent[i] = !solute[i];
    }
    auto need_cff = [&] {
        if (cff == nullptr) throw ConfigError(std::string(to_string(mode)) + " needs classical parameters");
        cff->validate(n);
        return std::make_shared<CffProvider>(*cff);
    };
    auto need_mlff = [&] {
        if (!mlff) throw ConfigError(std::string(to_string(mode)) + " needs a machine-learned model");
        return mlff;
    };
    switch (mode) {
        case SimMode::CFFsys: return need_cff();
        case SimMode::MLFFsys:
            return std::make_shared<CompositeProvider>(std::vector<CompositeProvider::Part>{{need_mlff(), solute}});
        case SimMode::CMLsys: {
            if (!system.box) throw ConfigError("CMLsys needs a solvated system");
            return std::make_shared<CompositeProvider>(
                std::vector<CompositeProvider::Part>{{need_mlff(), solute}, {need_cff(), solvent}});
        }
    }
    throw ConfigError("unknown simulation mode");
}

void SimConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
    if (steps < 1) throw ConfigError("at least one step is required");
    if (warmup_steps < 0) throw ConfigError("warmup steps must be non-negative");
    if (!(temperature >= 0.0)) throw ConfigError("temperature must be non-negative");
    if (dump_every < 0) throw ConfigError("dump interval must be non-negative");
}

int SimConfig::effective_warmup() const noexcept { return std::min(warmup_steps, steps - 1); }

double ns_per_day(double steps, double dt_fs, double seconds) {
    return steps * dt_fs * 86400.0 / (seconds * 1e6);
}

EnergyDrift energy_drift(const std::vector<double>& total) {
    EnergyDrift d;
    if (total.empty()) return d;
    d.initial = total.front();
    const auto n = static_cast<double>(total.size());
    double mean_t = 0.0, mean_e = 0.0;
    for (std::size_t k = 0; k < total.size(); ++k) {
        mean_t += static_cast<double>(k) / n;
        mean_e += total[k] / n;
        d.max_deviation = std::max(d.max_deviation, std::abs(total[k] - d.initial));
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < total.size(); ++k) {
        const double dt = static_cast<double>(k) - mean_t;
        sxy += dt * (total[k] - mean_e);
        sxx += dt * dt;
    }
    if (sxx > 0.0) d.secular = std::abs(sxy / sxx) * (n - 1.0);
    return d;
}

Coords3d maxwell_boltzmann(const Eigen::VectorXd& masses, double temperature, std::uint64_t seed) {
    const auto n = masses.size();
    Coords3d v = Coords3d::Zero(n, 3);
    if (n == 0 || temperature <= 0.0) return v;
    Rng rng(derive_seed(seed, 31337));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sigma = std::sqrt(kBoltzmann * temperature / masses[i] * kAccelUnit);
        for (int d = 0; d < 3; ++d) v(i, d) = sigma * rng.normal();
    }
    const Vec3 p = (v.array().colwise() * masses.array()).colwise().sum().transpose();
    const Vec3 vcom = p / masses.sum();
    v.rowwise() -= vcom.transpose();
    return v;
}

double kinetic_energy(const Eigen::VectorXd& masses, const Coords3d& velocities) {
    return 0.5 * (velocities.rowwise().squaredNorm().array() * masses.array()).sum() / kAccelUnit;
}

TrajectoryStats integrate(const AtomicSystem& system, const ForceProvider& provider, const SimConfig& config) {
    return integrate(system, maxwell_boltzmann(system.masses(), config.temperature, config.seed), provider, config);
}

TrajectoryStats integrate(const AtomicSystem& system, const Coords3d& velocities, const ForceProvider& provider,
                          const SimConfig& config) {
    config.validate();
    if (velocities.rows() != static_cast<Eigen::Index>(system.size())) {
        throw ConfigError("velocity count does not match the system");
    }
    if (!system.positions.allFinite() || !velocities.allFinite()) throw ConfigError("initial state is not finite");

    const Eigen::VectorXd masses = system.masses();
    const Eigen::VectorXd accel_scale = masses.cwiseInverse() * kAccelUnit;
    const double dt = config.dt;
    const int warmup = config.effective_warmup();

    AtomicSystem state = system;
    Coords3d v = velocities;
    TrajectoryStats stats;
    stats.steps = config.steps;
    stats.timed_steps = config.steps - warmup;
    stats.dt = dt;

    auto check = [](const PotentialResult& r, int step) {
        if (!std::isfinite(r.energy)) throw DivergenceError(step, "non-finite energy");
        if (!r.forces.allFinite()) throw DivergenceError(step, "non-finite forces");
    };
    auto record = [&](const PotentialResult& r) {
        const double ke = kinetic_energy(masses, v);
        stats.potential.push_back(r.energy);
        stats.kinetic.push_back(ke);
        stats.total.push_back(r.energy + ke);
    };
    auto dump = [&](int step) {
        if (config.dump == nullptr || config.dump_every == 0 || step % config.dump_every != 0) return;
        format_system(*config.dump, state, "step=" + std::to_string(step));
    };

    PotentialResult res = provider.evaluate(state);
    check(res, 0);
    record(res);
    dump(0);

    for (int step = 1; step <= config.steps; ++step) {
        const auto t_step = Clock::now();
        auto t0 = Clock::now();
        v += 0.5 * dt * (res.forces.array().colwise() * accel_scale.array()).matrix();
        state.positions += dt * v;
        if (!state.positions.allFinite()) throw DivergenceError(step, "non-finite positions");
        double t_int = seconds_since(t0);

        t0 = Clock::now();
        res = provider.evaluate(state);
        const double t_force = seconds_since(t0);
        check(res, step);

        t0 = Clock::now();
        v += 0.5 * dt * (res.forces.array().colwise() * accel_scale.array()).matrix();
        t_int += seconds_since(t0);
        const double t_total = seconds_since(t_step);

        record(res);
        dump(step);
        if (step > warmup) {
            stats.elapsed_seconds += t_total;
            double inside = 0.0;
            for (const auto& [name, t] : res.stage_seconds) {
                stats.stage_seconds[name] += t;
                inside += t;
            }
            stats.stage_seconds["integrate"] += t_int;
            stats.stage_seconds["force_other"] += std::max(0.0, t_force - inside);
        }
    }
    stats.counters = std::move(res.counters);
    stats.ns_per_day = stats.elapsed_seconds > 0.0 ? ns_per_day(stats.timed_steps, dt, stats.elapsed_seconds) : 0.0;
    stats.final_positions = std::move(state.positions);
    stats.final_velocities = std::move(v);
    return stats;
}

}  // namespace mlff
