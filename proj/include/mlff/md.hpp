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
#include "mlff/potential.hpp"
#include "mlff/system.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mlff {

/// Boltzmann constant in kcal/(mol K).
inline constexpr double kBoltzmann = 0.0019872041;
/// (kcal/mol/A) / amu expressed in A/fs^2.
inline constexpr double kAccelUnit = 4.184e-4;

/// All-classical, ML solute in vacuum, and ML solute in classical solvent.
enum class SimMode { CFFsys, MLFFsys, CMLsys };

std::string_view to_string(SimMode mode);
/// Accepts "cff", "mlff", "cml" and the full names; throws ConfigError.
SimMode sim_mode_from_string(std::string_view s);

/// Energy and forces for a system. With `mask`, a provider restricts itself to
/// the selected atoms (ML models evaluate only the masked atoms; the classical
/// model keeps terms touching at least one masked atom). Forces always have one
/// row per atom of `system`.
class ForceProvider {
public:
    virtual ~ForceProvider() = default;
    virtual PotentialResult evaluate(const AtomicSystem& system, const std::vector<bool>* mask = nullptr) const = 0;
    virtual std::string name() const = 0;
};

/// Classical force field; neighbor search is rebuilt on every call.
class CffProvider final : public ForceProvider {
public:
    explicit CffProvider(CffParams params) : params_(std::move(params)) {}
    PotentialResult evaluate(const AtomicSystem& system, const std::vector<bool>* mask = nullptr) const override;
    std::string name() const override { return "cff"; }
    const CffParams& params() const noexcept { return params_; }

private:
    CffParams params_;
};

/// Descriptor + element networks. Stages: "neighbors", "aev_forward",
/// "energy_forward", "force_backward".
class AniProvider final : public ForceProvider {
public:
    AniProvider(std::shared_ptr<const NnpModel> model, AevParams params = AevParams::defaults(),
                AevStrategy strategy = AevStrategy::Fused);
    PotentialResult evaluate(const AtomicSystem& system, const std::vector<bool>* mask = nullptr) const override;
    std::string name() const override { return "ani"; }

private:
    std::shared_ptr<const NnpModel> model_;
    AevParams params_;
    AevStrategy strategy_;
};

/// Equivariant transformer. Stages: "neighbors", "et_forward", "et_backward".
class EtProvider final : public ForceProvider {
public:
    explicit EtProvider(std::shared_ptr<const EtParams> params);
    PotentialResult evaluate(const AtomicSystem& system, const std::vector<bool>* mask = nullptr) const override;
    std::string name() const override { return "et"; }

private:
    std::shared_ptr<const EtParams> params_;
};

/// Sum of providers, each with its own fixed atom mask.
class CompositeProvider final : public ForceProvider {
public:
    struct Part {
        std::shared_ptr<const ForceProvider> provider;
        std::vector<bool> mask;  // empty: all atoms
    };
    explicit CompositeProvider(std::vector<Part> parts) : parts_(std::move(parts)) {}
    PotentialResult evaluate(const AtomicSystem& system, const std::vector<bool>* mask = nullptr) const override;
    std::string name() const override;

private:
    std::vector<Part> parts_;
};

/// CFFsys: classical over all atoms. MLFFsys: the ML model over the solute
/// atoms (pass the solute alone for a vacuum run). CMLsys: the ML model over
/// the solute plus every classical term touching a solvent atom; requires a
/// solvated system (one with a box) and throws ConfigError otherwise.
/// `cff` is required for CFFsys and CMLsys, `mlff` for MLFFsys and CMLsys.
std::shared_ptr<const ForceProvider> compose_forces(SimMode mode, const AtomicSystem& system, const CffParams* cff,
                                                    std::shared_ptr<const ForceProvider> mlff);

struct SimConfig {
    SimMode mode = SimMode::CFFsys;
    double dt = 0.5;  // fs
    int steps = 1000;
    /// Steps excluded from timing; clamped to steps - 1 so a one-step run is
    /// still timed.
    int warmup_steps = 10;
    double temperature = 300.0;  // K
    std::uint64_t seed = 42;
    /// Write an extended-XYZ frame every `dump_every` steps to `dump` (0: off).
    int dump_every = 0;
    std::ostream* dump = nullptr;

    void validate() const;
    int effective_warmup() const noexcept;
};

struct TrajectoryStats {
    int steps = 0;
    int timed_steps = 0;
    double dt = 0.0;
    double elapsed_seconds = 0.0;                 // timed steps only
    std::map<std::string, double> stage_seconds;  // timed steps only
    std::vector<double> potential, kinetic, total;  // step 0 (initial state) .. steps
    double ns_per_day = 0.0;
    StageCounters counters;  // last step
    Coords3d final_positions;
    Coords3d final_velocities;
};

/// Total-energy conservation of a trajectory. `secular` is the least-squares
/// slope of E_total against step times the number of steps, i.e. the trend
/// over the run; `max_deviation` is max |E_total - E_total(0)|, which also
/// contains the bounded oscillation of the integrator. Both are absolute
/// (kcal/mol); divide by |E_total(0)| for relative values.
struct EnergyDrift {
    double secular = 0.0;
    double max_deviation = 0.0;
    double initial = 0.0;
};
EnergyDrift energy_drift(const std::vector<double>& total);

/// steps * dt * 86400 / (1e6 * seconds), dt in fs.
double ns_per_day(double steps, double dt_fs, double seconds);

/// Seeded Maxwell-Boltzmann velocities (A/fs) with the center-of-mass motion
/// removed. Zero temperature gives zero velocities.
Coords3d maxwell_boltzmann(const Eigen::VectorXd& masses, double temperature, std::uint64_t seed);

double kinetic_energy(const Eigen::VectorXd& masses, const Coords3d& velocities);

/// NVE velocity Verlet. Throws DivergenceError naming the step when energy,
/// forces or positions become non-finite.
TrajectoryStats integrate(const AtomicSystem& system, const ForceProvider& provider, const SimConfig& config);

/// Same, starting from the given velocities.
TrajectoryStats integrate(const AtomicSystem& system, const Coords3d& velocities, const ForceProvider& provider,
                          const SimConfig& config);

}  // namespace mlff
