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

#include <map>
#include <string>

namespace mlff {

/// Energy (kcal/mol), per-atom energies and forces (kcal/mol/A) from any of
/// the force models, with the operation tallies and stage timings of the call.
struct PotentialResult {
    double energy = 0.0;
    Eigen::VectorXd atomic_energies;
    Coords3d forces;
    StageCounters counters;
    std::map<std::string, double> stage_seconds;

    OpCounters total_ops() const {
        OpCounters t;
        for (const auto& [name, c] : counters) t += c;
        return t;
    }

    static PotentialResult zeros(std::size_t n) {
        PotentialResult r;
        r.atomic_energies = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        r.forces = Coords3d::Zero(static_cast<Eigen::Index>(n), 3);
        return r;
    }

    /// Adds energies, forces, tallies and timings of `o` (same atom count).
    PotentialResult& operator+=(const PotentialResult& o) {
        energy += o.energy;
        atomic_energies += o.atomic_energies;
        forces += o.forces;
        for (const auto& [name, c] : o.counters) counters[name] += c;
        for (const auto& [name, t] : o.stage_seconds) stage_seconds[name] += t;
        return *this;
    }
};

}  // namespace mlff
