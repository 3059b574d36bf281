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
#include "mlff/random.hpp"
#include "mlff/system.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace mlff::testing {

inline Eigen::Matrix3d random_rotation(Rng& rng) {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    return q.toRotationMatrix();
}

/// Five-point central difference of -dE/dx for every coordinate.
template <typename EnergyFn>
Coords3d fd_forces(const AtomicSystem& s, EnergyFn&& energy, double h = 1e-4) {
    AtomicSystem w = s;
    Coords3d f(s.positions.rows(), 3);
    for (Eigen::Index i = 0; i < s.positions.rows(); ++i) {
        for (int d = 0; d < 3; ++d) {
            const double x = s.positions(i, d);
            auto at = [&](double dx) {
                w.positions(i, d) = x + dx;
                return energy(w);
            };
            const double e1 = at(h) - at(-h);
            const double e2 = at(2 * h) - at(-2 * h);
            w.positions(i, d) = x;
            f(i, d) = -(8.0 * e1 - e2) / (12.0 * h);
        }
    }
    return f;
}

/// max |a - b| / max |b|.
inline double rel_max_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = b.cwiseAbs().maxCoeff();
    const double err = (a - b).cwiseAbs().maxCoeff();
    return scale > 0 ? err / scale : err;
}

inline double min_distance(const Coords3d& x) {
    double best = INFINITY;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = i + 1; j < x.rows(); ++j) best = std::min(best, (x.row(i) - x.row(j)).norm());
    return best;
}

}  // namespace mlff::testing
