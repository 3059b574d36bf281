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

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mlff {

using Index = std::int32_t;

/// N x 3 coordinate block, one atom per row.
template <typename Scalar>
using Coords = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Coords3d = Coords<double>;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXd = RowMatrix<double>;

using Vec3 = Eigen::Vector3d;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two atoms (or a pair and a triplet leg) closer than the numerical floor.
class SingularityError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class UnsupportedSpeciesError : public Error {
public:
    using Error::Error;
};

/// A backward pass was requested against a tape recorded for other inputs.
class StaleTapeError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    DivergenceError(std::int64_t step, const std::string& what)
        : Error("diverged at step " + std::to_string(step) + ": " + what), step_(step) {}
    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

/// Distances below this are treated as coincident atoms.
inline constexpr double kMinSeparation = 1e-6;

}  // namespace mlff
