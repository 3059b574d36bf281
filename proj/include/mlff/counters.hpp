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

#include <cstdint>
#include <map>
#include <string>

namespace mlff {

/// Operation and traffic tallies for one pipeline stage. Kernels accept a
/// nullable OpCounters*; passing nullptr disables counting.
struct OpCounters {
    std::uint64_t flops_add = 0;
    std::uint64_t flops_mul = 0;  // includes divisions
    std::uint64_t transcendental_ops = 0;  // exp, log, sqrt, cos, sin, atan2, pow
    std::uint64_t gather_ops = 0;
    std::uint64_t scatter_ops = 0;
    std::uint64_t macs = 0;      // multiply-accumulates inside dense matrix products
    std::uint64_t sf_terms = 0;  // symmetry-function term evaluations
    std::uint64_t bytes_read = 0;
    std::uint64_t bytes_written = 0;

    std::uint64_t flops() const noexcept { return flops_add + flops_mul; }
    /// Arithmetic plus transcendental evaluations, each counted once.
    std::uint64_t combined() const noexcept { return flops() + transcendental_ops; }
    std::uint64_t bytes() const noexcept { return bytes_read + bytes_written; }

    void reset() noexcept { *this = OpCounters{}; }

    OpCounters& operator+=(const OpCounters& o) noexcept {
        flops_add += o.flops_add;
        flops_mul += o.flops_mul;
        transcendental_ops += o.transcendental_ops;
        gather_ops += o.gather_ops;
        scatter_ops += o.scatter_ops;
        macs += o.macs;
        sf_terms += o.sf_terms;
        bytes_read += o.bytes_read;
        bytes_written += o.bytes_written;
        return *this;
    }

    friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

/// Per-stage counters, keyed by stage name.
using StageCounters = std::map<std::string, OpCounters>;

/// Adds `n` repetitions of a fixed per-item cost to `c` when counting is on.
struct OpCost {
    std::uint64_t add = 0;
    std::uint64_t mul = 0;
    std::uint64_t trans = 0;
};

inline void tally(OpCounters* c, const OpCost& cost, std::uint64_t n) noexcept {
    if (c == nullptr) return;
    c->flops_add += cost.add * n;
    c->flops_mul += cost.mul * n;
    c->transcendental_ops += cost.trans * n;
}

}  // namespace mlff
