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
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mlff {

struct CheckResult {
    std::string name;
    double tolerance = 0.0;
    double value = 0.0;  // measured error or statistic compared with tolerance
    bool passed = false;
    std::string detail;
};

struct VerifySummary {
    static constexpr int kSchemaVersion = 1;
    std::vector<CheckResult> checks;

    bool all_passed() const noexcept;
};

struct VerifyOptions {
    std::uint64_t seed = 2024;
    /// Test fixture: scales the descriptor adjoint by (1 + this). Any nonzero
    /// value large enough must make the gradient check fail.
    double adjoint_perturbation = 0.0;
    /// Called after each check, for progress output.
    std::function<void(const CheckResult&)> on_check;
};

/// Gradients, invariances, neighbor equivalence, staged versus fused
/// descriptors, counter formulas and integrator sanity on small seeded
/// systems.
VerifySummary run_verification(const VerifyOptions& options = {});

void write_verify_json(std::ostream& out, const VerifySummary& summary);

}  // namespace mlff
