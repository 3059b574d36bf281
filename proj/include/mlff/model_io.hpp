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

#include "mlff/et.hpp"
#include "mlff/nnp.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace mlff {

// Binary model container, all fields little-endian:
//
//   char[8]  magic "MLFFMDL\0"
//   u32      format version (1)
//   u32      type tag: 1 = element MLP ensemble, 2 = equivariant transformer
//   ...      payload (see model_io.cpp)
//
// Matrices are stored row-major as f64.

inline constexpr std::uint32_t kModelFormatVersion = 1;

enum class ModelKind : std::uint32_t { ElementMlp = 1, EquivariantTransformer = 2 };

void save_model(std::ostream& out, const NnpModel& model);
void save_model(std::ostream& out, const EtParams& params);
NnpModel load_nnp_model(std::istream& in);
EtParams load_et_model(std::istream& in);

/// Reads only the header and returns the type tag.
ModelKind peek_model_kind(std::istream& in);

void save_model(const std::filesystem::path& path, const NnpModel& model);
void save_model(const std::filesystem::path& path, const EtParams& params);
NnpModel load_nnp_model(const std::filesystem::path& path);
EtParams load_et_model(const std::filesystem::path& path);

}  // namespace mlff
