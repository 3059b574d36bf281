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

#include "mlff/element.hpp"

namespace mlff {

namespace {

struct ElementData {
    std::string_view symbol;
    int z;
    double mass;
    double covalent_radius;
};

constexpr std::array<ElementData, kNumElements> kTable = {{
    {"H", 1, 1.008, 0.31},
    {"C", 6, 12.011, 0.76},
    {"N", 7, 14.007, 0.71},
    {"O", 8, 15.999, 0.66},
    {"S", 16, 32.06, 1.05},
    {"F", 9, 18.998, 0.57},
    {"Cl", 17, 35.45, 1.02},
}};

}  // namespace

std::string_view symbol(Element e) noexcept { return kTable[index_of(e)].symbol; }
int atomic_number(Element e) noexcept { return kTable[index_of(e)].z; }
double mass(Element e) noexcept { return kTable[index_of(e)].mass; }
double covalent_radius(Element e) noexcept { return kTable[index_of(e)].covalent_radius; }

std::optional<Element> element_from_symbol(std::string_view s) noexcept {
    for (int k = 0; k < kNumElements; ++k) {
        if (kTable[k].symbol == s) return static_cast<Element>(k);
    }
    return std::nullopt;
}

std::optional<Element> element_from_number(int z) noexcept {
    for (int k = 0; k < kNumElements; ++k) {
        if (kTable[k].z == z) return static_cast<Element>(k);
    }
    return std::nullopt;
}

}  // namespace mlff
