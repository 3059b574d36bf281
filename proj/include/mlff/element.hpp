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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mlff {

/// Supported chemical elements, in descriptor block order.
enum class Element : std::uint8_t { H = 0, C, N, O, S, F, Cl };

inline constexpr int kNumElements = 7;

inline constexpr std::array<Element, kNumElements> kAllElements = {
    Element::H, Element::C, Element::N, Element::O, Element::S, Element::F, Element::Cl};

constexpr int index_of(Element e) noexcept { return static_cast<int>(e); }

std::string_view symbol(Element e) noexcept;
int atomic_number(Element e) noexcept;
/// Atomic mass in amu.
double mass(Element e) noexcept;
/// Single-bond covalent radius in Angstrom, used for connectivity perception.
double covalent_radius(Element e) noexcept;

std::optional<Element> element_from_symbol(std::string_view s) noexcept;
std::optional<Element> element_from_number(int z) noexcept;

}  // namespace mlff
