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
#include "mlff/element.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mlff {

enum class Role : std::uint8_t { Solute, Solvent };

/// Axis-aligned bounds in Angstrom.
struct Box {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    bool contains(const Vec3& p) const noexcept {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
    Vec3 extent() const { return hi - lo; }
};

/// A finite cluster of atoms. Positions in Angstrom, one row per atom.
struct AtomicSystem {
    std::vector<Element> species;
    Coords3d positions;
    std::vector<Role> roles;
    std::optional<Box> box;

    std::size_t size() const noexcept { return species.size(); }
    bool empty() const noexcept { return species.empty(); }

    /// Throws ConfigError if the per-atom arrays disagree, a coordinate is
    /// not finite, or an atom lies outside the box.
    void validate() const;

    std::size_t count(Role role) const;
    std::vector<Index> indices_with(Role role) const;
    Eigen::VectorXd masses() const;

    /// Atoms at the given indices, in that order. The box is dropped.
    AtomicSystem subset(std::span<const Index> indices) const;
};

/// Atoms of `a` followed by atoms of `b`; the box is dropped.
AtomicSystem concatenate(const AtomicSystem& a, const AtomicSystem& b);

/// Applies x -> R x + t to every position (and drops the box).
AtomicSystem transformed(const AtomicSystem& s, const Eigen::Matrix3d& rotation, const Vec3& shift);

enum class Geometry : std::uint8_t { Helix, Compact };

struct WorkloadSpec {
    int residues = 10;
    Geometry geometry = Geometry::Helix;
    /// Terminal cap atoms appended after the residues: N-terminal H, then the
    /// C-terminal O and its H. Valid range 0..3.
    int caps = 3;
    bool solvated = false;
    double water_density = 0.0334;  // molecules / A^3
    double exclusion_radius = 2.4;  // A
    double padding = 10.0;          // A
    std::uint64_t seed = 42;

    void validate() const;
};

inline constexpr int kAlanineAtoms = 10;

/// Poly-alanine chain with 10 * residues + caps solute atoms, optionally
/// solvated. Deterministic for a fixed spec.
AtomicSystem generate_polyalanine(const WorkloadSpec& spec);

/// Fills the solute bounding box (grown by `padding`) with rigid waters on a
/// jittered cubic lattice, skipping any site with an atom inside
/// `exclusion_radius` of an existing atom. Sets the box.
AtomicSystem solvate(const AtomicSystem& system, double density, double exclusion_radius,
                     double padding, std::uint64_t seed);

/// `n` atoms drawn from H, C, N, O with uniform positions in a cube sized for
/// `density` (atoms / A^3), rejecting draws closer than `min_separation` to an
/// earlier atom. All solute, no box. Throws ConfigError if the cube is too
/// crowded to place every atom.
AtomicSystem random_cluster(std::size_t n, double density, std::uint64_t seed, double min_separation = 0.9);

/// Residue counts 10, 20, ..., 100, 200, ..., 1000.
std::vector<int> default_sweep_residues();

// Extended-XYZ text: count line, comment line, then "symbol x y z role".
// The comment may carry "box=lox loy loz hix hiy hiz".

class ParseError : public Error {
public:
    enum class Kind { Malformed, UnknownElement, CountMismatch };

    ParseError(Kind kind, std::size_t line, const std::string& what);
    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

AtomicSystem parse_system(std::istream& in);
void format_system(std::ostream& out, const AtomicSystem& system, const std::string& comment = "");

AtomicSystem read_system(const std::filesystem::path& path);
void write_system(const AtomicSystem& system, const std::filesystem::path& path,
                  const std::string& comment = "");

}  // namespace mlff
