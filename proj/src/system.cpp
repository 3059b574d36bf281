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

#include "mlff/system.hpp"

#include "mlff/random.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace mlff {

void AtomicSystem::validate() const {
    const auto n = species.size();
    if (static_cast<std::size_t>(positions.rows()) != n || roles.size() != n) {
        throw ConfigError("atomic system arrays disagree in length");
    }
    if (!positions.allFinite()) throw ConfigError("atomic system has non-finite coordinates");
    if (box) {
        for (Eigen::Index i = 0; i < positions.rows(); ++i) {
            if (!box->contains(positions.row(i).transpose())) {
                throw ConfigError("atom " + std::to_string(i) + " lies outside the box");
            }
        }
    }
}

std::size_t AtomicSystem::count(Role role) const {
    return static_cast<std::size_t>(std::count(roles.begin(), roles.end(), role));
}

std::vector<Index> AtomicSystem::indices_with(Role role) const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < roles.size(); ++i) {
        if (roles[i] == role) out.push_back(static_cast<Index>(i));
    }
    return out;
}

Eigen::VectorXd AtomicSystem::masses() const {
    Eigen::VectorXd m(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) m[static_cast<Eigen::Index>(i)] = mass(species[i]);
    return m;
}

AtomicSystem AtomicSystem::subset(std::span<const Index> indices) const {
    AtomicSystem out;
    out.species.reserve(indices.size());
    out.roles.reserve(indices.size());
    out.positions.resize(static_cast<Eigen::Index>(indices.size()), 3);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const auto i = static_cast<std::size_t>(indices[k]);
        out.species.push_back(species[i]);
        out.roles.push_back(roles[i]);
        out.positions.row(static_cast<Eigen::Index>(k)) = positions.row(static_cast<Eigen::Index>(i));
    }
    return out;
}

AtomicSystem concatenate(const AtomicSystem& a, const AtomicSystem& b) {
    AtomicSystem out;
    out.species = a.species;
    out.species.insert(out.species.end(), b.species.begin(), b.species.end());
    out.roles = a.roles;
    out.roles.insert(out.roles.end(), b.roles.begin(), b.roles.end());
    out.positions.resize(a.positions.rows() + b.positions.rows(), 3);
    out.positions << a.positions, b.positions;
    return out;
}

AtomicSystem transformed(const AtomicSystem& s, const Eigen::Matrix3d& rotation, const Vec3& shift) {
    AtomicSystem out = s;
    out.box.reset();
    out.positions = (s.positions * rotation.transpose()).rowwise() + shift.transpose();
    return out;
}

void WorkloadSpec::validate() const {
    if (residues < 1) throw ConfigError("workload needs at least one residue");
    if (caps < 0 || caps > 3) throw ConfigError("caps must be in 0..3");
    if (solvated && !(water_density > 0.0)) throw ConfigError("water density must be positive");
    if (!(exclusion_radius > 0.0)) throw ConfigError("exclusion radius must be positive");
    if (padding < 0.0) throw ConfigError("padding must be non-negative");
}

namespace {

// Alanine residue on an ideal alpha helix (rise 1.5 A, twist 100 deg), in the
// frame where C-alpha sits at (2.3, 0, 0). Backbone bond lengths N-CA 1.458,
// CA-C 1.525, C-N' 1.329 A; side chain and hydrogens tetrahedral.
// Order: N, H, CA, HA, CB, HB1, HB2, HB3, C, O.
struct TemplateAtom {
    Element element;
    Vec3 position;
};

const std::array<TemplateAtom, kAlanineAtoms>& alanine_template() {
    static const std::array<TemplateAtom, kAlanineAtoms> atoms = {{
        {Element::N, {1.384034, -0.707291, -0.901759}},
        {Element::H, {1.392149, -0.480291, -1.885885}},
        {Element::C, {2.300000, 0.000000, 0.000000}},
        {Element::H, {2.927461, -0.728334, 0.513734}},
        {Element::C, {3.180738, 0.943920, -0.821106}},
        {Element::H, {3.454037, 1.806883, -0.213897}},
        {Element::H, {4.083765, 0.419420, -1.133424}},
        {Element::H, {2.632758, 1.278879, -1.701799}},
        {Element::C, {1.524273, 0.816625, 1.041166}},
        {Element::O, {1.867218, 0.853390, 2.220775}},
    }};
    return atoms;
}

constexpr int kTemplateN = 0;
constexpr int kTemplateCA = 2;
constexpr int kTemplateC = 8;

constexpr double kHelixRise = 1.5;
constexpr double kHelixTwistDeg = 100.0;

/// Helical screw operation applied `k` times (k may be fractional or negative).
Vec3 screw(const Vec3& p, double k) {
    const double angle = k * kHelixTwistDeg * std::numbers::pi / 180.0;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z() + k * kHelixRise};
}

// Compact folding layout: segments of kSegmentResidues stacked as columns on a
// square grid, layered along z.
constexpr int kSegmentResidues = 10;
constexpr double kColumnSpacing = 11.0;
constexpr double kLayerHeight = 20.0;

struct SegmentFrame {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Vec3 origin = Vec3::Zero();
};

std::vector<SegmentFrame> compact_frames(int segments) {
    int grid = 1;
    int layers = segments;
    for (;; ++grid) {
        layers = (segments + grid * grid - 1) / (grid * grid);
        if (grid * kColumnSpacing >= 0.8 * layers * kLayerHeight) break;
    }
    std::vector<SegmentFrame> frames;
    frames.reserve(static_cast<std::size_t>(segments));
    const double span = kHelixRise * (kSegmentResidues - 1);
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(1, 1) = -1.0;
    flip(2, 2) = -1.0;
    for (int s = 0; s < segments; ++s) {
        const int layer = s / (grid * grid);
        const int cell = s % (grid * grid);
        int row = cell / grid;
        int col = cell % grid;
        if (row % 2 == 1) col = grid - 1 - col;  // serpentine within a layer
        if (layer % 2 == 1) row = grid - 1 - row;
        SegmentFrame f;
        const bool down = (s % 2) == 1;
        f.rotation = down ? flip : Eigen::Matrix3d::Identity();
        f.origin = Vec3(col * kColumnSpacing, row * kColumnSpacing,
                        layer * kLayerHeight + (down ? span : 0.0));
        frames.push_back(f);
    }
    return frames;
}

}  // namespace

AtomicSystem generate_polyalanine(const WorkloadSpec& spec) {
    spec.validate();
    const auto& tmpl = alanine_template();
    const int n = spec.residues;

    AtomicSystem sys;
    const auto total = static_cast<Eigen::Index>(kAlanineAtoms * n + spec.caps);
    sys.positions.resize(total, 3);
    sys.species.reserve(static_cast<std::size_t>(total));
    sys.roles.assign(static_cast<std::size_t>(total), Role::Solute);

    std::vector<SegmentFrame> frames;
    if (spec.geometry == Geometry::Compact) {
        frames = compact_frames((n + kSegmentResidues - 1) / kSegmentResidues);
    }
    // Residue r in helix-local coordinates (k = local index along its helix) and
    // the frame mapping that helix into the lab.
    auto place = [&](int r, const Vec3& local_template_pos, double k_offset) -> Vec3 {
        if (spec.geometry == Geometry::Helix) return screw(local_template_pos, r + k_offset);
        const int seg = r / kSegmentResidues;
        const int k = r % kSegmentResidues;
        const auto& f = frames[static_cast<std::size_t>(seg)];
        return f.rotation * screw(local_template_pos, k + k_offset) + f.origin;
    };

    Eigen::Index row = 0;
    for (int r = 0; r < n; ++r) {
        for (const auto& atom : tmpl) {
            sys.species.push_back(atom.element);
            sys.positions.row(row++) = place(r, atom.position, 0.0).transpose();
        }
    }
    // Caps sit where the missing neighbouring residue's atoms would be.
    if (spec.caps >= 1) {
        const Vec3 n0 = sys.positions.row(kTemplateN).transpose();
        const Vec3 c_prev = place(0, tmpl[kTemplateC].position, -1.0);
        sys.species.push_back(Element::H);
        sys.positions.row(row++) = (n0 + 1.01 * (c_prev - n0).normalized()).transpose();
    }
    if (spec.caps >= 2) {
        const Eigen::Index last = kAlanineAtoms * (n - 1);
        const Vec3 c_last = sys.positions.row(last + kTemplateC).transpose();
        const Vec3 n_next = place(n - 1, tmpl[kTemplateN].position, 1.0);
        const Vec3 oxt = c_last + 1.33 * (n_next - c_last).normalized();
        sys.species.push_back(Element::O);
        sys.positions.row(row++) = oxt.transpose();
        if (spec.caps >= 3) {
            const Vec3 ca_next = place(n - 1, tmpl[kTemplateCA].position, 1.0);
            sys.species.push_back(Element::H);
            sys.positions.row(row++) = (oxt + 0.97 * (ca_next - n_next).normalized()).transpose();
        }
    }

    if (spec.solvated) {
        return solvate(sys, spec.water_density, spec.exclusion_radius, spec.padding, spec.seed);
    }
    return sys;
}

namespace {

/// Hash grid over a fixed point set for "anything within r?" queries.
class PointGrid {
public:
    PointGrid(const Coords3d& points, double cell) : cell_(cell) {
        for (Eigen::Index i = 0; i < points.rows(); ++i) add(points.row(i).transpose());
    }

    void add(const Vec3& p) {
        cells_[key(p)].push_back(points_.size());
        points_.push_back(p);
    }

    bool any_within(const Vec3& p, double radius) const {
        const auto c = coords(p);
        const double r2 = radius * radius;
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy)
                for (long dz = -1; dz <= 1; ++dz) {
                    auto it = cells_.find(pack(c[0] + dx, c[1] + dy, c[2] + dz));
                    if (it == cells_.end()) continue;
                    for (auto j : it->second) {
                        if ((points_[j] - p).squaredNorm() < r2) return true;
                    }
                }
        return false;
    }

private:
    std::array<long, 3> coords(const Vec3& p) const {
        return {static_cast<long>(std::floor(p.x() / cell_)), static_cast<long>(std::floor(p.y() / cell_)),
                static_cast<long>(std::floor(p.z() / cell_))};
    }
    static std::uint64_t pack(long x, long y, long z) {
        constexpr long kBias = 1L << 20;
        return (static_cast<std::uint64_t>(x + kBias) << 42) | (static_cast<std::uint64_t>(y + kBias) << 21) |
               static_cast<std::uint64_t>(z + kBias);
    }
    std::uint64_t key(const Vec3& p) const {
        const auto c = coords(p);
        return pack(c[0], c[1], c[2]);
    }

    std::vector<Vec3> points_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

// Rigid TIP3P-like geometry: O-H 0.9572 A, H-O-H 104.52 deg, fixed orientation.
constexpr double kWaterOH = 0.9572;
constexpr double kWaterHalfAngleDeg = 52.26;
// Closest approach allowed between atoms of different water molecules.
constexpr double kWaterContact = 1.9;
constexpr int kOrientationTries = 8;

}  // namespace

AtomicSystem solvate(const AtomicSystem& system, double density, double exclusion_radius, double padding,
                     std::uint64_t seed) {
    if (!(density > 0.0)) throw ConfigError("solvation density must be positive");
    if (!(exclusion_radius > 0.0)) throw ConfigError("exclusion radius must be positive");
    if (padding < 0.0) throw ConfigError("padding must be non-negative");
    if (system.count(Role::Solute) == 0) throw ConfigError("solvation needs at least one solute atom");

    const auto solute = system.indices_with(Role::Solute);
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (auto i : solute) {
        lo = lo.cwiseMin(system.positions.row(i).transpose());
        hi = hi.cwiseMax(system.positions.row(i).transpose());
    }
    lo.array() -= padding;
    hi.array() += padding;

    const double spacing = std::cbrt(1.0 / density);
    const double jitter = 0.1 * spacing;
    std::array<long, 3> sites{};
    Vec3 start;
    for (int d = 0; d < 3; ++d) {
        const double extent = hi[d] - lo[d];
        sites[static_cast<std::size_t>(d)] = static_cast<long>(std::floor(extent / spacing));
        const double used = static_cast<double>(sites[static_cast<std::size_t>(d)]) * spacing;
        start[d] = lo[d] + 0.5 * (extent - used) + 0.5 * spacing;
    }

    const double half = kWaterHalfAngleDeg * std::numbers::pi / 180.0;
    const Vec3 h1(kWaterOH * std::sin(half), 0.0, kWaterOH * std::cos(half));
    const Vec3 h2(-kWaterOH * std::sin(half), 0.0, kWaterOH * std::cos(half));

    PointGrid grid(system.positions, exclusion_radius);
    PointGrid water(Coords3d(0, 3), kWaterContact);
    struct Molecule {
        Vec3 o, h1, h2;
    };
    std::vector<Molecule> placed;
    std::uint64_t site = 0;
    for (long ix = 0; ix < sites[0]; ++ix)
        for (long iy = 0; iy < sites[1]; ++iy)
            for (long iz = 0; iz < sites[2]; ++iz) {
                // One stream per site, so coordinates do not depend on which
                // earlier sites were excluded.
                Rng rng(derive_seed(seed, site++));
                const Vec3 shake(rng.uniform(-jitter, jitter), rng.uniform(-jitter, jitter),
                                 rng.uniform(-jitter, jitter));
                const Vec3 o = start + spacing * Vec3(static_cast<double>(ix), static_cast<double>(iy),
                                                      static_cast<double>(iz)) + shake;
                if (grid.any_within(o, exclusion_radius)) continue;
                for (int attempt = 0; attempt < kOrientationTries; ++attempt) {
                    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
                    q.normalize();
                    const Molecule m{o, o + q * h1, o + q * h2};
                    bool clash = false;
                    for (const Vec3* a : {&m.o, &m.h1, &m.h2}) {
                        clash = clash || grid.any_within(*a, exclusion_radius) || water.any_within(*a, kWaterContact);
                    }
                    if (clash) continue;
                    for (const Vec3* a : {&m.o, &m.h1, &m.h2}) water.add(*a);
                    placed.push_back(m);
                    break;
                }
            }

    AtomicSystem out = system;
    const auto base = static_cast<Eigen::Index>(system.size());
    out.positions.conservativeResize(base + 3 * static_cast<Eigen::Index>(placed.size()), 3);
    Eigen::Index row = base;
    for (const auto& m : placed) {
        out.positions.row(row++) = m.o.transpose();
        out.positions.row(row++) = m.h1.transpose();
        out.positions.row(row++) = m.h2.transpose();
        out.species.insert(out.species.end(), {Element::O, Element::H, Element::H});
        out.roles.insert(out.roles.end(), 3, Role::Solvent);
    }
    Box box{lo, hi};
    for (Eigen::Index i = 0; i < out.positions.rows(); ++i) {
        box.lo = box.lo.cwiseMin(out.positions.row(i).transpose());
        box.hi = box.hi.cwiseMax(out.positions.row(i).transpose());
    }
    out.box = box;
    return out;
}

std::vector<int> default_sweep_residues() {
    std::vector<int> sizes;
    for (int r = 10; r <= 100; r += 10) sizes.push_back(r);
    for (int r = 200; r <= 1000; r += 100) sizes.push_back(r);
    return sizes;
}

ParseError::ParseError(Kind kind, std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

namespace {

std::string_view role_name(Role r) { return r == Role::Solute ? "solute" : "solvent"; }

bool parse_box(const std::string& comment, Box& box) {
    const auto pos = comment.find("box=");
    if (pos == std::string::npos) return false;
    std::istringstream ss(comment.substr(pos + 4));
    double v[6];
    for (double& x : v) {
        if (!(ss >> x)) return false;
    }
    box.lo = Vec3(v[0], v[1], v[2]);
    box.hi = Vec3(v[3], v[4], v[5]);
    return true;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

AtomicSystem parse_system(std::istream& in) {
    using Kind = ParseError::Kind;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(Kind::Malformed, 1, "missing atom count");
    long long count = -1;
    {
        std::istringstream ss(line);
        std::string rest;
        if (!(ss >> count) || count < 0 || (ss >> rest)) {
            throw ParseError(Kind::Malformed, 1, "bad atom count '" + line + "'");
        }
    }
    std::string comment;
    if (!std::getline(in, comment)) throw ParseError(Kind::Malformed, 2, "missing comment line");

    AtomicSystem sys;
    Box box;
    if (parse_box(comment, box)) sys.box = box;

    std::vector<Vec3> coords;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        std::string sym, role, extra;
        double x, y, z;
        if (!(ss >> sym >> x >> y >> z >> role) || (ss >> extra)) {
            throw ParseError(Kind::Malformed, lineno, "expected 'symbol x y z role'");
        }
        const auto e = element_from_symbol(sym);
        if (!e) throw ParseError(Kind::UnknownElement, lineno, "unknown element '" + sym + "'");
        Role r;
        if (role == "solute") {
            r = Role::Solute;
        } else if (role == "solvent") {
            r = Role::Solvent;
        } else {
            throw ParseError(Kind::Malformed, lineno, "unknown role '" + role + "'");
        }
        sys.species.push_back(*e);
        sys.roles.push_back(r);
        coords.emplace_back(x, y, z);
    }
    if (static_cast<long long>(coords.size()) != count) {
        throw ParseError(Kind::CountMismatch, lineno,
                         "header declares " + std::to_string(count) + " atoms, found " +
                             std::to_string(coords.size()));
    }
    sys.positions.resize(static_cast<Eigen::Index>(coords.size()), 3);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        sys.positions.row(static_cast<Eigen::Index>(i)) = coords[i].transpose();
    }
    return sys;
}

void format_system(std::ostream& out, const AtomicSystem& system, const std::string& comment) {
    out << system.size() << '\n';
    std::string c = comment;
    if (system.box) {
        if (!c.empty()) c += ' ';
        c += "box=";
        for (int d = 0; d < 3; ++d) c += format_double(system.box->lo[d]) + ' ';
        for (int d = 0; d < 3; ++d) c += format_double(system.box->hi[d]) + (d < 2 ? " " : "");
    }
    out << c << '\n';
    for (std::size_t i = 0; i < system.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        out << symbol(system.species[i]) << ' ' << format_double(system.positions(row, 0)) << ' '
            << format_double(system.positions(row, 1)) << ' ' << format_double(system.positions(row, 2)) << ' '
            << role_name(system.roles[i]) << '\n';
    }
}

AtomicSystem read_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse_system(in);
}

void write_system(const AtomicSystem& system, const std::filesystem::path& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    format_system(out, system, comment);
    if (!out) throw Error("write failed for " + path.string());
}

AtomicSystem random_cluster(std::size_t n, double density, std::uint64_t seed, double min_separation) {
    if (!(density > 0.0) || !(min_separation >= 0.0)) throw ConfigError("bad cluster density or separation");
    const double side = std::cbrt(static_cast<double>(n) / density);
    constexpr std::array<Element, 4> kPool = {Element::H, Element::C, Element::N, Element::O};
    Rng rng(derive_seed(seed, 4242));
    AtomicSystem s;
    s.positions.resize(static_cast<Eigen::Index>(n), 3);
    const double min2 = min_separation * min_separation;
    for (std::size_t i = 0; i < n; ++i) {
        s.species.push_back(kPool[static_cast<std::size_t>(rng.next() % kPool.size())]);
        s.roles.push_back(Role::Solute);
        for (int attempt = 0;; ++attempt) {
            if (attempt == 10000) throw ConfigError("cannot place cluster atoms at this density");
            const Vec3 p(rng.uniform(0.0, side), rng.uniform(0.0, side), rng.uniform(0.0, side));
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j) {
                ok = (s.positions.row(static_cast<Eigen::Index>(j)).transpose() - p).squaredNorm() >= min2;
            }
            if (ok) {
                s.positions.row(static_cast<Eigen::Index>(i)) = p.transpose();
                break;
            }
        }
    }
    return s;
}

}  // namespace mlff
