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

#include "mlff/cff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mlff {

void CffParams::validate(std::size_t num_atoms) const {
    for (const auto& p : lj) {
        if (!(p.epsilon >= 0.0) || !(p.sigma > 0.0)) throw ConfigError("LJ parameters need eps >= 0, sigma > 0");
    }
    if (charges.size() != num_atoms) throw ConfigError("charge count does not match atom count");
    if (!(cutoff > 0.0)) throw ConfigError("nonbonded cutoff must be positive");
    const auto n = static_cast<Index>(num_atoms);
    auto ok = [n](Index i) { return i >= 0 && i < n; };
    for (const auto& b : bonds)
        if (!ok(b.i) || !ok(b.j)) throw ConfigError("bond references an invalid atom");
    for (const auto& a : angles)
        if (!ok(a.i) || !ok(a.j) || !ok(a.k)) throw ConfigError("angle references an invalid atom");
    for (const auto& d : dihedrals)
        if (!ok(d.i) || !ok(d.j) || !ok(d.k) || !ok(d.l)) throw ConfigError("dihedral references an invalid atom");
}

std::vector<std::pair<Index, Index>> infer_bonds(const AtomicSystem& system) {
    double max_radius = 0.0;
    for (auto e : kAllElements) max_radius = std::max(max_radius, covalent_radius(e));
    const auto pairs = build_pairs_celllist(system.positions, 2.4 * max_radius);
    std::vector<std::pair<Index, Index>> bonds;
    for (const auto& p : pairs.pairs) {
        if (p.i >= p.j) continue;
        const double limit = 1.2 * (covalent_radius(system.species[static_cast<std::size_t>(p.i)]) +
                                    covalent_radius(system.species[static_cast<std::size_t>(p.j)]));
        if (p.r < limit) bonds.emplace_back(p.i, p.j);
    }
    return bonds;
}

namespace {

// Generic AMBER-like values per element: (epsilon kcal/mol, sigma A).
constexpr std::array<LennardJones, kNumElements> kDefaultLj = {{
    {0.0157, 2.47},  // H
    {0.0860, 3.40},  // C
    {0.1700, 3.25},  // N
    {0.2100, 2.96},  // O
    {0.2500, 3.56},  // S
    {0.0610, 3.12},  // F
    {0.2650, 3.47},  // Cl
}};

// Raw partial charges before per-molecule neutralisation.
constexpr std::array<double, kNumElements> kRawCharge = {0.10, -0.05, -0.30, -0.40, -0.10, -0.20, -0.10};

constexpr double kBondK = 300.0;     // kcal/mol/A^2
constexpr double kAngleK = 50.0;     // kcal/mol/rad^2
constexpr double kTorsionV = 0.6;    // kcal/mol
constexpr int kTorsionN = 3;

struct DisjointSets {
    std::vector<Index> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), Index{0}); }
    Index find(Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(Index a, Index b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

Vec3 pos(const AtomicSystem& s, Index i) { return s.positions.row(i).transpose(); }

}  // namespace

CffParams assign_default_params(const AtomicSystem& system) {
    CffParams p;
    p.lj = kDefaultLj;
    const auto n = system.size();
    const auto bond_pairs = infer_bonds(system);

    std::vector<std::vector<Index>> adj(n);
    DisjointSets mols(n);
    for (auto [i, j] : bond_pairs) {
        adj[static_cast<std::size_t>(i)].push_back(j);
        adj[static_cast<std::size_t>(j)].push_back(i);
        mols.unite(i, j);
        p.bonds.push_back({i, j, kBondK, (pos(system, j) - pos(system, i)).norm()});
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    for (std::size_t j = 0; j < n; ++j) {
        const auto& nb = adj[j];
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                const auto J = static_cast<Index>(j);
                const double theta0 =
                    leg_angle(pos(system, nb[a]) - pos(system, J), pos(system, nb[b]) - pos(system, J));
                p.angles.push_back({nb[a], J, nb[b], kAngleK, theta0});
            }
    }
    for (auto [j, k] : bond_pairs) {
        for (Index i : adj[static_cast<std::size_t>(j)]) {
            if (i == k) continue;
            for (Index l : adj[static_cast<std::size_t>(k)]) {
                if (l == j || l == i) continue;
                p.dihedrals.push_back({i, j, k, l, kTorsionV, kTorsionN, 0.0});
            }
        }
    }

    // Charges: element defaults shifted so each connected molecule is neutral.
    p.charges.resize(n);
    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> members(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = static_cast<std::size_t>(mols.find(static_cast<Index>(i)));
        p.charges[i] = kRawCharge[static_cast<std::size_t>(index_of(system.species[i]))];
        sum[root] += p.charges[i];
        ++members[root];
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = static_cast<std::size_t>(mols.find(static_cast<Index>(i)));
        p.charges[i] -= sum[root] / static_cast<double>(members[root]);
    }

    // Exclusions: bonded neighbours and atoms sharing a bonded neighbour.
    for (auto [i, j] : bond_pairs) p.exclusions.emplace_back(std::min(i, j), std::max(i, j));
    for (const auto& a : p.angles) p.exclusions.emplace_back(std::min(a.i, a.k), std::max(a.i, a.k));
    std::sort(p.exclusions.begin(), p.exclusions.end());
    p.exclusions.erase(std::unique(p.exclusions.begin(), p.exclusions.end()), p.exclusions.end());
    return p;
}

namespace {

/// Per-atom sorted exclusion partners with larger index.
std::vector<std::vector<Index>> exclusion_table(const CffParams& params, std::size_t n) {
    std::vector<std::vector<Index>> table(n);
    for (auto [i, j] : params.exclusions) {
        if (static_cast<std::size_t>(i) < n) table[static_cast<std::size_t>(i)].push_back(j);
    }
    for (auto& t : table) std::sort(t.begin(), t.end());
    return table;
}

bool involves_active(const CffOptions& o, std::initializer_list<Index> atoms) {
    if (o.active == nullptr) return true;
    for (Index a : atoms)
        if ((*o.active)[static_cast<std::size_t>(a)]) return true;
    return false;
}

void check_pairs(const CffParams& params, const PairList& pairs, std::size_t n) {
    if (pairs.num_atoms() != n) throw ConfigError("pair list does not match the system");
    if (std::abs(pairs.cutoff - params.cutoff) > 1e-12 * params.cutoff) {
        throw ConfigError("pair list cutoff differs from the force-field cutoff");
    }
}

template <typename Visit>
void for_each_nonbonded(const PairList& pairs, const CffOptions& options,
                        const std::vector<std::vector<Index>>& excl, Visit&& visit) {
    for (const auto& p : pairs.pairs) {
        if (p.i >= p.j) continue;
        const auto& ex = excl[static_cast<std::size_t>(p.i)];
        if (std::binary_search(ex.begin(), ex.end(), p.j)) continue;
        if (!involves_active(options, {p.i, p.j})) continue;
        visit(p);
    }
}

}  // namespace

std::size_t count_nonbonded_pairs(const CffParams& params, const PairList& pairs, const CffOptions& options) {
    const auto excl = exclusion_table(params, pairs.num_atoms());
    std::size_t count = 0;
    for_each_nonbonded(pairs, options, excl, [&](const Pair&) { ++count; });
    return count;
}

PotentialResult cff_energy_forces(const AtomicSystem& system, const CffParams& params, const PairList& pairs,
                                  const CffOptions& options) {
    const auto n = system.size();
    params.validate(n);
    check_pairs(params, pairs, n);
    if (options.active != nullptr && options.active->size() != n) throw ConfigError("active mask length mismatch");

    auto result = PotentialResult::zeros(n);
    auto& E = result.atomic_energies;
    auto& F = result.forces;

    // Species-pair tables (Lorentz-Berthelot), so the pair loop does no mixing.
    std::array<std::array<double, kNumElements>, kNumElements> sig2{}, eps4{}, eps24{}, eps48{};
    for (int a = 0; a < kNumElements; ++a)
        for (int b = 0; b < kNumElements; ++b) {
            const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
            const double s = 0.5 * (params.lj[ua].sigma + params.lj[ub].sigma);
            const double e = std::sqrt(params.lj[ua].epsilon * params.lj[ub].epsilon);
            sig2[ua][ub] = s * s;
            eps4[ua][ub] = 4.0 * e;
            eps24[ua][ub] = 24.0 * e;
            eps48[ua][ub] = 48.0 * e;
        }
    std::vector<double> q(n);
    const double sqrt_ke = std::sqrt(kCoulomb);
    for (std::size_t i = 0; i < n; ++i) q[i] = params.charges[i] * sqrt_ke;

    const double pi_over_rc = std::numbers::pi / params.cutoff;
    const double half_pi_over_rc = 0.5 * pi_over_rc;

    const auto excl = exclusion_table(params, n);
    std::uint64_t evaluated = 0;
    for_each_nonbonded(pairs, options, excl, [&](const Pair& p) {
        const auto si = static_cast<std::size_t>(index_of(system.species[static_cast<std::size_t>(p.i)]));
        const auto sj = static_cast<std::size_t>(index_of(system.species[static_cast<std::size_t>(p.j)]));
        // core
        const Vec3 d = (system.positions.row(p.j) - system.positions.row(p.i)).transpose();
        const double r2 = d.x() * d.x() + d.y() * d.y() + d.z() * d.z();
        if (r2 < kMinSeparation * kMinSeparation) {
            throw SingularityError("atoms " + std::to_string(p.i) + " and " + std::to_string(p.j) + " coincide");
        }
        const double inv_r2 = 1.0 / r2;
        const double inv_r = std::sqrt(inv_r2);
        const double sr2 = sig2[si][sj] * inv_r2;
        const double sr6 = sr2 * sr2 * sr2;
        const double e_lj = (eps4[si][sj] * sr6 - eps4[si][sj]) * sr6;
        const double e_c = q[static_cast<std::size_t>(p.i)] * q[static_cast<std::size_t>(p.j)] * inv_r;
        double e = e_lj + e_c;
        double f_r = ((eps48[si][sj] * sr6 - eps24[si][sj]) * sr6 + e_c) * inv_r2;
        // switch
        const double r = r2 * inv_r;
        const double x = r * pi_over_rc;
        const double c = std::cos(x);
        const double s = std::sin(x);
        const double sw = 0.5 * c + 0.5;
        const double dsw_over_r = -half_pi_over_rc * s * inv_r;
        f_r = f_r * sw - e * dsw_over_r;
        e = e * sw;
        // scatter
        const Vec3 f = f_r * d;
        F.row(p.i) -= f.transpose();
        F.row(p.j) += f.transpose();
        E[p.i] += 0.5 * e;
        E[p.j] += 0.5 * e;
        ++evaluated;
    });
    {
        auto& core = result.counters["cff_nonbonded"];
        tally(&core, kNonbondedCoreCost, evaluated);
        core.gather_ops += 2 * evaluated;
        core.scatter_ops += 4 * evaluated;
        core.bytes_read += evaluated * (sizeof(Pair) + 2 * 3 * sizeof(double) + 2 * sizeof(double));
        core.bytes_written += evaluated * 2 * 4 * sizeof(double);
        tally(&result.counters["cff_switch"], kNonbondedSwitchCost, evaluated);
    }

    auto& bonded = result.counters["cff_bonded"];
    const auto P = [&](Index i) -> Vec3 { return system.positions.row(i).transpose(); };

    for (const auto& b : params.bonds) {
        if (!involves_active(options, {b.i, b.j})) continue;
        const Vec3 d = P(b.j) - P(b.i);
        const double r = d.norm();
        if (r < kMinSeparation) throw SingularityError("bonded atoms coincide");
        const double dr = r - b.r0;
        const double e = b.k * dr * dr;
        const Vec3 g = (2.0 * b.k * dr / r) * d;  // dE/dr_j
        F.row(b.j) -= g.transpose();
        F.row(b.i) += g.transpose();
        E[b.i] += 0.5 * e;
        E[b.j] += 0.5 * e;
        // d 3 add; norm 3 mul 2 add sqrt; dr 1 add; e 2 mul; g 3 mul + 3 mul
        tally(&bonded, OpCost{6, 11, 1}, 1);
    }

    for (const auto& a : params.angles) {
        if (!involves_active(options, {a.i, a.j, a.k})) continue;
        const Vec3 u = P(a.i) - P(a.j);
        const Vec3 v = P(a.k) - P(a.j);
        const double ru = u.norm(), rv = v.norm();
        if (ru < kMinSeparation || rv < kMinSeparation) throw SingularityError("angle leg has zero length");
        const double theta = leg_angle(u, v);
        const double dt = theta - a.theta0;
        const double e = a.k_theta * dt * dt;
        const double de = 2.0 * a.k_theta * dt;
        const Vec3 uh = u / ru, vh = v / rv;
        const double cos_t = uh.dot(vh);
        const Vec3 pu = vh - cos_t * uh;  // |pu| = sin(theta)
        const Vec3 pv = uh - cos_t * vh;
        const double sin_t = pu.norm();
        if (sin_t > 1e-12) {
            const Vec3 gi = (-de / (ru * sin_t)) * pu;
            const Vec3 gk = (-de / (rv * sin_t)) * pv;
            F.row(a.i) -= gi.transpose();
            F.row(a.k) -= gk.transpose();
            F.row(a.j) += (gi + gk).transpose();
        }
        E[a.i] += e / 3.0;
        E[a.j] += e / 3.0;
        E[a.k] += e / 3.0;
        // legs 6 add; norms 6 mul 4 add 2 sqrt; angle 9 mul 7 add 2 trans;
        // energy 3 mul 1 add; unit legs 6 mul; cos 3 mul 2 add; perps 6 mul 6 add;
        // sin 3 mul 2 add sqrt; gradients 10 mul 3 add
        tally(&bonded, OpCost{31, 52, 5}, 1);
    }

    for (const auto& t : params.dihedrals) {
        if (!involves_active(options, {t.i, t.j, t.k, t.l})) continue;
        const Vec3 b1 = P(t.j) - P(t.i);
        const Vec3 b2 = P(t.k) - P(t.j);
        const Vec3 b3 = P(t.l) - P(t.k);
        const Vec3 n1 = b1.cross(b2);
        const Vec3 n2 = b2.cross(b3);
        const double b2n = b2.norm();
        const double phi = std::atan2(b2n * b1.dot(n2), n1.dot(n2));
        const double arg = t.n * phi - t.phi0;
        const double e = 0.5 * t.v * (1.0 + std::cos(arg));
        const double de = -0.5 * t.v * t.n * std::sin(arg);  // dE/dphi
        const double n1sq = n1.squaredNorm(), n2sq = n2.squaredNorm();
        if (n1sq > 1e-24 && n2sq > 1e-24 && b2n > kMinSeparation) {
            const Vec3 gi = (-b2n / n1sq) * n1;  // dphi/dr_i
            const Vec3 gl = (b2n / n2sq) * n2;   // dphi/dr_l
            const double inv_b2sq = 1.0 / (b2n * b2n);
            const double s1 = b1.dot(b2) * inv_b2sq;
            const double s3 = b3.dot(b2) * inv_b2sq;
            const Vec3 gj = (-s1 - 1.0) * gi + s3 * gl;
            const Vec3 gk = (s1)*gi - (s3 + 1.0) * gl;
            F.row(t.i) -= (de * gi).transpose();
            F.row(t.j) -= (de * gj).transpose();
            F.row(t.k) -= (de * gk).transpose();
            F.row(t.l) -= (de * gl).transpose();
        }
        E[t.i] += 0.25 * e;
        E[t.j] += 0.25 * e;
        E[t.k] += 0.25 * e;
        E[t.l] += 0.25 * e;
        // bond vectors 9 add; crosses 12 mul 6 add; |b2| 3 mul 2 add sqrt; dots
        // 6 mul 4 add + 2 mul; atan2; arg/e/de 7 mul 2 add, cos, sin; squared
        // norms 6 mul 4 add; gi/gl 8 mul; s1/s3 8 mul 4 add + 1 div; gj/gk 12
        // mul 8 add; de scaling 12 mul
        tally(&bonded, OpCost{39, 77, 4}, 1);
    }

    result.energy = E.sum();
    return result;
}

}  // namespace mlff
