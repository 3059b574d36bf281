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

#include "mlff/aev.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace mlff {

AevParams AevParams::with_grid(int radial, int angular_radial, int sections, double radial_cutoff,
                               double angular_cutoff) {
    AevParams p;
    p.radial_cutoff = radial_cutoff;
    p.angular_cutoff = angular_cutoff;
    constexpr double kInner = 0.8;
    for (int k = 0; k < radial; ++k) p.radial_shifts.push_back(kInner + k * (radial_cutoff - kInner) / radial);
    for (int k = 0; k < angular_radial; ++k) {
        p.angular_shifts.push_back(kInner + k * (angular_cutoff - kInner) / angular_radial);
    }
    for (int k = 0; k < sections; ++k) p.angle_sections.push_back(k * std::numbers::pi / sections);
    return p;
}

AevParams AevParams::defaults() { return with_grid(16, 4, 8); }

std::size_t AevParams::angular_offset(int a, int b) const noexcept {
    if (a > b) std::swap(a, b);
    const auto s = static_cast<std::size_t>(num_species);
    const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
    // Blocks before row a: sum_{t<a} (s - t).
    const std::size_t pair = ua * (2 * s - ua + 1) / 2 + (ub - ua);
    return radial_length() + pair * angular_size();
}

void AevParams::validate() const {
    if (!(radial_cutoff > 0.0) || !(angular_cutoff > 0.0)) throw ConfigError("AEV cutoffs must be positive");
    if (angular_cutoff > radial_cutoff) throw ConfigError("angular cutoff exceeds radial cutoff");
    if (!(radial_eta > 0.0) || !(angular_eta > 0.0)) throw ConfigError("AEV eta must be positive");
    if (!(zeta >= 1.0)) throw ConfigError("AEV zeta must be >= 1");
    if (radial_shifts.empty() || angular_shifts.empty() || angle_sections.empty()) {
        throw ConfigError("AEV grids must be non-empty");
    }
    if (num_species < 1 || num_species > kNumElements) throw ConfigError("AEV species count out of range");
}

AevNeighbors build_aev_neighbors(const AtomicSystem& system, const AevParams& params, StageCounters* counters) {
    OpCounters* c = counters ? &(*counters)["neighbors"] : nullptr;
    AevNeighbors nb;
    nb.pairs = build_pairs_celllist(system.positions, params.radial_cutoff, c);
    nb.triplets = build_triplets(nb.pairs, params.angular_cutoff, c);
    return nb;
}

namespace {

// Per radial pair: cutoff (1 add, 2 mul, cos); per grid point (2 add, 3 mul, exp).
constexpr OpCost kRadialPairCost{1, 2, 1};
constexpr OpCost kRadialTermCost{2, 3, 1};
// Per triplet: fc product and mean distance (1 add, 2 mul); per angle section
// (2 add, 1 mul, cos, pow); per angular shift (1 add, 3 mul, exp); per term
// (1 add, 1 mul).
constexpr OpCost kTripletCost{1, 2, 0};
constexpr OpCost kSectionCost{2, 1, 2};
constexpr OpCost kShiftCost{1, 3, 1};
constexpr OpCost kAngularTermCost{1, 1, 0};

void count_radial(OpCounters* c, const AevParams& p, std::uint64_t pairs) {
    if (c == nullptr) return;
    tally(c, kRadialPairCost, pairs);
    tally(c, kRadialTermCost, pairs * p.radial_size());
    c->sf_terms += pairs * p.radial_size();
    c->gather_ops += pairs;
}

void count_angular(OpCounters* c, const AevParams& p, std::uint64_t triplets) {
    if (c == nullptr) return;
    tally(c, kTripletCost, triplets);
    tally(c, kSectionCost, triplets * p.angle_sections.size());
    tally(c, kShiftCost, triplets * p.angular_shifts.size());
    tally(c, kAngularTermCost, triplets * p.angular_size());
    c->sf_terms += triplets * p.angular_size();
    c->gather_ops += 2 * triplets;
}

struct AngularScratch {
    std::vector<double> section;  // A_t(theta)
    std::vector<double> shift;    // B_r(mean distance) * fc_ij * fc_ik
};

inline double angular_prefactor(const AevParams& p) { return std::pow(2.0, 1.0 - p.zeta); }

/// Fills the factored angular terms of one triplet; term (r, t) = shift[r] * section[t].
inline void angular_factors(const AevParams& p, double prefactor, double theta, double r_ij, double r_ik,
                            double fc_prod, AngularScratch& s) {
    const double mean = 0.5 * (r_ij + r_ik);
    for (std::size_t t = 0; t < p.angle_sections.size(); ++t) {
        s.section[t] = prefactor * std::pow(1.0 + std::cos(theta - p.angle_sections[t]), p.zeta);
    }
    for (std::size_t r = 0; r < p.angular_shifts.size(); ++r) {
        const double x = mean - p.angular_shifts[r];
        s.shift[r] = std::exp(-p.angular_eta * x * x) * fc_prod;
    }
}

AngularScratch make_scratch(const AevParams& p) {
    return {std::vector<double>(p.angle_sections.size()), std::vector<double>(p.angular_shifts.size())};
}

void check_leg(const Pair& p) {
    if (p.r < kMinSeparation) {
        throw SingularityError("triplet leg " + std::to_string(p.i) + "-" + std::to_string(p.j) +
                               " is degenerate");
    }
}

}  // namespace

RowMatrixXd radial_terms(const PairList& pairs, const AevParams& params, OpCounters* counters) {
    const auto m = params.radial_size();
    RowMatrixXd out(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(m));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double r = pairs.pairs[p].r;
        const double fc = cutoff_fn(r, params.radial_cutoff);
        for (std::size_t k = 0; k < m; ++k) {
            const double x = r - params.radial_shifts[k];
            out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = std::exp(-params.radial_eta * x * x) * fc;
        }
    }
    count_radial(counters, params, pairs.size());
    if (counters) counters->bytes_written += out.size() * sizeof(double);
    return out;
}

RowMatrixXd angular_terms(const TripletList& triplets, const PairList& pairs, const AevParams& params,
                          OpCounters* counters) {
    const auto width = params.angular_size();
    const auto nt = params.angle_sections.size();
    RowMatrixXd out(static_cast<Eigen::Index>(triplets.size()), static_cast<Eigen::Index>(width));
    const double pref = angular_prefactor(params);
    auto scratch = make_scratch(params);
    for (std::size_t t = 0; t < triplets.size(); ++t) {
        const auto& tr = triplets.triplets[t];
        const Pair& a = pairs.pairs[tr.pair_ij];
        const Pair& b = pairs.pairs[tr.pair_ik];
        check_leg(a);
        check_leg(b);
        const double fc = cutoff_fn(a.r, params.angular_cutoff) * cutoff_fn(b.r, params.angular_cutoff);
        angular_factors(params, pref, tr.theta, a.r, b.r, fc, scratch);
        for (std::size_t r = 0; r < scratch.shift.size(); ++r)
            for (std::size_t s = 0; s < nt; ++s) {
                out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(r * nt + s)) = scratch.shift[r] * scratch.section[s];
            }
    }
    count_angular(counters, params, triplets.size());
    if (counters) counters->bytes_written += out.size() * sizeof(double);
    return out;
}

namespace {

void record_tape(AevTape& tape, const AtomicSystem& system, const AevNeighbors& nb, const AevParams& params) {
    tape.params = params;
    tape.positions = system.positions;
    tape.species.resize(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) tape.species[i] = index_of(system.species[i]);
    const auto np = static_cast<Eigen::Index>(nb.pairs.size());
    tape.pair_i.resize(nb.pairs.size());
    tape.pair_j.resize(nb.pairs.size());
    tape.pair_r.resize(np);
    tape.pair_fc.resize(np);
    tape.pair_dfc.resize(np);
    tape.pair_unit.resize(np, 3);
    for (std::size_t p = 0; p < nb.pairs.size(); ++p) {
        const auto& pr = nb.pairs.pairs[p];
        const auto row = static_cast<Eigen::Index>(p);
        tape.pair_i[p] = pr.i;
        tape.pair_j[p] = pr.j;
        tape.pair_r[row] = pr.r;
        tape.pair_fc[row] = cutoff_fn(pr.r, params.radial_cutoff);
        tape.pair_dfc[row] = cutoff_fn_derivative(pr.r, params.radial_cutoff);
        tape.pair_unit.row(row) = (pr.d / pr.r).transpose();
    }
    const auto nt = nb.triplets.size();
    tape.tri_center.resize(nt);
    tape.tri_ij.resize(nt);
    tape.tri_ik.resize(nt);
    tape.tri_theta.resize(static_cast<Eigen::Index>(nt));
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tr = nb.triplets.triplets[t];
        tape.tri_center[t] = tr.center;
        tape.tri_ij[t] = tr.pair_ij;
        tape.tri_ik[t] = tr.pair_ik;
        tape.tri_theta[static_cast<Eigen::Index>(t)] = tr.theta;
    }
    tape.valid = true;
}

int species_of(const AtomicSystem& s, Index i) { return index_of(s.species[static_cast<std::size_t>(i)]); }

void check_species(const AtomicSystem& system, const AevParams& params) {
    for (auto e : system.species) {
        if (index_of(e) >= params.num_species) {
            throw UnsupportedSpeciesError(std::string("element ") + std::string(symbol(e)) +
                                          " is outside the descriptor species set");
        }
    }
}

}  // namespace

AevResult compute_aev(const AtomicSystem& system, const AevNeighbors& nb, const AevParams& params,
                      AevStrategy strategy, StageCounters* counters) {
    params.validate();
    check_species(system, params);
    const auto n = static_cast<Eigen::Index>(system.size());
    if (nb.pairs.num_atoms() != system.size()) throw ConfigError("neighbor list does not match the system");
    if (std::abs(nb.pairs.cutoff - params.radial_cutoff) > 1e-12 || std::abs(nb.triplets.cutoff - params.angular_cutoff) > 1e-12) {
        throw ConfigError("neighbor cutoffs do not match the descriptor cutoffs");
    }
    OpCounters* rc = counters ? &(*counters)["aev_radial"] : nullptr;
    OpCounters* ac = counters ? &(*counters)["aev_angular"] : nullptr;

    AevResult res;
    res.aev.params = params;
    auto& G = res.aev.values;
    G = RowMatrixXd::Zero(n, static_cast<Eigen::Index>(params.width()));
    const auto nr = static_cast<Eigen::Index>(params.radial_size());
    const auto na = params.angular_size();
    const auto nsec = params.angle_sections.size();

    if (strategy == AevStrategy::Staged) {
        const RowMatrixXd rad = radial_terms(nb.pairs, params, rc);
        for (std::size_t p = 0; p < nb.pairs.size(); ++p) {
            const auto& pr = nb.pairs.pairs[p];
            G.row(pr.i).segment(species_of(system, pr.j) * nr, nr) += rad.row(static_cast<Eigen::Index>(p));
        }
        const RowMatrixXd ang = angular_terms(nb.triplets, nb.pairs, params, ac);
        for (std::size_t t = 0; t < nb.triplets.size(); ++t) {
            const auto& tr = nb.triplets.triplets[t];
            const auto col = static_cast<Eigen::Index>(
                params.angular_offset(species_of(system, tr.j), species_of(system, tr.k)));
            G.row(tr.center).segment(col, static_cast<Eigen::Index>(na)) += ang.row(static_cast<Eigen::Index>(t));
        }
        if (rc) {
            rc->scatter_ops += nb.pairs.size();
            rc->bytes_read += rad.size() * sizeof(double) + nb.pairs.size() * sizeof(Pair);
            rc->bytes_written += G.size() * sizeof(double);
        }
        if (ac) {
            ac->scatter_ops += nb.triplets.size();
            ac->bytes_read += ang.size() * sizeof(double) + nb.triplets.size() * sizeof(Triplet);
        }
    } else {
        const double pref = angular_prefactor(params);
        auto scratch = make_scratch(params);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto row = G.row(i);
            for (const auto& pr : nb.pairs.of(static_cast<Index>(i))) {
                const double fc = cutoff_fn(pr.r, params.radial_cutoff);
                const auto base = species_of(system, pr.j) * nr;
                for (Eigen::Index k = 0; k < nr; ++k) {
                    const double x = pr.r - params.radial_shifts[static_cast<std::size_t>(k)];
                    row[base + k] += std::exp(-params.radial_eta * x * x) * fc;
                }
            }
            const auto c = static_cast<std::size_t>(i);
            for (std::size_t t = nb.triplets.offsets[c]; t < nb.triplets.offsets[c + 1]; ++t) {
                const auto& tr = nb.triplets.triplets[t];
                const Pair& a = nb.pairs.pairs[tr.pair_ij];
                const Pair& b = nb.pairs.pairs[tr.pair_ik];
                check_leg(a);
                check_leg(b);
                const double fc = cutoff_fn(a.r, params.angular_cutoff) * cutoff_fn(b.r, params.angular_cutoff);
                angular_factors(params, pref, tr.theta, a.r, b.r, fc, scratch);
                const auto col = static_cast<Eigen::Index>(
                    params.angular_offset(species_of(system, tr.j), species_of(system, tr.k)));
                for (std::size_t r = 0; r < scratch.shift.size(); ++r)
                    for (std::size_t s = 0; s < nsec; ++s) {
                        row[col + static_cast<Eigen::Index>(r * nsec + s)] += scratch.shift[r] * scratch.section[s];
                    }
            }
        }
        count_radial(rc, params, nb.pairs.size());
        count_angular(ac, params, nb.triplets.size());
        if (rc) {
            rc->bytes_read += nb.pairs.size() * sizeof(Pair);
            rc->bytes_written += G.size() * sizeof(double);
        }
        if (ac) ac->bytes_read += nb.triplets.size() * (sizeof(Triplet) + 2 * sizeof(Pair));
    }
    record_tape(res.tape, system, nb, params);
    return res;
}

Coords3d aev_backward(const AevTape& tape, const RowMatrixXd& dE_dAev, const Coords3d& positions,
                      OpCounters* counters) {
    if (!tape.valid) throw StaleTapeError("descriptor tape is empty");
    if (positions.rows() != tape.positions.rows() || positions != tape.positions) {
        throw StaleTapeError("positions changed since the descriptor tape was recorded");
    }
    const auto& p = tape.params;
    const auto n = tape.positions.rows();
    if (dE_dAev.rows() != n || dE_dAev.cols() != static_cast<Eigen::Index>(p.width())) {
        throw ConfigError("descriptor gradient has the wrong shape");
    }
    Coords3d grad = Coords3d::Zero(n, 3);
    const auto nr = static_cast<Eigen::Index>(p.radial_size());

    for (std::size_t q = 0; q < tape.pair_i.size(); ++q) {
        const auto row = static_cast<Eigen::Index>(q);
        const Index i = tape.pair_i[q], j = tape.pair_j[q];
        const double r = tape.pair_r[row], fc = tape.pair_fc[row], dfc = tape.pair_dfc[row];
        const auto g = dE_dAev.row(i).segment(tape.species[static_cast<std::size_t>(j)] * nr, nr);
        double s = 0.0;
        for (Eigen::Index k = 0; k < nr; ++k) {
            const double x = r - p.radial_shifts[static_cast<std::size_t>(k)];
            const double e = std::exp(-p.radial_eta * x * x);
            s += g[k] * e * (-2.0 * p.radial_eta * x * fc + dfc);
        }
        const Vec3 v = s * tape.pair_unit.row(row).transpose();
        grad.row(j) += v.transpose();
        grad.row(i) -= v.transpose();
    }

    const double pref = angular_prefactor(p);
    const double rc = p.angular_cutoff;
    const auto nsec = p.angle_sections.size();
    const auto nshift = p.angular_shifts.size();
    std::vector<double> sec(nsec), dsec(nsec), shift(nshift), dshift(nshift);
    for (std::size_t t = 0; t < tape.tri_center.size(); ++t) {
        const Index i = tape.tri_center[t];
        const auto pa = static_cast<Eigen::Index>(tape.tri_ij[t]);
        const auto pb = static_cast<Eigen::Index>(tape.tri_ik[t]);
        const Index j = tape.pair_j[static_cast<std::size_t>(pa)], k = tape.pair_j[static_cast<std::size_t>(pb)];
        const double ra = tape.pair_r[pa], rb = tape.pair_r[pb];
        const double theta = tape.tri_theta[static_cast<Eigen::Index>(t)];
        const double fa = cutoff_fn(ra, rc), fb = cutoff_fn(rb, rc);
        const double dfa = cutoff_fn_derivative(ra, rc), dfb = cutoff_fn_derivative(rb, rc);
        const double mean = 0.5 * (ra + rb);

        for (std::size_t s = 0; s < nsec; ++s) {
            const double base = 1.0 + std::cos(theta - p.angle_sections[s]);
            const double pw = std::pow(base, p.zeta - 1.0);
            sec[s] = pref * pw * base;
            dsec[s] = -pref * p.zeta * pw * std::sin(theta - p.angle_sections[s]);
        }
        for (std::size_t r = 0; r < nshift; ++r) {
            const double x = mean - p.angular_shifts[r];
            shift[r] = std::exp(-p.angular_eta * x * x);
            dshift[r] = -2.0 * p.angular_eta * x * shift[r] * 0.5;  // d/dR_ij of the mean-distance factor
        }
        const auto col = static_cast<Eigen::Index>(
            p.angular_offset(tape.species[static_cast<std::size_t>(j)], tape.species[static_cast<std::size_t>(k)]));
        const auto g = dE_dAev.row(i).segment(col, static_cast<Eigen::Index>(nshift * nsec));

        double dtheta = 0.0, dshift_sum = 0.0, value_sum = 0.0;
        for (std::size_t r = 0; r < nshift; ++r)
            for (std::size_t s = 0; s < nsec; ++s) {
                const double w = g[static_cast<Eigen::Index>(r * nsec + s)];
                dtheta += w * shift[r] * dsec[s];
                dshift_sum += w * dshift[r] * sec[s];
                value_sum += w * shift[r] * sec[s];
            }
        const double fprod = fa * fb;
        dtheta *= fprod;
        const double d_ra = dshift_sum * fprod + value_sum * dfa * fb;
        const double d_rb = dshift_sum * fprod + value_sum * fa * dfb;

        const Vec3 ua = tape.pair_unit.row(pa).transpose();
        const Vec3 ub = tape.pair_unit.row(pb).transpose();
        Vec3 gj = d_ra * ua;
        Vec3 gk = d_rb * ub;
        const double cos_t = ua.dot(ub);
        const Vec3 perp_a = ub - cos_t * ua;
        const Vec3 perp_b = ua - cos_t * ub;
        const double sin_t = perp_a.norm();
        if (sin_t > 1e-12) {
            gj -= (dtheta / (ra * sin_t)) * perp_a;
            gk -= (dtheta / (rb * sin_t)) * perp_b;
        }
        grad.row(j) += gj.transpose();
        grad.row(k) += gk.transpose();
        grad.row(i) -= (gj + gk).transpose();
    }

    if (counters) {
        const auto np = tape.pair_i.size();
        const auto nt = tape.tri_center.size();
        // radial: per term 3 add 6 mul exp; per pair 6 add 3 mul
        tally(counters, OpCost{3, 6, 1}, np * p.radial_size());
        tally(counters, OpCost{6, 3, 0}, np);
        // angular: per section 3 add 5 mul cos sin pow; per shift 1 add 5 mul
        // exp; per term 3 add 6 mul; per triplet 30 add 45 mul, sqrt
        tally(counters, OpCost{3, 5, 3}, nt * nsec);
        tally(counters, OpCost{1, 5, 1}, nt * nshift);
        tally(counters, OpCost{3, 6, 0}, nt * nsec * nshift);
        tally(counters, OpCost{30, 45, 1}, nt);
        counters->gather_ops += np + 3 * nt;
        counters->scatter_ops += 2 * np + 3 * nt;
        counters->bytes_read += np * (p.radial_size() + 7) * sizeof(double) +
                                nt * (p.angular_size() + 10) * sizeof(double) +
                                static_cast<std::uint64_t>(tape.positions.size()) * sizeof(double);
        counters->bytes_written += (2 * np + 3 * nt) * 3 * sizeof(double);
    }
    return -grad;
}

void write_aev_csv(std::ostream& out, const Aev& aev) {
    const auto& v = aev.values;
    out << "atom";
    for (Eigen::Index c = 0; c < v.cols(); ++c) out << ",g" << c;
    out << '\n';
    out.precision(17);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        out << i;
        for (Eigen::Index c = 0; c < v.cols(); ++c) out << ',' << v(i, c);
        out << '\n';
    }
}

}  // namespace mlff
