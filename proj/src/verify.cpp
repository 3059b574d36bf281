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

#include "mlff/verify.hpp"

#include "mlff/aev.hpp"
#include "mlff/cff.hpp"
#include "mlff/costmodel.hpp"
#include "mlff/et.hpp"
#include "mlff/md.hpp"
#include "mlff/neighbors.hpp"
#include "mlff/nnp.hpp"
#include "mlff/random.hpp"

#include "json.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace mlff {

bool VerifySummary::all_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

Eigen::Matrix3d random_rotation(Rng& rng) {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    return q.toRotationMatrix();
}

struct AniEval {
    double energy = 0.0;
    Coords3d forces;
};

AniEval ani_eval(const AtomicSystem& s, const NnpModel& model, const AevParams& p, double perturb) {
    const auto nb = build_aev_neighbors(s, p);
    const auto d = compute_aev(s, nb, p, AevStrategy::Fused);
    const auto net = nnp_energy(d.aev, s.species, model);
    RowMatrixXd g = nnp_backward(net.tape, model);
    if (perturb != 0.0) g *= 1.0 + perturb;
    return {net.energy, aev_backward(d.tape, g, s.positions)};
}

double ani_energy(const AtomicSystem& s, const NnpModel& model, const AevParams& p) {
    const auto nb = build_aev_neighbors(s, p);
    return nnp_energy(compute_aev(s, nb, p, AevStrategy::Fused).aev, s.species, model).energy;
}

struct EtEval {
    double energy = 0.0;
    Coords3d forces;
    EtState state;
};

EtEval et_eval(const AtomicSystem& s, const EtParams& params) {
    const auto pairs = build_pairs_celllist(s, params.config.cutoff);
    auto out = et_energy(s, pairs, params);
    Coords3d f = et_forces(out.tape, params, s.positions);
    return {out.energy, std::move(f), out.tape.final_state};
}

/// max |F - F_fd| / max |F_fd| with the five-point central stencil of step h.
template <typename EnergyFn>
double fd_error(const AtomicSystem& s, const Coords3d& forces, EnergyFn&& energy, double h = 1e-4) {
    AtomicSystem work = s;
    double err = 0.0, scale = 0.0;
    auto at = [&](Eigen::Index i, int d, double x) {
        work.positions(i, d) = x;
        return energy(work);
    };
    for (Eigen::Index i = 0; i < s.positions.rows(); ++i) {
        for (int d = 0; d < 3; ++d) {
            const double x0 = s.positions(i, d);
            const double e2p = at(i, d, x0 + 2 * h), e1p = at(i, d, x0 + h);
            const double e1m = at(i, d, x0 - h), e2m = at(i, d, x0 - 2 * h);
            work.positions(i, d) = x0;
            const double fd = -(-e2p + 8.0 * e1p - 8.0 * e1m + e2m) / (12.0 * h);
            err = std::max(err, std::abs(forces(i, d) - fd));
            scale = std::max(scale, std::abs(fd));
        }
    }
    return scale > 0.0 ? err / scale : err;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

class Suite {
public:
    explicit Suite(const VerifyOptions& o) : opt_(o) {}

    void add(std::string name, double tolerance, double value, std::string detail = {}) {
        CheckResult c{std::move(name), tolerance, value, std::isfinite(value) && value <= tolerance, std::move(detail)};
        if (opt_.on_check) opt_.on_check(c);
        summary.checks.push_back(std::move(c));
    }

    VerifySummary summary;

private:
    const VerifyOptions& opt_;
};

}  // namespace

VerifySummary run_verification(const VerifyOptions& options) {
    Suite suite(options);
    const std::uint64_t seed = options.seed;
    const AevParams aev = AevParams::defaults();
    const NnpModel model = init_model(derive_seed(seed, 1), default_nnp_widths(), 1);
    const EtParams et = init_et(derive_seed(seed, 2));

    // Gradients against central differences.
    {
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 3; ++k) {
            const auto s = random_cluster(30, 0.08, derive_seed(seed, 100 + k));
            const auto ev = ani_eval(s, model, aev, options.adjoint_perturbation);
            worst = std::max(worst, fd_error(s, ev.forces, [&](const AtomicSystem& x) { return ani_energy(x, model, aev); }));
        }
        suite.add("ani_forces_vs_finite_difference", 1e-6, worst, "3 random 30-atom clusters, five-point stencil, h = 1e-4");
    }
    {
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 3; ++k) {
            const auto s = random_cluster(30, 0.08, derive_seed(seed, 200 + k));
            const auto ev = et_eval(s, et);
            worst = std::max(worst, fd_error(s, ev.forces, [&](const AtomicSystem& x) { return et_eval(x, et).energy; }));
        }
        suite.add("et_forces_vs_finite_difference", 1e-6, worst, "3 random 30-atom clusters, five-point stencil, h = 1e-4");
    }

    // Rigid motions.
    {
        Rng rng(derive_seed(seed, 300));
        const auto s = random_cluster(30, 0.08, derive_seed(seed, 301));
        const auto a0 = ani_eval(s, model, aev, 0.0);
        const auto e0 = et_eval(s, et);
        double de = 0.0, df = 0.0, dv = 0.0;
        for (int t = 0; t < 5; ++t) {
            const Eigen::Matrix3d r = random_rotation(rng);
            const Vec3 shift(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
            const auto moved = transformed(s, r, shift);
            const auto a1 = ani_eval(moved, model, aev, 0.0);
            const auto e1 = et_eval(moved, et);
            de = std::max({de, rel(a1.energy, a0.energy), rel(e1.energy, e0.energy)});
            const Coords3d fa = a0.forces * r.transpose();
            const Coords3d fe = e0.forces * r.transpose();
            df = std::max({df, (a1.forces - fa).cwiseAbs().maxCoeff() / a0.forces.cwiseAbs().maxCoeff(),
                           (e1.forces - fe).cwiseAbs().maxCoeff() / e0.forces.cwiseAbs().maxCoeff()});
            for (int d = 0; d < 3; ++d) {
                RowMatrixXd rv = RowMatrixXd::Zero(e0.state.v[0].rows(), e0.state.v[0].cols());
                for (int b = 0; b < 3; ++b) rv += r(d, b) * e0.state.v[static_cast<std::size_t>(b)];
                dv = std::max(dv, (e1.state.v[static_cast<std::size_t>(d)] - rv).cwiseAbs().maxCoeff());
            }
        }
        suite.add("energy_rigid_motion_invariance", 1e-9, de, "ANI and ET, 5 random motions");
        suite.add("force_rotation_covariance", 1e-8, df, "ANI and ET, relative to max |F|");
        suite.add("et_vector_feature_covariance", 1e-8, dv);
    }

    // Neighbor search.
    {
        double mismatches = 0.0;
        for (std::uint64_t k = 0; k < 10; ++k) {
            const auto s = random_cluster(60 + 10 * k, 0.05, derive_seed(seed, 400 + k));
            const double rc = 3.0 + 0.5 * static_cast<double>(k % 5);
            const auto a = build_pairs_bruteforce(s, rc);
            const auto b = build_pairs_celllist(s, rc);
            if (a.pairs != b.pairs || a.offsets != b.offsets) mismatches += 1.0;
        }
        suite.add("celllist_equals_bruteforce", 0.0, mismatches, "10 random systems, exact pair sets");
    }

    // Staged versus fused descriptors.
    {
        WorkloadSpec spec;
        spec.residues = 4;
        const auto s = generate_polyalanine(spec);
        const auto nb = build_aev_neighbors(s, aev);
        const auto a = compute_aev(s, nb, aev, AevStrategy::Staged);
        const auto b = compute_aev(s, nb, aev, AevStrategy::Fused);
        suite.add("staged_equals_fused", 1e-10, (a.aev.values - b.aev.values).cwiseAbs().maxCoeff());
    }

    // Counter formulas.
    suite.add("descriptor_width_1008", 0.0, std::abs(static_cast<double>(aev.width()) - 1008.0));
    {
        SpeciesHistogram h{};
        h[static_cast<std::size_t>(index_of(Element::H))] = 1;
        const auto ops = count_nnp_ops(model, h);
        suite.add("nnp_ops_per_atom_676160", 0.0, std::abs(static_cast<double>(ops.flops) - 676160.0));
    }
    {
        WorkloadSpec spec;
        spec.residues = 3;
        const auto s = generate_polyalanine(spec);
        const auto params = assign_default_params(s);
        const auto pairs = build_pairs_celllist(s, params.cutoff);
        const auto res = cff_energy_forces(s, params, pairs);
        const double per_pair = static_cast<double>(res.counters.at("cff_nonbonded").combined()) /
                                static_cast<double>(count_nonbonded_pairs(params, pairs));
        // Distance from the [25, 30] band (0 inside).
        suite.add("cff_ops_per_pair_in_25_30", 0.0, std::max({0.0, 25.0 - per_pair, per_pair - 30.0}),
                  "ops per pair " + std::to_string(per_pair));
    }
    suite.add("ns_per_day_arithmetic", 0.0, std::abs(ns_per_day(1000, 0.5, 43.2) - 1.0));

    // Hybrid with no solvent equals the pure ML run.
    {
        WorkloadSpec spec;
        spec.residues = 2;
        auto s = generate_polyalanine(spec);
        s.box = Box{s.positions.colwise().minCoeff().transpose(), s.positions.colwise().maxCoeff().transpose()};
        const auto cff = assign_default_params(s);
        auto ani = std::make_shared<AniProvider>(std::make_shared<const NnpModel>(model), aev);
        const double e_ml = compose_forces(SimMode::MLFFsys, s, nullptr, ani)->evaluate(s).energy;
        const double e_cml = compose_forces(SimMode::CMLsys, s, &cff, ani)->evaluate(s).energy;
        suite.add("cml_without_solvent_equals_mlff", 0.0, std::abs(e_ml - e_cml));
    }

    // Integrator on a Lennard-Jones dimer.
    {
        AtomicSystem dimer;
        dimer.species = {Element::O, Element::O};
        dimer.roles = {Role::Solute, Role::Solute};
        dimer.positions.resize(2, 3);
        dimer.positions << 0.0, 0.0, 0.0, 3.1, 0.0, 0.0;
        CffProvider cff(assign_default_params(dimer));
        SimConfig cfg;
        cfg.steps = 1000;
        cfg.temperature = 0.0;
        const auto st = integrate(dimer, cff, cfg);
        double drift = 0.0;
        for (double e : st.total) drift = std::max(drift, std::abs(e - st.total.front()));
        suite.add("lj_dimer_energy_drift", 1e-4, drift / std::abs(st.total.front()), "1000 steps at 0.5 fs");
    }
    return suite.summary;
}

void write_verify_json(std::ostream& out, const VerifySummary& summary) {
    nlohmann::ordered_json j;
    j["schema_version"] = VerifySummary::kSchemaVersion;
    j["passed"] = summary.all_passed();
    auto& checks = j["checks"];
    checks = nlohmann::ordered_json::array();
    for (const auto& c : summary.checks) {
        checks.push_back({{"name", c.name},
                          {"tolerance", c.tolerance},
                          {"value", c.value},
                          {"passed", c.passed},
                          {"detail", c.detail}});
    }
    out << j.dump(2) << '\n';
}

}  // namespace mlff
