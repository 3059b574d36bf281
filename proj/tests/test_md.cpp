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

#include "mlff/md.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

namespace mlff {
namespace {

class ZeroForces final : public ForceProvider {
public:
    PotentialResult evaluate(const AtomicSystem& s, const std::vector<bool>*) const override {
        return PotentialResult::zeros(s.size());
    }
    std::string name() const override { return "zero"; }
};

// Returns NaN forces from the given call onward.
class BreaksAt final : public ForceProvider {
public:
    explicit BreaksAt(int call) : call_(call) {}
    PotentialResult evaluate(const AtomicSystem& s, const std::vector<bool>*) const override {
        auto r = PotentialResult::zeros(s.size());
        if (++calls_ >= call_) r.forces(0, 0) = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    std::string name() const override { return "breaks"; }

private:
    int call_;
    mutable int calls_ = 0;
};

AtomicSystem peptide(int residues, int caps = 0) {
    WorkloadSpec spec;
    spec.residues = residues;
    spec.caps = caps;
    return generate_polyalanine(spec);
}

std::shared_ptr<const ForceProvider> small_ani(std::uint64_t seed) {
    return std::make_shared<AniProvider>(std::make_shared<NnpModel>(init_model(seed, {1008, 16, 1}, 1)));
}

SimConfig quick(int steps) {
    SimConfig c;
    c.steps = steps;
    c.warmup_steps = 2;
    c.temperature = 300.0;
    return c;
}

TEST(SimMode, Names) {
    EXPECT_EQ(sim_mode_from_string("cff"), SimMode::CFFsys);
    EXPECT_EQ(sim_mode_from_string("MLFFsys"), SimMode::MLFFsys);
    EXPECT_EQ(sim_mode_from_string("cml"), SimMode::CMLsys);
    EXPECT_EQ(to_string(SimMode::CMLsys), "CMLsys");
    EXPECT_THROW(sim_mode_from_string("qm"), ConfigError);
}

TEST(SimConfig, ValidationAndWarmupClamp) {
    SimConfig c;
    EXPECT_NO_THROW(c.validate());
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SimConfig{};
    c.steps = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SimConfig{};
    c.steps = 1;
    c.warmup_steps = 10;
    EXPECT_EQ(c.effective_warmup(), 0);
    c.steps = 50;
    EXPECT_EQ(c.effective_warmup(), 10);
}

TEST(Md, NsPerDay) {
    EXPECT_DOUBLE_EQ(ns_per_day(1000, 0.5, 43.2), 1.0);
    EXPECT_DOUBLE_EQ(ns_per_day(2000, 0.5, 43.2), 2.0);
}

TEST(Md, EnergyDriftSeparatesTrendFromOscillation) {
    std::vector<double> linear, wobble;
    for (int k = 0; k <= 100; ++k) {
        linear.push_back(10.0 + 0.01 * k);
        wobble.push_back(10.0 + 0.5 * std::sin(0.7 * k));
    }
    const auto a = energy_drift(linear);
    EXPECT_NEAR(a.secular, 1.0, 1e-12);
    EXPECT_NEAR(a.max_deviation, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(a.initial, 10.0);
    const auto b = energy_drift(wobble);
    EXPECT_LT(std::abs(b.secular), 0.1);
    EXPECT_GT(b.max_deviation, 0.45);
}

TEST(Md, MaxwellBoltzmann) {
    Eigen::VectorXd masses = Eigen::VectorXd::Constant(3000, 12.011);
    masses.head(1000).setConstant(1.008);
    const Coords3d v = maxwell_boltzmann(masses, 300.0, 5);
    Vec3 p = Vec3::Zero();
    for (Eigen::Index i = 0; i < v.rows(); ++i) p += masses(i) * v.row(i).transpose();
    EXPECT_LT(p.norm(), 1e-10);
    const double t = 2.0 * kinetic_energy(masses, v) / (3.0 * 3000 * kBoltzmann);
    EXPECT_NEAR(t, 300.0, 15.0);
    EXPECT_EQ(maxwell_boltzmann(masses, 300.0, 5), v);
    EXPECT_EQ(maxwell_boltzmann(masses, 0.0, 5).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Md, FreeParticlesMoveInStraightLines) {
    const auto s = peptide(1);
    ZeroForces zero;
    SimConfig c = quick(20);
    c.temperature = 0.0;
    auto still = integrate(s, zero, c);
    EXPECT_EQ(still.final_positions, s.positions);
    Coords3d v = Coords3d::Constant(static_cast<Eigen::Index>(s.size()), 3, 0.01);
    auto moving = integrate(s, v, zero, c);
    EXPECT_LT((moving.final_positions - (s.positions.array() + 20 * 0.5 * 0.01).matrix()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(moving.final_velocities, v);
}

TEST(Md, LennardJonesDimerConservesEnergy) {
    AtomicSystem s;
    s.species = {Element::O, Element::O};
    s.roles.assign(2, Role::Solute);
    s.positions = Coords3d(2, 3);
    s.positions << 0, 0, 0, 3.1, 0, 0;
    CffProvider cff(assign_default_params(s));
    SimConfig c = quick(4000);
    c.temperature = 0.0;
    const auto t = integrate(s, cff, c);
    const auto d = energy_drift(t.total);
    EXPECT_LT(std::abs(d.secular), 1e-6);
    EXPECT_LT(d.max_deviation, 1e-4);
    EXPECT_GT(*std::max_element(t.kinetic.begin(), t.kinetic.end()), 1e-4);
}

TEST(Md, DivergenceNamesTheStep) {
    const auto s = peptide(1);
    BreaksAt bad(4);  // call 1 is the initial force evaluation
    try {
        integrate(s, bad, quick(10));
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.step(), 3);
        EXPECT_NE(std::string(e.what()).find("step 3"), std::string::npos);
    }
}

TEST(Md, RunsAreReproducible) {
    const auto s = peptide(2, 3);
    CffProvider cff(assign_default_params(s));
    const auto a = integrate(s, cff, quick(30));
    const auto b = integrate(s, cff, quick(30));
    EXPECT_EQ(a.final_positions, b.final_positions);
    EXPECT_EQ(a.final_velocities, b.final_velocities);
    EXPECT_EQ(a.total, b.total);
    EXPECT_EQ(a.counters, b.counters);
    auto other = quick(30);
    other.seed = 43;
    EXPECT_NE(integrate(s, cff, other).final_positions, a.final_positions);
}

TEST(Md, StageTimesAccountForElapsedTime) {
    const auto s = peptide(3);
    const auto p = compose_forces(SimMode::MLFFsys, s, nullptr, small_ani(1));
    SimConfig c = quick(12);
    const auto t = integrate(s, *p, c);
    EXPECT_EQ(t.timed_steps, 10);
    double sum = 0.0;
    for (const auto& [name, sec] : t.stage_seconds) sum += sec;
    EXPECT_NEAR(sum / t.elapsed_seconds, 1.0, 0.02);
    for (const char* stage : {"neighbors", "aev_forward", "energy_forward", "force_backward", "integrate"})
        EXPECT_TRUE(t.stage_seconds.count(stage)) << stage;
    EXPECT_DOUBLE_EQ(t.ns_per_day, ns_per_day(10, 0.5, t.elapsed_seconds));
    EXPECT_EQ(t.potential.size(), 13u);
}

TEST(Md, SingleStepRunIsTimed) {
    const auto s = peptide(1);
    CffProvider cff(assign_default_params(s));
    SimConfig c = quick(1);
    c.warmup_steps = 10;
    const auto t = integrate(s, cff, c);
    EXPECT_EQ(t.timed_steps, 1);
    EXPECT_GT(t.ns_per_day, 0.0);
}

TEST(Md, DumpWritesFrames) {
    const auto s = peptide(1);
    CffProvider cff(assign_default_params(s));
    std::ostringstream out;
    SimConfig c = quick(10);
    c.dump_every = 5;
    c.dump = &out;
    integrate(s, cff, c);
    const std::string text = out.str();
    std::size_t frames = 0;
    for (auto pos = text.find("step="); pos != std::string::npos; pos = text.find("step=", pos + 1)) ++frames;
    EXPECT_EQ(frames, 3u);
}

TEST(Composition, CmlNeedsASolvatedSystem) {
    const auto s = peptide(1);
    const auto cff = assign_default_params(s);
    EXPECT_THROW(compose_forces(SimMode::CMLsys, s, &cff, small_ani(1)), ConfigError);
    EXPECT_THROW(compose_forces(SimMode::MLFFsys, s, &cff, nullptr), ConfigError);
    EXPECT_THROW(compose_forces(SimMode::CFFsys, s, nullptr, nullptr), ConfigError);
}

TEST(Composition, CmlWithoutSolventEqualsMlff) {
    auto s = peptide(2, 3);
    s.box = Box{s.positions.colwise().minCoeff().transpose(), s.positions.colwise().maxCoeff().transpose()};
    const auto cff = assign_default_params(s);
    const auto ml = small_ani(2);
    const auto cml = compose_forces(SimMode::CMLsys, s, &cff, ml)->evaluate(s);
    const auto mlff = compose_forces(SimMode::MLFFsys, s, &cff, ml)->evaluate(s);
    EXPECT_EQ(cml.energy, mlff.energy);
    EXPECT_EQ(cml.forces, mlff.forces);
}

class Solvated : public ::testing::Test {
protected:
    void SetUp() override {
        WorkloadSpec spec;
        spec.residues = 1;
        spec.caps = 3;
        spec.solvated = true;
        spec.padding = 3.0;
        system = generate_polyalanine(spec);
        cff = assign_default_params(system);
    }
    AtomicSystem system;
    CffParams cff;
};

TEST_F(Solvated, SolventFeelsTheClassicalField) {
    ASSERT_GT(system.count(Role::Solvent), 0u);
    const auto cml = compose_forces(SimMode::CMLsys, system, &cff, small_ani(1))->evaluate(system);
    const auto all = compose_forces(SimMode::CFFsys, system, &cff, nullptr)->evaluate(system);
    for (auto i : system.indices_with(Role::Solvent)) {
        EXPECT_LT((cml.forces.row(i) - all.forces.row(i)).cwiseAbs().maxCoeff(), 1e-9) << i;
    }
    bool solute_differs = false;
    for (auto i : system.indices_with(Role::Solute))
        solute_differs |= (cml.forces.row(i) - all.forces.row(i)).cwiseAbs().maxCoeff() > 1e-6;
    EXPECT_TRUE(solute_differs);
}

TEST_F(Solvated, ClassicalModeIgnoresTheNetwork) {
    const auto a = compose_forces(SimMode::CFFsys, system, &cff, small_ani(1))->evaluate(system);
    const auto b = compose_forces(SimMode::CFFsys, system, &cff, small_ani(2))->evaluate(system);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.forces, b.forces);
    EXPECT_FALSE(a.counters.count("nnp_forward"));
}

TEST_F(Solvated, MlWorkIsTheSameWithAndWithoutSolvent) {
    const auto ml = small_ani(3);
    const auto cml = compose_forces(SimMode::CMLsys, system, &cff, ml)->evaluate(system);
    const auto mlff = compose_forces(SimMode::MLFFsys, system, &cff, ml)->evaluate(system);
    EXPECT_EQ(cml.counters.at("nnp_forward"), mlff.counters.at("nnp_forward"));
    EXPECT_EQ(cml.counters.at("aev_radial"), mlff.counters.at("aev_radial"));
}

}  // namespace
}  // namespace mlff
