#include "usfc/fidelity.hpp"
#include "usfc/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace usfc;

TEST(TaskSpec, CanonicalTasks) {
    EXPECT_EQ(canonical_task(TaskId::T1).target(0), 0);
    EXPECT_EQ(canonical_task(TaskId::T1).target(1), 0);
    EXPECT_EQ(canonical_task(TaskId::T2).target(1), 1);
    EXPECT_EQ(canonical_task(TaskId::T3).target(0), 1);
    EXPECT_EQ(canonical_task(TaskId::T4).target(0), 1);
    EXPECT_EQ(canonical_task(TaskId::T4).target(1), 0);
    EXPECT_EQ(task_id_from_string("T3"), TaskId::T3);
}

TEST(TaskSpec, Validation) {
    EXPECT_THROW(TaskSpec(1, {{1.0, 0.0}}), std::invalid_argument);
    EXPECT_THROW(TaskSpec(1, {{0.5, 0.4}, {1.0, 0.0}}), std::invalid_argument);
    EXPECT_NO_THROW(TaskSpec(1, {{0.5, 0.5}, {0.2, 0.8}}));
    EXPECT_FALSE(TaskSpec(1, {{0.5, 0.5}, {0.2, 0.8}}).is_deterministic());
}

TEST(TaskSpec, Conjugation) {
    const auto t = canonical_task(TaskId::T1).conjugated({0, 1});
    EXPECT_EQ(t, canonical_task(TaskId::T4).conjugated({1, 1}));
    EXPECT_EQ(t.target(1), 1);
}

TEST(Bitstring, MostSignificantFirst) {
    EXPECT_EQ(bitstring(2, 3), "010");
    EXPECT_EQ(bitstring(5, 3), "101");
    EXPECT_EQ(parse_bitstring("101"), 5u);
    EXPECT_THROW(parse_bitstring("1x1"), std::invalid_argument);
}

TEST(TaskFidelity, Examples) {
    const auto t1 = canonical_task(TaskId::T1);
    EXPECT_DOUBLE_EQ(task_fidelity({{1.0, 0.0}, {1.0, 0.0}}, t1), 1.0);
    EXPECT_DOUBLE_EQ(task_fidelity({{0.0, 1.0}, {1.0, 0.0}}, t1), 0.0);
    // sqrt(0.64) * sqrt(0.36), square root
    EXPECT_NEAR(task_fidelity({{0.64, 0.36}, {0.36, 0.64}}, t1), std::sqrt(0.8 * 0.6), 1e-15);
    EXPECT_THROW(task_fidelity({{1.0, 0.0}}, t1), ContractError);
}

TEST(TaskFidelity, ProbabilisticTarget) {
    const TaskSpec t(1, {{0.5, 0.5}, {0.5, 0.5}});
    EXPECT_NEAR(task_fidelity({{0.5, 0.5}, {0.5, 0.5}}, t), 1.0, 1e-15);
}

TEST(TaskFidelity, BoundedOnRandomTables) {
    Rng rng(9);
    for (int n = 0; n < 1000; ++n) {
        const double a = rng.uniform01(), b = rng.uniform01(), c = rng.uniform01(), d = rng.uniform01();
        const TaskSpec t(1, {{c, 1 - c}, {d, 1 - d}});
        const double f = task_fidelity({{a, 1 - a}, {b, 1 - b}}, t);
        ASSERT_GE(f, 0.0);
        ASSERT_LE(f, 1.0);
    }
}

TEST(Advantage, Examples) {
    EXPECT_NEAR(analytic_advantage(PreferenceVector(0.5, 0.5), 0).lambda, 0.25, 1e-15);
    EXPECT_EQ(analytic_advantage(PreferenceVector(1.0, 0.3), 0).lambda, 0.0);
    EXPECT_EQ(analytic_advantage(PreferenceVector(0.4, 0.0), 0).lambda, 0.0);
    EXPECT_NEAR(analytic_advantage(PreferenceVector(0.5, 0.5), kPi / 2).gap, 0.0, 1e-16);
    EXPECT_NEAR(dephased_advantage(0.25, 0.5), 0.125, 1e-15);
}

TEST(Advantage, IdentityOnRandomPoints) {
    const auto t1 = canonical_task(TaskId::T1);
    Rng rng(2024);
    double worst = 0.0;
    for (int n = 0; n < 10000; ++n) {
        const PreferenceVector p(rng.uniform01(), rng.uniform01());
        const double delta = 2 * kPi * rng.uniform01();
        const double fq = task_fidelity(machine_table(Machine::Quantum, p, PhaseConfig::fixed(delta), 0), t1);
        const double fc = task_fidelity(machine_table(Machine::Classical, p, PhaseConfig::fixed(delta), 0), t1);
        const double lambda = 2 * p.p0() * std::sqrt(p.p0() * (1 - p.p0()) * p.p1() * (1 - p.p1()));
        worst = std::max(worst, std::abs(std::pow(fq, 4) - std::pow(fc, 4) - lambda * std::cos(delta)));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Advantage, DephasedGapScales) {
    const auto t1 = canonical_task(TaskId::T1);
    const PreferenceVector p(0.7, 0.45);
    const double lambda = analytic_advantage(p, 0).lambda;
    for (double gamma : {0.0, 0.25, 0.5, 1.0}) {
        const double fq = task_fidelity(machine_table(Machine::Quantum, p, PhaseConfig::fixed(0), gamma), t1);
        const double fc = task_fidelity(machine_table(Machine::Classical, p, PhaseConfig::fixed(0), 0), t1);
        EXPECT_NEAR(std::pow(fq, 4) - std::pow(fc, 4), dephased_advantage(lambda, gamma), 1e-13);
    }
}

// Gap structure of the other three tasks: with D = 2 sqrt(p0 p1 (1-p0)(1-p1)),
// F_Q^4 - F_C^4 = s * w * D cos(Delta) with (s, w) = (-1, p0), (-1, 1-p0), (+1, 1-p0).
TEST(Advantage, OtherTasksGapStructure) {
    Rng rng(77);
    const std::array<std::pair<TaskId, std::pair<int, bool>>, 3> cases{
        {{TaskId::T2, {-1, true}}, {TaskId::T3, {-1, false}}, {TaskId::T4, {+1, false}}}};
    for (int n = 0; n < 2000; ++n) {
        const PreferenceVector p(rng.uniform01(), rng.uniform01());
        const double delta = 2 * kPi * rng.uniform01();
        const double d = 2 * std::sqrt(p.p0() * p.p1() * (1 - p.p0()) * (1 - p.p1()));
        for (const auto& [id, sw] : cases) {
            const auto t = canonical_task(id);
            const double fq = task_fidelity(machine_table(Machine::Quantum, p, PhaseConfig::fixed(delta), 0), t);
            const double fc = task_fidelity(machine_table(Machine::Classical, p, PhaseConfig::fixed(delta), 0), t);
            const double w = sw.second ? p.p0() : 1 - p.p0();
            ASSERT_NEAR(std::pow(fq, 4) - std::pow(fc, 4), sw.first * w * d * std::cos(delta), 1e-12);
        }
    }
}
