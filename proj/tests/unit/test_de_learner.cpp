#include "usfc/de_learner.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace usfc;

namespace {

DEConfig tuned_config(Machine m = Machine::Classical) {
    DEConfig c;
    c.w = 0.7;
    c.cr = 0.9;
    c.machine = m;
    return c;
}

}  // namespace

TEST(DEConfig, Validation) {
    DEConfig c;
    c.m = 2;
    try {
        c.validate();
        FAIL() << "M=2 accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "m");
    }
    c.m = 3;
    EXPECT_NO_THROW(c.validate());
    c.max_iterations = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = DEConfig{};
    c.cr = 1.1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = DEConfig{};
    c.epsilon_t = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = DEConfig{};
    c.gamma = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(DeltaPolicy, ParseAndName) {
    EXPECT_EQ(DeltaPolicy::parse("zero"), DeltaPolicy::zero());
    EXPECT_EQ(DeltaPolicy::parse("half_pi"), DeltaPolicy::half_pi());
    EXPECT_EQ(DeltaPolicy::parse("ti"), DeltaPolicy::target_independent());
    EXPECT_NEAR(DeltaPolicy::parse("pi").angle(), kPi, 1e-15);
    EXPECT_NEAR(DeltaPolicy::parse("0.25").angle(), 0.25, 1e-15);
    EXPECT_THROW(DeltaPolicy::parse("sideways"), std::invalid_argument);
    EXPECT_EQ(DeltaPolicy::target_independent().name(), "ti");
}

TEST(Mutate, Examples) {
    const PreferenceVector half(0.5, 0.5), b(0.2, 0.7);
    EXPECT_EQ(mutate(half, b, b, 0.8), half);
    EXPECT_EQ(mutate(PreferenceVector(0.3, 0.6), b, PreferenceVector(0.9, 0.1), 0.0), PreferenceVector(0.3, 0.6));
    const PreferenceVector hi(0.9, 0.9), lo(0.1, 0.1);
    EXPECT_EQ(mutate(hi, hi, lo, 1.0, BoundaryRule::Clamp), PreferenceVector(1.0, 1.0));
    const auto r = mutate(hi, hi, lo, 1.0, BoundaryRule::Reflect);
    EXPECT_NEAR(r.p0(), 0.3, 1e-12);
    EXPECT_NEAR(r.p1(), 0.3, 1e-12);
}

TEST(Mutate, ReflectFolds) {
    EXPECT_NEAR(reflect_unit(-0.25), 0.25, 1e-15);
    EXPECT_NEAR(reflect_unit(1.25), 0.75, 1e-15);
    EXPECT_NEAR(reflect_unit(2.5), 0.5, 1e-15);
    EXPECT_NEAR(reflect_unit(-1.75), 0.25, 1e-15);
    EXPECT_EQ(reflect_unit(0.4), 0.4);
}

TEST(Crossover, Examples) {
    const PreferenceVector p(0.1, 0.2), nu(0.8, 0.9);
    EXPECT_EQ(crossover(p, nu, 0.5, {0.3, 0.9}), PreferenceVector(0.8, 0.2));
    EXPECT_EQ(crossover(p, nu, 1.0, {1.0, 0.999}), nu);
    EXPECT_EQ(crossover(p, nu, 0.0, {0.1, 0.5}), p);
    // r == cr keeps the mutant component
    EXPECT_EQ(crossover(p, nu, 0.5, {0.5, 0.5}), nu);
}

TEST(Select, StrictlyGreater) {
    EXPECT_TRUE(trial_survives(0.5, 0.9));
    EXPECT_FALSE(trial_survives(0.7, 0.7));
    EXPECT_FALSE(trial_survives(0.9, 0.5));
    EXPECT_TRUE(trial_survives(0.99, 1.0));
}

TEST(PickDonors, DistinctAndExcludeSelf) {
    Rng rng(8);
    for (int n = 0; n < 2000; ++n) {
        const std::size_t i = rng.uniform_index(10);
        const auto d = pick_donors(10, i, rng);
        const std::set<std::size_t> s(d.begin(), d.end());
        ASSERT_EQ(s.size(), 3u);
        ASSERT_EQ(s.count(i), 0u);
        for (auto k : d) ASSERT_LT(k, 10u);
    }
    const auto d = pick_donors(3, 1, rng);
    EXPECT_EQ(std::set<std::size_t>(d.begin(), d.end()).size(), 3u);
}

TEST(Initialize, DomainAndDeterminism) {
    DEConfig c = tuned_config();
    c.m = 3;
    const FitnessEvaluator f(c, canonical_task(TaskId::T1));
    const auto a = initialize(c, f, 5);
    const auto b = initialize(c, f, 5);
    ASSERT_EQ(a.agents.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(a.agents[i], b.agents[i]);
        EXPECT_GE(a.agents[i].p0(), 0.0);
        EXPECT_LE(a.agents[i].p1(), 1.0);
    }
    double best = 0;
    for (double v : a.fitness) best = std::max(best, v);
    EXPECT_EQ(a.best_f, best);
}

TEST(RunTrial, LooseToleranceConvergesImmediately) {
    DEConfig c = tuned_config();
    c.epsilon_t = 0.99;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto r = run_trial(c, canonical_task(TaskId::T1), s);
        ASSERT_TRUE(r.converged);
        ASSERT_LE(*r.completion_iteration, 1);
    }
}

TEST(RunTrial, InvariantsOverManySeeds) {
    for (auto m : {Machine::Classical, Machine::Quantum}) {
        for (auto id : {TaskId::T1, TaskId::T2, TaskId::T3, TaskId::T4}) {
            DEConfig c = tuned_config(m);
            c.delta = DeltaPolicy::target_independent();
            for (std::uint64_t s = 0; s < 40; ++s) {
                const auto r = run_trial(c, canonical_task(id), s);
                const auto& f = r.best_f_per_iteration;
                ASSERT_EQ(f.size(), static_cast<std::size_t>(r.iterations_run) + 1);
                for (std::size_t k = 1; k < f.size(); ++k) ASSERT_GE(f[k], f[k - 1]);
                ASSERT_EQ(r.converged, f.back() >= 1 - c.epsilon_t);
                if (r.converged) {
                    ASSERT_EQ(*r.completion_iteration, r.iterations_run);
                }
                ASSERT_GE(r.best_pref.p0(), 0.0);
                ASSERT_LE(r.best_pref.p0(), 1.0);
                ASSERT_GE(r.best_pref.p1(), 0.0);
                ASSERT_LE(r.best_pref.p1(), 1.0);
            }
        }
    }
}

TEST(RunTrial, Reproducible) {
    const DEConfig c = tuned_config(Machine::Quantum);
    EXPECT_EQ(run_trial(c, canonical_task(TaskId::T1), 99), run_trial(c, canonical_task(TaskId::T1), 99));
    EXPECT_NE(run_trial(c, canonical_task(TaskId::T1), 99).best_f_per_iteration,
              run_trial(c, canonical_task(TaskId::T1), 98).best_f_per_iteration);
}

TEST(RunTrial, HalfPiTracksClassical) {
    // At Delta = pi/2 the quantum fitness landscape equals the classical one for T1.
    DEConfig c = tuned_config(Machine::Classical);
    DEConfig q = tuned_config(Machine::Quantum);
    q.delta = DeltaPolicy::half_pi();
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto a = run_trial(c, canonical_task(TaskId::T1), s);
        const auto b = run_trial(q, canonical_task(TaskId::T1), s);
        EXPECT_EQ(a.iterations_run, b.iterations_run);
    }
}

TEST(RunTrial, ShotNoiseFitness) {
    DEConfig c = tuned_config(Machine::Quantum);
    c.shots = ShotSettings{};
    c.shots->l_total = 20000;
    const auto a = run_trial(c, canonical_task(TaskId::T1), 4);
    EXPECT_EQ(a, run_trial(c, canonical_task(TaskId::T1), 4));
    EXPECT_EQ(a.converged, a.best_f_per_iteration.back() >= 1 - c.epsilon_t);
}

TEST(FitnessEvaluator, RejectsMultiBitTask) {
    EXPECT_THROW(FitnessEvaluator(DEConfig{}, TaskSpec::deterministic(2, {0, 0, 0, 1})), ContractError);
}
