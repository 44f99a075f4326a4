#include "usfc/de_learner.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace usfc {

namespace {

// Keys of the per-trial seed tree: (iteration, agent, stream).
constexpr std::uint64_t kIncumbentEval = 0;
constexpr std::uint64_t kTrialEval = 1;
constexpr std::uint64_t kVariation = 2;

}  // namespace

DeltaPolicy DeltaPolicy::parse(const std::string& text) {
    if (text == "zero" || text == "0") return zero();
    if (text == "half_pi" || text == "pi/2") return half_pi();
    if (text == "ti" || text == "target_independent") return target_independent();
    if (text == "pi") return fixed(kPi);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
        throw std::invalid_argument("unknown delta policy '" + text + "' (expected zero|half_pi|ti|pi|<radians>)");
    }
    return fixed(v);
}

PhaseConfig DeltaPolicy::phases() const noexcept {
    switch (kind_) {
        case Kind::Zero: return PhaseConfig::fixed(0.0);
        case Kind::HalfPi: return PhaseConfig::fixed(kPi / 2.0);
        case Kind::TargetIndependent: return PhaseConfig::target_independent();
        case Kind::Fixed: break;
    }
    return PhaseConfig::fixed(angle_);
}

std::string DeltaPolicy::name() const {
    switch (kind_) {
        case Kind::Zero: return "zero";
        case Kind::HalfPi: return "half_pi";
        case Kind::TargetIndependent: return "ti";
        case Kind::Fixed: break;
    }
    if (angle_ == kPi) return "pi";
    std::ostringstream os;
    os.precision(17);
    os << angle_;
    return os.str();
}

void DEConfig::validate() const {
    if (m < 3) throw ConfigError("m", "population size must be >= 3 (three distinct donors), got " + std::to_string(m));
    if (!(cr >= 0.0 && cr <= 1.0)) throw ConfigError("cr", "crossover rate must lie in [0, 1]");
    if (!(w >= 0.0 && w <= 1e6)) throw ConfigError("w", "differential weight must be a finite non-negative number");
    if (!(epsilon_t > 0.0 && epsilon_t < 1.0)) throw ConfigError("epsilon_t", "error tolerance must lie in (0, 1)");
    if (max_iterations < 1) throw ConfigError("max_iterations", "must be >= 1");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma", "decay rate must lie in [0, 1]");
    if (shots && shots->l_total < 1) throw ConfigError("shots.l_total", "must be >= 1");
}

FitnessEvaluator::FitnessEvaluator(const DEConfig& config, TaskSpec task)
    : machine_(config.machine),
      phases_(config.delta.phases()),
      gamma_(config.gamma),
      shots_(config.shots),
      task_(std::move(task)) {
    if (task_.n_bits() != 1) throw ContractError("the single-feature learner only handles N = 1 tasks");
}

double FitnessEvaluator::operator()(const PreferenceVector& pref, std::uint64_t eval_seed) const {
    if (!shots_) return task_fidelity(machine_table(machine_, pref, phases_, gamma_), task_);
    return sampled_task_fidelity(machine_, pref, phases_, gamma_, task_, ShotPlan(shots_->l_total, eval_seed),
                                 shots_->dephasing);
}

void Population::record(const PreferenceVector& pref, double f) noexcept {
    if (f > best_f) {
        best_f = f;
        best_pref = pref;
    }
}

Population initialize(const DEConfig& config, const FitnessEvaluator& fitness, std::uint64_t seed) {
    config.validate();
    Rng rng(derive_seed(seed, {0, 0, kVariation}));
    Population pop;
    pop.agents.reserve(static_cast<std::size_t>(config.m));
    for (int i = 0; i < config.m; ++i) {
        const double p0 = rng.uniform01();
        const double p1 = rng.uniform01();
        pop.agents.emplace_back(p0, p1);
    }
    pop.best_pref = pop.agents.front();
    pop.best_f = -1.0;
    for (std::size_t i = 0; i < pop.agents.size(); ++i) {
        const double f = fitness(pop.agents[i], derive_seed(seed, {0, i, kIncumbentEval}));
        pop.fitness.push_back(f);
        pop.record(pop.agents[i], f);
    }
    return pop;
}

std::array<std::size_t, 3> pick_donors(std::size_t population_size, std::size_t i, Rng& rng) {
    if (population_size < 3) throw ContractError("three distinct donors need at least three agents");
    const bool exclude_self = population_size >= 4;
    std::array<std::size_t, 3> d{};
    for (std::size_t k = 0; k < 3; ++k) {
        for (;;) {
            const std::size_t c = rng.uniform_index(population_size);
            if (exclude_self && c == i) continue;
            bool taken = false;
            for (std::size_t q = 0; q < k; ++q) taken = taken || d[q] == c;
            if (taken) continue;
            d[k] = c;
            break;
        }
    }
    return d;
}

std::string to_string(BoundaryRule rule) { return rule == BoundaryRule::Reflect ? "reflect" : "clamp"; }

BoundaryRule boundary_rule_from_string(const std::string& name) {
    if (name == "reflect") return BoundaryRule::Reflect;
    if (name == "clamp") return BoundaryRule::Clamp;
    throw std::invalid_argument("unknown boundary rule '" + name + "' (expected reflect|clamp)");
}

double reflect_unit(double v) noexcept {
    double r = std::fmod(std::abs(v), 2.0);
    if (r > 1.0) r = 2.0 - r;
    return r;
}

PreferenceVector mutate(const PreferenceVector& pa, const PreferenceVector& pb, const PreferenceVector& pc, double w,
                        BoundaryRule rule) {
    const double v0 = pa.p0() + w * (pb.p0() - pc.p0());
    const double v1 = pa.p1() + w * (pb.p1() - pc.p1());
    if (rule == BoundaryRule::Clamp) return PreferenceVector::clamped(v0, v1);
    return PreferenceVector::clamped(reflect_unit(v0), reflect_unit(v1));
}

PreferenceVector mutate(const Population& pop, std::size_t i, double w, Rng& rng, BoundaryRule rule) {
    const auto d = pick_donors(pop.agents.size(), i, rng);
    return mutate(pop.agents[d[0]], pop.agents[d[1]], pop.agents[d[2]], w, rule);
}

PreferenceVector crossover(const PreferenceVector& incumbent, const PreferenceVector& mutant, double cr,
                           const std::array<double, 2>& r) {
    return PreferenceVector(r[0] > cr ? incumbent.p0() : mutant.p0(), r[1] > cr ? incumbent.p1() : mutant.p1());
}

PreferenceVector crossover(const PreferenceVector& incumbent, const PreferenceVector& mutant, double cr, Rng& rng) {
    const double r0 = rng.uniform01();
    const double r1 = rng.uniform01();
    return crossover(incumbent, mutant, cr, {r0, r1});
}

bool trial_survives(double incumbent_f, double trial_f) noexcept { return trial_f > incumbent_f; }

TrialRecord run_trial(const DEConfig& config, const TaskSpec& task, std::uint64_t seed) {
    config.validate();
    const FitnessEvaluator fitness(config, task);
    const bool reevaluate = config.shots && config.shots->incumbent == IncumbentPolicy::Reevaluate;
    const double threshold = 1.0 - config.epsilon_t;

    Population pop = initialize(config, fitness, seed);
    TrialRecord rec;
    rec.seed = seed;
    rec.best_f_per_iteration.push_back(pop.best_f);

    const std::size_t m = pop.agents.size();
    std::vector<PreferenceVector> trials(m);
    int n = 0;
    while (pop.best_f < threshold && n < config.max_iterations) {
        ++n;
        const auto gen = static_cast<std::uint64_t>(n);
        // All trial vectors are formed from the same parent generation.
        for (std::size_t i = 0; i < m; ++i) {
            Rng rng(derive_seed(seed, {gen, i, kVariation}));
            const PreferenceVector mutant = mutate(pop, i, config.w, rng, config.boundary);
            trials[i] = crossover(pop.agents[i], mutant, config.cr, rng);
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (reevaluate) {
                pop.fitness[i] = fitness(pop.agents[i], derive_seed(seed, {gen, i, kIncumbentEval}));
                pop.record(pop.agents[i], pop.fitness[i]);
            }
            const double ft = fitness(trials[i], derive_seed(seed, {gen, i, kTrialEval}));
            pop.record(trials[i], ft);
            if (trial_survives(pop.fitness[i], ft)) {
                pop.agents[i] = trials[i];
                pop.fitness[i] = ft;
            }
        }
        rec.best_f_per_iteration.push_back(pop.best_f);
    }

    rec.iterations_run = n;
    rec.converged = pop.best_f >= threshold;
    if (rec.converged) rec.completion_iteration = n;
    rec.best_pref = pop.best_pref;
    return rec;
}

}  // namespace usfc
