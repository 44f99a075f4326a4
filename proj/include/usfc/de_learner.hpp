#pragma once

#include "usfc/core_model.hpp"
#include "usfc/fidelity.hpp"
#include "usfc/optics.hpp"
#include "usfc/rng.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace usfc {

/// Invalid configuration. `field()` names the offending config key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Relative-phase policy of the quantum machine.
class DeltaPolicy {
public:
    enum class Kind { Zero, HalfPi, TargetIndependent, Fixed };

    static DeltaPolicy zero() noexcept { return DeltaPolicy(Kind::Zero, 0.0); }
    static DeltaPolicy half_pi() noexcept { return DeltaPolicy(Kind::HalfPi, kPi / 2.0); }
    static DeltaPolicy target_independent() noexcept { return DeltaPolicy(Kind::TargetIndependent, 0.0); }
    static DeltaPolicy fixed(double delta) noexcept { return DeltaPolicy(Kind::Fixed, delta); }

    /// Accepts "zero", "half_pi", "ti", or a number (radians).
    static DeltaPolicy parse(const std::string& text);

    Kind kind() const noexcept { return kind_; }
    double angle() const noexcept { return angle_; }
    PhaseConfig phases() const noexcept;
    std::string name() const;

    friend bool operator==(const DeltaPolicy&, const DeltaPolicy&) = default;

private:
    DeltaPolicy(Kind kind, double angle) noexcept : kind_(kind), angle_(angle) {}

    Kind kind_;
    double angle_;
};

/// Under shot noise: re-measure the incumbent at every selection, or keep the
/// value it was accepted with.
enum class IncumbentPolicy { Reevaluate, Cache };

struct ShotSettings {
    std::uint64_t l_total = 100000;
    DephasingMode dephasing = DephasingMode::DensityMatrix;
    IncumbentPolicy incumbent = IncumbentPolicy::Reevaluate;

    friend bool operator==(const ShotSettings&, const ShotSettings&) = default;
};

/// How a mutant component that leaves [0, 1] is brought back.
enum class BoundaryRule {
    Reflect,  ///< mirror at the violated bound (default)
    Clamp,    ///< saturate at the violated bound
};

std::string to_string(BoundaryRule rule);
BoundaryRule boundary_rule_from_string(const std::string& name);

/// Folds v into [0, 1] by repeated mirroring at 0 and 1.
double reflect_unit(double v) noexcept;

struct DEConfig {
    int m = 10;
    double w = 0.5;
    double cr = 0.5;
    double epsilon_t = 0.01;
    int max_iterations = 100;
    DeltaPolicy delta = DeltaPolicy::zero();
    Machine machine = Machine::Classical;
    double gamma = 0.0;
    BoundaryRule boundary = BoundaryRule::Reflect;
    /// Exact fitness when empty.
    std::optional<ShotSettings> shots;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    friend bool operator==(const DEConfig&, const DEConfig&) = default;
};

/// Fitness of a preference vector for a fixed (config, task): exact task
/// fidelity, or the count-based estimate when shots are configured.
class FitnessEvaluator {
public:
    FitnessEvaluator(const DEConfig& config, TaskSpec task);

    double operator()(const PreferenceVector& pref, std::uint64_t eval_seed) const;

    bool noisy() const noexcept { return shots_.has_value(); }
    const TaskSpec& task() const noexcept { return task_; }

private:
    Machine machine_;
    PhaseConfig phases_;
    double gamma_;
    std::optional<ShotSettings> shots_;
    TaskSpec task_;
};

struct Population {
    std::vector<PreferenceVector> agents;
    std::vector<double> fitness;
    PreferenceVector best_pref;
    double best_f = 0.0;

    /// Raises best_f / best_pref if `f` beats the record.
    void record(const PreferenceVector& pref, double f) noexcept;
};

struct TrialRecord {
    std::uint64_t seed = 0;
    int iterations_run = 0;
    bool converged = false;
    std::optional<int> completion_iteration;
    /// Index 0 holds the best fitness after initialization.
    std::vector<double> best_f_per_iteration;
    PreferenceVector best_pref;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// M agents drawn uniformly from [0,1]^2 and evaluated.
Population initialize(const DEConfig& config, const FitnessEvaluator& fitness, std::uint64_t seed);

/// Picks three mutually distinct donor indices. Agent `i` is excluded as well
/// whenever the population has at least four agents.
std::array<std::size_t, 3> pick_donors(std::size_t population_size, std::size_t i, Rng& rng);

/// p_a + w (p_b - p_c), brought back into [0, 1] componentwise by `rule`.
PreferenceVector mutate(const PreferenceVector& pa, const PreferenceVector& pb, const PreferenceVector& pc, double w,
                        BoundaryRule rule = BoundaryRule::Reflect);
PreferenceVector mutate(const Population& pop, std::size_t i, double w, Rng& rng,
                        BoundaryRule rule = BoundaryRule::Reflect);

/// Component j comes from the incumbent if r_j > cr, otherwise from the mutant.
PreferenceVector crossover(const PreferenceVector& incumbent, const PreferenceVector& mutant, double cr,
                           const std::array<double, 2>& r);
PreferenceVector crossover(const PreferenceVector& incumbent, const PreferenceVector& mutant, double cr, Rng& rng);

/// Greedy replacement: the trial survives only if strictly fitter.
bool trial_survives(double incumbent_f, double trial_f) noexcept;

/// Runs DE until best fitness reaches 1 - epsilon_t or max_iterations
/// generations have elapsed.
TrialRecord run_trial(const DEConfig& config, const TaskSpec& task, std::uint64_t seed);

}  // namespace usfc
