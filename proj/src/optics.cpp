#include "usfc/optics.hpp"

#include "usfc/rng.hpp"

#include <cmath>

namespace usfc {

double canonical_angle(double angle) noexcept {
    double a = std::fmod(angle, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    if (a >= 2.0 * kPi) a = 0.0;
    return a;
}

WavePlateAngles::WavePlateAngles(double theta0, double varphi0, double theta1) noexcept
    : theta0_(canonical_angle(theta0)), varphi0_(canonical_angle(varphi0)), theta1_(canonical_angle(theta1)) {}

GateParameters angles_to_parameters(const WavePlateAngles& angles) {
    const double c0 = std::cos(2.0 * angles.theta0() - angles.varphi0() - kPi / 4.0);
    const double c1 = std::cos(2.0 * angles.theta1());
    return {PreferenceVector::clamped(c0 * c0, c1 * c1), canonical_delta(2.0 * angles.varphi0() + kPi / 2.0)};
}

WavePlateAngles parameters_to_angles(const PreferenceVector& pref, double delta) {
    const double varphi0 = (canonical_delta(delta) - kPi / 2.0) / 2.0;
    const double theta0 = (std::acos(std::sqrt(pref.p0())) + varphi0 + kPi / 4.0) / 2.0;
    const double theta1 = std::acos(std::sqrt(pref.p1())) / 2.0;
    return {theta0, varphi0, theta1};
}

ShotPlan::ShotPlan(std::uint64_t l_total, std::uint64_t seed) : l_total_(l_total), seed_(seed) {
    if (l_total == 0) throw std::invalid_argument("shots.l_total must be >= 1");
}

std::uint64_t sample_shots(Machine machine, const PreferenceVector& pref, const PhaseConfig& phases, double gamma, int x,
                           int target_y, const ShotPlan& plan, DephasingMode mode, int working_input) {
    require_decay_rate(gamma);
    if (target_y != 0 && target_y != 1) throw std::domain_error("target output must be a bit");
    Rng rng(plan.seed());
    std::uint64_t successes = 0;

    if (machine == Machine::Quantum && mode == DephasingMode::PhaseFlip) {
        const double p_plain = quantum_output_with_flip(pref, phases, false, x, working_input)[target_y];
        const double p_flip = quantum_output_with_flip(pref, phases, true, x, working_input)[target_y];
        const double flip_weight = gamma / 2.0;
        for (std::uint64_t s = 0; s < plan.l_total(); ++s) {
            const bool flipped = rng.bernoulli(flip_weight);
            successes += rng.bernoulli(flipped ? p_flip : p_plain) ? 1 : 0;
        }
        return successes;
    }

    const double p = output_distribution(machine, pref, phases, gamma, x, working_input)[target_y];
    for (std::uint64_t s = 0; s < plan.l_total(); ++s) successes += rng.bernoulli(p) ? 1 : 0;
    return successes;
}

double estimate_fidelity(std::uint64_t ls0, std::uint64_t ls1, const ShotPlan& plan) {
    if (ls0 > plan.l_total() || ls1 > plan.l_total()) {
        throw ContractError("success counts cannot exceed l_total");
    }
    const double l = static_cast<double>(plan.l_total());
    return std::pow((static_cast<double>(ls0) / l) * (static_cast<double>(ls1) / l), 0.25);
}

double sampled_task_fidelity(Machine machine, const PreferenceVector& pref, const PhaseConfig& phases, double gamma,
                             const TaskSpec& task, const ShotPlan& plan, DephasingMode mode) {
    if (task.n_bits() != 1 || !task.is_deterministic()) {
        throw ContractError("shot-based fidelity is defined for deterministic single-bit tasks");
    }
    std::uint64_t counts[2];
    for (int x = 0; x < 2; ++x) {
        const ShotPlan per_x(plan.l_total(), derive_seed(plan.seed(), {static_cast<std::uint64_t>(x)}));
        counts[x] = sample_shots(machine, pref, phases, gamma, x, task.target(static_cast<std::size_t>(x)), per_x, mode);
    }
    return estimate_fidelity(counts[0], counts[1], plan);
}

}  // namespace usfc
