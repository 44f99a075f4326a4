#pragma once

#include "usfc/core_model.hpp"
#include "usfc/fidelity.hpp"

#include <cstdint>

namespace usfc {

/// Wave-plate rotation angles: HWP(theta0) and QWP(varphi0) of g0, HWP(theta1)
/// of g1. All canonicalized to [0, 2 pi).
class WavePlateAngles {
public:
    WavePlateAngles(double theta0, double varphi0, double theta1) noexcept;

    double theta0() const noexcept { return theta0_; }
    double varphi0() const noexcept { return varphi0_; }
    double theta1() const noexcept { return theta1_; }

private:
    double theta0_;
    double varphi0_;
    double theta1_;
};

double canonical_angle(double angle) noexcept;

struct GateParameters {
    PreferenceVector pref;
    double delta;  ///< canonical, in [0, pi]
};

GateParameters angles_to_parameters(const WavePlateAngles& angles);

/// Principal-branch inverse of angles_to_parameters. Not unique: any other
/// branch of arccos maps to the same parameters.
WavePlateAngles parameters_to_angles(const PreferenceVector& pref, double delta);

/// Number of post-selected shots spent per input value x, and the stream seed.
class ShotPlan {
public:
    ShotPlan(std::uint64_t l_total, std::uint64_t seed);

    std::uint64_t l_total() const noexcept { return l_total_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t l_total_;
    std::uint64_t seed_;
};

/// How dephasing between the gates is realized during sampling.
enum class DephasingMode {
    DensityMatrix,  ///< sample from the damped density-matrix distribution
    PhaseFlip,      ///< per shot, apply Z between the gates with weight gamma/2
};

/// Counts successful outcomes (y == target_y) among plan.l_total() shots of
/// the circuit on input x. Deterministic for a fixed plan seed.
std::uint64_t sample_shots(Machine machine, const PreferenceVector& pref, const PhaseConfig& phases, double gamma, int x,
                           int target_y, const ShotPlan& plan, DephasingMode mode = DephasingMode::DensityMatrix,
                           int working_input = 0);

/// Count-based fidelity estimate ((L_s(0)/L) (L_s(1)/L))^(1/4).
double estimate_fidelity(std::uint64_t ls0, std::uint64_t ls1, const ShotPlan& plan);

/// Shot-based fidelity of a single-bit machine against a deterministic task;
/// the per-x seeds are derived from plan.seed().
double sampled_task_fidelity(Machine machine, const PreferenceVector& pref, const PhaseConfig& phases, double gamma,
                             const TaskSpec& task, const ShotPlan& plan, DephasingMode mode = DephasingMode::DensityMatrix);

}  // namespace usfc
