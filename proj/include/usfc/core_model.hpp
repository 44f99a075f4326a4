#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace usfc {

/// Raised when a caller violates an operation's structural precondition
/// (mismatched kinds, wrong table sizes, partial banks, ...).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kAlgebraTolerance = 1e-12;

enum class Machine { Classical, Quantum };

std::string to_string(Machine machine);
Machine machine_from_string(const std::string& name);

/// Gate-adopting preferences: probability that g0 (resp. g1) acts as the
/// identity instead of a logical not.
class PreferenceVector {
public:
    PreferenceVector() = default;
    PreferenceVector(double p0, double p1);

    /// Clamps each component into [0, 1]; used by the learner after mutation.
    static PreferenceVector clamped(double p0, double p1) noexcept;

    double p0() const noexcept { return p_[0]; }
    double p1() const noexcept { return p_[1]; }
    double operator[](std::size_t k) const noexcept { return p_[k]; }

    /// Pr(g_k -> X).
    double flip(std::size_t k) const noexcept { return 1.0 - p_[k]; }

    friend bool operator==(const PreferenceVector&, const PreferenceVector&) = default;

private:
    std::array<double, 2> p_{1.0, 1.0};
};

/// Reduces an arbitrary relative phase to |phi1 - phi0| in [0, pi].
double canonical_delta(double delta) noexcept;

/// Quantum phases of the two gates. Only the relative phase matters for any
/// observable; fixed configurations store phi0 and phi1 explicitly, while the
/// target-independent rule recomputes phi1 = pi (p0 - p1) with phi0 = 0 for
/// every preference vector it is evaluated on.
class PhaseConfig {
public:
    enum class Mode { Fixed, TargetIndependent };

    static PhaseConfig from_phases(double phi0, double phi1) noexcept;
    static PhaseConfig fixed(double delta) noexcept { return from_phases(0.0, delta); }
    static PhaseConfig target_independent() noexcept;

    Mode mode() const noexcept { return mode_; }
    double phi0(const PreferenceVector& pref) const noexcept;
    double phi1(const PreferenceVector& pref) const noexcept;

    /// Canonical relative phase for the given preferences.
    double delta(const PreferenceVector& pref) const noexcept;

private:
    Mode mode_ = Mode::Fixed;
    double phi0_ = 0.0;
    double phi1_ = 0.0;
};

/// Target-independent relative phase pi (p0 - p1), uncanonicalized.
double target_independent_delta(const PreferenceVector& pref) noexcept;

enum class GateKind { Stochastic, Unitary };

struct GateMatrix {
    Eigen::Matrix2cd entries;
    GateKind kind;
};

/// State of the one-bit working channel: a probability vector over {0, 1} for
/// the classical machine, a density matrix for the quantum one.
class WorkingState {
public:
    enum class Kind { Classical, Quantum };

    static WorkingState classical(const Eigen::Vector2d& probabilities);
    static WorkingState quantum(const Eigen::Matrix2cd& rho);
    static WorkingState basis(Machine machine, int bit);

    Kind kind() const noexcept { return kind_; }
    const Eigen::Vector2d& probabilities() const;
    const Eigen::Matrix2cd& density() const;

    /// Computational-basis measurement distribution.
    std::array<double, 2> measure() const noexcept;

private:
    WorkingState() = default;

    Kind kind_ = Kind::Classical;
    Eigen::Vector2d classical_ = Eigen::Vector2d(1.0, 0.0);
    Eigen::Matrix2cd rho_ = Eigen::Matrix2cd::Zero();
};

GateMatrix build_classical_gate(double pref);
GateMatrix build_quantum_gate(double pref, double phi);

WorkingState evolve(const WorkingState& state, const GateMatrix& gate);

/// Phase damping: off-diagonal elements scaled by (1 - gamma).
WorkingState dephase(const WorkingState& state, double gamma);

/// Conditional output distribution Pr(y | x) of the single-feature circuit.
/// g0 always acts, the working channel dephases between the gates (quantum
/// machine only), and g1 acts iff x = 1. `working_input` is the bit the
/// working channel is prepared in.
std::array<double, 2> output_distribution(Machine machine, const PreferenceVector& pref, const PhaseConfig& phases,
                                          double gamma, int x, int working_input = 0);

/// Quantum output distribution with a deterministic Z (phase flip) optionally
/// applied between the gates instead of density-matrix damping. Averaging the
/// flipped and unflipped results with weights gamma/2 and 1 - gamma/2 gives the
/// damped distribution.
std::array<double, 2> quantum_output_with_flip(const PreferenceVector& pref, const PhaseConfig& phases, bool phase_flip,
                                               int x, int working_input = 0);

void require_probability(double p, const char* what);
void require_decay_rate(double gamma);

}  // namespace usfc
