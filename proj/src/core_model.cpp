#include "usfc/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace usfc {

namespace {

using cplx = std::complex<double>;

const Eigen::Matrix2cd kPauliZ = (Eigen::Matrix2cd() << 1.0, 0.0, 0.0, -1.0).finished();

}  // namespace

std::string to_string(Machine machine) {
    return machine == Machine::Classical ? "classical" : "quantum";
}

Machine machine_from_string(const std::string& name) {
    if (name == "classical") return Machine::Classical;
    if (name == "quantum") return Machine::Quantum;
    throw std::invalid_argument("unknown machine '" + name + "' (expected classical|quantum)");
}

void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << what << " must lie in [0, 1], got " << p;
        throw std::domain_error(os.str());
    }
}

void require_decay_rate(double gamma) { require_probability(gamma, "decay rate gamma"); }

PreferenceVector::PreferenceVector(double p0, double p1) : p_{p0, p1} {
    require_probability(p0, "Pr(g0 -> identity)");
    require_probability(p1, "Pr(g1 -> identity)");
}

PreferenceVector PreferenceVector::clamped(double p0, double p1) noexcept {
    PreferenceVector v;
    v.p_ = {std::clamp(p0, 0.0, 1.0), std::clamp(p1, 0.0, 1.0)};
    return v;
}

double canonical_delta(double delta) noexcept {
    return std::abs(std::remainder(delta, 2.0 * kPi));
}

double target_independent_delta(const PreferenceVector& pref) noexcept {
    return kPi * (pref.p0() - pref.p1());
}

PhaseConfig PhaseConfig::from_phases(double phi0, double phi1) noexcept {
    PhaseConfig c;
    c.mode_ = Mode::Fixed;
    c.phi0_ = phi0;
    c.phi1_ = phi1;
    return c;
}

PhaseConfig PhaseConfig::target_independent() noexcept {
    PhaseConfig c;
    c.mode_ = Mode::TargetIndependent;
    return c;
}

double PhaseConfig::phi0(const PreferenceVector&) const noexcept {
    return mode_ == Mode::Fixed ? phi0_ : 0.0;
}

double PhaseConfig::phi1(const PreferenceVector& pref) const noexcept {
    return mode_ == Mode::Fixed ? phi1_ : target_independent_delta(pref);
}

double PhaseConfig::delta(const PreferenceVector& pref) const noexcept {
    return canonical_delta(phi1(pref) - phi0(pref));
}

WorkingState WorkingState::classical(const Eigen::Vector2d& probabilities) {
    if ((probabilities.array() < 0.0).any() || std::abs(probabilities.sum() - 1.0) > kAlgebraTolerance) {
        throw std::domain_error("classical working state must be a normalized probability vector");
    }
    WorkingState s;
    s.kind_ = Kind::Classical;
    s.classical_ = probabilities;
    return s;
}

WorkingState WorkingState::quantum(const Eigen::Matrix2cd& rho) {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const double trace_err = std::abs(rho.trace() - cplx(1.0, 0.0));
    // Eigenvalues of a Hermitian 2x2: (t +- sqrt((a-d)^2 + 4|b|^2)) / 2.
    const double a = rho(0, 0).real();
    const double d = rho(1, 1).real();
    const double min_eig = 0.5 * (a + d - std::sqrt((a - d) * (a - d) + 4.0 * std::norm(rho(0, 1))));
    if (herm > kAlgebraTolerance || trace_err > kAlgebraTolerance || min_eig < -kAlgebraTolerance) {
        throw std::domain_error("quantum working state must be Hermitian, unit-trace and positive semidefinite");
    }
    WorkingState s;
    s.kind_ = Kind::Quantum;
    s.rho_ = rho;
    return s;
}

WorkingState WorkingState::basis(Machine machine, int bit) {
    if (bit != 0 && bit != 1) throw std::domain_error("working input must be a bit");
    WorkingState s;
    if (machine == Machine::Classical) {
        s.kind_ = Kind::Classical;
        s.classical_ = bit == 0 ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0);
    } else {
        s.kind_ = Kind::Quantum;
        s.rho_.setZero();
        s.rho_(bit, bit) = 1.0;
    }
    return s;
}

const Eigen::Vector2d& WorkingState::probabilities() const {
    if (kind_ != Kind::Classical) throw ContractError("probabilities() requested from a quantum state");
    return classical_;
}

const Eigen::Matrix2cd& WorkingState::density() const {
    if (kind_ != Kind::Quantum) throw ContractError("density() requested from a classical state");
    return rho_;
}

std::array<double, 2> WorkingState::measure() const noexcept {
    if (kind_ == Kind::Classical) return {classical_(0), classical_(1)};
    return {rho_(0, 0).real(), rho_(1, 1).real()};
}

GateMatrix build_classical_gate(double pref) {
    require_probability(pref, "gate-adopting preference");
    Eigen::Matrix2cd m;
    m << pref, 1.0 - pref, 1.0 - pref, pref;
    return {m, GateKind::Stochastic};
}

GateMatrix build_quantum_gate(double pref, double phi) {
    require_probability(pref, "gate-adopting preference");
    const double keep = std::sqrt(pref);
    const double flip = std::sqrt(1.0 - pref);
    const cplx phase = std::polar(1.0, phi);
    Eigen::Matrix2cd m;
    m << keep, phase * flip, std::conj(phase) * flip, -keep;
    return {m, GateKind::Unitary};
}

WorkingState evolve(const WorkingState& state, const GateMatrix& gate) {
    const bool classical = state.kind() == WorkingState::Kind::Classical;
    if (classical != (gate.kind == GateKind::Stochastic)) {
        throw ContractError("evolve: stochastic gates act on classical states, unitary gates on quantum states");
    }
    if (classical) {
        const Eigen::Vector2d next = gate.entries.real() * state.probabilities();
        return WorkingState::classical(next);
    }
    return WorkingState::quantum(gate.entries * state.density() * gate.entries.adjoint());
}

WorkingState dephase(const WorkingState& state, double gamma) {
    require_decay_rate(gamma);
    if (state.kind() != WorkingState::Kind::Quantum) throw ContractError("dephase: only quantum states dephase");
    Eigen::Matrix2cd rho = state.density();
    rho(0, 1) *= 1.0 - gamma;
    rho(1, 0) *= 1.0 - gamma;
    return WorkingState::quantum(rho);
}

std::array<double, 2> output_distribution(Machine machine, const PreferenceVector& pref, const PhaseConfig& phases,
                                          double gamma, int x, int working_input) {
    require_decay_rate(gamma);
    if (x != 0 && x != 1) throw std::domain_error("input x must be a bit");
    WorkingState state = WorkingState::basis(machine, working_input);
    if (machine == Machine::Classical) {
        state = evolve(state, build_classical_gate(pref.p0()));
        if (x == 1) state = evolve(state, build_classical_gate(pref.p1()));
    } else {
        state = evolve(state, build_quantum_gate(pref.p0(), phases.phi0(pref)));
        state = dephase(state, gamma);
        if (x == 1) state = evolve(state, build_quantum_gate(pref.p1(), phases.phi1(pref)));
    }
    auto dist = state.measure();
    // Rounding can leave tiny negative diagonals after the conjugation.
    for (auto& p : dist) p = std::clamp(p, 0.0, 1.0);
    return dist;
}

std::array<double, 2> quantum_output_with_flip(const PreferenceVector& pref, const PhaseConfig& phases, bool phase_flip,
                                               int x, int working_input) {
    if (x != 0 && x != 1) throw std::domain_error("input x must be a bit");
    if (working_input != 0 && working_input != 1) throw std::domain_error("working input must be a bit");
    Eigen::Vector2cd psi = Eigen::Vector2cd::Zero();
    psi(working_input) = 1.0;
    psi = build_quantum_gate(pref.p0(), phases.phi0(pref)).entries * psi;
    if (phase_flip) psi = kPauliZ * psi;
    if (x == 1) psi = build_quantum_gate(pref.p1(), phases.phi1(pref)).entries * psi;
    return {std::min(1.0, std::norm(psi(0))), std::min(1.0, std::norm(psi(1)))};
}

}  // namespace usfc
