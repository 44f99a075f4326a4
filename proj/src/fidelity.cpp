#include "usfc/fidelity.hpp"

#include <cmath>
#include <sstream>

namespace usfc {

TaskSpec::TaskSpec(int n_bits, ConditionalTable rows) : n_bits_(n_bits), rows_(std::move(rows)) {
    if (n_bits < 1 || n_bits > 20) throw std::invalid_argument("task n_bits must be in [1, 20]");
    if (rows_.size() != (std::size_t{1} << n_bits)) {
        std::ostringstream os;
        os << "task table for N=" << n_bits << " needs " << (std::size_t{1} << n_bits) << " rows, got " << rows_.size();
        throw std::invalid_argument(os.str());
    }
    for (std::size_t x = 0; x < rows_.size(); ++x) {
        const auto& r = rows_[x];
        if (r[0] < 0.0 || r[1] < 0.0 || std::abs(r[0] + r[1] - 1.0) > kAlgebraTolerance) {
            throw std::invalid_argument("task row " + bitstring(x, n_bits) + " is not a normalized distribution");
        }
    }
}

TaskSpec TaskSpec::deterministic(int n_bits, const std::vector<int>& targets) {
    ConditionalTable rows;
    rows.reserve(targets.size());
    for (int t : targets) {
        if (t != 0 && t != 1) throw std::invalid_argument("deterministic targets must be bits");
        rows.push_back(t == 0 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0});
    }
    return TaskSpec(n_bits, std::move(rows));
}

bool TaskSpec::is_deterministic() const noexcept {
    for (const auto& r : rows_) {
        if (!((r[0] == 1.0 && r[1] == 0.0) || (r[0] == 0.0 && r[1] == 1.0))) return false;
    }
    return true;
}

int TaskSpec::target(std::size_t x) const {
    const auto& r = rows_.at(x);
    if (r[0] == 1.0 && r[1] == 0.0) return 0;
    if (r[0] == 0.0 && r[1] == 1.0) return 1;
    throw ContractError("target() called on a probabilistic task row");
}

TaskSpec TaskSpec::conjugated(const std::vector<int>& flip) const {
    if (flip.size() != rows_.size()) throw ContractError("conjugation mask size does not match task");
    ConditionalTable out = rows_;
    for (std::size_t x = 0; x < out.size(); ++x) {
        if (flip[x]) std::swap(out[x][0], out[x][1]);
    }
    return TaskSpec(n_bits_, std::move(out));
}

TaskSpec canonical_task(TaskId id) {
    switch (id) {
        case TaskId::T1: return TaskSpec::deterministic(1, {0, 0});
        case TaskId::T2: return TaskSpec::deterministic(1, {0, 1});
        case TaskId::T3: return TaskSpec::deterministic(1, {1, 1});
        case TaskId::T4: return TaskSpec::deterministic(1, {1, 0});
    }
    throw std::invalid_argument("unknown task id");
}

TaskId task_id_from_string(const std::string& name) {
    if (name == "T1") return TaskId::T1;
    if (name == "T2") return TaskId::T2;
    if (name == "T3") return TaskId::T3;
    if (name == "T4") return TaskId::T4;
    throw std::invalid_argument("unknown task '" + name + "' (expected T1|T2|T3|T4)");
}

std::string to_string(TaskId id) {
    return "T" + std::to_string(static_cast<int>(id) + 1);
}

std::string bitstring(std::size_t x, int n_bits) {
    std::string s(static_cast<std::size_t>(n_bits), '0');
    for (int b = 0; b < n_bits; ++b) {
        if ((x >> b) & 1U) s[static_cast<std::size_t>(n_bits - 1 - b)] = '1';
    }
    return s;
}

std::size_t parse_bitstring(const std::string& bits) {
    if (bits.empty() || bits.size() > 20) throw std::invalid_argument("bitstring '" + bits + "' has invalid length");
    std::size_t x = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("bitstring '" + bits + "' contains non-bit characters");
        x = (x << 1) | static_cast<std::size_t>(c - '0');
    }
    return x;
}

double task_fidelity(const ConditionalTable& machine_dist, const TaskSpec& task) {
    if (machine_dist.size() != task.size()) {
        throw ContractError("machine distribution has " + std::to_string(machine_dist.size()) + " rows, task has " +
                            std::to_string(task.size()));
    }
    double product = 1.0;
    for (std::size_t x = 0; x < task.size(); ++x) {
        const auto& m = machine_dist[x];
        const auto& t = task.row(x);
        product *= std::sqrt(m[0] * t[0]) + std::sqrt(m[1] * t[1]);
    }
    const double f = std::pow(product, 1.0 / static_cast<double>(task.size()));
    return std::min(f, 1.0);
}

ConditionalTable machine_table(Machine machine, const PreferenceVector& pref, const PhaseConfig& phases, double gamma,
                               int working_input) {
    return {output_distribution(machine, pref, phases, gamma, 0, working_input),
            output_distribution(machine, pref, phases, gamma, 1, working_input)};
}

Advantage analytic_advantage(const PreferenceVector& pref, double delta) {
    const double p0 = pref.p0();
    const double p1 = pref.p1();
    const double lambda = 2.0 * p0 * std::sqrt(p0 * (1.0 - p0) * p1 * (1.0 - p1));
    return {lambda, lambda * std::cos(delta)};
}

double dephased_advantage(double lambda, double gamma) {
    require_decay_rate(gamma);
    return (1.0 - gamma) * lambda;
}

}  // namespace usfc
