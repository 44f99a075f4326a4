#pragma once

#include "usfc/core_model.hpp"

#include <array>
#include <string>
#include <vector>

namespace usfc {

/// One conditional distribution Pr(y | x) per input x. Row index is the
/// integer value of the input bitstring x_N ... x_1 (x_1 least significant).
using ConditionalTable = std::vector<std::array<double, 2>>;

/// Target conditional distribution over N-bit inputs.
class TaskSpec {
public:
    TaskSpec(int n_bits, ConditionalTable rows);

    /// Deterministic task from a truth table y = targets[x].
    static TaskSpec deterministic(int n_bits, const std::vector<int>& targets);

    int n_bits() const noexcept { return n_bits_; }
    const ConditionalTable& rows() const noexcept { return rows_; }
    const std::array<double, 2>& row(std::size_t x) const { return rows_.at(x); }
    std::size_t size() const noexcept { return rows_.size(); }

    bool is_deterministic() const noexcept;
    /// Target output for input x; only meaningful for deterministic tasks.
    int target(std::size_t x) const;

    /// Same task with the output bit relabelled (y -> y xor 1) on every row
    /// where flip[x] is set.
    TaskSpec conjugated(const std::vector<int>& flip) const;

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;

private:
    int n_bits_;
    ConditionalTable rows_;
};

/// The four deterministic single-bit tasks: y = 0, y = x, y = 1, y = x xor 1.
enum class TaskId { T1, T2, T3, T4 };

TaskSpec canonical_task(TaskId id);
TaskId task_id_from_string(const std::string& name);
std::string to_string(TaskId id);

/// Bitstring "x_N...x_1" for row index x.
std::string bitstring(std::size_t x, int n_bits);
/// Inverse of bitstring(); throws std::invalid_argument on malformed input.
std::size_t parse_bitstring(const std::string& bits);

/// Geometric mean over inputs of the Bhattacharyya overlap between machine
/// and target rows, F = (prod_x sum_y sqrt(P(y|x) Pt(y|x)))^(1/2^N).
double task_fidelity(const ConditionalTable& machine_dist, const TaskSpec& task);

/// Full single-bit machine table Pr(y | x) for x in {0, 1}.
ConditionalTable machine_table(Machine machine, const PreferenceVector& pref, const PhaseConfig& phases, double gamma,
                               int working_input = 0);

struct Advantage {
    double lambda;  ///< 2 p0 sqrt(p0 (1 - p0) p1 (1 - p1))
    double gap;     ///< F_Q^4 - F_C^4 for the constant-zero task
};

/// Closed-form quantum advantage for the constant-zero task (T1) only.
Advantage analytic_advantage(const PreferenceVector& pref, double delta);

/// Advantage amplitude after dephasing between the gates: (1 - gamma) lambda.
double dephased_advantage(double lambda, double gamma);

}  // namespace usfc
