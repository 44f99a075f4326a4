#pragma once

#include "usfc/de_learner.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace usfc {

/// Complete Boolean truth table over N-bit inputs, indexed by the integer
/// value of x_N ... x_1.
class NBitTrainingSet {
public:
    NBitTrainingSet(int n_bits, std::vector<int> targets);

    /// The k-th Boolean function on N bits: T_x = bit x of k.
    static NBitTrainingSet boolean_function(int n_bits, std::uint64_t k);

    int n_bits() const noexcept { return n_bits_; }
    int target(std::size_t x) const { return targets_.at(x); }
    /// T_{j, x1}.
    int target(std::size_t block, int x1) const { return targets_.at((block << 1) | static_cast<std::size_t>(x1)); }
    const std::vector<int>& targets() const noexcept { return targets_; }
    TaskSpec as_task() const { return TaskSpec::deterministic(n_bits_, targets_); }

private:
    int n_bits_;
    std::vector<int> targets_;
};

struct Route {
    std::size_t block;  ///< j = x_N ... x_2
    int feature;        ///< x_1
};

Route route(const std::string& x, int n_bits);
Route route(std::size_t x) noexcept;

struct WorkingIO {
    int alpha;  ///< bit the working channel is prepared in
    int tau;    ///< single-bit target
};

/// alpha = 0 for block 0, otherwise the target of block j - 1 at the same x1;
/// tau = T_{j, x1}.
WorkingIO working_io(std::size_t block, int x1, const NBitTrainingSet& targets);

/// Single-bit task block j is trained on, expressed for a working channel
/// prepared in 0: the target row of x1 is flipped wherever alpha(x1) = 1.
TaskSpec block_task(std::size_t block, const NBitTrainingSet& targets);

struct MemoryBlock {
    PreferenceVector pref;
    DeltaPolicy delta = DeltaPolicy::target_independent();
    bool trained = false;
};

class MemoryBank {
public:
    explicit MemoryBank(int n_bits);

    int n_bits() const noexcept { return n_bits_; }
    std::size_t size() const noexcept { return blocks_.size(); }
    MemoryBlock& block(std::size_t j) { return blocks_.at(j); }
    const MemoryBlock& block(std::size_t j) const { return blocks_.at(j); }
    bool complete() const noexcept;

private:
    int n_bits_;
    std::vector<MemoryBlock> blocks_;
};

struct TrainingReport {
    MemoryBank bank;
    std::vector<TrialRecord> records;  ///< per block
    std::vector<std::size_t> failed_blocks;
    long total_iterations = 0;

    bool complete() const noexcept { return failed_blocks.empty(); }
};

/// Which fidelity the learner's epsilon_t constrains.
enum class ToleranceTarget {
    Block,    ///< every block on its own reaches 1 - epsilon_t
    Circuit,  ///< blocks are trained tighter so the assembled circuit reaches 1 - epsilon_t
};

std::string to_string(ToleranceTarget target);
ToleranceTarget tolerance_target_from_string(const std::string& name);

/// Per-block tolerance guaranteeing circuit fidelity >= 1 - epsilon_t. A block
/// error on x1 propagates to every later block, so the circuit fidelity is at
/// least f^((B + 1) / 2) when all B blocks reach fidelity f.
double circuit_block_tolerance(double epsilon_t, int n_bits);

/// Trains every memory block independently with the single-feature learner.
/// Block j uses trial seed derive_seed(master_seed, {j}).
TrainingReport train_all(int n_bits, const NBitTrainingSet& targets, const DEConfig& learner, std::uint64_t master_seed,
                         ToleranceTarget tolerance = ToleranceTarget::Circuit, unsigned workers = 0);

/// Output distribution of the assembled circuit on input x: blocks 0..j act in
/// sequence on feature x1, each measured and its outcome fed to the next one
/// as the working input. Throws ContractError on a partial bank.
std::array<double, 2> evaluate_circuit(const MemoryBank& bank, std::size_t x, Machine machine, double gamma);

ConditionalTable circuit_table(const MemoryBank& bank, Machine machine, double gamma);

/// N-bit task fidelity of the assembled circuit.
double circuit_fidelity(const MemoryBank& bank, const NBitTrainingSet& targets, Machine machine, double gamma);

}  // namespace usfc
