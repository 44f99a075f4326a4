#include "usfc/nbit_strategy.hpp"

#include "usfc/experiments.hpp"

#include <cmath>

namespace usfc {

namespace {

void require_bits(int n_bits) {
    if (n_bits < 1 || n_bits > 16) throw ConfigError("n_bits", "must lie in [1, 16]");
}

}  // namespace

NBitTrainingSet::NBitTrainingSet(int n_bits, std::vector<int> targets) : n_bits_(n_bits), targets_(std::move(targets)) {
    require_bits(n_bits);
    const std::size_t rows = std::size_t{1} << n_bits;
    if (targets_.size() != rows) {
        throw ConfigError("targets", "incomplete truth table: expected " + std::to_string(rows) + " entries, got " +
                                         std::to_string(targets_.size()));
    }
    for (int t : targets_) {
        if (t != 0 && t != 1) throw ConfigError("targets", "entries must be 0 or 1");
    }
}

NBitTrainingSet NBitTrainingSet::boolean_function(int n_bits, std::uint64_t k) {
    require_bits(n_bits);
    const std::size_t rows = std::size_t{1} << n_bits;
    if (rows < 64 && k >= (std::uint64_t{1} << rows)) throw ConfigError("function", "index out of range");
    std::vector<int> t(rows);
    for (std::size_t x = 0; x < rows; ++x) t[x] = static_cast<int>((k >> x) & 1U);
    return NBitTrainingSet(n_bits, std::move(t));
}

Route route(const std::string& x, int n_bits) {
    if (static_cast<int>(x.size()) != n_bits) {
        throw std::invalid_argument("input '" + x + "' has " + std::to_string(x.size()) + " bits, expected " +
                                    std::to_string(n_bits));
    }
    return route(parse_bitstring(x));
}

Route route(std::size_t x) noexcept { return {x >> 1, static_cast<int>(x & 1U)}; }

WorkingIO working_io(std::size_t block, int x1, const NBitTrainingSet& targets) {
    const int alpha = block == 0 ? 0 : targets.target(block - 1, x1);
    return {alpha, targets.target(block, x1)};
}

TaskSpec block_task(std::size_t block, const NBitTrainingSet& targets) {
    std::vector<int> t(2);
    for (int x1 = 0; x1 < 2; ++x1) {
        const auto io = working_io(block, x1, targets);
        t[static_cast<std::size_t>(x1)] = io.tau ^ io.alpha;
    }
    return TaskSpec::deterministic(1, t);
}

MemoryBank::MemoryBank(int n_bits) : n_bits_(n_bits) {
    require_bits(n_bits);
    blocks_.resize(std::size_t{1} << (n_bits - 1));
}

bool MemoryBank::complete() const noexcept {
    for (const auto& b : blocks_) {
        if (!b.trained) return false;
    }
    return true;
}

std::string to_string(ToleranceTarget target) { return target == ToleranceTarget::Block ? "block" : "circuit"; }

ToleranceTarget tolerance_target_from_string(const std::string& name) {
    if (name == "block") return ToleranceTarget::Block;
    if (name == "circuit") return ToleranceTarget::Circuit;
    throw std::invalid_argument("unknown tolerance target '" + name + "' (expected block|circuit)");
}

double circuit_block_tolerance(double epsilon_t, int n_bits) {
    require_bits(n_bits);
    const double blocks = std::ldexp(1.0, n_bits - 1);
    return 1.0 - std::pow(1.0 - epsilon_t, 2.0 / (blocks + 1.0));
}

TrainingReport train_all(int n_bits, const NBitTrainingSet& targets, const DEConfig& config, std::uint64_t master_seed,
                         ToleranceTarget tolerance, unsigned workers) {
    if (targets.n_bits() != n_bits) throw ConfigError("targets", "truth table width does not match n_bits");
    config.validate();
    DEConfig learner = config;
    if (tolerance == ToleranceTarget::Circuit) learner.epsilon_t = circuit_block_tolerance(config.epsilon_t, n_bits);
    TrainingReport report{MemoryBank(n_bits), {}, {}, 0};
    const std::size_t blocks = report.bank.size();
    report.records.resize(blocks);
    parallel_for(blocks, workers, [&](std::size_t j) {
        report.records[j] = run_trial(learner, block_task(j, targets), derive_seed(master_seed, {j}));
    });
    for (std::size_t j = 0; j < blocks; ++j) {
        const auto& rec = report.records[j];
        auto& blk = report.bank.block(j);
        blk.pref = rec.best_pref;
        blk.delta = learner.delta;
        blk.trained = rec.converged;
        report.total_iterations += rec.iterations_run;
        if (!rec.converged) report.failed_blocks.push_back(j);
    }
    return report;
}

std::array<double, 2> evaluate_circuit(const MemoryBank& bank, std::size_t x, Machine machine, double gamma) {
    if (!bank.complete()) throw ContractError("evaluate_circuit: memory bank is only partially trained");
    if (x >= (std::size_t{1} << bank.n_bits())) throw std::invalid_argument("input out of range for the bank width");
    const Route r = route(x);
    std::array<double, 2> dist{1.0, 0.0};
    for (std::size_t k = 0; k <= r.block; ++k) {
        const auto& blk = bank.block(k);
        const PhaseConfig phases = blk.delta.phases();
        std::array<double, 2> next{0.0, 0.0};
        for (int a = 0; a < 2; ++a) {
            if (dist[static_cast<std::size_t>(a)] == 0.0) continue;
            const auto out = output_distribution(machine, blk.pref, phases, gamma, r.feature, a);
            next[0] += dist[static_cast<std::size_t>(a)] * out[0];
            next[1] += dist[static_cast<std::size_t>(a)] * out[1];
        }
        dist = next;
    }
    return dist;
}

ConditionalTable circuit_table(const MemoryBank& bank, Machine machine, double gamma) {
    ConditionalTable table;
    for (std::size_t x = 0; x < (std::size_t{1} << bank.n_bits()); ++x) table.push_back(evaluate_circuit(bank, x, machine, gamma));
    return table;
}

double circuit_fidelity(const MemoryBank& bank, const NBitTrainingSet& targets, Machine machine, double gamma) {
    return task_fidelity(circuit_table(bank, machine, gamma), targets.as_task());
}

}  // namespace usfc
