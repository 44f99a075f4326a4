#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

using namespace usfc;
using namespace usfc::cli;

struct CommonFlags {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    unsigned workers = 0;
    std::size_t trials = 0;
    CLI::Option* config_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* trials_opt = nullptr;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    f.config_opt = sub->add_option("--config", f.config, "experiment config file (JSON)")->envname("USFC_CONFIG");
    f.seed_opt = sub->add_option("--seed", f.seed, "master seed")->envname("USFC_SEED");
    f.out_opt = sub->add_option("--out", f.out, "output directory")->envname("USFC_OUT");
    f.workers_opt = sub->add_option("--workers", f.workers, "worker threads (0 = all cores)")->envname("USFC_WORKERS");
    f.trials_opt = sub->add_option("--trials", f.trials, "trials per setting / cell / gamma, or identity samples")
                       ->envname("USFC_TRIALS")
                       ->check(CLI::PositiveNumber);
}

// defaults < config file < environment < flags
ExperimentConfig resolve(const CommonFlags& f) {
    ExperimentConfig c = f.config_opt->count() ? load_config(f.config) : ExperimentConfig{};
    if (f.seed_opt->count()) c.seed = f.seed;
    if (f.out_opt->count()) c.out = f.out;
    if (f.workers_opt->count()) c.workers = f.workers;
    if (f.trials_opt->count()) c.trials = f.trials;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"usfc: single-bit feature circuit learning experiments"};
    app.require_subcommand(1);

    using Command = int (*)(const ExperimentConfig&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"check-identity", "verify the quantum-classical fidelity gap identity on random parameters", cmd_check_identity},
        {"learn", "learning-probability curves and speed-up per machine setting", cmd_learn},
        {"decohere", "learning speed versus dephasing rate", cmd_decohere},
        {"sweep", "(W, Cr) grid sweep per machine setting", cmd_sweep},
        {"nbit", "memory-block strategy on N-bit Boolean functions", cmd_nbit},
    };
    std::map<std::string, CommonFlags> flags;
    bool tune = false;
    for (const auto& [name, help, _] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, flags[name]);
        if (name == "learn") sub->add_flag("--tune", tune, "pick (W, Cr) from a classical sweep first");
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, _, run] : commands) {
        auto* sub = app.get_subcommand(name);
        if (!sub->parsed()) continue;
        try {
            ExperimentConfig config = resolve(flags[name]);
            if (tune) config.tune = true;
            return run(config, name == "check-identity" ? std::cout : std::cerr);
        } catch (const ConfigError& e) {
            std::cerr << "usfc: invalid configuration: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "usfc: " << e.what() << '\n';
            return 1;
        }
    }
    return 0;
}
