#pragma once

#include "usfc/serialization.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace usfc::cli {

/// One machine / phase / decay combination run by `learn` and `sweep`.
struct Setting {
    Machine machine = Machine::Classical;
    DeltaPolicy delta = DeltaPolicy::zero();
    double gamma = 0.0;

    /// File-name friendly label, e.g. "classical", "quantum_zero", "quantum_ti_g0.5".
    std::string name() const;
    DEConfig apply(DEConfig base) const;

    friend bool operator==(const Setting&, const Setting&) = default;
};

struct GridSpec {
    double from;
    double to;
    double step;

    std::vector<double> values() const { return linear_grid(from, to, step); }
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::optional<std::size_t> trials;  ///< command default when empty
    unsigned workers = 0;
    std::string out = "out";
    TaskSpec task = canonical_task(TaskId::T1);
    DEConfig learner = [] {
        DEConfig c;
        c.w = 0.7;
        c.cr = 0.9;
        return c;
    }();
    std::size_t bootstrap_resamples = 1000;

    // learn
    std::vector<Setting> settings = default_settings();
    bool tune = false;  ///< pick (W, C_r) from a classical sweep first

    // decohere
    std::vector<double> gammas{0.0, 0.25, 0.5, 0.75, 1.0};

    // sweep
    GridSpec w_grid{0.0, 2.0, 0.1};
    GridSpec cr_grid{0.0, 1.0, 0.05};
    std::size_t max_fails = 0;

    // nbit
    int n_bits = 2;
    std::optional<std::vector<int>> targets;  ///< all 2^(2^N) functions when empty
    ToleranceTarget tolerance = ToleranceTarget::Circuit;
    DeltaPolicy nbit_delta = DeltaPolicy::target_independent();

    static std::vector<Setting> default_settings();

    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

Json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys and invalid values raise
/// ConfigError with the dotted field path.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace usfc::cli
