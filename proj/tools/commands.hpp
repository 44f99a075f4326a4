#pragma once

#include "experiment_config.hpp"

#include <iosfwd>

namespace usfc::cli {

struct IdentityReport {
    std::size_t samples = 0;
    double max_residual = 0.0;     ///< |(F_Q^4 - F_C^4) - Lambda cos(Delta)| over random draws
    double max_half_pi_gap = 0.0;  ///< |F_Q^4 - F_C^4| at Delta = pi/2
    double max_endpoint_lambda = 0.0;
    bool pass() const noexcept;
};

inline constexpr double kIdentityTolerance = 1e-10;

IdentityReport check_identity(std::size_t samples, std::uint64_t seed);

// Each command writes its data files under config.out and returns a process
// exit code. Progress goes to `log`.
int cmd_check_identity(const ExperimentConfig& config, std::ostream& log);
int cmd_learn(const ExperimentConfig& config, std::ostream& log);
int cmd_decohere(const ExperimentConfig& config, std::ostream& log);
int cmd_sweep(const ExperimentConfig& config, std::ostream& log);
int cmd_nbit(const ExperimentConfig& config, std::ostream& log);

// Default trial counts when the config leaves `trials` unset.
inline constexpr std::size_t kDefaultIdentitySamples = 10000;
inline constexpr std::size_t kDefaultLearnTrials = 200;
inline constexpr std::size_t kDefaultDecohereTrials = 100;
inline constexpr std::size_t kDefaultSweepTrials = 100;
inline constexpr std::size_t kDefaultNbitTrials = 100;

}  // namespace usfc::cli
