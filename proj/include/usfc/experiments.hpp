#pragma once

#include "usfc/de_learner.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace usfc {

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = all
/// cores). Results must be written to per-index slots; scheduling order never
/// affects them.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

/// Seed of trial t in a batch. Independent of the configuration, so batches
/// of different machines with the same master seed share initial populations.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t t) noexcept;

std::vector<TrialRecord> run_batch(const DEConfig& config, const TaskSpec& task, std::size_t trials,
                                   std::uint64_t master_seed, unsigned workers = 0);

struct GaussianFit {
    double n_c;
    double sigma_n;
    double residual;  ///< root-mean-square CDF residual
};

/// Least-squares fit of Phi((n - n_c) / sigma) to an empirical CDF sampled at
/// integer n. Returns nullopt when fewer than two distinct completion values
/// exist (point mass) or no trial converged.
std::optional<GaussianFit> fit_completions(const std::vector<int>& completions);

/// Gaussian density with the fitted centre and width.
double gaussian_density(const GaussianFit& fit, double n) noexcept;
double gaussian_cdf(const GaussianFit& fit, double n) noexcept;

struct LearningProbabilityCurve {
    std::size_t trials = 0;
    std::vector<int> counts_by_iteration;  ///< completions at exactly n
    std::vector<double> p_of_n;            ///< fraction completed by n
    double converged_fraction = 0.0;
    std::optional<GaussianFit> fit;        ///< on converged trials only
    bool degenerate = false;               ///< converged trials exist but fit unavailable
};

LearningProbabilityCurve learning_probability(const std::vector<TrialRecord>& records);

std::vector<int> completions(const std::vector<TrialRecord>& records);
std::size_t failures(const std::vector<TrialRecord>& records);

/// (n_c^C - n_c^Q) / n_c^C in percent.
double speedup(const GaussianFit& classical, const GaussianFit& quantum);

struct Interval {
    double lo;
    double hi;

    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    bool overlaps(const Interval& o) const noexcept { return lo <= o.hi && o.lo <= hi; }
};

struct BootstrapEstimate {
    double value;
    Interval ci95;
    Interval ci99;
    std::size_t valid_resamples;
};

/// Percentile bootstrap of the fitted n_c over trial resampling.
BootstrapEstimate bootstrap_nc(const std::vector<TrialRecord>& records, std::size_t resamples, std::uint64_t seed);

/// Percentile bootstrap of the speed-up. Equal-size batches are resampled
/// with shared indices (trial t of both batches starts from the same seed).
BootstrapEstimate bootstrap_speedup(const std::vector<TrialRecord>& classical, const std::vector<TrialRecord>& quantum,
                                    std::size_t resamples, std::uint64_t seed);

/// Linear-interpolated empirical quantile of an unsorted sample.
double quantile(std::vector<double> sample, double q);

/// Weighted isotonic (non-decreasing) regression by pool-adjacent-violators.
std::vector<double> isotonic_fit(const std::vector<double>& values, const std::vector<double>& weights);

struct DecoherencePoint {
    double gamma;
    std::optional<GaussianFit> fit;
    BootstrapEstimate n_c;
    std::optional<BootstrapEstimate> speedup;
    std::size_t failures;
};

struct DecoherenceSeries {
    std::vector<DecoherencePoint> points;
    std::optional<GaussianFit> classical_fit;
    BootstrapEstimate classical_n_c;
    std::vector<std::vector<TrialRecord>> records;  ///< per gamma
    std::vector<TrialRecord> classical_records;
};

/// Quantum batches at Delta = 0 for each gamma plus a classical reference.
/// Every batch uses the same trial seeds.
DecoherenceSeries decoherence_sweep(const DEConfig& base, const TaskSpec& task, const std::vector<double>& gammas,
                                    std::size_t trials_per_gamma, std::uint64_t master_seed,
                                    std::size_t bootstrap_resamples = 1000, unsigned workers = 0);

struct SweepGrid {
    std::vector<double> w_values;
    std::vector<double> cr_values;
    /// Row-major [w][cr]. Empty when no trial in the cell converged.
    std::vector<std::optional<double>> n_c;
    std::vector<std::size_t> fails;
    std::size_t trials_per_cell = 0;
    std::optional<std::pair<double, double>> best;  ///< (W, C_r)

    std::size_t index(std::size_t wi, std::size_t ci) const noexcept { return wi * cr_values.size() + ci; }
};

/// n_c of one cell: fitted centre, or the mean completion when the fit is
/// degenerate; empty if nothing converged.
std::optional<double> cell_n_c(const std::vector<TrialRecord>& records);

/// Inclusive arithmetic grid from..to with the given step.
std::vector<double> linear_grid(double from, double to, double step);

/// Runs a batch per (W, C_r) cell. The best cell minimizes n_c among cells
/// with at most `max_fails` failed trials.
SweepGrid parameter_sweep(const DEConfig& base, const TaskSpec& task, const std::vector<double>& w_grid,
                          const std::vector<double>& cr_grid, std::size_t trials_per_cell, std::uint64_t master_seed,
                          std::size_t max_fails = 0, unsigned workers = 0);

}  // namespace usfc
