#include "usfc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace usfc {

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t t) noexcept {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(t)});
}

std::vector<TrialRecord> run_batch(const DEConfig& config, const TaskSpec& task, std::size_t trials,
                                   std::uint64_t master_seed, unsigned workers) {
    if (trials == 0) throw ConfigError("trials", "must be >= 1");
    config.validate();
    std::vector<TrialRecord> out(trials);
    parallel_for(trials, workers, [&](std::size_t t) { out[t] = run_trial(config, task, trial_seed(master_seed, t)); });
    return out;
}

namespace {

double std_normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_normal_pdf(double z) noexcept { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

// Levenberg-Marquardt on (centre, log width).
GaussianFit fit_cdf(const std::vector<double>& ns, const std::vector<double>& ps, double c0, double s0) {
    double c = c0;
    double log_s = std::log(s0);
    auto sse = [&](double cc, double ls) {
        const double s = std::exp(ls);
        double acc = 0.0;
        for (std::size_t k = 0; k < ns.size(); ++k) {
            const double r = std_normal_cdf((ns[k] - cc) / s) - ps[k];
            acc += r * r;
        }
        return acc;
    };
    double cost = sse(c, log_s);
    double lambda = 1e-3;
    bool settled = false;
    for (int iter = 0; iter < 200 && !settled; ++iter) {
        const double s = std::exp(log_s);
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
        for (std::size_t k = 0; k < ns.size(); ++k) {
            const double z = (ns[k] - c) / s;
            const double r = std_normal_cdf(z) - ps[k];
            const double phi = std_normal_pdf(z);
            const double j0 = -phi / s;
            const double j1 = -phi * z;
            jtj00 += j0 * j0;
            jtj01 += j0 * j1;
            jtj11 += j1 * j1;
            jtr0 += j0 * r;
            jtr1 += j1 * r;
        }
        bool improved = false;
        while (lambda < 1e12) {
            const double a = jtj00 * (1.0 + lambda);
            const double d = jtj11 * (1.0 + lambda);
            const double det = a * d - jtj01 * jtj01;
            if (det <= 0.0) {
                lambda *= 10.0;
                continue;
            }
            const double dc = -(d * jtr0 - jtj01 * jtr1) / det;
            const double dl = -(a * jtr1 - jtj01 * jtr0) / det;
            const double trial_cost = sse(c + dc, log_s + dl);
            if (trial_cost < cost) {
                c += dc;
                log_s += dl;
                const double drop = cost - trial_cost;
                cost = trial_cost;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                settled = drop < 1e-15 && std::abs(dc) < 1e-10 && std::abs(dl) < 1e-10;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
    return {c, std::exp(log_s), std::sqrt(cost / static_cast<double>(ns.size()))};
}

}  // namespace

std::optional<GaussianFit> fit_completions(const std::vector<int>& done) {
    if (done.size() < 2) return std::nullopt;
    const auto [lo_it, hi_it] = std::minmax_element(done.begin(), done.end());
    if (*lo_it == *hi_it) return std::nullopt;
    const int hi = *hi_it;

    std::vector<int> counts(static_cast<std::size_t>(hi) + 1, 0);
    for (int v : done) ++counts[static_cast<std::size_t>(v)];
    std::vector<double> ns;
    std::vector<double> ps;
    const double total = static_cast<double>(done.size());
    double cum = 0.0;
    for (int n = 0; n <= hi + 1; ++n) {
        if (n <= hi) cum += counts[static_cast<std::size_t>(n)];
        ns.push_back(n);
        ps.push_back(cum / total);
    }

    const double mean = std::accumulate(done.begin(), done.end(), 0.0) / total;
    double var = 0.0;
    for (int v : done) var += (v - mean) * (v - mean);
    const double sd = std::max(std::sqrt(var / (total - 1.0)), 0.25);
    const GaussianFit fit = fit_cdf(ns, ps, mean, sd);
    if (!std::isfinite(fit.n_c) || !(fit.sigma_n > 0.0) || !std::isfinite(fit.sigma_n)) return std::nullopt;
    return fit;
}

double gaussian_density(const GaussianFit& fit, double n) noexcept {
    return std_normal_pdf((n - fit.n_c) / fit.sigma_n) / fit.sigma_n;
}

double gaussian_cdf(const GaussianFit& fit, double n) noexcept { return std_normal_cdf((n - fit.n_c) / fit.sigma_n); }

std::vector<int> completions(const std::vector<TrialRecord>& records) {
    std::vector<int> out;
    for (const auto& r : records) {
        if (r.converged && r.completion_iteration) out.push_back(*r.completion_iteration);
    }
    return out;
}

std::size_t failures(const std::vector<TrialRecord>& records) {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.converged; }));
}

LearningProbabilityCurve learning_probability(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw ContractError("learning_probability needs at least one record");
    LearningProbabilityCurve curve;
    curve.trials = records.size();
    int horizon = 0;
    for (const auto& r : records) horizon = std::max(horizon, r.iterations_run);
    curve.counts_by_iteration.assign(static_cast<std::size_t>(horizon) + 1, 0);
    const auto done = completions(records);
    for (int v : done) ++curve.counts_by_iteration[static_cast<std::size_t>(v)];
    double cum = 0.0;
    for (int c : curve.counts_by_iteration) {
        cum += c;
        curve.p_of_n.push_back(cum / static_cast<double>(records.size()));
    }
    curve.converged_fraction = static_cast<double>(done.size()) / static_cast<double>(records.size());
    curve.fit = fit_completions(done);
    curve.degenerate = !done.empty() && !curve.fit;
    return curve;
}

double speedup(const GaussianFit& classical, const GaussianFit& quantum) {
    if (!(classical.n_c > 0.0)) throw ContractError("speed-up needs a positive classical n_c");
    return 100.0 * (classical.n_c - quantum.n_c) / classical.n_c;
}

double quantile(std::vector<double> sample, double q) {
    if (sample.empty()) throw ContractError("quantile of an empty sample");
    std::sort(sample.begin(), sample.end());
    const double pos = q * static_cast<double>(sample.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sample[lo] + frac * (sample[hi] - sample[lo]);
}

namespace {

BootstrapEstimate summarize(double value, const std::vector<double>& stats) {
    if (stats.empty()) throw ContractError("bootstrap produced no valid resamples");
    return {value,
            {quantile(stats, 0.025), quantile(stats, 0.975)},
            {quantile(stats, 0.005), quantile(stats, 0.995)},
            stats.size()};
}

std::vector<int> resample_completions(const std::vector<TrialRecord>& records, const std::vector<std::size_t>& idx) {
    std::vector<int> out;
    for (auto i : idx) {
        const auto& r = records[i];
        if (r.converged && r.completion_iteration) out.push_back(*r.completion_iteration);
    }
    return out;
}

std::vector<std::size_t> draw_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_index(n));
    return idx;
}

}  // namespace

BootstrapEstimate bootstrap_nc(const std::vector<TrialRecord>& records, std::size_t resamples, std::uint64_t seed) {
    const auto fit = fit_completions(completions(records));
    if (!fit) throw ContractError("n_c bootstrap needs a valid Gaussian fit");
    Rng rng(seed);
    std::vector<double> stats;
    stats.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        const auto idx = draw_indices(records.size(), rng);
        if (const auto f = fit_completions(resample_completions(records, idx))) stats.push_back(f->n_c);
    }
    return summarize(fit->n_c, stats);
}

BootstrapEstimate bootstrap_speedup(const std::vector<TrialRecord>& classical, const std::vector<TrialRecord>& quantum,
                                    std::size_t resamples, std::uint64_t seed) {
    const auto fc = fit_completions(completions(classical));
    const auto fq = fit_completions(completions(quantum));
    if (!fc || !fq) throw ContractError("speed-up needs valid Gaussian fits for both machines");
    const bool paired = classical.size() == quantum.size();
    Rng rng(seed);
    std::vector<double> stats;
    stats.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        const auto ic = draw_indices(classical.size(), rng);
        const auto iq = paired ? ic : draw_indices(quantum.size(), rng);
        const auto bc = fit_completions(resample_completions(classical, ic));
        const auto bq = fit_completions(resample_completions(quantum, iq));
        if (bc && bq && bc->n_c > 0.0) stats.push_back(speedup(*bc, *bq));
    }
    return summarize(speedup(*fc, *fq), stats);
}

std::vector<double> isotonic_fit(const std::vector<double>& values, const std::vector<double>& weights) {
    if (values.size() != weights.size()) throw ContractError("isotonic_fit: size mismatch");
    struct Block {
        double mean;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < values.size(); ++i) {
        blocks.push_back({values[i], weights[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            const Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            const double w = a.weight + b.weight;
            a.mean = (a.mean * a.weight + b.mean * b.weight) / w;
            a.weight = w;
            a.count += b.count;
        }
    }
    std::vector<double> out;
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean);
    return out;
}

DecoherenceSeries decoherence_sweep(const DEConfig& base, const TaskSpec& task, const std::vector<double>& gammas,
                                    std::size_t trials_per_gamma, std::uint64_t master_seed,
                                    std::size_t bootstrap_resamples, unsigned workers) {
    for (double g : gammas) {
        if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("gammas", "every decay rate must lie in [0, 1]");
    }
    DecoherenceSeries series;
    DEConfig classical = base;
    classical.machine = Machine::Classical;
    classical.gamma = 0.0;
    series.classical_records = run_batch(classical, task, trials_per_gamma, master_seed, workers);
    series.classical_fit = fit_completions(completions(series.classical_records));
    const std::uint64_t boot_seed = derive_seed(master_seed, {0xB0075ULL});
    series.classical_n_c = bootstrap_nc(series.classical_records, bootstrap_resamples, boot_seed);

    for (std::size_t k = 0; k < gammas.size(); ++k) {
        DEConfig q = base;
        q.machine = Machine::Quantum;
        q.delta = DeltaPolicy::zero();
        q.gamma = gammas[k];
        auto recs = run_batch(q, task, trials_per_gamma, master_seed, workers);
        DecoherencePoint pt{gammas[k], fit_completions(completions(recs)), {}, std::nullopt, failures(recs)};
        pt.n_c = bootstrap_nc(recs, bootstrap_resamples, boot_seed);
        if (series.classical_fit && pt.fit) {
            pt.speedup = bootstrap_speedup(series.classical_records, recs, bootstrap_resamples, boot_seed);
        }
        series.points.push_back(pt);
        series.records.push_back(std::move(recs));
    }
    return series;
}

std::optional<double> cell_n_c(const std::vector<TrialRecord>& records) {
    const auto done = completions(records);
    if (done.empty()) return std::nullopt;
    if (const auto fit = fit_completions(done)) return fit->n_c;
    return std::accumulate(done.begin(), done.end(), 0.0) / static_cast<double>(done.size());
}

std::vector<double> linear_grid(double from, double to, double step) {
    if (!(step > 0.0) || to < from) throw ConfigError("grid", "needs from <= to and step > 0");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
        // Round to 12 decimals so 0.1-steps print and compare cleanly.
        out.push_back(std::round((from + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
    return out;
}

SweepGrid parameter_sweep(const DEConfig& base, const TaskSpec& task, const std::vector<double>& w_grid,
                          const std::vector<double>& cr_grid, std::size_t trials_per_cell, std::uint64_t master_seed,
                          std::size_t max_fails, unsigned workers) {
    if (w_grid.empty() || cr_grid.empty()) throw ConfigError("grid", "W and C_r grids must be non-empty");
    if (trials_per_cell == 0) throw ConfigError("trials", "must be >= 1");
    SweepGrid grid;
    grid.w_values = w_grid;
    grid.cr_values = cr_grid;
    grid.trials_per_cell = trials_per_cell;
    const std::size_t cells = w_grid.size() * cr_grid.size();
    grid.n_c.assign(cells, std::nullopt);
    grid.fails.assign(cells, 0);

    std::vector<DEConfig> configs;
    for (double w : w_grid) {
        for (double cr : cr_grid) {
            DEConfig c = base;
            c.w = w;
            c.cr = cr;
            c.validate();
            configs.push_back(c);
        }
    }
    // Parallelize over (cell, trial) so small grids still use every worker.
    std::vector<TrialRecord> all(cells * trials_per_cell);
    parallel_for(all.size(), workers, [&](std::size_t k) {
        const std::size_t cell = k / trials_per_cell;
        const std::size_t t = k % trials_per_cell;
        all[k] = run_trial(configs[cell], task, trial_seed(master_seed, t));
    });

    double best_nc = 0.0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const std::vector<TrialRecord> recs(all.begin() + static_cast<std::ptrdiff_t>(cell * trials_per_cell),
                                            all.begin() + static_cast<std::ptrdiff_t>((cell + 1) * trials_per_cell));
        grid.n_c[cell] = cell_n_c(recs);
        grid.fails[cell] = failures(recs);
        if (grid.n_c[cell] && grid.fails[cell] <= max_fails && (!grid.best || *grid.n_c[cell] < best_nc)) {
            best_nc = *grid.n_c[cell];
            grid.best = std::make_pair(configs[cell].w, configs[cell].cr);
        }
    }
    return grid;
}

}  // namespace usfc
