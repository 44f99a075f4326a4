#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace usfc::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBootstrapKey = 0xB0075ULL;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    out.close();
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

fs::path prepare_out(const ExperimentConfig& config) {
    fs::path out(config.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + out.string() + "': " + ec.message());
    return out;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

// workers is left out: results never depend on it
Json metadata(const ExperimentConfig& config, const std::string& command) {
    Json c = to_json(config);
    c.erase("workers");
    return {{"command", command}, {"generated_at", utc_now()}, {"config", c}};
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json interval_json(const Interval& i) { return Json::array({i.lo, i.hi}); }

Json estimate_json(const BootstrapEstimate& e) {
    return {{"value", e.value}, {"ci95", interval_json(e.ci95)}, {"ci99", interval_json(e.ci99)},
            {"valid_resamples", e.valid_resamples}};
}

std::string curve_csv(const LearningProbabilityCurve& curve, int max_iterations) {
    std::string s = "n,P_n,rho_n\n";
    for (int n = 0; n <= max_iterations; ++n) {
        const auto idx = static_cast<std::size_t>(n);
        const double p = idx < curve.p_of_n.size() ? curve.p_of_n[idx] : (curve.p_of_n.empty() ? 0.0 : curve.p_of_n.back());
        s += std::to_string(n) + ',' + format_double(p) + ',';
        if (curve.fit) s += format_double(gaussian_density(*curve.fit, n));
        s += '\n';
    }
    return s;
}

std::string gamma_label(double g) { return format_double(g); }

}  // namespace

bool IdentityReport::pass() const noexcept {
    return max_residual < kIdentityTolerance && max_half_pi_gap < kIdentityTolerance &&
           max_endpoint_lambda < kIdentityTolerance;
}

IdentityReport check_identity(std::size_t samples, std::uint64_t seed) {
    const TaskSpec t1 = canonical_task(TaskId::T1);
    auto gap = [&](const PreferenceVector& pref, double delta) {
        const double fq = task_fidelity(machine_table(Machine::Quantum, pref, PhaseConfig::fixed(delta), 0.0), t1);
        const double fc = task_fidelity(machine_table(Machine::Classical, pref, PhaseConfig::fixed(delta), 0.0), t1);
        return std::pow(fq, 4) - std::pow(fc, 4);
    };
    IdentityReport r;
    r.samples = samples;
    Rng rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        const PreferenceVector pref(rng.uniform01(), rng.uniform01());
        const double delta = 2.0 * kPi * rng.uniform01();
        const double lambda = analytic_advantage(pref, delta).lambda;
        r.max_residual = std::max(r.max_residual, std::abs(gap(pref, delta) - lambda * std::cos(delta)));
        r.max_half_pi_gap = std::max(r.max_half_pi_gap, std::abs(gap(pref, kPi / 2.0)));
    }
    for (double a : {0.0, 1.0}) {
        for (int k = 0; k <= 10; ++k) {
            const double b = k / 10.0;
            r.max_endpoint_lambda = std::max({r.max_endpoint_lambda, analytic_advantage(PreferenceVector(a, b), 0.0).lambda,
                                              analytic_advantage(PreferenceVector(b, a), 0.0).lambda});
        }
    }
    return r;
}

int cmd_check_identity(const ExperimentConfig& config, std::ostream& log) {
    const auto r = check_identity(config.trials.value_or(kDefaultIdentitySamples), config.seed);
    log << "samples: " << r.samples << '\n'
        << "max residual: " << format_double(r.max_residual) << '\n'
        << "max gap at delta=pi/2: " << format_double(r.max_half_pi_gap) << '\n'
        << "max lambda at endpoints: " << format_double(r.max_endpoint_lambda) << '\n'
        << (r.pass() ? "identity holds" : "IDENTITY VIOLATED") << " (tolerance " << kIdentityTolerance << ")\n";
    return r.pass() ? 0 : 1;
}

int cmd_learn(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out(config);
    const std::size_t trials = config.trials.value_or(kDefaultLearnTrials);
    DEConfig learner = config.learner;
    Json summary{{"metadata", metadata(config, "learn")}};

    if (config.tune) {
        log << "tuning (W, Cr) on the classical machine, " << trials << " trials per cell\n";
        DEConfig classical = learner;
        classical.machine = Machine::Classical;
        classical.gamma = 0.0;
        const SweepGrid grid = parameter_sweep(classical, config.task, config.w_grid.values(), config.cr_grid.values(), trials,
                                               config.seed, config.max_fails, config.workers);
        if (!grid.best) throw std::runtime_error("tuning sweep found no cell with at most " + std::to_string(config.max_fails) +
                                                 " failed trials");
        learner.w = grid.best->first;
        learner.cr = grid.best->second;
        log << "tuned W=" << format_double(learner.w) << " Cr=" << format_double(learner.cr) << '\n';
    }
    summary["learner"] = {{"w", learner.w}, {"cr", learner.cr}, {"tuned", config.tune}};

    std::optional<std::vector<TrialRecord>> classical_records;
    std::optional<GaussianFit> classical_fit;
    Json settings = Json::object();
    for (std::size_t k = 0; k < config.settings.size(); ++k) {
        const Setting& s = config.settings[k];
        const std::string name = s.name();
        log << "learn " << name << ": " << trials << " trials\n";
        const DEConfig cfg = s.apply(learner);
        const auto records = run_batch(cfg, config.task, trials, config.seed, config.workers);
        const auto curve = learning_probability(records);
        write_file(out / ("records_" + name + ".jsonl"), records_to_jsonl(records));
        write_file(out / ("curve_" + name + ".csv"), curve_csv(curve, cfg.max_iterations));

        const std::uint64_t boot_seed = derive_seed(config.seed, {kBootstrapKey, k});
        Json entry{{"machine", to_string(s.machine)},
                   {"delta", delta_to_json(s.delta)},
                   {"gamma", s.gamma},
                   {"trials", trials},
                   {"converged_fraction", curve.converged_fraction},
                   {"failures", failures(records)},
                   {"degenerate", curve.degenerate},
                   {"n_c", opt_json(curve.fit ? std::optional<double>(curve.fit->n_c) : std::nullopt)},
                   {"sigma_n", opt_json(curve.fit ? std::optional<double>(curve.fit->sigma_n) : std::nullopt)},
                   {"n_c_bootstrap", estimate_json(bootstrap_nc(records, config.bootstrap_resamples, boot_seed))}};
        if (s.machine == Machine::Classical && !classical_records) {
            classical_records = records;
            classical_fit = curve.fit;
        } else if (classical_records && classical_fit && curve.fit) {
            entry["speedup_pct"] = speedup(*classical_fit, *curve.fit);
            entry["speedup_bootstrap"] =
                estimate_json(bootstrap_speedup(*classical_records, records, config.bootstrap_resamples, boot_seed));
        }
        if (curve.fit) {
            log << "  n_c=" << format_double(curve.fit->n_c) << " sigma_n=" << format_double(curve.fit->sigma_n);
            if (entry.contains("speedup_pct")) log << " speed-up=" << format_double(entry["speedup_pct"].get<double>()) << "%";
            log << " failures=" << failures(records) << '\n';
        } else {
            log << "  no Gaussian fit (" << failures(records) << " failures)\n";
        }
        settings[name] = entry;
    }
    summary["settings"] = settings;
    write_file(out / "summary.json", summary.dump(2) + '\n');
    return 0;
}

int cmd_decohere(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out(config);
    const std::size_t trials = config.trials.value_or(kDefaultDecohereTrials);
    log << "decoherence sweep over " << config.gammas.size() << " decay rates, " << trials << " trials each\n";
    const auto series =
        decoherence_sweep(config.learner, config.task, config.gammas, trials, config.seed, config.bootstrap_resamples,
                          config.workers);

    const std::string classical_nc = series.classical_fit ? format_double(series.classical_fit->n_c) : std::string();
    std::string csv = "gamma,n_c,sigma_n,n_c_lo95,n_c_hi95,speedup_pct,speedup_lo95,speedup_hi95,fails,classical_n_c\n";
    Json points = Json::array();
    for (std::size_t k = 0; k < series.points.size(); ++k) {
        const auto& p = series.points[k];
        csv += format_double(p.gamma) + ',' + cell(p.fit ? std::optional(p.fit->n_c) : std::nullopt) + ',' +
               cell(p.fit ? std::optional(p.fit->sigma_n) : std::nullopt) + ',' + format_double(p.n_c.ci95.lo) + ',' +
               format_double(p.n_c.ci95.hi) + ',';
        if (p.speedup) {
            csv += format_double(p.speedup->value) + ',' + format_double(p.speedup->ci95.lo) + ',' +
                   format_double(p.speedup->ci95.hi);
        } else {
            csv += ",,";
        }
        csv += ',' + std::to_string(p.failures) + ',' + classical_nc + '\n';
        write_file(out / ("records_quantum_zero_g" + gamma_label(p.gamma) + ".jsonl"), records_to_jsonl(series.records[k]));

        Json pt{{"gamma", p.gamma},
                {"n_c", opt_json(p.fit ? std::optional(p.fit->n_c) : std::nullopt)},
                {"sigma_n", opt_json(p.fit ? std::optional(p.fit->sigma_n) : std::nullopt)},
                {"n_c_bootstrap", estimate_json(p.n_c)},
                {"speedup_bootstrap", p.speedup ? estimate_json(*p.speedup) : Json(nullptr)},
                {"failures", p.failures}};
        points.push_back(pt);
        log << "  gamma=" << format_double(p.gamma) << " n_c=" << cell(p.fit ? std::optional(p.fit->n_c) : std::nullopt)
            << '\n';
    }
    write_file(out / "decoherence.csv", csv);
    write_file(out / "records_classical.jsonl", records_to_jsonl(series.classical_records));
    Json summary{{"metadata", metadata(config, "decohere")},
                 {"trials_per_gamma", trials},
                 {"classical",
                  {{"n_c", opt_json(series.classical_fit ? std::optional(series.classical_fit->n_c) : std::nullopt)},
                   {"sigma_n", opt_json(series.classical_fit ? std::optional(series.classical_fit->sigma_n) : std::nullopt)},
                   {"n_c_bootstrap", estimate_json(series.classical_n_c)},
                   {"failures", failures(series.classical_records)}}},
                 {"points", points}};
    write_file(out / "summary.json", summary.dump(2) + '\n');
    return 0;
}

int cmd_sweep(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out(config);
    const std::size_t trials = config.trials.value_or(kDefaultSweepTrials);
    const auto w = config.w_grid.values();
    const auto cr = config.cr_grid.values();
    Json best = Json::object();
    for (const Setting& s : config.settings) {
        const std::string name = s.name();
        log << "sweep " << name << ": " << w.size() << " x " << cr.size() << " cells, " << trials << " trials per cell\n";
        const SweepGrid grid =
            parameter_sweep(s.apply(config.learner), config.task, w, cr, trials, config.seed, config.max_fails, config.workers);
        std::string csv = "W,Cr,n_c,fails\n";
        for (std::size_t wi = 0; wi < w.size(); ++wi) {
            for (std::size_t ci = 0; ci < cr.size(); ++ci) {
                const auto idx = grid.index(wi, ci);
                csv += format_double(w[wi]) + ',' + format_double(cr[ci]) + ',' + cell(grid.n_c[idx]) + ',' +
                       std::to_string(grid.fails[idx]) + '\n';
            }
        }
        write_file(out / ("sweep_" + name + ".csv"), csv);
        if (grid.best) {
            std::optional<double> nc;
            for (std::size_t wi = 0; wi < w.size(); ++wi) {
                for (std::size_t ci = 0; ci < cr.size(); ++ci) {
                    if (w[wi] == grid.best->first && cr[ci] == grid.best->second) nc = grid.n_c[grid.index(wi, ci)];
                }
            }
            best[name] = {{"w", grid.best->first}, {"cr", grid.best->second}, {"n_c", opt_json(nc)}};
            log << "  best W=" << format_double(grid.best->first) << " Cr=" << format_double(grid.best->second)
                << " n_c=" << cell(nc) << '\n';
        } else {
            best[name] = nullptr;
            log << "  no cell with at most " << config.max_fails << " failed trials\n";
        }
    }
    Json summary{{"metadata", metadata(config, "sweep")}, {"trials_per_cell", trials}, {"max_fails", config.max_fails},
                 {"best", best}};
    write_file(out / "summary.json", summary.dump(2) + '\n');
    return 0;
}

namespace {

struct NbitRun {
    TrainingReport report;
    std::optional<double> fidelity;
};

NbitRun nbit_run(const ExperimentConfig& config, const NBitTrainingSet& set, Machine machine, std::uint64_t seed) {
    DEConfig learner = config.learner;
    learner.machine = machine;
    learner.gamma = 0.0;
    learner.delta = config.nbit_delta;
    NbitRun run{train_all(config.n_bits, set, learner, seed, config.tolerance, 1), std::nullopt};
    if (run.report.complete()) run.fidelity = circuit_fidelity(run.report.bank, set, machine, 0.0);
    return run;
}

std::string truth_label(const NBitTrainingSet& set) {
    std::string s;
    for (int t : set.targets()) s += static_cast<char>('0' + t);
    return s;
}

}  // namespace

int cmd_nbit(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out(config);
    const std::size_t trials = config.trials.value_or(kDefaultNbitTrials);
    std::vector<NBitTrainingSet> functions;
    if (config.targets) {
        functions.emplace_back(config.n_bits, *config.targets);
    } else {
        const std::uint64_t count = std::uint64_t{1} << (std::size_t{1} << config.n_bits);
        for (std::uint64_t k = 0; k < count; ++k) functions.push_back(NBitTrainingSet::boolean_function(config.n_bits, k));
    }
    log << "nbit: " << functions.size() << " function(s) on " << config.n_bits << " bits, " << trials
        << " paired trials each\n";

    const std::array<Machine, 2> machines{Machine::Quantum, Machine::Classical};
    const std::size_t jobs = functions.size() * trials;
    std::vector<std::array<std::optional<NbitRun>, 2>> runs(jobs);
    parallel_for(jobs, config.workers, [&](std::size_t i) {
        const std::size_t k = i / trials;
        const std::size_t t = i % trials;
        const std::uint64_t seed = derive_seed(config.seed, {k, t});
        for (std::size_t m = 0; m < 2; ++m) runs[i][m].emplace(nbit_run(config, functions[k], machines[m], seed));
    });

    std::string iterations_csv = "function,trial,quantum_iterations,classical_iterations,quantum_fidelity,classical_fidelity\n";
    std::array<std::string, 2> fidelity_csv;
    for (auto& s : fidelity_csv) s = "function,x,target,p_target,circuit_fidelity\n";
    std::array<long, 2> totals{0, 0};
    std::array<std::size_t, 2> partial{0, 0};
    std::array<double, 2> min_fidelity{1.0, 1.0};
    Json per_function = Json::array();

    for (std::size_t k = 0; k < functions.size(); ++k) {
        const auto& set = functions[k];
        const std::string label = truth_label(set);
        Json fn{{"function", label}};
        for (std::size_t m = 0; m < 2; ++m) {
            const std::string mname = to_string(machines[m]);
            long total = 0;
            std::size_t fn_partial = 0;
            Json failed_blocks = Json::array();
            std::optional<double> fn_min;
            for (std::size_t t = 0; t < trials; ++t) {
                const NbitRun& r = *runs[k * trials + t][m];
                total += r.report.total_iterations;
                if (!r.report.complete()) {
                    ++fn_partial;
                    Json blocks = Json::array();
                    for (auto j : r.report.failed_blocks) blocks.push_back(set.n_bits() > 1 ? bitstring(j, set.n_bits() - 1) : "");
                    failed_blocks.push_back({{"trial", t}, {"blocks", blocks}});
                    log << "  " << label << ' ' << mname << " trial " << t << ": " << r.report.failed_blocks.size()
                        << " block(s) did not converge\n";
                }
                if (r.fidelity) fn_min = std::min(fn_min.value_or(1.0), *r.fidelity);
            }
            totals[m] += total;
            partial[m] += fn_partial;
            if (fn_min) min_fidelity[m] = std::min(min_fidelity[m], *fn_min);
            fn[mname] = {{"total_iterations", total},
                         {"partial_banks", fn_partial},
                         {"failed_blocks", failed_blocks},
                         {"min_circuit_fidelity", opt_json(fn_min)}};

            const NbitRun& first = *runs[k * trials][m];
            write_file(out / ("bank_" + mname + "_" + label + ".json"), bank_to_json(first.report.bank).dump(2) + '\n');
            if (first.fidelity) {
                const auto table = circuit_table(first.report.bank, machines[m], 0.0);
                for (std::size_t x = 0; x < table.size(); ++x) {
                    const int target = set.target(x);
                    fidelity_csv[m] += label + ',' + bitstring(x, set.n_bits()) + ',' + std::to_string(target) + ',' +
                                       format_double(table[x][static_cast<std::size_t>(target)]) + ',' +
                                       format_double(*first.fidelity) + '\n';
                }
            }
        }
        for (std::size_t t = 0; t < trials; ++t) {
            const NbitRun& q = *runs[k * trials + t][0];
            const NbitRun& c = *runs[k * trials + t][1];
            iterations_csv += label + ',' + std::to_string(t) + ',' + std::to_string(q.report.total_iterations) + ',' +
                              std::to_string(c.report.total_iterations) + ',' + cell(q.fidelity) + ',' + cell(c.fidelity) + '\n';
        }
        per_function.push_back(fn);
    }
    for (std::size_t m = 0; m < 2; ++m) write_file(out / ("fidelity_" + to_string(machines[m]) + ".csv"), fidelity_csv[m]);
    write_file(out / "nbit_iterations.csv", iterations_csv);

    Json summary{{"metadata", metadata(config, "nbit")},
                 {"block_predecessor", "j-1"},
                 {"tolerance", to_string(config.tolerance)},
                 {"block_epsilon_t", config.tolerance == ToleranceTarget::Circuit
                                         ? circuit_block_tolerance(config.learner.epsilon_t, config.n_bits)
                                         : config.learner.epsilon_t},
                 {"trials", trials},
                 {"quantum_total_iterations", totals[0]},
                 {"classical_total_iterations", totals[1]},
                 {"quantum_partial_banks", partial[0]},
                 {"classical_partial_banks", partial[1]},
                 {"quantum_min_circuit_fidelity", min_fidelity[0]},
                 {"classical_min_circuit_fidelity", min_fidelity[1]},
                 {"functions", per_function}};
    write_file(out / "summary.json", summary.dump(2) + '\n');
    log << "total iterations: quantum " << totals[0] << ", classical " << totals[1] << '\n';
    return 0;
}

}  // namespace usfc::cli
