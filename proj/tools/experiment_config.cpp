#include "experiment_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace usfc::cli {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where.empty() ? "<root>" : where.substr(0, where.size() - 1), "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(where + key, "unknown key");
    }
}

template <typename T>
T field(const Json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + key, "missing or has the wrong type");
    }
}

Json grid_to_json(const GridSpec& g) { return {{"from", g.from}, {"to", g.to}, {"step", g.step}}; }

GridSpec grid_from_json(const Json& j, const std::string& where) {
    reject_unknown(j, {"from", "to", "step"}, where + ".");
    return {field<double>(j, "from", where + "."), field<double>(j, "to", where + "."), field<double>(j, "step", where + ".")};
}

Json setting_to_json(const Setting& s) {
    return {{"machine", to_string(s.machine)}, {"delta", delta_to_json(s.delta)}, {"gamma", s.gamma}};
}

Setting setting_from_json(const Json& j, const std::string& where) {
    reject_unknown(j, {"machine", "delta", "gamma"}, where);
    Setting s;
    try {
        s.machine = machine_from_string(field<std::string>(j, "machine", where));
    } catch (const std::invalid_argument& e) {
        if (dynamic_cast<const ConfigError*>(&e)) throw;
        throw ConfigError(where + "machine", e.what());
    }
    if (j.contains("delta")) {
        try {
            s.delta = delta_from_json(j.at("delta"));
        } catch (const ConfigError& e) {
            throw ConfigError(where + "delta", e.what());
        }
    }
    if (j.contains("gamma")) s.gamma = field<double>(j, "gamma", where);
    return s;
}

}  // namespace

std::string Setting::name() const {
    if (machine == Machine::Classical) return "classical";
    std::string n = "quantum_" + delta.name();
    if (gamma != 0.0) n += "_g" + format_double(gamma);
    return n;
}

DEConfig Setting::apply(DEConfig base) const {
    base.machine = machine;
    base.delta = delta;
    base.gamma = machine == Machine::Classical ? 0.0 : gamma;
    return base;
}

std::vector<Setting> ExperimentConfig::default_settings() {
    return {{Machine::Classical, DeltaPolicy::zero(), 0.0},
            {Machine::Quantum, DeltaPolicy::zero(), 0.0},
            {Machine::Quantum, DeltaPolicy::half_pi(), 0.0},
            {Machine::Quantum, DeltaPolicy::target_independent(), 0.0}};
}

void ExperimentConfig::validate() const {
    if (trials && *trials == 0) throw ConfigError("trials", "must be >= 1");
    if (out.empty()) throw ConfigError("out", "output directory must be non-empty");
    if (bootstrap_resamples < 1) throw ConfigError("bootstrap_resamples", "must be >= 1");
    try {
        learner.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("learner." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
    }
    if (settings.empty()) throw ConfigError("learn.settings", "at least one setting is required");
    for (std::size_t k = 0; k < settings.size(); ++k) {
        const double g = settings[k].gamma;
        if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("learn.settings[" + std::to_string(k) + "].gamma", "must lie in [0, 1]");
    }
    if (gammas.empty()) throw ConfigError("decohere.gammas", "at least one decay rate is required");
    for (double g : gammas) {
        if (!(g >= 0.0 && g <= 1.0)) {
            throw ConfigError("decohere.gammas", "decay rate " + format_double(g) + " outside [0, 1]");
        }
    }
    try {
        (void)w_grid.values();
    } catch (const ConfigError&) {
        throw ConfigError("sweep.w", "needs from <= to and step > 0");
    }
    try {
        (void)cr_grid.values();
    } catch (const ConfigError&) {
        throw ConfigError("sweep.cr", "needs from <= to and step > 0");
    }
    if (w_grid.from < 0.0) throw ConfigError("sweep.w", "differential weights must be non-negative");
    if (cr_grid.from < 0.0 || cr_grid.to > 1.0) throw ConfigError("sweep.cr", "crossover rates must lie in [0, 1]");
    if (n_bits < 1 || n_bits > 16) throw ConfigError("nbit.n_bits", "must lie in [1, 16]");
    if (!targets && n_bits > 3) throw ConfigError("nbit.targets", "enumerating all functions is limited to n_bits <= 3");
    if (targets) {
        try {
            NBitTrainingSet(n_bits, *targets);
        } catch (const ConfigError& e) {
            throw ConfigError("nbit.targets", std::string(e.what()).substr(e.field().size() + 2));
        }
    }
}

Json to_json(const ExperimentConfig& c) {
    Json settings = Json::array();
    for (const auto& s : c.settings) settings.push_back(setting_to_json(s));
    Json nbit{{"n_bits", c.n_bits}, {"targets", "all"}, {"tolerance", to_string(c.tolerance)}, {"delta", delta_to_json(c.nbit_delta)}};
    if (c.targets) {
        Json t = Json::object();
        for (std::size_t x = 0; x < c.targets->size(); ++x) t[bitstring(x, c.n_bits)] = (*c.targets)[x];
        nbit["targets"] = t;
    }
    Json j{{"seed", c.seed},
           {"trials", nullptr},
           {"workers", c.workers},
           {"out", c.out},
           {"task", task_to_json(c.task)},
           {"learner", learner_to_json(c.learner)},
           {"bootstrap_resamples", c.bootstrap_resamples},
           {"learn", {{"settings", settings}, {"tune", c.tune}}},
           {"decohere", {{"gammas", c.gammas}}},
           {"sweep", {{"w", grid_to_json(c.w_grid)}, {"cr", grid_to_json(c.cr_grid)}, {"max_fails", c.max_fails}}},
           {"nbit", nbit}};
    if (c.trials) j["trials"] = *c.trials;
    return j;
}

ExperimentConfig config_from_json(const Json& j) {
    reject_unknown(j, {"seed", "trials", "workers", "out", "task", "learner", "bootstrap_resamples", "learn", "decohere",
                       "sweep", "nbit"},
                   "");
    ExperimentConfig c;
    if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed", "");
    if (j.contains("trials") && !j.at("trials").is_null()) {
        const auto t = field<long long>(j, "trials", "");
        if (t < 1) throw ConfigError("trials", "must be >= 1");
        c.trials = static_cast<std::size_t>(t);
    }
    if (j.contains("workers")) c.workers = field<unsigned>(j, "workers", "");
    if (j.contains("out")) c.out = field<std::string>(j, "out", "");
    if (j.contains("task")) c.task = task_from_json(j.at("task"));
    if (j.contains("learner")) c.learner = learner_from_json(j.at("learner"), c.learner);
    if (j.contains("bootstrap_resamples")) c.bootstrap_resamples = field<std::size_t>(j, "bootstrap_resamples", "");
    if (j.contains("learn")) {
        const Json& jl = j.at("learn");
        reject_unknown(jl, {"settings", "tune"}, "learn.");
        if (jl.contains("settings")) {
            c.settings.clear();
            const Json& arr = jl.at("settings");
            if (!arr.is_array()) throw ConfigError("learn.settings", "expected an array");
            for (std::size_t k = 0; k < arr.size(); ++k) {
                c.settings.push_back(setting_from_json(arr[k], "learn.settings[" + std::to_string(k) + "]."));
            }
        }
        if (jl.contains("tune")) c.tune = field<bool>(jl, "tune", "learn.");
    }
    if (j.contains("decohere")) {
        const Json& jd = j.at("decohere");
        reject_unknown(jd, {"gammas"}, "decohere.");
        if (jd.contains("gammas")) c.gammas = field<std::vector<double>>(jd, "gammas", "decohere.");
    }
    if (j.contains("sweep")) {
        const Json& js = j.at("sweep");
        reject_unknown(js, {"w", "cr", "max_fails"}, "sweep.");
        if (js.contains("w")) c.w_grid = grid_from_json(js.at("w"), "sweep.w");
        if (js.contains("cr")) c.cr_grid = grid_from_json(js.at("cr"), "sweep.cr");
        if (js.contains("max_fails")) c.max_fails = field<std::size_t>(js, "max_fails", "sweep.");
    }
    if (j.contains("nbit")) {
        const Json& jn = j.at("nbit");
        reject_unknown(jn, {"n_bits", "targets", "tolerance", "delta"}, "nbit.");
        if (jn.contains("n_bits")) c.n_bits = field<int>(jn, "n_bits", "nbit.");
        if (jn.contains("targets")) {
            const Json& jt = jn.at("targets");
            if (jt.is_string()) {
                if (jt.get<std::string>() != "all") throw ConfigError("nbit.targets", "expected \"all\" or a truth table");
                c.targets.reset();
            } else {
                if (c.n_bits < 1 || c.n_bits > 16) throw ConfigError("nbit.n_bits", "must lie in [1, 16]");
                std::vector<int> t(std::size_t{1} << c.n_bits, -1);
                if (!jt.is_object()) throw ConfigError("nbit.targets", "expected \"all\" or an object of bitstring: bit");
                for (const auto& [key, value] : jt.items()) {
                    if (static_cast<int>(key.size()) != c.n_bits) throw ConfigError("nbit.targets." + key, "bitstring width does not match n_bits");
                    std::size_t x = 0;
                    try {
                        x = parse_bitstring(key);
                    } catch (const std::invalid_argument& e) {
                        throw ConfigError("nbit.targets." + key, e.what());
                    }
                    t[x] = value.get<int>();
                }
                for (std::size_t x = 0; x < t.size(); ++x) {
                    if (t[x] < 0) throw ConfigError("nbit.targets", "incomplete truth table: missing input " + bitstring(x, c.n_bits));
                }
                c.targets = t;
            }
        }
        if (jn.contains("tolerance")) {
            try {
                c.tolerance = tolerance_target_from_string(field<std::string>(jn, "tolerance", "nbit."));
            } catch (const std::invalid_argument& e) {
                if (dynamic_cast<const ConfigError*>(&e)) throw;
                throw ConfigError("nbit.tolerance", e.what());
            }
        }
        if (jn.contains("delta")) c.nbit_delta = delta_from_json(jn.at("delta"));
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

}  // namespace usfc::cli
