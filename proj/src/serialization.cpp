#include "usfc/serialization.hpp"

#include <cstdio>
#include <set>

namespace usfc {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(where + key, "unknown key");
    }
}

template <typename T>
T get_field(const Json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + key, e.what());
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json task_to_json(const TaskSpec& task) {
    Json rows = Json::object();
    for (std::size_t x = 0; x < task.size(); ++x) rows[bitstring(x, task.n_bits())] = {task.row(x)[0], task.row(x)[1]};
    return {{"n_bits", task.n_bits()}, {"rows", rows}};
}

TaskSpec task_from_json(const Json& j) {
    if (j.is_string()) return canonical_task(task_id_from_string(j.get<std::string>()));
    reject_unknown(j, {"n_bits", "rows"}, "task.");
    const int n = get_field<int>(j, "n_bits", "task.");
    if (n < 1 || n > 20) throw ConfigError("task.n_bits", "must lie in [1, 20]");
    ConditionalTable rows(std::size_t{1} << n, {-1.0, -1.0});
    const Json& jr = j.at("rows");
    if (jr.size() != rows.size()) {
        throw ConfigError("task.rows", "expected " + std::to_string(rows.size()) + " rows, got " + std::to_string(jr.size()));
    }
    for (const auto& [key, value] : jr.items()) {
        if (static_cast<int>(key.size()) != n) throw ConfigError("task.rows." + key, "bitstring width does not match n_bits");
        std::size_t x = 0;
        try {
            x = parse_bitstring(key);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("task.rows." + key, e.what());
        }
        if (!value.is_array() || value.size() != 2) throw ConfigError("task.rows." + key, "expected [Pr(y=0), Pr(y=1)]");
        rows[x] = {value[0].get<double>(), value[1].get<double>()};
    }
    try {
        return TaskSpec(n, std::move(rows));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("task.rows", e.what());
    }
}

Json bank_to_json(const MemoryBank& bank) {
    Json blocks = Json::object();
    for (std::size_t j = 0; j < bank.size(); ++j) {
        const auto& b = bank.block(j);
        const std::string key = bank.n_bits() > 1 ? bitstring(j, bank.n_bits() - 1) : std::string();
        blocks[key] = {{"p0", b.pref.p0()},
                       {"p1", b.pref.p1()},
                       {"delta", b.delta.phases().delta(b.pref)},
                       {"delta_policy", b.delta.name()},
                       {"trained", b.trained}};
    }
    return {{"n_bits", bank.n_bits()}, {"block_predecessor", "j-1"}, {"blocks", blocks}};
}

MemoryBank bank_from_json(const Json& j) {
    const int n = get_field<int>(j, "n_bits", "bank.");
    MemoryBank bank(n);
    const Json& blocks = j.at("blocks");
    if (blocks.size() != bank.size()) throw ConfigError("bank.blocks", "wrong number of blocks");
    for (const auto& [key, value] : blocks.items()) {
        const std::size_t idx = key.empty() ? 0 : parse_bitstring(key);
        if (idx >= bank.size()) throw ConfigError("bank.blocks." + key, "index out of range");
        auto& b = bank.block(idx);
        b.pref = PreferenceVector(value.at("p0").get<double>(), value.at("p1").get<double>());
        b.delta = value.contains("delta_policy") ? DeltaPolicy::parse(value.at("delta_policy").get<std::string>())
                                                 : DeltaPolicy::fixed(value.at("delta").get<double>());
        b.trained = value.value("trained", true);
    }
    return bank;
}

Json record_to_json(const TrialRecord& rec) {
    Json j{{"seed", rec.seed},
           {"iterations_run", rec.iterations_run},
           {"converged", rec.converged},
           {"completion_iteration", nullptr},
           {"best_p0", rec.best_pref.p0()},
           {"best_p1", rec.best_pref.p1()},
           {"best_f_per_iteration", rec.best_f_per_iteration}};
    if (rec.completion_iteration) j["completion_iteration"] = *rec.completion_iteration;
    return j;
}

TrialRecord record_from_json(const Json& j) {
    TrialRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.iterations_run = j.at("iterations_run").get<int>();
    r.converged = j.at("converged").get<bool>();
    if (!j.at("completion_iteration").is_null()) r.completion_iteration = j.at("completion_iteration").get<int>();
    r.best_pref = PreferenceVector(j.at("best_p0").get<double>(), j.at("best_p1").get<double>());
    r.best_f_per_iteration = j.at("best_f_per_iteration").get<std::vector<double>>();
    return r;
}

std::string records_to_jsonl(const std::vector<TrialRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

Json delta_to_json(const DeltaPolicy& delta) {
    if (delta.kind() == DeltaPolicy::Kind::Fixed && delta.name() != "pi") return delta.angle();
    return delta.name();
}

DeltaPolicy delta_from_json(const Json& j) {
    if (j.is_number()) return DeltaPolicy::fixed(j.get<double>());
    if (!j.is_string()) throw ConfigError("delta", "expected a policy name or an angle in radians");
    try {
        return DeltaPolicy::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("delta", e.what());
    }
}

namespace {

std::string dephasing_name(DephasingMode m) { return m == DephasingMode::DensityMatrix ? "density" : "phase_flip"; }

DephasingMode dephasing_from_name(const std::string& s) {
    if (s == "density") return DephasingMode::DensityMatrix;
    if (s == "phase_flip") return DephasingMode::PhaseFlip;
    throw ConfigError("learner.shots.dephasing", "expected density|phase_flip, got '" + s + "'");
}

}  // namespace

Json learner_to_json(const DEConfig& c) {
    Json j{{"m", c.m},
           {"w", c.w},
           {"cr", c.cr},
           {"epsilon_t", c.epsilon_t},
           {"max_iterations", c.max_iterations},
           {"boundary", to_string(c.boundary)},
           {"fitness", c.shots ? "shots" : "exact"}};
    if (c.shots) {
        j["shots"] = {{"l_total", c.shots->l_total},
                      {"dephasing", dephasing_name(c.shots->dephasing)},
                      {"incumbent", c.shots->incumbent == IncumbentPolicy::Reevaluate ? "reevaluate" : "cache"}};
    }
    return j;
}

DEConfig learner_from_json(const Json& j, DEConfig c) {
    const std::string where = "learner.";
    reject_unknown(j, {"m", "w", "cr", "epsilon_t", "max_iterations", "boundary", "fitness", "shots"}, where);
    if (j.contains("m")) c.m = get_field<int>(j, "m", where);
    if (j.contains("w")) c.w = get_field<double>(j, "w", where);
    if (j.contains("cr")) c.cr = get_field<double>(j, "cr", where);
    if (j.contains("epsilon_t")) c.epsilon_t = get_field<double>(j, "epsilon_t", where);
    if (j.contains("max_iterations")) c.max_iterations = get_field<int>(j, "max_iterations", where);
    if (j.contains("boundary")) {
        try {
            c.boundary = boundary_rule_from_string(get_field<std::string>(j, "boundary", where));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + "boundary", e.what());
        }
    }
    const std::string fitness = j.contains("fitness") ? get_field<std::string>(j, "fitness", where) : (c.shots ? "shots" : "exact");
    if (fitness == "exact") {
        c.shots.reset();
    } else if (fitness == "shots") {
        ShotSettings s = c.shots.value_or(ShotSettings{});
        if (j.contains("shots")) {
            const Json& js = j.at("shots");
            reject_unknown(js, {"l_total", "dephasing", "incumbent"}, where + "shots.");
            if (js.contains("l_total")) s.l_total = get_field<std::uint64_t>(js, "l_total", where + "shots.");
            if (js.contains("dephasing")) s.dephasing = dephasing_from_name(js.at("dephasing").get<std::string>());
            if (js.contains("incumbent")) {
                const auto v = js.at("incumbent").get<std::string>();
                if (v != "reevaluate" && v != "cache") throw ConfigError(where + "shots.incumbent", "expected reevaluate|cache");
                s.incumbent = v == "cache" ? IncumbentPolicy::Cache : IncumbentPolicy::Reevaluate;
            }
        }
        c.shots = s;
    } else {
        throw ConfigError(where + "fitness", "expected exact|shots, got '" + fitness + "'");
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.field(), std::string(e.what()).substr(e.field().size() + 2));
    }
    return c;
}

}  // namespace usfc
