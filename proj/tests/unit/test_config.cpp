#include "commands.hpp"
#include "experiment_config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace usfc;
using namespace usfc::cli;

namespace {

std::string field_of(const Json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    const ExperimentConfig c;
    EXPECT_EQ(config_from_json(to_json(c)), c);
}

TEST(Config, CustomRoundTrip) {
    ExperimentConfig c;
    c.seed = 123456789012345ULL;
    c.trials = 42;
    c.workers = 3;
    c.out = "somewhere/else";
    c.task = TaskSpec(1, {{0.3, 0.7}, {0.9, 0.1}});
    c.learner.m = 7;
    c.learner.boundary = BoundaryRule::Clamp;
    c.learner.shots = ShotSettings{5000, DephasingMode::PhaseFlip, IncumbentPolicy::Cache};
    c.settings = {{Machine::Quantum, DeltaPolicy::fixed(0.3), 0.25}, {Machine::Classical, DeltaPolicy::zero(), 0.0}};
    c.tune = true;
    c.gammas = {0.0, 1.0};
    c.w_grid = {0.1, 0.3, 0.1};
    c.n_bits = 2;
    c.targets = std::vector<int>{0, 1, 1, 0};
    c.tolerance = ToleranceTarget::Block;
    c.nbit_delta = DeltaPolicy::parse("pi");
    const Json j = to_json(c);
    EXPECT_EQ(config_from_json(j), c);
    EXPECT_EQ(to_json(config_from_json(j)).dump(), j.dump());
}

TEST(Config, PartialFileKeepsDefaults) {
    const auto c = config_from_json(Json::parse(R"({"seed": 9, "learner": {"m": 12}, "task": "T3"})"));
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.learner.m, 12);
    EXPECT_EQ(c.learner.w, 0.7);
    EXPECT_EQ(c.task, canonical_task(TaskId::T3));
}

TEST(Config, ErrorsNameTheField) {
    EXPECT_EQ(field_of(Json::parse(R"({"learner": {"m": 2}})")), "learner.m");
    EXPECT_EQ(field_of(Json::parse(R"({"learner": {"cr": 2}})")), "learner.cr");
    EXPECT_EQ(field_of(Json::parse(R"({"decohere": {"gammas": [0, 1.5]}})")), "decohere.gammas");
    EXPECT_EQ(field_of(Json::parse(R"({"nbit": {"targets": {"00": 1, "01": 0}}})")), "nbit.targets");
    EXPECT_EQ(field_of(Json::parse(R"({"colour": "blue"})")), "colour");
    EXPECT_EQ(field_of(Json::parse(R"({"learn": {"settings": [{"machine": "analog"}]}})")), "learn.settings[0].machine");
    EXPECT_EQ(field_of(Json::parse(R"({"sweep": {"cr": {"from": 0, "to": 2, "step": 0.5}}})")), "sweep.cr");
    EXPECT_EQ(field_of(Json::parse(R"({"trials": 0})")), "trials");
}

TEST(Config, SettingNames) {
    EXPECT_EQ((Setting{Machine::Classical, DeltaPolicy::zero(), 0.0}).name(), "classical");
    EXPECT_EQ((Setting{Machine::Quantum, DeltaPolicy::half_pi(), 0.0}).name(), "quantum_half_pi");
    EXPECT_EQ((Setting{Machine::Quantum, DeltaPolicy::target_independent(), 0.5}).name(), "quantum_ti_g0.5");
}

TEST(Serialization, RecordRoundTrip) {
    DEConfig c;
    const auto rec = run_trial(c, canonical_task(TaskId::T1), 3);
    EXPECT_EQ(record_from_json(record_to_json(rec)), rec);
    const std::string line = records_to_jsonl({rec, rec});
    EXPECT_EQ(std::count(line.begin(), line.end(), '\n'), 2);
}

TEST(Serialization, BankRoundTrip) {
    MemoryBank bank(3);
    for (std::size_t j = 0; j < bank.size(); ++j) {
        bank.block(j).pref = PreferenceVector(0.1 * j, 0.9 - 0.1 * j);
        bank.block(j).trained = true;
    }
    const Json j = bank_to_json(bank);
    EXPECT_TRUE(j["blocks"].contains("10"));
    EXPECT_EQ(j["block_predecessor"], "j-1");
    const auto back = bank_from_json(j);
    for (std::size_t k = 0; k < bank.size(); ++k) EXPECT_EQ(back.block(k).pref, bank.block(k).pref);
    EXPECT_TRUE(bank_to_json(MemoryBank(1))["blocks"].contains(""));
}

TEST(Serialization, FormatDouble) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(3.0), "3");
}

TEST(Commands, IdentityCheck) {
    const auto r = check_identity(10000, 1);
    EXPECT_TRUE(r.pass());
    EXPECT_LT(r.max_residual, 1e-10);
    EXPECT_EQ(r.max_endpoint_lambda, 0.0);
}

TEST(Commands, LearnIsByteReproducible) {
    const auto base = std::filesystem::temp_directory_path() / "usfc_unit_learn";
    std::filesystem::remove_all(base);
    ExperimentConfig c;
    c.trials = 15;
    c.bootstrap_resamples = 50;
    std::ostringstream log;
    for (const char* run : {"a", "b"}) {
        c.out = (base / run).string();
        ASSERT_EQ(cmd_learn(c, log), 0);
    }
    c.workers = 1;
    c.out = (base / "c").string();
    ASSERT_EQ(cmd_learn(c, log), 0);
    for (const auto& entry : std::filesystem::directory_iterator(base / "a")) {
        const auto name = entry.path().filename();
        if (name == "summary.json") continue;
        EXPECT_EQ(slurp(entry.path()), slurp(base / "b" / name)) << name;
        EXPECT_EQ(slurp(entry.path()), slurp(base / "c" / name)) << name;
    }
    auto sa = Json::parse(slurp(base / "a" / "summary.json"));
    auto sb = Json::parse(slurp(base / "b" / "summary.json"));
    for (auto* s : {&sa, &sb}) {
        (*s)["metadata"].erase("generated_at");
        (*s)["metadata"]["config"].erase("out");
    }
    EXPECT_EQ(sa, sb);
    const std::string curve = slurp(base / "a" / "curve_classical.csv");
    EXPECT_EQ(curve.rfind("n,P_n,rho_n\n", 0), 0u);
    EXPECT_EQ(curve.find('\r'), std::string::npos);
    std::filesystem::remove_all(base);
}

TEST(Commands, DecohereGammaZeroMatchesLearn) {
    const auto base = std::filesystem::temp_directory_path() / "usfc_unit_dec";
    std::filesystem::remove_all(base);
    ExperimentConfig c;
    c.trials = 12;
    c.bootstrap_resamples = 20;
    c.gammas = {0.0};
    c.settings = {{Machine::Quantum, DeltaPolicy::zero(), 0.0}};
    std::ostringstream log;
    c.out = (base / "learn").string();
    ASSERT_EQ(cmd_learn(c, log), 0);
    c.out = (base / "dec").string();
    ASSERT_EQ(cmd_decohere(c, log), 0);
    EXPECT_EQ(slurp(base / "learn" / "records_quantum_zero.jsonl"), slurp(base / "dec" / "records_quantum_zero_g0.jsonl"));
    std::filesystem::remove_all(base);
}

TEST(Commands, NbitSingleFunction) {
    const auto base = std::filesystem::temp_directory_path() / "usfc_unit_nbit";
    std::filesystem::remove_all(base);
    ExperimentConfig c;
    c.trials = 4;
    c.targets = std::vector<int>{0, 0, 0, 1};
    c.out = base.string();
    std::ostringstream log;
    ASSERT_EQ(cmd_nbit(c, log), 0);
    const auto bank = bank_from_json(Json::parse(slurp(base / "bank_quantum_0001.json")));
    EXPECT_TRUE(bank.complete());
    EXPECT_GE(circuit_fidelity(bank, NBitTrainingSet(2, {0, 0, 0, 1}), Machine::Quantum, 0.0), 0.99);
    std::filesystem::remove_all(base);
}
