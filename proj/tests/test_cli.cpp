#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "antigone/cli.hpp"
#include "antigone/error.hpp"
#include "antigone/jtt.hpp"

namespace fs = std::filesystem;
using antigone::cli::run;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json small_config() {
    return json::parse(R"({
      "seed": 3,
      "dataset": {"synthetic": {"spurious": {"per_class": 200, "minority_fraction": 0.2}}},
      "split": {"fractions": [0.5, 0.25, 0.25]},
      "antigone": {"grid": {"learning_rate": [0.1, 0.01], "epochs": 3, "batch_size": 32}},
      "jtt": {"early_stop": [1], "lambda": [5], "bins": [[0.5, 0.8], [0.8, 1.0]]},
      "mc_noise": {"majority_mean": [1, 0], "minority_mean": [0, 1], "variance": 1, "rows_per_group": 500,
                   "grid": {"step": 0.5, "max": 0.5}, "n_samples": 300,
                   "classifier": {"weights": [1, -1], "bias": 0}}
    })");
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("antigone_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write_config(const json& j, const std::string& name = "config.json") {
        const auto p = dir_ / name;
        std::ofstream(p) << j.dump(2);
        return p;
    }

    int call(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }

    int stage(const std::string& cmd, const fs::path& cfg, const fs::path& out, std::vector<std::string> extra = {}) {
        std::vector<std::string> args = {cmd, "--config", cfg.string(), "--out", out.string()};
        args.insert(args.end(), extra.begin(), extra.end());
        return call(args);
    }

    int pipeline(const fs::path& cfg, const fs::path& out) {
        for (const char* cmd : {"prepare", "train-grid", "label", "tune", "mc-sweep"}) {
            const int rc = stage(cmd, cfg, out);
            if (rc != 0) return rc;
        }
        return 0;
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

const std::vector<std::string> kArtifacts = {
    antigone::cli::paths::train,          antigone::cli::paths::validation,
    antigone::cli::paths::test,           antigone::cli::paths::standardizer,
    antigone::cli::paths::checkpoint_index, antigone::cli::paths::pseudo_csv,
    antigone::cli::paths::pseudo_sidecar, antigone::cli::paths::sweep,
    antigone::cli::paths::tuner_result};

}  // namespace

TEST_F(Cli, UnknownKeyIsConfigErrorNamingTheField) {
    auto j = small_config();
    j["jtt"]["lambdas"] = {5};
    EXPECT_EQ(stage("prepare", write_config(j), dir_ / "out"), 2);
    EXPECT_NE(err_.str().find("jtt.lambdas"), std::string::npos) << err_.str();
}

TEST_F(Cli, InvalidValuesAreConfigErrors) {
    auto j = small_config();
    j["split"]["fractions"] = {0.5, 0.5, 0.5};
    EXPECT_EQ(stage("prepare", write_config(j), dir_ / "out"), 2);
    EXPECT_NE(err_.str().find("split.fractions"), std::string::npos) << err_.str();

    j = small_config();
    j["antigone"]["grid"]["learning_rate"] = "fast";
    EXPECT_EQ(stage("prepare", write_config(j), dir_ / "out"), 2);
    EXPECT_NE(err_.str().find("learning_rate"), std::string::npos) << err_.str();

    std::ofstream(dir_ / "broken.json") << "{ \"seed\": ";
    EXPECT_EQ(stage("prepare", dir_ / "broken.json", dir_ / "out"), 2);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(call({"prepare"}), 2);
    EXPECT_EQ(call({"frobnicate"}), 2);
    EXPECT_EQ(call({"prepare", "--config", (dir_ / "missing.json").string()}), 2);
}

TEST_F(Cli, MissingUpstreamArtifact) {
    const auto cfg = write_config(small_config());
    EXPECT_EQ(stage("label", cfg, dir_ / "out"), 5);
    EXPECT_NE(err_.str().find("prepare"), std::string::npos) << err_.str();
    EXPECT_EQ(stage("prepare", cfg, dir_ / "out"), 0);
    EXPECT_EQ(stage("label", cfg, dir_ / "out"), 5);
    EXPECT_NE(err_.str().find("train-grid"), std::string::npos) << err_.str();
}

TEST_F(Cli, PipelineIsByteIdenticalAcrossRuns) {
    const auto cfg = write_config(small_config());
    ASSERT_EQ(pipeline(cfg, dir_ / "a"), 0) << err_.str();
    std::vector<std::string> first;
    for (const auto& f : kArtifacts) {
        ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
        first.push_back(slurp(dir_ / "a" / f));
    }
    // Rerun in place and into a fresh directory.
    ASSERT_EQ(pipeline(cfg, dir_ / "a"), 0) << err_.str();
    ASSERT_EQ(pipeline(cfg, dir_ / "b"), 0) << err_.str();
    for (std::size_t i = 0; i < kArtifacts.size(); ++i) {
        EXPECT_EQ(slurp(dir_ / "a" / kArtifacts[i]), first[i]) << kArtifacts[i];
        EXPECT_EQ(slurp(dir_ / "b" / kArtifacts[i]), first[i]) << kArtifacts[i];
    }
    for (const auto& entry : fs::recursive_directory_iterator(dir_ / "a")) {
        EXPECT_NE(entry.path().extension(), ".partial") << entry.path();
    }

    EXPECT_EQ(call({"report", (dir_ / "a" / antigone::cli::paths::tuner_result).string()}), 0) << err_.str();
    EXPECT_NE(out_.str().find("antigone_jtt"), std::string::npos) << out_.str();
    EXPECT_EQ(call({"report", "--format", "json", (dir_ / "a" / antigone::cli::paths::tuner_result).string()}), 0);
    EXPECT_NO_THROW(json::parse(out_.str()));
}

TEST_F(Cli, ExecutionModeDoesNotChangeOutputs) {
    const auto cfg = write_config(small_config());
    ASSERT_EQ(pipeline(cfg, dir_ / "par"), 0) << err_.str();
    for (const char* cmd : {"prepare", "train-grid", "label", "tune", "mc-sweep"}) {
        ASSERT_EQ(stage(cmd, cfg, dir_ / "ser", {"--serial"}), 0) << cmd << err_.str();
    }
    for (const auto& f : kArtifacts) EXPECT_EQ(slurp(dir_ / "par" / f), slurp(dir_ / "ser" / f)) << f;
}

TEST_F(Cli, RefusesToOverwriteOutputsOfAnotherConfig) {
    const auto cfg = write_config(small_config());
    ASSERT_EQ(stage("prepare", cfg, dir_ / "out"), 0);
    const auto before = slurp(dir_ / "out" / antigone::cli::paths::train);

    EXPECT_EQ(stage("prepare", cfg, dir_ / "out", {"--seed", "99"}), 2);
    EXPECT_NE(err_.str().find("--force"), std::string::npos) << err_.str();
    EXPECT_EQ(slurp(dir_ / "out" / antigone::cli::paths::train), before);

    // Downstream stages detect the stale upstream.
    EXPECT_EQ(stage("train-grid", cfg, dir_ / "out", {"--seed", "99"}), 5);

    EXPECT_EQ(stage("prepare", cfg, dir_ / "out", {"--seed", "99", "--force"}), 0);
    EXPECT_NE(slurp(dir_ / "out" / antigone::cli::paths::train), before);
    EXPECT_EQ(stage("train-grid", cfg, dir_ / "out"), 5);
}

TEST_F(Cli, OutputPathDoesNotEnterTheHash) {
    auto j = small_config();
    j["output"] = (dir_ / "x").string();
    const auto with_output = write_config(j, "with.json");
    const auto cfg = write_config(small_config(), "without.json");
    const auto a = antigone::cli::load_config(with_output, {});
    antigone::cli::Overrides o;
    o.output = dir_ / "y";
    const auto b = antigone::cli::load_config(cfg, o);
    EXPECT_EQ(a.hash(), b.hash());
    o.seed = 4;
    EXPECT_NE(antigone::cli::load_config(cfg, o).hash(), b.hash());
    EXPECT_THROW(antigone::cli::load_config(cfg, {}), antigone::ConfigError);
}

TEST_F(Cli, ReportOnHandcraftedResult) {
    antigone::TunerResult r;
    r.bins = {{0.8, 0.9}};
    antigone::MethodResult m;
    m.method = "antigone_jtt";
    antigone::Winner w;
    w.test.avg_accuracy = 0.845;
    w.test.wga = 0.5;
    w.stage2_hp.epochs = 1;
    m.bins = {w};
    r.methods = {m};
    const auto p = dir_ / "result.json";
    std::ofstream(p) << antigone::to_json(r).dump();
    EXPECT_EQ(call({"report", p.string()}), 0) << err_.str();
    EXPECT_NE(out_.str().find("(84.5, 50.0)"), std::string::npos) << out_.str();
    EXPECT_EQ(call({"report", (dir_ / "none.json").string()}), 5);
}
