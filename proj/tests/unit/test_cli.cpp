#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "levyou/cli.hpp"

using namespace levyou;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("levyou_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write_config(const std::string& body) {
        const fs::path p = dir_ / "config.json";
        std::ofstream(p) << body;
        return p;
    }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "levyou_cli");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, CheckHeatStableConverges) {
    const auto out = dir_ / "o";
    EXPECT_EQ(run({"check", "--out", out.string()}), 0) << err_.str();
    const auto report = json::parse(slurp(out / "check.json"));
    EXPECT_EQ(report["ou"]["verdict"]["verdict"], "Converged");
    EXPECT_EQ(report["cylindrical"]["verdict"]["verdict"], "Diverged");
    EXPECT_TRUE(report["sufficient"]["applies"].get<bool>());
    const std::string csv = slurp(out / "ou.csv");
    EXPECT_EQ(csv.rfind("# seed=", 0), 0u);
    EXPECT_NE(csv.find("\nn,term,partial_sum\n1,2.7622038750278"), std::string::npos);
    const auto manifest = json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["config"]["n_max"], 4096);
    EXPECT_EQ(manifest["config_hash"], config_hash(manifest["config"]));
}

TEST_F(CliTest, CheckDivergingBetaExitsThree) {
    const auto cfg = write_config(R"({"beta": {"type": "power", "p": -1.3333333333333333}, "n_max": 128})");
    EXPECT_EQ(run({"check", "--config", cfg.string(), "--out", (dir_ / "o").string()}), 3);
}

TEST_F(CliTest, CheckInconclusiveExitsFour) {
    // growing beta: summable terms, tail bound above tol at n_max, sufficient condition fails
    const auto cfg = write_config(R"({"beta": {"type": "power", "p": -0.25}, "n_max": 64})");
    EXPECT_EQ(run({"check", "--config", cfg.string(), "--out", (dir_ / "o").string()}), 4) << out_.str();
}

TEST_F(CliTest, MalformedMeasureExitsTwo) {
    const auto cfg = write_config(R"({"measure": {"type": "stable", "alpha": 2.5}})");
    EXPECT_EQ(run({"check", "--config", cfg.string(), "--out", (dir_ / "o").string()}), 2);
    const auto err = json::parse(err_.str());
    EXPECT_EQ(err["error"], "config");
    EXPECT_NE(err["message"].get<std::string>().find("alpha"), std::string::npos);

    const auto cfg2 = write_config(R"({"measure": {"type": "levy"}})");
    EXPECT_EQ(run({"check", "--config", cfg2.string()}), 2);
    const auto cfg3 = write_config(R"({"unknown_key": 1})");
    EXPECT_EQ(run({"check", "--config", cfg3.string()}), 2);
    const auto cfg4 = write_config("{ not json");
    EXPECT_EQ(run({"check", "--config", cfg4.string()}), 2);
    EXPECT_EQ(run({"check", "--config", (dir_ / "missing.json").string()}), 2);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}), 2);
    EXPECT_EQ(run({"fly"}), 2);
    EXPECT_EQ(run({"check", "--threads", "many"}), 2);
}

TEST_F(CliTest, SimulateValidatesTrajectoryCount) {
    const auto zero = write_config(R"({"m": 0})");
    EXPECT_EQ(run({"simulate", "--config", zero.string(), "--out", (dir_ / "o").string()}), 2);
    const auto few = write_config(R"({"m": 50})");
    EXPECT_EQ(run({"simulate", "--config", few.string(), "--out", (dir_ / "o").string()}), 2);
}

TEST_F(CliTest, SimulateWritesLongFormatCsv) {
    const auto cfg = write_config(R"({"m": 100, "n_modes": 8})");
    const auto out = dir_ / "o";
    ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--seed", "99", "--out", out.string()}), 0) << err_.str();
    std::istringstream csv(slurp(out / "simulate.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line.rfind("# seed=99 config_hash=", 0), 0u);
    std::getline(csv, line);
    EXPECT_EQ(line, "quantity,n_or_N,time,value");
    std::getline(csv, line);
    EXPECT_EQ(line.rfind("h_norm_q25,2,1,", 0), 0u);
    EXPECT_EQ(json::parse(slurp(out / "manifest.json"))["seed"], 99);
}

TEST_F(CliTest, IrreducibilityNeedsBall) {
    EXPECT_EQ(run({"irreducibility", "--out", (dir_ / "o").string()}), 2);
}

TEST_F(CliTest, IrreducibilityCompoundPoissonFlagged) {
    const auto cfg = write_config(R"({"measure": {"type": "cp", "atoms": [[1.0, 1.0]]}, "n_modes": 4, "n_coords": 4, "m": 200,
                                      "ball": {"center": [0.5], "radius": 1.0}})");
    const auto out = dir_ / "o";
    ASSERT_EQ(run({"irreducibility", "--config", cfg.string(), "--out", out.string()}), 0) << err_.str();
    const auto manifest = json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["label"], "theorem not applicable; estimate only");
    EXPECT_FALSE(manifest["theorem_applies"].get<bool>());
}

TEST_F(CliTest, HeatTwoDimensionalBoundaryZeros) {
    const auto cfg = write_config(R"({"spectrum": {"type": "laplacian", "d": 2}, "n_modes": 12, "m": 20, "grid": 7,
                                      "times": [0, 0.5], "n_max": 256})");
    const auto out = dir_ / "o";
    ASSERT_EQ(run({"heat", "--config", cfg.string(), "--out", out.string()}), 0) << err_.str();
    std::istringstream csv(slurp(out / "snapshot_1.csv"));
    std::string line;
    std::getline(csv, line);
    std::getline(csv, line);
    EXPECT_EQ(line, "xi1,xi2,u");
    std::size_t rows = 0, boundary = 0;
    while (std::getline(csv, line)) {
        ++rows;
        double x1, x2, u;
        char c1, c2;
        std::istringstream row(line);
        row >> x1 >> c1 >> x2 >> c2 >> u;
        if (x1 == 0.0 || x2 == 0.0 || x1 == kPi || x2 == kPi) {
            ++boundary;
            EXPECT_EQ(u, 0.0) << line;
        }
    }
    EXPECT_EQ(rows, 49u);
    EXPECT_EQ(boundary, 24u);
    EXPECT_TRUE(fs::exists(out / "heat.csv"));
    // sum of 1 / (n1^2 + n2^2) over the lattice diverges, so constant beta fails in two dimensions
    EXPECT_EQ(json::parse(slurp(out / "manifest.json"))["ou_criterion"]["verdict"]["verdict"], "Diverged");
}

TEST_F(CliTest, HeatRequiresLaplacian) {
    const auto cfg = write_config(R"({"spectrum": {"type": "power", "p": 2}})");
    EXPECT_EQ(run({"heat", "--config", cfg.string(), "--out", (dir_ / "o").string()}), 2);
}

TEST_F(CliTest, RerunIsByteIdenticalAcrossThreads) {
    const auto cfg = write_config(R"({"m": 300, "n_modes": 16, "n_coords": 3, "times": [0.5, 1.0]})");
    ASSERT_EQ(run({"invariant", "--config", cfg.string(), "--threads", "1", "--out", (dir_ / "a").string()}), 0);
    ASSERT_EQ(run({"invariant", "--config", cfg.string(), "--threads", "3", "--out", (dir_ / "b").string()}), 0);
    EXPECT_EQ(slurp(dir_ / "a" / "invariant.csv"), slurp(dir_ / "b" / "invariant.csv"));
}

TEST(Config, DefaultsResolveAndHashIsStable) {
    const auto a = parse_config(json::object());
    const auto b = parse_config(json{{"seed", 20240601}});
    EXPECT_EQ(config_hash(a.resolved), config_hash(b.resolved));
    EXPECT_EQ(a.n_grid, (std::vector<std::size_t>{16, 32, 64}));
    const auto c = parse_config(json{{"seed", 1}});
    EXPECT_NE(config_hash(a.resolved), config_hash(c.resolved));
    EXPECT_EQ(config_hash(a.resolved).size(), 16u);
}

TEST(Config, RejectsInvalidValues) {
    EXPECT_THROW(parse_config(json{{"tol", -1.0}}), ConfigError);
    EXPECT_THROW(parse_config(json{{"times", {1.0, 0.5}}}), ConfigError);
    EXPECT_THROW(parse_config(json{{"n_max", 8}}), ConfigError);
    EXPECT_THROW(parse_config(json{{"seed", -3}}), ConfigError);
    EXPECT_THROW(parse_config(json{{"spectrum", {{"type", "laplacian"}, {"d", 0}}}}), ConfigError);
    EXPECT_THROW(parse_config(json{{"spectrum", {{"type", "explicit"}, {"values", {1.0, -1.0}}}}}), ConfigError);
    EXPECT_THROW(parse_config(json{{"ball", {{"center", {1.0}}, {"radius", 0.0}}}}), ConfigError);
    EXPECT_THROW(parse_config(json{{"measure", {{"type", "cp"}, {"atoms", {{1.0}}}}}}), ConfigError);
    EXPECT_THROW(parse_config(json{{"beta", {{"type", "explicit"}, {"values", {1.0, 0.5}}}}}), ConfigError);
}

TEST(Config, ShippedConfigsParse) {
    std::size_t n = 0;
    for (const auto& entry : fs::directory_iterator(LEVYOU_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        ++n;
        EXPECT_NO_THROW(parse_config(load_json_file(entry.path().string()))) << entry.path();
    }
    EXPECT_GE(n, 5u);
}
