#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "aperiod/commands.hpp"
#include "aperiod/config.hpp"
#include "aperiod/error.hpp"

namespace aperiod {
namespace {

namespace fs = std::filesystem;

const char* kSmallOu = R"(
[model]
spectrum = 1, 2
q = 1, 0.5
diffusion_base = 0.5, 0.5
drift_gain = 0.1

[grid]
dt = 0.05
burn_in = 6
eval_start = 0
eval_end = 2
eval_step = 0.5

[ensemble]
n_paths = 32
seed = 3

[solver]
tol = 1e-6
max_iter = 30

[scan]
tau_start = 0
tau_end = 2
tau_step = 0.5
epsilon = auto
l_max = 2

[distribution]
deltas = 0.1, 0.05
n_exact = 32

[ursell]
n_max = 3
n_paths = 64
n_omega = 200
)";

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                ("aperiod_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    int run(const std::string& command, const std::string& text, const std::string& dir, unsigned threads = 1) {
        CommandContext ctx{parse_config(text), root_ / dir, threads};
        std::ostringstream log;
        err_.str("");
        return run_command(command, ctx, log, err_);
    }

    fs::path root_;
    std::ostringstream err_;
};

std::string with(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return text.replace(pos, from.size(), to);
}

TEST(Config, DefaultsAndLists) {
    const RunConfig c = parse_config(kSmallOu);
    ASSERT_TRUE(c.model.has_value());
    EXPECT_EQ(c.model->spectrum, (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(c.grid.dt, 0.05);
    EXPECT_EQ(c.ensemble.n_paths, 32u);
    EXPECT_TRUE(c.scan.epsilons.empty());
    EXPECT_EQ(c.distribution.deltas, (std::vector<double>{0.1, 0.05}));
    EXPECT_EQ(c.ursell.n_max, 3u);
}

TEST(Config, ModesParse) {
    const RunConfig c = parse_config(with(kSmallOu, "drift_gain = 0.1",
                                          "drift_gain = 0.1\n"
                                          "drift_modes = 0.5, 0 | 1 | 0 ; 0, 0.25 | 1.5 | 0.3\n"
                                          "diffusion_modes = 0.2 | 2 | 0.1"));
    ASSERT_EQ(c.model->drift.modes.size(), 2u);
    EXPECT_EQ(c.model->drift.modes[1].amplitude, (std::vector<double>{0.0, 0.25}));
    EXPECT_EQ(c.model->drift.modes[1].frequency, 1.5);
    EXPECT_EQ(c.model->drift.modes[1].phase, 0.3);
    ASSERT_EQ(c.model->diffusion.modes.size(), 1u);
    EXPECT_EQ(c.model->diffusion.modes[0].amplitude, 0.2);
    EXPECT_FALSE(c.model->autonomous());
}

void expect_error(const std::string& text, const std::string& fragment) {
    try {
        parse_config(text);
        ADD_FAILURE() << "accepted: " << fragment;
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

TEST(Config, ErrorsNameFieldAndLine) {
    expect_error(with(kSmallOu, "n_paths = 32", "n_paths = many"), "[ensemble] n_paths");
    expect_error(with(kSmallOu, "n_paths = 32", "n_paths = many"), "line 16");
    expect_error(with(kSmallOu, "l_max = 2", "l_max = 2\nwidth = 3"), "[scan] width");
    expect_error(with(kSmallOu, "[ursell]", "[bogus]"), "bogus");
    expect_error(with(kSmallOu, "tau_end = 2", "tau_end = -1"), "empty tau range");
    expect_error(with(kSmallOu, "eval_step = 0.5", "eval_step = 0.03"), "eval_step");
    expect_error(with(kSmallOu, "q = 1, 0.5", "q = 1, -0.5"), "q");
    expect_error("[grid\ndt = 1\n", "config line");
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run("check", kSmallOu, "check"), 0);
    EXPECT_EQ(run("solve", kSmallOu, "solve"), 0);
    EXPECT_TRUE(fs::exists(root_ / "solve" / "solution.csv"));
    EXPECT_TRUE(fs::exists(root_ / "solve" / "convergence.txt"));
    EXPECT_EQ(run("nonsense", kSmallOu, "x"), 2);
}

TEST_F(CliTest, RefusalWritesNothing) {
    const std::string strong = with(kSmallOu, "drift_gain = 0.1", "drift_gain = 3");
    EXPECT_EQ(run("check", strong, "check"), 1);
    EXPECT_EQ(run("solve", strong, "solve"), 1);
    EXPECT_NE(err_.str().find("kappa"), std::string::npos);
    EXPECT_FALSE(fs::exists(root_ / "solve" / "solution.csv"));
    EXPECT_EQ(run("scan", strong, "scan"), 1);
    EXPECT_FALSE(fs::exists(root_ / "scan" / "scan.csv"));
}

TEST_F(CliTest, NonConvergenceIsNegative) {
    const std::string slow = with(kSmallOu, "max_iter = 30", "max_iter = 1");
    EXPECT_EQ(run("solve", slow, "solve"), 1);
    EXPECT_NE(slurp(root_ / "solve" / "convergence.txt").find("converged=false"), std::string::npos);
}

TEST_F(CliTest, InvalidInputsExitTwo) {
    EXPECT_EQ(run("counterexample", with(kSmallOu, "n_omega = 200", "n_omega = 200\ndt = 0.1"), "u"), 2);
    EXPECT_FALSE(fs::exists(root_ / "u" / "ursell.csv"));
    const std::string text(kSmallOu);
    const std::string no_model = text.substr(text.find("[grid]"));
    EXPECT_EQ(run("solve", no_model, "s"), 2);
}

TEST_F(CliTest, DeterministicAcrossThreadsAndReruns) {
    for (const char* command : {"solve", "scan", "distribution", "counterexample"}) {
        ASSERT_EQ(run(command, kSmallOu, std::string(command) + "_1", 1), 0) << command << ": " << err_.str();
        ASSERT_EQ(run(command, kSmallOu, std::string(command) + "_8", 8), 0) << command;
        ASSERT_EQ(run(command, kSmallOu, std::string(command) + "_again", 1), 0) << command;
        for (const auto& entry : fs::directory_iterator(root_ / (std::string(command) + "_1"))) {
            const std::string name = entry.path().filename().string();
            const std::string reference = slurp(entry.path());
            EXPECT_FALSE(reference.empty()) << name;
            EXPECT_EQ(slurp(root_ / (std::string(command) + "_8") / name), reference) << command << "/" << name;
            EXPECT_EQ(slurp(root_ / (std::string(command) + "_again") / name), reference) << command << "/" << name;
        }
    }
}

TEST_F(CliTest, SeedChangesOutput) {
    ASSERT_EQ(run("solve", kSmallOu, "a"), 0);
    ASSERT_EQ(run("solve", with(kSmallOu, "seed = 3", "seed = 4"), "b"), 0);
    EXPECT_NE(slurp(root_ / "a" / "solution.csv"), slurp(root_ / "b" / "solution.csv"));
}

#ifdef APERIOD_SDE_PATH
TEST_F(CliTest, BinaryExitStatuses) {
    const fs::path config = root_ / "ou.ini";
    std::ofstream(config) << kSmallOu;
    const fs::path bad = root_ / "bad.ini";
    std::ofstream(bad) << with(kSmallOu, "tau_end = 2", "tau_end = -1");
    const auto status = [&](const std::string& args) {
        const std::string cmd = std::string(APERIOD_SDE_PATH) + " " + args + " > /dev/null 2>&1";
        const int raw = std::system(cmd.c_str());
        return WEXITSTATUS(raw);
    };
    EXPECT_EQ(status("check --config " + config.string()), 0);
    EXPECT_EQ(status("scan --config " + config.string() + " --out " + (root_ / "o").string() + " --threads 2"), 0);
    EXPECT_TRUE(fs::exists(root_ / "o" / "report.txt"));
    EXPECT_EQ(status("scan --config " + bad.string() + " --out " + (root_ / "p").string()), 2);
    EXPECT_EQ(status("scan --config " + (root_ / "missing.ini").string() + " --out " + (root_ / "p").string()), 2);
    EXPECT_EQ(status("solve --config " + config.string()), 2);  // no output directory
    EXPECT_EQ(status("solve --config " + config.string() + " --out " + (root_ / "q").string() + " --threads 0"), 2);
    EXPECT_EQ(status("frobnicate"), 2);
}
#endif

}  // namespace
}  // namespace aperiod
