#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flexcomm/config.hpp"
#include "flexcomm/csv.hpp"

using namespace flexcomm;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_run_config(in);
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "flexcomm_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(FLEXCOMM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST(Config, ParsesEverySection) {
    auto rc = parse(R"(
[cluster]
n = 8

[model]
kind = mlp_1hidden
features = 10
hidden = 6
classes = 4
size_bytes_override = 4e7

[train]
eta = 0.05
batch = 8
epochs = 3
seed = 123
decay = 1:0.5,2:0.1
momentum = 0.9
samples_per_worker = 128
threads = 2
gain_window = 25

[compression]
method = layerwise
c = 0.01
mode = VAR
reduce_algo = tree
error_feedback = false
threshold_rounds = 30

[network]
segments = 0,1,25;2,50,1
t_io_ms = 2.5
change_threshold = 0.05

[controller]
c_low = 0.002
c_high = 0.2
factor = 4
probe_iters = 5
gain_threshold = 0.2
)");
    EXPECT_EQ(rc.train.n, 8);
    EXPECT_EQ(rc.train.model_kind, ModelKind::Mlp1Hidden);
    EXPECT_EQ(rc.train.hidden, 6);
    EXPECT_EQ(rc.train.size_bytes_override, 4e7);
    EXPECT_EQ(rc.train.eta, 0.05);
    ASSERT_EQ(rc.train.decay.size(), 2u);
    EXPECT_EQ(rc.train.decay[1].epoch, 2);
    EXPECT_EQ(rc.train.decay[1].factor, 0.1);
    EXPECT_EQ(rc.train.momentum, 0.9);
    EXPECT_EQ(rc.train.threads, 2);
    EXPECT_EQ(rc.train.gain_window, 25u);
    EXPECT_EQ(rc.train.compressor, CompressorKind::Layerwise);
    EXPECT_FALSE(rc.train.adaptive);
    EXPECT_EQ(rc.train.c, 0.01);
    EXPECT_EQ(rc.train.mode, SyncMode::VAR);
    EXPECT_EQ(rc.train.reduce_algo, ReduceAlgo::Tree);
    EXPECT_FALSE(rc.train.error_feedback);
    EXPECT_EQ(rc.train.threshold_rounds, 30);
    EXPECT_EQ(rc.train.t_io, 0.0025);
    EXPECT_EQ(rc.train.net_change_threshold, 0.05);
    EXPECT_EQ(rc.controller.c_high, 0.2);
    EXPECT_EQ(rc.controller.probe_iters, 5);
    ASSERT_EQ(rc.schedule.segments.size(), 2u);
    EXPECT_EQ(rc.schedule.segments[1].start_epoch, 2);
    EXPECT_EQ(rc.schedule.segments[1].net, NetParams(0.050, 1e9));
}

TEST(Config, AdaptiveStartsAtLadderTop) {
    auto rc = parse("[compression]\nc = adaptive\n[controller]\nc_high = 0.25\n");
    EXPECT_TRUE(rc.train.adaptive);
    EXPECT_EQ(rc.train.c, 0.25);
}

TEST(Config, DefaultsAndRejections) {
    auto rc = parse("[cluster]\nn = 2\n");
    ASSERT_EQ(rc.schedule.segments.size(), 1u);
    EXPECT_EQ(rc.schedule.segments[0].net, NetParams(0.001, 10e9));

    EXPECT_THROW(parse("[turbo]\nx = 1\n"), std::runtime_error);
    EXPECT_THROW(parse("[train]\nlr = 0.1\n"), std::runtime_error);
    EXPECT_THROW(parse("no_section = 1\n"), std::runtime_error);
    EXPECT_THROW(parse("[compression]\nmethod = lz4\n"), std::runtime_error);
    EXPECT_THROW(parse("[network]\nsegments = 0,1,10\ntrace_path = x.csv\n"),
                 std::runtime_error);
    EXPECT_THROW(parse("[train]\neta = -1\n"), std::invalid_argument);
    EXPECT_THROW(load_run_config("/nonexistent/run.ini"), std::runtime_error);
}

TEST(Config, SeedEnvOverride) {
    setenv("FLEXCOMM_SEED", "777", 1);
    auto rc = parse("[train]\nseed = 5\n");
    unsetenv("FLEXCOMM_SEED");
    EXPECT_EQ(rc.train.seed, 777u);
}

TEST(Cli, PlanPrintsSelectionAndValidatesWorkers) {
    EXPECT_EQ(run_cli("plan --alpha-ms 1 --bandwidth-gbps 10 --model-bytes 4e8 --workers 8 "
                      "--cr 0.01"),
              0);
    EXPECT_EQ(run_cli("plan --workers 1"), 2);
    EXPECT_EQ(run_cli("plan --bandwidth-gbps 0"), 2);
}

TEST(Cli, SimulateMissingConfigExitsTwo) {
    EXPECT_EQ(run_cli("simulate --config /nonexistent/run.ini"), 2);
    EXPECT_EQ(run_cli("simulate"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
}

TEST(Cli, SimulateWritesReports) {
    auto dir = temp_dir();
    auto cfg_path = dir / "run.ini";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[cluster]\nn = 2\n[train]\nepochs = 1\nbatch = 16\nsamples_per_worker = 32\n"
            << "[compression]\nc = 0.1\n";
    }
    auto out = dir / "out";
    ASSERT_EQ(run_cli("simulate --config " + cfg_path.string() + " --out " + out.string()), 0);
    for (const char* name : {"metrics.csv", "selection.csv", "controller.csv", "summary.txt"}) {
        EXPECT_TRUE(std::filesystem::exists(out / name)) << name;
    }
    auto metrics = read_csv((out / "metrics.csv").string());
    ASSERT_EQ(metrics.size(), 3u);  // header + 2 steps
    EXPECT_EQ(metrics[0][0], "step");
    EXPECT_EQ(metrics[0][9], "collective_used");
}

TEST(Cli, SweepAndTraceGen) {
    auto dir = temp_dir();
    auto out = dir / "sweep.csv";
    ASSERT_EQ(run_cli("sweep --table ring-ar-validation --fixtures " FLEXCOMM_FIXTURES_DIR
                      " --out " + out.string()),
              0);
    EXPECT_EQ(read_csv(out.string()).size(), 13u);  // header + 12 cells
    EXPECT_EQ(run_cli("sweep --table nonsense --out " + out.string()), 2);

    auto trace = dir / "trace.csv";
    ASSERT_EQ(run_cli("trace-gen --preset c1 --epochs 50 --out " + trace.string()), 0);
    auto sched = load_trace(trace.string());
    EXPECT_EQ(sched.segments.size(), 4u);
    EXPECT_EQ(run_cli("trace-gen --preset c9 --out " + trace.string()), 2);
    EXPECT_EQ(run_cli("trace-gen --preset c1 --epochs 0 --out " + trace.string()), 2);
}
