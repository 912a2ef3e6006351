#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flexcomm/config.hpp"
#include "flexcomm/costmodel.hpp"
#include "flexcomm/csv.hpp"
#include "flexcomm/moo.hpp"
#include "flexcomm/netsched.hpp"
#include "flexcomm/report.hpp"
#include "flexcomm/sweep.hpp"
#include "flexcomm/trainer.hpp"

namespace {

using namespace flexcomm;

int cmd_plan(double alpha_ms, double bw_gbps, double model_bytes, int workers, double cr,
             const std::string& out_csv) {
    NetParams net(alpha_ms / 1e3, bw_gbps * 1e9);
    MessageSpec msg(model_bytes, cr, workers);
    auto choice = select_collective(net, msg);
    const auto& b = choice.costs;
    auto ms = [](double s) { return fmt_double(s * 1e3); };

    std::printf("network: alpha=%gms bandwidth=%gGbps  M=%g bytes  N=%d  cr=%g\n", alpha_ms,
                bw_gbps, model_bytes, workers, cr);
    std::printf("%-18s %s ms\n", "ps", ms(b.ps).c_str());
    std::printf("%-18s %s ms\n", "ring_ar", ms(b.ring_ar).c_str());
    std::printf("%-18s %s ms\n", "tree_ar", ms(b.tree_ar).c_str());
    std::printf("%-18s %s ms\n", "broadcast", ms(b.broadcast).c_str());
    std::printf("%-18s %s ms\n", "allgather_dense", ms(b.allgather_dense).c_str());
    std::printf("%-18s %s ms\n", "ag_compressed", ms(b.ag_compressed).c_str());
    std::printf("%-18s %s ms\n", "art_ring", ms(b.art_ring).c_str());
    std::printf("%-18s %s ms\n", "art_tree", ms(b.art_tree).c_str());
    std::printf("selected: %s\n", to_string(choice.collective));

    auto show_crossover = [&](CollectivePair pair, const char* name) {
        auto c = crossover_cr(net, model_bytes, workers, pair);
        if (c) {
            std::printf("crossover %s: c* = %s\n", name, fmt_double(*c).c_str());
        } else {
            std::printf("crossover %s: none\n", name);
        }
    };
    show_crossover(CollectivePair::RING_VS_TREE, "ring/tree");
    show_crossover(CollectivePair::RING_VS_AG, "ring/ag");
    show_crossover(CollectivePair::TREE_VS_AG, "tree/ag");

    if (!out_csv.empty()) {
        CsvWriter w(out_csv);
        w.row({"collective", "predicted_ms"});
        w.row({"ps", ms(b.ps)});
        w.row({"ring_ar", ms(b.ring_ar)});
        w.row({"tree_ar", ms(b.tree_ar)});
        w.row({"broadcast", ms(b.broadcast)});
        w.row({"allgather_dense", ms(b.allgather_dense)});
        w.row({"ag_compressed", ms(b.ag_compressed)});
        w.row({"art_ring", ms(b.art_ring)});
        w.row({"art_tree", ms(b.art_tree)});
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    auto rc = load_run_config(config_path);
    std::filesystem::create_directories(out_dir);
    Trainer trainer(rc.train, rc.schedule);
    Controller controller(rc.controller);
    if (rc.train.adaptive) {
        trainer.run(controller.hook());
    } else {
        trainer.run();
    }
    auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };
    write_metrics_csv(trainer.metrics(), path("metrics.csv"));
    write_selection_csv(trainer.selection_log(), path("selection.csv"));
    write_controller_csv(controller.events(), path("controller.csv"));
    write_summary(trainer, controller.events(), path("summary.txt"));
    std::printf("wrote %s\n", out_dir.c_str());
    return 0;
}

int cmd_sweep(const std::string& table, const std::string& out_csv,
              const std::string& fixtures_dir) {
    auto fixture = [&](const char* name) {
        return (std::filesystem::path(fixtures_dir) / name).string();
    };
    CsvWriter w(out_csv);
    if (table == "ring-ar-validation") {
        w.row({"tensor_params", "alpha_ms", "bandwidth_gbps", "measured_ms", "predicted_ms",
               "rel_err"});
        for (const auto& cell : ring_ar_validation(fixture("ring_ar_timings.csv"))) {
            w.row({fmt_double(cell.tensor_params), fmt_double(cell.alpha_ms),
                   fmt_double(cell.bandwidth_gbps), fmt_double(cell.measured_ms),
                   fmt_double(cell.predicted_ms), fmt_double(cell.rel_err)});
        }
    } else if (table == "collective-grid") {
        w.row({"model", "alpha_ms", "bandwidth_gbps", "cr", "m_bytes", "ag_measured_ms",
               "ag_predicted_ms", "art_ring_measured_ms", "art_ring_predicted_ms",
               "art_tree_measured_ms", "art_tree_predicted_ms", "argmin_predicted",
               "argmin_measured"});
        static const char* names[3] = {"AG", "ART_RING", "ART_TREE"};
        for (const auto& cell : collective_grid_validation(fixture("collective_grid_timings.csv"))) {
            w.row({cell.model, fmt_double(cell.alpha_ms), fmt_double(cell.bandwidth_gbps),
                   fmt_double(cell.cr), fmt_double(cell.m_bytes), fmt_double(cell.measured_ms[0]),
                   fmt_double(cell.predicted_ms[0]), fmt_double(cell.measured_ms[1]),
                   fmt_double(cell.predicted_ms[1]), fmt_double(cell.measured_ms[2]),
                   fmt_double(cell.predicted_ms[2]),
                   names[static_cast<std::size_t>(cell.argmin_predicted)],
                   names[static_cast<std::size_t>(cell.argmin_measured)]});
        }
    } else {
        std::fprintf(stderr, "unknown table '%s'; options: ring-ar-validation, collective-grid\n",
                     table.c_str());
        return 2;
    }
    std::printf("wrote %s\n", out_csv.c_str());
    return 0;
}

int cmd_trace_gen(const std::string& preset, long epochs, const std::string& out_path) {
    NetworkSchedule sched;
    if (preset == "c1") {
        sched = preset_c1(epochs);
    } else if (preset == "c2") {
        sched = preset_c2(epochs);
    } else {
        std::fprintf(stderr, "unknown preset '%s'; options: c1, c2\n", preset.c_str());
        return 2;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::fprintf(stderr, "cannot open for writing: %s\n", out_path.c_str());
        return 1;
    }
    write_trace(sched, out);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive gradient-compression simulator"};
    app.require_subcommand(1);

    auto* plan = app.add_subcommand("plan", "predict collective costs and the selected collective");
    double alpha_ms = 1.0, bw_gbps = 10.0, model_bytes = 4e8, cr = 0.1;
    int workers = 8;
    std::string plan_out;
    plan->add_option("--alpha-ms", alpha_ms, "latency in ms")->check(CLI::NonNegativeNumber);
    plan->add_option("--bandwidth-gbps", bw_gbps, "bandwidth in Gbps")
        ->check(CLI::PositiveNumber);
    plan->add_option("--model-bytes", model_bytes, "dense gradient size in bytes")
        ->check(CLI::PositiveNumber);
    plan->add_option("--workers", workers, "worker count")->check(CLI::Range(2, 1 << 20));
    plan->add_option("--cr", cr, "compression ratio in (0,1]");
    plan->add_option("--out", plan_out, "optional CSV output path");

    auto* simulate = app.add_subcommand("simulate", "run a full training simulation");
    std::string config_path, out_dir = "out";
    simulate->add_option("--config", config_path, "run config file")->required();
    simulate->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "predict a fixture table and report errors");
    std::string table, sweep_out = "sweep.csv", fixtures_dir = "fixtures";
    sweep->add_option("--table", table, "ring-ar-validation or collective-grid")->required();
    sweep->add_option("--out", sweep_out, "output CSV path");
    sweep->add_option("--fixtures", fixtures_dir, "fixtures directory");

    auto* trace = app.add_subcommand("trace-gen", "emit a network schedule trace");
    std::string preset, trace_out = "trace.csv";
    long epochs = 50;
    trace->add_option("--preset", preset, "c1 or c2")->required();
    trace->add_option("--epochs", epochs, "horizon in epochs")->check(CLI::PositiveNumber);
    trace->add_option("--out", trace_out, "output trace path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (plan->parsed()) return cmd_plan(alpha_ms, bw_gbps, model_bytes, workers, cr, plan_out);
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir);
        if (sweep->parsed()) return cmd_sweep(table, sweep_out, fixtures_dir);
        if (trace->parsed()) return cmd_trace_gen(preset, epochs, trace_out);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        // config/usage problems exit 2, runtime failures exit 1
        std::string what = e.what();
        if (what.find("config") != std::string::npos || what.find("unknown") != std::string::npos) {
            return 2;
        }
        return 1;
    }
    return 2;
}
