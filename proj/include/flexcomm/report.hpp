#pragma once

#include <map>
#include <string>
#include <vector>

#include "flexcomm/csv.hpp"
#include "flexcomm/moo.hpp"
#include "flexcomm/trainer.hpp"

namespace flexcomm {

inline void write_metrics_csv(const std::vector<StepMetrics>& metrics, const std::string& path) {
    CsvWriter w(path);
    w.row({"step", "loss", "t_compute", "t_comp_decomp", "t_sync", "t_io", "t_step", "gain",
           "cr_used", "collective_used", "selected_rank"});
    for (const auto& m : metrics) {
        w.row({std::to_string(m.step), fmt_double(m.loss), fmt_double(m.t_compute),
               fmt_double(m.t_comp_decomp), fmt_double(m.t_sync), fmt_double(m.t_io),
               fmt_double(m.t_step), fmt_double(m.gain), fmt_double(m.cr_used),
               m.collective_used, std::to_string(m.selected_rank)});
    }
}

inline void write_selection_csv(const SelectionLog& log, const std::string& path) {
    CsvWriter w(path);
    w.row({"step", "rank"});
    for (const auto& [step, rank] : log.entries) {
        w.row({std::to_string(step), std::to_string(rank)});
    }
}

inline void write_controller_csv(const std::vector<ControllerEvent>& events,
                                 const std::string& path) {
    CsvWriter w(path);
    w.row({"step", "trigger", "chosen_c", "chosen_collective", "front_size"});
    for (const auto& e : events) {
        w.row({std::to_string(e.step), e.trigger, fmt_double(e.chosen_c),
               to_string(e.collective), std::to_string(e.front_size)});
    }
}

inline void write_summary(const Trainer& trainer, const std::vector<ControllerEvent>& events,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const auto& metrics = trainer.metrics();
    out << "steps: " << metrics.size() << "\n";
    if (!metrics.empty()) out << "final_loss: " << fmt_double(metrics.back().loss) << "\n";
    out << "train_accuracy: " << fmt_double(trainer.train_accuracy()) << "\n";
    const auto& clk = trainer.clock();
    out << "simulated_time_total_s: " << fmt_double(clk.now()) << "\n";
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        auto cat = static_cast<Category>(i);
        out << "simulated_time_" << to_string(cat) << "_s: " << fmt_double(clk.of(cat)) << "\n";
    }
    std::map<std::string, long> per_cr, per_collective;
    for (const auto& m : metrics) {
        per_cr[fmt_double(m.cr_used)]++;
        per_collective[m.collective_used]++;
    }
    for (const auto& [cr, count] : per_cr) out << "steps_at_cr " << cr << ": " << count << "\n";
    for (const auto& [coll, count] : per_collective) {
        out << "steps_with_collective " << coll << ": " << count << "\n";
    }
    out << "controller_events: " << events.size() << "\n";
}

}  // namespace flexcomm
