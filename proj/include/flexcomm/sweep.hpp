#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexcomm/costmodel.hpp"
#include "flexcomm/csv.hpp"

namespace flexcomm {

inline constexpr int kFixtureWorkers = 8;

struct RingArCell {
    double tensor_params = 0.0;
    double alpha_ms = 0.0;
    double bandwidth_gbps = 0.0;
    double measured_ms = 0.0;
    double predicted_ms = 0.0;
    double rel_err = 0.0;
};

inline std::vector<RingArCell> ring_ar_validation(const std::string& fixture_path) {
    auto rows = read_csv(fixture_path);
    std::vector<RingArCell> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {  // skip header
        const auto& r = rows[i];
        if (r.size() != 4) throw std::runtime_error("bad ring-ar fixture row");
        RingArCell cell;
        cell.tensor_params = std::stod(r[0]);
        cell.alpha_ms = std::stod(r[1]);
        cell.bandwidth_gbps = std::stod(r[2]);
        cell.measured_ms = std::stod(r[3]);
        NetParams net(cell.alpha_ms / 1e3, cell.bandwidth_gbps * 1e9);
        MessageSpec msg(4.0 * cell.tensor_params, 1.0, kFixtureWorkers);
        cell.predicted_ms = cost_ring_ar(net, msg) * 1e3;
        cell.rel_err = std::fabs(cell.predicted_ms - cell.measured_ms) / cell.measured_ms;
        out.push_back(cell);
    }
    return out;
}

struct GridCell {
    std::string model;
    double alpha_ms = 0.0;
    double bandwidth_gbps = 0.0;
    double cr = 0.0;
    double m_bytes = 0.0;
    std::array<double, 3> measured_ms{};   // AG, ART-Ring, ART-Tree
    std::array<double, 3> predicted_ms{};
    std::array<double, 3> rel_err{};
    int argmin_predicted = 0;
    int argmin_measured = 0;
    double measured_margin = 0.0;  // relative gap between best and runner-up
};

// Predicts every cell of the collective grid; per-model byte sizes are
// back-derived from the AG row at CR 0.1 and 10 Gbps.
inline std::vector<GridCell> collective_grid_validation(const std::string& fixture_path) {
    auto rows = read_csv(fixture_path);
    std::map<std::string, double> m_bytes;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 7) throw std::runtime_error("bad grid fixture row");
        if (std::stod(r[3]) == 0.1 && std::stod(r[2]) == 10.0) {
            NetParams net(std::stod(r[1]) / 1e3, 10e9);
            m_bytes[r[0]] = derive_m_from_ag(net, 0.1, kFixtureWorkers, std::stod(r[4]) / 1e3);
        }
    }
    std::vector<GridCell> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        GridCell cell;
        cell.model = r[0];
        cell.alpha_ms = std::stod(r[1]);
        cell.bandwidth_gbps = std::stod(r[2]);
        cell.cr = std::stod(r[3]);
        cell.m_bytes = m_bytes.at(cell.model);
        cell.measured_ms = {std::stod(r[4]), std::stod(r[5]), std::stod(r[6])};
        NetParams net(cell.alpha_ms / 1e3, cell.bandwidth_gbps * 1e9);
        MessageSpec msg(cell.m_bytes, cell.cr, kFixtureWorkers);
        cell.predicted_ms = {cost_ag_compressed(net, msg) * 1e3, cost_art_ring(net, msg) * 1e3,
                             cost_art_tree(net, msg) * 1e3};
        for (int j = 0; j < 3; ++j) {
            cell.rel_err[static_cast<std::size_t>(j)] =
                std::fabs(cell.predicted_ms[static_cast<std::size_t>(j)] -
                          cell.measured_ms[static_cast<std::size_t>(j)]) /
                cell.measured_ms[static_cast<std::size_t>(j)];
            if (cell.predicted_ms[static_cast<std::size_t>(j)] <
                cell.predicted_ms[static_cast<std::size_t>(cell.argmin_predicted)]) {
                cell.argmin_predicted = j;
            }
            if (cell.measured_ms[static_cast<std::size_t>(j)] <
                cell.measured_ms[static_cast<std::size_t>(cell.argmin_measured)]) {
                cell.argmin_measured = j;
            }
        }
        auto sorted = cell.measured_ms;
        std::sort(sorted.begin(), sorted.end());
        cell.measured_margin = (sorted[1] - sorted[0]) / sorted[0];
        out.push_back(cell);
    }
    return out;
}

}  // namespace flexcomm
