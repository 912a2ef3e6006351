#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexcomm/costmodel.hpp"

namespace flexcomm {

struct Segment {
    long start_epoch = 0;
    NetParams net;
};

// Piecewise-constant latency/bandwidth over simulated epochs.
struct NetworkSchedule {
    std::vector<Segment> segments;

    void validate() const {
        if (segments.empty()) throw std::invalid_argument("empty network schedule");
        if (segments.front().start_epoch != 0) {
            throw std::invalid_argument("first segment must start at epoch 0");
        }
        for (std::size_t i = 1; i < segments.size(); ++i) {
            if (segments[i].start_epoch <= segments[i - 1].start_epoch) {
                throw std::invalid_argument("segment start epochs must be strictly ascending");
            }
        }
    }
};

inline NetParams params_at(const NetworkSchedule& sched, long epoch) {
    if (epoch < 0) throw std::invalid_argument("epoch must be >= 0");
    sched.validate();
    NetParams cur = sched.segments.front().net;
    for (const auto& seg : sched.segments) {
        if (seg.start_epoch <= epoch) cur = seg.net;
    }
    return cur;
}

// Schedules are piecewise-constant, so any scheduled change is intentional;
// rel_threshold > 0 allows ignoring changes below a relative magnitude.
inline bool network_changed(const NetParams& prev, const NetParams& cur,
                            double rel_threshold = 0.0) {
    auto rel = [](double a, double b) {
        double scale = std::max(std::fabs(a), std::fabs(b));
        return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
    };
    return rel(prev.alpha, cur.alpha) > rel_threshold ||
           rel(prev.bandwidth, cur.bandwidth) > rel_threshold;
}

enum class Category { Compute, Sync, Compression, Io, Exploration };
inline constexpr std::size_t kCategoryCount = 5;

inline const char* to_string(Category c) {
    switch (c) {
        case Category::Compute: return "compute";
        case Category::Sync: return "sync";
        case Category::Compression: return "compression";
        case Category::Io: return "io";
        case Category::Exploration: return "exploration";
    }
    return "?";
}

// Simulated clock; `now` is always the sum of the category accumulators.
struct SimClock {
    std::array<double, kCategoryCount> acc{};

    void charge(Category cat, double seconds) {
        if (seconds < 0.0) throw std::invalid_argument("negative duration");
        acc[static_cast<std::size_t>(cat)] += seconds;
    }

    double of(Category cat) const { return acc[static_cast<std::size_t>(cat)]; }

    double now() const {
        double s = 0.0;
        for (double a : acc) s += a;
        return s;
    }
};

// Trace format: one segment per line, `start_epoch,alpha_ms,bandwidth_gbps`,
// '#' starts a comment.
inline NetworkSchedule parse_trace(std::istream& in) {
    NetworkSchedule sched;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed;
        for (char ch : line) {
            if (!std::isspace(static_cast<unsigned char>(ch))) trimmed += ch;
        }
        if (trimmed.empty()) continue;
        std::istringstream ls(trimmed);
        long epoch;
        double alpha_ms, bw_gbps;
        char c1, c2;
        if (!(ls >> epoch >> c1 >> alpha_ms >> c2 >> bw_gbps) || c1 != ',' || c2 != ',') {
            throw std::runtime_error("malformed trace line: " + line);
        }
        sched.segments.push_back({epoch, NetParams(alpha_ms / 1e3, bw_gbps * 1e9)});
    }
    sched.validate();
    return sched;
}

inline NetworkSchedule load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    return parse_trace(in);
}

inline void write_trace(const NetworkSchedule& sched, std::ostream& out) {
    out << "# start_epoch,alpha_ms,bandwidth_gbps\n";
    for (const auto& seg : sched.segments) {
        std::ostringstream line;
        line << seg.start_epoch << "," << seg.net.alpha * 1e3 << ","
             << seg.net.bandwidth / 1e9;
        out << line.str() << "\n";
    }
}

// C1: four phases over E epochs, boundaries at 13/50, 25/50, 37/50 of E.
// Low/high latency is 1ms/50ms; high/low bandwidth is 25/1 Gbps.
inline NetworkSchedule preset_c1(long epochs) {
    if (epochs <= 0) throw std::invalid_argument("epochs must be > 0");
    auto at = [&](double frac) { return std::lround(frac * static_cast<double>(epochs)); };
    NetParams low_high(0.001, 25e9);
    NetParams low_low(0.001, 1e9);
    NetParams high_low(0.050, 1e9);
    NetParams high_high(0.050, 25e9);
    NetworkSchedule s;
    s.segments = {{0, low_high},
                  {at(13.0 / 50.0), low_low},
                  {at(25.0 / 50.0), high_low},
                  {at(37.0 / 50.0), high_high}};
    s.validate();
    return s;
}

// C2: moderate phases at [0.24E,0.38E) and [0.56E,0.70E), high-latency /
// low-bandwidth at [0.40E,0.54E), low-latency / high-bandwidth elsewhere.
// The moderate operating point (10ms, 10Gbps) is a placeholder, not a
// published value.
inline NetworkSchedule preset_c2(long epochs) {
    if (epochs <= 0) throw std::invalid_argument("epochs must be > 0");
    auto at = [&](double frac) { return std::lround(frac * static_cast<double>(epochs)); };
    NetParams low_high(0.001, 25e9);
    NetParams moderate(0.010, 10e9);
    NetParams high_low(0.050, 1e9);
    std::vector<Segment> raw = {{0, low_high},      {at(0.24), moderate}, {at(0.38), low_high},
                                {at(0.40), high_low}, {at(0.54), low_high}, {at(0.56), moderate},
                                {at(0.70), low_high}};
    NetworkSchedule s;
    for (const auto& seg : raw) {
        // On short horizons boundaries can collide; the later phase wins.
        if (!s.segments.empty() && s.segments.back().start_epoch == seg.start_epoch) {
            s.segments.back().net = seg.net;
        } else {
            s.segments.push_back(seg);
        }
    }
    s.validate();
    return s;
}

}  // namespace flexcomm
