#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "flexcomm/moo.hpp"
#include "flexcomm/netsched.hpp"
#include "flexcomm/trainer.hpp"

namespace flexcomm {

// Structured run configuration loaded from an INI-style file. Unknown
// sections or keys are rejected.
struct RunConfig {
    TrainConfig train;
    ControllerConfig controller;
    NetworkSchedule schedule;
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

using IniSections = std::map<std::string, std::map<std::string, std::string>>;

inline IniSections parse_ini(std::istream& in) {
    IniSections out;
    std::string line, section;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            out[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos || section.empty()) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key=value inside a section");
        }
        out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

inline std::vector<DecayPoint> parse_decay(const std::string& s) {
    std::vector<DecayPoint> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw std::runtime_error("bad decay entry: " + item);
        out.push_back({std::stol(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    }
    return out;
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::runtime_error("bad boolean: " + s);
}

inline NetworkSchedule parse_inline_segments(const std::string& s) {
    // semicolon-separated `start_epoch,alpha_ms,bandwidth_gbps` triples
    NetworkSchedule sched;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ';')) {
        std::istringstream ls(item);
        long epoch;
        double alpha_ms, bw_gbps;
        char c1, c2;
        if (!(ls >> epoch >> c1 >> alpha_ms >> c2 >> bw_gbps) || c1 != ',' || c2 != ',') {
            throw std::runtime_error("bad inline segment: " + item);
        }
        sched.segments.push_back({epoch, NetParams(alpha_ms / 1e3, bw_gbps * 1e9)});
    }
    sched.validate();
    return sched;
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
    auto ini = detail::parse_ini(in);
    static const std::map<std::string, std::set<std::string>> known = {
        {"cluster", {"n"}},
        {"model", {"kind", "features", "hidden", "classes", "size_bytes_override"}},
        {"train", {"eta", "batch", "epochs", "seed", "decay", "momentum",
                   "samples_per_worker", "threads", "timing", "gain_window"}},
        {"compression",
         {"method", "c", "mode", "reduce_algo", "error_feedback", "threshold_rounds"}},
        {"network", {"trace_path", "segments", "t_io_ms", "change_threshold"}},
        {"controller", {"c_low", "c_high", "factor", "probe_iters", "gain_threshold"}},
    };
    for (const auto& [section, kv] : ini) {
        auto it = known.find(section);
        if (it == known.end()) throw std::runtime_error("unknown config section: " + section);
        for (const auto& [key, _] : kv) {
            if (!it->second.count(key)) {
                throw std::runtime_error("unknown key '" + key + "' in section [" + section + "]");
            }
        }
    }

    RunConfig rc;
    auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
        auto s = ini.find(sec);
        if (s == ini.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };

    if (auto* v = get("cluster", "n")) rc.train.n = std::stoi(*v);
    if (auto* v = get("model", "kind")) rc.train.model_kind = model_kind_from_string(*v);
    if (auto* v = get("model", "features")) rc.train.features = std::stoi(*v);
    if (auto* v = get("model", "hidden")) rc.train.hidden = std::stoi(*v);
    if (auto* v = get("model", "classes")) rc.train.classes = std::stoi(*v);
    if (auto* v = get("model", "size_bytes_override")) rc.train.size_bytes_override = std::stod(*v);
    if (auto* v = get("train", "eta")) rc.train.eta = std::stod(*v);
    if (auto* v = get("train", "batch")) rc.train.batch = std::stoi(*v);
    if (auto* v = get("train", "epochs")) rc.train.epochs = std::stol(*v);
    if (auto* v = get("train", "seed")) rc.train.seed = std::stoull(*v);
    if (auto* v = get("train", "decay")) rc.train.decay = detail::parse_decay(*v);
    if (auto* v = get("train", "momentum")) rc.train.momentum = std::stod(*v);
    if (auto* v = get("train", "samples_per_worker")) {
        rc.train.samples_per_worker = std::stoul(*v);
    }
    if (auto* v = get("train", "threads")) rc.train.threads = std::stoi(*v);
    if (auto* v = get("train", "timing")) rc.train.timing_measured = (*v == "measured");
    if (auto* v = get("train", "gain_window")) rc.train.gain_window = std::stoul(*v);
    if (auto* v = get("compression", "method")) {
        if (*v == "topk") rc.train.compressor = CompressorKind::Exact;
        else if (*v == "layerwise") rc.train.compressor = CompressorKind::Layerwise;
        else if (*v == "threshold") rc.train.compressor = CompressorKind::Threshold;
        else throw std::runtime_error("unknown compression method: " + *v);
    }
    if (auto* v = get("compression", "c")) {
        if (*v == "adaptive") {
            rc.train.adaptive = true;
        } else {
            rc.train.c = std::stod(*v);
        }
    }
    if (auto* v = get("compression", "mode")) rc.train.mode = sync_mode_from_string(*v);
    if (auto* v = get("compression", "reduce_algo")) {
        if (*v == "ring") rc.train.reduce_algo = ReduceAlgo::Ring;
        else if (*v == "tree") rc.train.reduce_algo = ReduceAlgo::Tree;
        else throw std::runtime_error("unknown reduce_algo: " + *v);
    }
    if (auto* v = get("compression", "error_feedback")) {
        rc.train.error_feedback = detail::parse_bool(*v);
    }
    if (auto* v = get("compression", "threshold_rounds")) {
        rc.train.threshold_rounds = std::stoi(*v);
    }
    if (auto* v = get("network", "t_io_ms")) rc.train.t_io = std::stod(*v) / 1e3;
    if (auto* v = get("network", "change_threshold")) {
        rc.train.net_change_threshold = std::stod(*v);
    }
    if (auto* v = get("controller", "c_low")) rc.controller.c_low = std::stod(*v);
    if (auto* v = get("controller", "c_high")) rc.controller.c_high = std::stod(*v);
    if (auto* v = get("controller", "factor")) rc.controller.factor = std::stod(*v);
    if (auto* v = get("controller", "probe_iters")) rc.controller.probe_iters = std::stoi(*v);
    if (auto* v = get("controller", "gain_threshold")) {
        rc.controller.gain_threshold = std::stod(*v);
    }

    const std::string* trace = get("network", "trace_path");
    const std::string* inline_segs = get("network", "segments");
    if (trace && inline_segs) {
        throw std::runtime_error("network: give either trace_path or segments, not both");
    }
    if (trace) {
        rc.schedule = load_trace(*trace);
    } else if (inline_segs) {
        rc.schedule = detail::parse_inline_segments(*inline_segs);
    } else {
        rc.schedule.segments.push_back({0, NetParams(0.001, 10e9)});
    }

    // adaptive runs start at the top of the candidate ladder
    if (rc.train.adaptive) rc.train.c = rc.controller.c_high;

    // FLEXCOMM_SEED overrides the configured seed
    if (const char* env = std::getenv("FLEXCOMM_SEED")) {
        rc.train.seed = std::stoull(env);
    }
    rc.train.validate();
    rc.controller.validate();
    return rc;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_run_config(in);
}

}  // namespace flexcomm
