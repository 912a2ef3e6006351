#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexcomm/costmodel.hpp"
#include "flexcomm/netsched.hpp"
#include "flexcomm/trainer.hpp"

namespace flexcomm {

// One candidate compression ratio with its probed statistics. t_sync is
// recomputed from the cost model whenever the network changes; gain and
// compression time are reused until the next exploration.
struct CandidateCR {
    double c = 1.0;
    double gain_avg = 1.0;
    double t_comp_avg = 0.0;
    double t_sync_modeled = 0.0;
};

struct ControllerConfig {
    double c_low = 0.001;
    double c_high = 0.1;
    double factor = 3.0;
    int probe_iters = 10;
    double gain_threshold = 0.10;

    void validate() const {
        if (!(c_low > 0.0 && c_low <= c_high && c_high <= 1.0)) {
            throw std::invalid_argument("need 0 < c_low <= c_high <= 1");
        }
        if (factor <= 1.0) throw std::invalid_argument("ladder factor must be > 1");
        if (probe_iters < 1) throw std::invalid_argument("probe_iters must be >= 1");
        if (gain_threshold < 0.0) throw std::invalid_argument("gain_threshold must be >= 0");
    }
};

inline double round_3sig(double v) {
    if (v == 0.0) return 0.0;
    double mag = std::pow(10.0, std::floor(std::log10(std::fabs(v))) - 2.0);
    return std::round(v / mag) * mag;
}

// Descending geometric ladder from c_high by `factor`, rounded to three
// significant digits; the bottom rung snaps to c_low.
inline std::vector<double> candidate_ladder(const ControllerConfig& cfg) {
    cfg.validate();
    std::vector<double> ladder;
    double v = cfg.c_high;
    while (true) {
        if (v < cfg.c_low * std::sqrt(cfg.factor)) {
            ladder.push_back(cfg.c_low);
            break;
        }
        ladder.push_back(round_3sig(v));
        v /= cfg.factor;
    }
    return ladder;
}

inline bool trigger_gain(double gain_ref, const GainTracker& tracker, double threshold) {
    if (tracker.count() < 2) return false;
    if (!(gain_ref > 0.0)) return false;
    return std::fabs(tracker.mean() - gain_ref) / gain_ref >= threshold;
}

namespace detail {

inline bool dominates(const CandidateCR& a, const CandidateCR& b) {
    double a_obj[3] = {a.t_comp_avg, a.t_sync_modeled, 1.0 / a.gain_avg};
    double b_obj[3] = {b.t_comp_avg, b.t_sync_modeled, 1.0 / b.gain_avg};
    bool all_le = true, any_lt = false;
    for (int i = 0; i < 3; ++i) {
        if (a_obj[i] > b_obj[i]) all_le = false;
        if (a_obj[i] < b_obj[i]) any_lt = true;
    }
    return all_le && any_lt;
}

}  // namespace detail

inline std::vector<CandidateCR> pareto_front(const std::vector<CandidateCR>& cands) {
    if (cands.empty()) throw std::invalid_argument("empty candidate set");
    std::vector<CandidateCR> front;
    for (const auto& a : cands) {
        bool dominated = false;
        for (const auto& b : cands) {
            if (detail::dominates(b, a)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(a);
    }
    return front;
}

struct CrChoice {
    CandidateCR candidate;
    Collective collective = Collective::AG;
};

// Knee selection: min-max normalize the three objectives over the front and
// take the candidate closest to the ideal point, ties to the larger c.
inline CrChoice choose_cr(const std::vector<CandidateCR>& front, const NetParams& net,
                          double m_bytes, int n) {
    if (front.empty()) throw std::invalid_argument("empty pareto front");
    double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
    auto objs = [](const CandidateCR& c) {
        return std::array<double, 3>{c.t_comp_avg, c.t_sync_modeled, 1.0 / c.gain_avg};
    };
    for (const auto& c : front) {
        auto o = objs(c);
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], o[i]);
            hi[i] = std::max(hi[i], o[i]);
        }
    }
    const CandidateCR* best = nullptr;
    double best_dist = 0.0;
    for (const auto& c : front) {
        auto o = objs(c);
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            double range = hi[i] - lo[i];
            double norm = range > 0.0 ? (o[i] - lo[i]) / range : 0.0;
            d2 += norm * norm;
        }
        double d = std::sqrt(d2);
        if (!best || d < best_dist - 1e-12 ||
            (std::fabs(d - best_dist) <= 1e-12 && c.c > best->c)) {
            best = &c;
            best_dist = d;
        }
    }
    CrChoice out;
    out.candidate = *best;
    out.collective = select_collective(net, MessageSpec(m_bytes, best->c, n)).collective;
    return out;
}

struct ControllerEvent {
    long step = 0;
    std::string trigger;  // "gain" or "network"
    double chosen_c = 1.0;
    Collective collective = Collective::AG;
    std::size_t front_size = 0;
};

// Adaptive-CR controller. Candidate gains and compression times come from
// short checkpoint-restore probes; communication times come from the cost
// model under the current network parameters.
class Controller {
public:
    explicit Controller(ControllerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    const std::vector<ControllerEvent>& events() const { return events_; }
    const std::vector<CandidateCR>& candidates() const { return candidates_; }
    const ControllerConfig& config() const { return cfg_; }

    void on_step(Trainer& trainer, long step, long /*epoch*/, const NetParams& net) {
        if (!initialized_) {
            explore(trainer, net);
            refresh_sync(trainer, net);
            apply_selection(trainer, net);
            gain_ref_ = gain_of(trainer.current_c());
            prev_net_ = net;
            initialized_ = true;
            return;
        }
        if (trigger_gain(gain_ref_, trainer.gain_tracker(), cfg_.gain_threshold)) {
            explore(trainer, net);
            refresh_sync(trainer, net);
            gain_ref_ = gain_of(trainer.current_c());
            events_.push_back({step, "gain", trainer.current_c(),
                               trainer.current_collective(),
                               pareto_front(candidates_).size()});
        }
        if (network_changed(prev_net_, net, trainer.config().net_change_threshold)) {
            refresh_sync(trainer, net);
            auto chosen = apply_selection(trainer, net);
            gain_ref_ = chosen.candidate.gain_avg;
            events_.push_back({step, "network", chosen.candidate.c, chosen.collective,
                               pareto_front(candidates_).size()});
        }
        prev_net_ = net;
    }

    Trainer::StepHook hook() {
        return [this](Trainer& t, long step, long epoch, const NetParams& net) {
            on_step(t, step, epoch, net);
        };
    }

    // Probes every ladder candidate for probe_iters steps from a snapshot and
    // restores the pre-probe trajectory afterwards. Probe time lands in the
    // exploration clock category.
    void explore(Trainer& trainer, const NetParams& net) {
        auto snap = trainer.snapshot();
        trainer.set_probe_mode(true);
        std::vector<CandidateCR> fresh;
        for (double c : candidate_ladder(cfg_)) {
            trainer.restore(snap);
            Collective coll = trainer.config().n >= 2
                                  ? select_collective(net, MessageSpec(trainer.m_eff(), c,
                                                                       trainer.config().n))
                                        .collective
                                  : Collective::ART_RING;
            trainer.set_compression(c, coll);
            double gain_sum = 0.0, comp_sum = 0.0;
            bool ok = true;
            for (int i = 0; i < cfg_.probe_iters; ++i) {
                try {
                    auto m = trainer.step();
                    gain_sum += m.gain;
                    comp_sum += m.t_comp_decomp;
                } catch (const std::runtime_error&) {
                    ok = false;  // divergent probe: candidate discarded
                    break;
                }
            }
            if (ok) {
                fresh.push_back({c, gain_sum / cfg_.probe_iters, comp_sum / cfg_.probe_iters, 0.0});
            }
        }
        trainer.restore(snap);
        trainer.set_probe_mode(false);
        if (fresh.empty()) throw std::runtime_error("all exploration candidates diverged");
        candidates_ = std::move(fresh);
    }

    void refresh_sync(Trainer& trainer, const NetParams& net) {
        for (auto& cand : candidates_) {
            auto choice = select_collective(net, MessageSpec(trainer.m_eff(), cand.c,
                                                             trainer.config().n));
            switch (choice.collective) {
                case Collective::AG: cand.t_sync_modeled = choice.costs.ag_compressed; break;
                case Collective::ART_RING: cand.t_sync_modeled = choice.costs.art_ring; break;
                case Collective::ART_TREE: cand.t_sync_modeled = choice.costs.art_tree; break;
            }
        }
    }

private:
    CrChoice apply_selection(Trainer& trainer, const NetParams& net) {
        auto front = pareto_front(candidates_);
        auto chosen = choose_cr(front, net, trainer.m_eff(), trainer.config().n);
        trainer.set_compression(chosen.candidate.c, chosen.collective);
        return chosen;
    }

    double gain_of(double c) const {
        for (const auto& cand : candidates_) {
            if (cand.c == c) return cand.gain_avg;
        }
        return -1.0;
    }

    ControllerConfig cfg_;
    std::vector<CandidateCR> candidates_;
    std::vector<ControllerEvent> events_;
    double gain_ref_ = -1.0;
    NetParams prev_net_;
    bool initialized_ = false;
};

}  // namespace flexcomm
