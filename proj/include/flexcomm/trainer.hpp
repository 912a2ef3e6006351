#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "flexcomm/artopk.hpp"
#include "flexcomm/collectives.hpp"
#include "flexcomm/compress.hpp"
#include "flexcomm/core.hpp"
#include "flexcomm/costmodel.hpp"
#include "flexcomm/model.hpp"
#include "flexcomm/netsched.hpp"

namespace flexcomm {

enum class SyncMode { Dense, AG, STAR, VAR };

inline SyncMode sync_mode_from_string(const std::string& s) {
    if (s == "DENSE" || s == "dense") return SyncMode::Dense;
    if (s == "AG" || s == "ag") return SyncMode::AG;
    if (s == "STAR" || s == "star") return SyncMode::STAR;
    if (s == "VAR" || s == "var") return SyncMode::VAR;
    throw std::invalid_argument("unknown sync mode: " + s);
}

struct DecayPoint {
    long epoch = 0;
    double factor = 1.0;
};

struct TrainConfig {
    double eta = 0.1;
    int batch = 32;
    long epochs = 5;
    std::vector<DecayPoint> decay;
    double momentum = 0.0;
    int n = 4;
    std::uint64_t seed = 42;
    std::size_t samples_per_worker = 500;

    ModelKind model_kind = ModelKind::SoftmaxRegression;
    int features = 20;
    int hidden = 16;
    int classes = 5;
    double size_bytes_override = 0.0;  // 0: use 4 bytes per parameter

    CompressorKind compressor = CompressorKind::Exact;
    double c = 1.0;
    bool adaptive = false;
    SyncMode mode = SyncMode::STAR;
    ReduceAlgo reduce_algo = ReduceAlgo::Ring;
    ReduceOp reduce_op = ReduceOp::Avg;
    bool error_feedback = true;
    int threshold_rounds = 25;
    std::size_t gain_window = 50;

    double t_io = 0.0;
    double net_change_threshold = 0.0;
    bool timing_measured = false;  // default: deterministic timing model
    int threads = 1;

    void validate() const {
        if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
        if (batch < 1) throw std::invalid_argument("batch must be >= 1");
        if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
        if (n < 1) throw std::invalid_argument("worker count must be >= 1");
        if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("compression ratio out of (0,1]");
        if (t_io < 0.0) throw std::invalid_argument("t_io must be >= 0");
        if (static_cast<std::size_t>(batch) > samples_per_worker) {
            throw std::invalid_argument("batch larger than worker shard");
        }
    }
};

struct StepMetrics {
    long step = 0;
    double loss = 0.0;
    double t_compute = 0.0;
    double t_comp_decomp = 0.0;
    double t_sync = 0.0;
    double t_io = 0.0;
    double t_step = 0.0;
    double gain = 1.0;
    double cr_used = 1.0;
    std::string collective_used;
    int selected_rank = -1;
};

// Deterministic per-element cost constants for the simulated timing model.
inline constexpr double kComputeSecondsPerMac = 1.0e-9;
inline constexpr double kCompressSecondsPerElem = 0.5e-9;

class Trainer {
public:
    Trainer(TrainConfig cfg, NetworkSchedule sched) : cfg_(cfg), sched_(std::move(sched)) {
        cfg_.validate();
        sched_.validate();
        rng_.seed(cfg_.seed);
        SmallModel proto(cfg_.model_kind, cfg_.features, cfg_.hidden, cfg_.classes);
        proto.init(rng_);
        replicas_.assign(static_cast<std::size_t>(cfg_.n), proto);
        residuals_ = ResidualStore(cfg_.n, proto.param_count());
        velocity_.assign(proto.param_count(), 0.0);
        data_ = SyntheticDataset::make_blobs(cfg_.n, cfg_.samples_per_worker, cfg_.features,
                                             cfg_.classes, cfg_.seed + 1);
        steps_per_epoch_ = std::max<long>(
            1, static_cast<long>(cfg_.samples_per_worker / static_cast<std::size_t>(cfg_.batch)));
        eta_current_ = cfg_.eta;
        current_c_ = cfg_.c;
        current_collective_ = initial_collective();
        tracker_ = GainTracker(cfg_.gain_window);
        orders_.assign(static_cast<std::size_t>(cfg_.n), {});
    }

    long steps_per_epoch() const { return steps_per_epoch_; }
    long total_steps() const { return cfg_.epochs * steps_per_epoch_; }
    long step_index() const { return step_index_; }
    long epoch_of(long step) const { return step / steps_per_epoch_; }
    std::size_t grad_len() const { return replicas_.front().param_count(); }

    // Emulated dense gradient size in bytes for cost-model purposes.
    double m_eff() const {
        return cfg_.size_bytes_override > 0.0 ? cfg_.size_bytes_override
                                              : 4.0 * static_cast<double>(grad_len());
    }
    double payload_scale() const { return m_eff() / (4.0 * static_cast<double>(grad_len())); }

    NetParams net_at_step(long step) const { return params_at(sched_, epoch_of(step)); }

    const TrainConfig& config() const { return cfg_; }
    const SmallModel& model() const { return replicas_.front(); }
    const SyntheticDataset& dataset() const { return data_; }
    SimClock& clock() { return clock_; }
    const SimClock& clock() const { return clock_; }
    GainTracker& gain_tracker() { return tracker_; }
    SelectionLog& selection_log() { return selection_; }
    const std::vector<StepMetrics>& metrics() const { return metrics_; }

    double current_c() const { return current_c_; }
    Collective current_collective() const { return current_collective_; }
    void set_compression(double c, Collective collective) {
        if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("compression ratio out of (0,1]");
        if (c != current_c_) tracker_ = GainTracker(cfg_.gain_window);
        current_c_ = c;
        current_collective_ = collective;
    }

    bool probe_mode() const { return probe_mode_; }
    void set_probe_mode(bool on) { probe_mode_ = on; }

    // Full trajectory state for checkpoint-restore exploration.
    struct Snapshot {
        std::vector<SmallModel> replicas;
        ResidualStore residuals;
        std::vector<double> velocity;
        std::mt19937_64 rng;
        GainTracker tracker;
        long step_index = 0;
        std::vector<std::vector<std::size_t>> orders;
        double eta_current = 0.0;
        double current_c = 1.0;
        Collective current_collective = Collective::AG;
    };

    Snapshot snapshot() const {
        return {replicas_, residuals_, velocity_,   rng_,       tracker_,
                step_index_, orders_,   eta_current_, current_c_, current_collective_};
    }

    void restore(const Snapshot& s) {
        replicas_ = s.replicas;
        residuals_ = s.residuals;
        velocity_ = s.velocity;
        rng_ = s.rng;
        tracker_ = s.tracker;
        step_index_ = s.step_index;
        orders_ = s.orders;
        eta_current_ = s.eta_current;
        current_c_ = s.current_c;
        current_collective_ = s.current_collective;
    }

    // Runs one synchronous training step and advances the trajectory.
    StepMetrics step() {
        if (step_index_ % steps_per_epoch_ == 0) prepare_epoch(epoch_of(step_index_));
        const long epoch = epoch_of(step_index_);
        const NetParams net = params_at(sched_, epoch);
        const std::size_t g = grad_len();
        const int n = cfg_.n;

        StepMetrics m;
        m.step = step_index_;
        m.cr_used = effective_c();
        m.t_io = cfg_.t_io;

        // local gradient computation on every worker replica
        std::vector<DenseGrad> grads(static_cast<std::size_t>(n));
        std::vector<double> losses(static_cast<std::size_t>(n), 0.0);
        auto wall0 = std::chrono::steady_clock::now();
        auto compute_one = [&](int r) {
            Batch batch = minibatch(r);
            auto res = compute_grad(replicas_[static_cast<std::size_t>(r)], batch);
            grads[static_cast<std::size_t>(r)] = std::move(res.grad);
            losses[static_cast<std::size_t>(r)] = res.loss;
        };
        if (cfg_.threads > 1 && n > 1) {
            std::vector<std::thread> pool;
            for (int r = 0; r < n; ++r) pool.emplace_back(compute_one, r);
            for (auto& t : pool) t.join();
        } else {
            for (int r = 0; r < n; ++r) compute_one(r);
        }
        auto wall1 = std::chrono::steady_clock::now();
        m.loss = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
        if (!std::isfinite(m.loss)) {
            throw std::runtime_error("training diverged: non-finite loss at step " +
                                     std::to_string(step_index_));
        }
        m.t_compute = cfg_.timing_measured
                          ? std::chrono::duration<double>(wall1 - wall0).count()
                          : kComputeSecondsPerMac * static_cast<double>(cfg_.batch) *
                                static_cast<double>(g);

        Cluster cluster(n, net, &clock_);
        cluster.charge_category = probe_mode_ ? Category::Exploration : Category::Sync;
        double sync_before = clock_.of(cluster.charge_category);

        DenseGrad aggregate;
        double gain = 1.0;
        CompressionRatio cr(effective_c());
        if (effective_mode() == SyncMode::Dense) {
            std::vector<std::vector<double>> dense(static_cast<std::size_t>(n));
            for (int r = 0; r < n; ++r) dense[static_cast<std::size_t>(r)] = grads[static_cast<std::size_t>(r)].values;
            aggregate.values = allreduce(cluster, dense, cfg_.reduce_op, cfg_.reduce_algo, m_eff());
            m.collective_used = cfg_.reduce_algo == ReduceAlgo::Ring ? "RING_AR" : "TREE_AR";
        } else if (effective_mode() == SyncMode::AG) {
            aggregate = ag_step_with_gain(cluster, grads, cr, &gain);
            m.collective_used = "AG";
        } else {
            SelectionMode sel = effective_mode() == SyncMode::VAR ? SelectionMode::VAR
                                                                  : SelectionMode::STAR;
            ReduceAlgo algo = current_collective_ == Collective::ART_TREE ? ReduceAlgo::Tree
                                                                          : cfg_.reduce_algo;
            if (current_collective_ == Collective::ART_RING) algo = ReduceAlgo::Ring;
            auto result = artopk_with_gain(cluster, grads, cr, sel, algo, &gain);
            aggregate = std::move(result.aggregate);
            m.selected_rank = result.selected_rank;
            m.collective_used = algo == ReduceAlgo::Ring ? "ART_RING" : "ART_TREE";
        }
        m.t_sync = clock_.of(cluster.charge_category) - sync_before;
        m.gain = gain;
        tracker_.push(gain);

        m.t_comp_decomp = compression_time(cr);
        charge(Category::Compression, m.t_comp_decomp);
        charge(Category::Compute, m.t_compute);
        charge(Category::Io, m.t_io);
        m.t_step = m.t_compute + m.t_sync + m.t_io + m.t_comp_decomp;

        if (!cfg_.error_feedback) {
            for (auto& res : residuals_.residual) std::fill(res.begin(), res.end(), 0.0);
        }

        apply_update(aggregate);
        if (step_index_ % 100 == 0) check_replicas_identical();
        ++step_index_;
        return m;
    }

    // Main loop; the hook runs before each step so a controller can adjust
    // compression before the step executes.
    using StepHook = std::function<void(Trainer&, long step, long epoch, const NetParams&)>;

    void run(const StepHook& hook = {}) {
        const long total = total_steps();
        while (step_index_ < total) {
            if (hook) hook(*this, step_index_, epoch_of(step_index_), net_at_step(step_index_));
            metrics_.push_back(step());
        }
    }

    double train_accuracy() const { return accuracy(replicas_.front(), data_.all); }

    void check_replicas_identical() const {
        const auto& ref = replicas_.front().params;
        for (const auto& rep : replicas_) {
            if (rep.params != ref) throw std::runtime_error("worker replicas diverged");
        }
    }

private:
    SyncMode effective_mode() const {
        if (!cfg_.adaptive) return cfg_.mode;
        if (current_collective_ == Collective::AG) return SyncMode::AG;
        return cfg_.mode == SyncMode::VAR ? SyncMode::VAR : SyncMode::STAR;
    }

    double effective_c() const { return cfg_.adaptive ? current_c_ : cfg_.c; }

    Collective initial_collective() const {
        switch (cfg_.mode) {
            case SyncMode::AG: return Collective::AG;
            default:
                return cfg_.reduce_algo == ReduceAlgo::Ring ? Collective::ART_RING
                                                            : Collective::ART_TREE;
        }
    }

    void charge(Category cat, double seconds) {
        clock_.charge(probe_mode_ ? Category::Exploration : cat, seconds);
    }

    void prepare_epoch(long epoch) {
        for (const auto& d : cfg_.decay) {
            if (d.epoch == epoch && epoch > 0) eta_current_ *= d.factor;
        }
        for (int r = 0; r < cfg_.n; ++r) {
            auto& ord = orders_[static_cast<std::size_t>(r)];
            ord.resize(cfg_.samples_per_worker);
            std::iota(ord.begin(), ord.end(), data_.shards[static_cast<std::size_t>(r)].first);
            std::shuffle(ord.begin(), ord.end(), rng_);
        }
    }

    Batch minibatch(int r) const {
        const auto& ord = orders_[static_cast<std::size_t>(r)];
        auto pos = static_cast<std::size_t>(step_index_ % steps_per_epoch_) *
                   static_cast<std::size_t>(cfg_.batch);
        Batch batch;
        batch.reserve(static_cast<std::size_t>(cfg_.batch));
        for (int i = 0; i < cfg_.batch; ++i) batch.push_back(&data_.all[ord[pos + static_cast<std::size_t>(i)]]);
        return batch;
    }

    // Simulated compression plus decompression cost at the emulated size:
    // max-heap selection over G elements, O(G + k log G).
    double compression_time(CompressionRatio cr) const {
        if (effective_mode() == SyncMode::Dense) return 0.0;
        double g_eff = m_eff() / 4.0;
        double k_eff = std::ceil(cr.c * g_eff);
        double lg = std::log2(g_eff + 1.0);
        switch (cfg_.compressor) {
            case CompressorKind::Threshold:
                return kCompressSecondsPerElem * static_cast<double>(cfg_.threshold_rounds) * g_eff;
            case CompressorKind::Layerwise:
            case CompressorKind::Exact:
                return kCompressSecondsPerElem * (g_eff + k_eff * lg);
        }
        return 0.0;
    }

    DenseGrad ag_step_with_gain(const Cluster& cluster, const std::vector<DenseGrad>& g_o,
                                CompressionRatio cr, double* gain_out) {
        double gain_sum = 0.0;
        for (int r = 0; r < cfg_.n; ++r) {
            auto g_e = error_feedback(g_o[static_cast<std::size_t>(r)], residuals_, r);
            auto g_c = run_compressor(g_e, cr, cfg_.compressor, cfg_.threshold_rounds);
            gain_sum += compression_gain(g_e, g_c);
        }
        *gain_out = gain_sum / cfg_.n;
        return ag_step(cluster, g_o, residuals_, cr, cfg_.compressor, payload_scale(),
                       cfg_.threshold_rounds);
    }

    ArtopkResult artopk_with_gain(const Cluster& cluster, const std::vector<DenseGrad>& g_o,
                                  CompressionRatio cr, SelectionMode sel, ReduceAlgo algo,
                                  double* gain_out) {
        std::vector<double> ge_norms(static_cast<std::size_t>(cfg_.n));
        std::vector<DenseGrad> g_e(static_cast<std::size_t>(cfg_.n));
        for (int r = 0; r < cfg_.n; ++r) {
            g_e[static_cast<std::size_t>(r)] = error_feedback(g_o[static_cast<std::size_t>(r)], residuals_, r);
            ge_norms[static_cast<std::size_t>(r)] = squared_norm(g_e[static_cast<std::size_t>(r)].values);
        }
        auto result = artopk_step(cluster, g_o, residuals_, cr, sel, algo, step_index_,
                                  probe_mode_ ? nullptr : &selection_, cfg_.reduce_op,
                                  payload_scale());
        // per-worker kept values are g_e minus the post-step residual
        double gain_sum = 0.0;
        for (int r = 0; r < cfg_.n; ++r) {
            double kept = ge_norms[static_cast<std::size_t>(r)] -
                          squared_norm(residuals_.of(r));
            if (ge_norms[static_cast<std::size_t>(r)] <= 0.0) {
                throw std::runtime_error("degenerate gradient");
            }
            gain_sum += std::clamp(kept / ge_norms[static_cast<std::size_t>(r)], 0.0, 1.0);
        }
        *gain_out = gain_sum / cfg_.n;
        return result;
    }

    void apply_update(const DenseGrad& aggregate) {
        const std::vector<double>* upd = &aggregate.values;
        if (cfg_.momentum > 0.0) {
            for (std::size_t i = 0; i < velocity_.size(); ++i) {
                velocity_[i] = cfg_.momentum * velocity_[i] + aggregate.values[i];
            }
            upd = &velocity_;
        }
        for (auto& rep : replicas_) {
            for (std::size_t i = 0; i < rep.params.size(); ++i) {
                rep.params[i] -= eta_current_ * (*upd)[i];
            }
        }
    }

    TrainConfig cfg_;
    NetworkSchedule sched_;
    SyntheticDataset data_;
    std::vector<SmallModel> replicas_;
    ResidualStore residuals_;
    std::vector<double> velocity_;
    std::mt19937_64 rng_;
    GainTracker tracker_{50};
    SimClock clock_;
    SelectionLog selection_;
    std::vector<StepMetrics> metrics_;
    std::vector<std::vector<std::size_t>> orders_;
    long steps_per_epoch_ = 1;
    long step_index_ = 0;
    double eta_current_ = 0.1;
    double current_c_ = 1.0;
    Collective current_collective_ = Collective::AG;
    bool probe_mode_ = false;
};

}  // namespace flexcomm
