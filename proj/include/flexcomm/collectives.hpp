#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "flexcomm/costmodel.hpp"
#include "flexcomm/netsched.hpp"

namespace flexcomm {

// N logical workers driven by a single coordinator. Collectives move data
// between worker state vectors and charge the simulated clock with the
// analytic cost of the payload size they carry.
struct Cluster {
    int n = 1;
    NetParams net;
    SimClock* clock = nullptr;
    Category charge_category = Category::Sync;

    Cluster(int workers, NetParams net_params, SimClock* clk)
        : n(workers), net(net_params), clock(clk) {
        if (n < 1) throw std::invalid_argument("worker count must be >= 1");
    }

    void charge(double seconds) const {
        if (clock) clock->charge(charge_category, seconds);
    }

    MessageSpec msg(double payload_bytes) const {
        return MessageSpec(std::max(payload_bytes, 4.0), 1.0, n);
    }
};

enum class ReduceOp { Sum, Avg };
enum class ReduceAlgo { Ring, Tree };

// Every worker receives the rank-ordered list of all per-worker payloads.
template <typename T>
std::vector<T> allgather(const Cluster& cluster, const std::vector<T>& per_worker,
                         double payload_bytes) {
    if (per_worker.size() != static_cast<std::size_t>(cluster.n)) {
        throw std::invalid_argument("allgather: payload count != worker count");
    }
    if constexpr (requires(const T& t) { t.size(); }) {
        for (const auto& p : per_worker) {
            if (p.size() != per_worker.front().size()) {
                throw std::invalid_argument("allgather: unequal payload sizes");
            }
        }
    }
    if (cluster.n > 1) {
        cluster.charge(cost_allgather_dense(cluster.net, cluster.msg(payload_bytes)));
    }
    return per_worker;
}

template <typename T>
T broadcast(const Cluster& cluster, int src, const T& payload, double payload_bytes) {
    if (src < 0 || src >= cluster.n) throw std::invalid_argument("broadcast: bad source rank");
    if (cluster.n > 1) {
        cluster.charge(cost_broadcast(cluster.net, cluster.msg(payload_bytes)));
    }
    return payload;
}

// Reduction is computed once in rank-ascending order, so the result is
// bit-identical on every worker and across algo choices; the algo only
// decides the charged time.
inline std::vector<double> allreduce(const Cluster& cluster,
                                     const std::vector<std::vector<double>>& per_worker,
                                     ReduceOp op, ReduceAlgo algo, double payload_bytes) {
    if (per_worker.size() != static_cast<std::size_t>(cluster.n)) {
        throw std::invalid_argument("allreduce: payload count != worker count");
    }
    for (const auto& p : per_worker) {
        if (p.size() != per_worker.front().size()) {
            throw std::invalid_argument("allreduce: unequal vector lengths");
        }
    }
    std::vector<double> out = per_worker.front();
    for (std::size_t r = 1; r < per_worker.size(); ++r) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += per_worker[r][i];
    }
    if (op == ReduceOp::Avg) {
        for (double& x : out) x /= static_cast<double>(cluster.n);
    }
    if (cluster.n > 1) {
        auto m = cluster.msg(payload_bytes);
        cluster.charge(algo == ReduceAlgo::Ring ? cost_ring_ar(cluster.net, m)
                                                : cost_tree_ar(cluster.net, m));
    }
    return out;
}

}  // namespace flexcomm
