#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "flexcomm/collectives.hpp"
#include "flexcomm/compress.hpp"
#include "flexcomm/core.hpp"

namespace flexcomm {

enum class SelectionMode { STAR, VAR };

struct SelectionLog {
    std::vector<std::pair<long, int>> entries;  // (step, chosen rank)
    std::vector<long> counts;

    void record(long step, int rank, int n) {
        if (counts.empty()) counts.assign(static_cast<std::size_t>(n), 0);
        entries.emplace_back(step, rank);
        counts.at(static_cast<std::size_t>(rank))++;
    }
};

// Round-robin (staleness-based) selection.
inline int select_star(long step, int n) {
    if (n < 1) throw std::invalid_argument("worker count must be >= 1");
    return static_cast<int>(step % n);
}

// Variance-based selection: allgather the squared norms of the compressed
// local values (N 4-byte floats on the wire) and pick the argmax, ties to
// the lowest rank.
inline int select_var(const Cluster& cluster, const std::vector<SparseGrad>& local_sparse) {
    if (local_sparse.size() != static_cast<std::size_t>(cluster.n)) {
        throw std::invalid_argument("select_var: payload count != worker count");
    }
    std::vector<double> norms;
    norms.reserve(local_sparse.size());
    for (const auto& s : local_sparse) norms.push_back(squared_norm(s.values));
    auto all = allgather(cluster, norms, 4.0 * cluster.n);
    int best = 0;
    for (int r = 1; r < cluster.n; ++r) {
        if (all[static_cast<std::size_t>(r)] > all[static_cast<std::size_t>(best)]) best = r;
    }
    return best;
}

struct ArtopkResult {
    DenseGrad aggregate;
    int selected_rank = 0;
};

// One AR-Topk aggregation step. Per worker: error feedback, local top-k;
// one worker's index set is broadcast, every worker contributes its own
// error-fed values at those indices, residuals are taken before reduction,
// and the k values are allreduced with the chosen algorithm.
// `payload_scale` inflates charged gradient payload bytes when emulating a
// larger model than the one actually trained; control messages (the VAR
// norm exchange) are never scaled.
inline ArtopkResult artopk_step(const Cluster& cluster, const std::vector<DenseGrad>& g_o,
                                ResidualStore& residuals, CompressionRatio c,
                                SelectionMode mode, ReduceAlgo algo, long step,
                                SelectionLog* log = nullptr, ReduceOp op = ReduceOp::Avg,
                                double payload_scale = 1.0) {
    const int n = cluster.n;
    if (g_o.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("artopk_step: gradient count != worker count");
    }
    const std::size_t g_len = g_o.front().size();

    std::vector<DenseGrad> g_e(static_cast<std::size_t>(n));
    std::vector<SparseGrad> local(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        if (g_o[static_cast<std::size_t>(r)].size() != g_len) {
            throw std::invalid_argument("artopk_step: gradient length mismatch");
        }
        g_e[static_cast<std::size_t>(r)] = error_feedback(g_o[static_cast<std::size_t>(r)], residuals, r);
        local[static_cast<std::size_t>(r)] = topk_exact(g_e[static_cast<std::size_t>(r)], c);
    }

    int selected = mode == SelectionMode::STAR ? select_star(step, n)
                                               : select_var(cluster, local);
    if (log) log->record(step, selected, n);

    const std::size_t k = local[static_cast<std::size_t>(selected)].indices.size();
    const double wire_bytes = 4.0 * static_cast<double>(k) * payload_scale;
    auto indices = broadcast(cluster, selected, local[static_cast<std::size_t>(selected)].indices,
                             wire_bytes);

    std::vector<std::vector<double>> contributions(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        auto& ge = g_e[static_cast<std::size_t>(r)];
        auto& contrib = contributions[static_cast<std::size_t>(r)];
        contrib.reserve(k);
        for (std::size_t idx : indices) contrib.push_back(ge.values[idx]);
        // Residual before reduction: zero at broadcast indices, g_e elsewhere.
        auto& res = residuals.of(r);
        res = ge.values;
        for (std::size_t idx : indices) res[idx] = 0.0;
    }

    auto reduced = allreduce(cluster, contributions, op, algo, wire_bytes);

    SparseGrad agg;
    agg.total_len = g_len;
    agg.indices.assign(indices.begin(), indices.end());
    agg.values = std::move(reduced);
    return {densify(agg), selected};
}

enum class CompressorKind { Exact, Layerwise, Threshold };

inline SparseGrad run_compressor(const DenseGrad& g, CompressionRatio c, CompressorKind kind,
                                 int threshold_rounds = 25) {
    switch (kind) {
        case CompressorKind::Exact: return topk_exact(g, c);
        case CompressorKind::Layerwise: return topk_layerwise(g, c);
        case CompressorKind::Threshold: return topk_threshold(g, c, threshold_rounds);
    }
    throw std::logic_error("unknown compressor");
}

// Allgather-based aggregation path: every worker ships its own compressed
// (values, indices) pair; the aggregate averages contributions by N at
// every touched index.
inline DenseGrad ag_step(const Cluster& cluster, const std::vector<DenseGrad>& g_o,
                         ResidualStore& residuals, CompressionRatio c,
                         CompressorKind compressor = CompressorKind::Exact,
                         double payload_scale = 1.0, int threshold_rounds = 25) {
    const int n = cluster.n;
    if (g_o.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("ag_step: gradient count != worker count");
    }
    const std::size_t g_len = g_o.front().size();

    std::vector<SparseGrad> compressed(static_cast<std::size_t>(n));
    std::size_t max_k = 0;
    for (int r = 0; r < n; ++r) {
        auto g_e = error_feedback(g_o[static_cast<std::size_t>(r)], residuals, r);
        compressed[static_cast<std::size_t>(r)] = run_compressor(g_e, c, compressor, threshold_rounds);
        residuals.of(r) = residual_update(g_e, compressed[static_cast<std::size_t>(r)]);
        max_k = std::max(max_k, compressed[static_cast<std::size_t>(r)].nnz());
    }

    // Values plus indices: 2 * 4k bytes per worker.
    const double wire_bytes = 2.0 * 4.0 * static_cast<double>(max_k) * payload_scale;
    auto all = allgather(cluster, compressed, wire_bytes);

    DenseGrad agg;
    agg.values.assign(g_len, 0.0);
    agg.layer_map.push_back({"L0", 0, g_len});
    for (const auto& s : all) {
        for (std::size_t i = 0; i < s.indices.size(); ++i) {
            agg.values[s.indices[i]] += s.values[i];
        }
    }
    for (double& x : agg.values) x /= static_cast<double>(n);
    return agg;
}

}  // namespace flexcomm
