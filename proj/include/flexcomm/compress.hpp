#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "flexcomm/core.hpp"

namespace flexcomm {

struct CompressionRatio {
    double c = 1.0;

    CompressionRatio() = default;
    explicit CompressionRatio(double value) : c(value) {
        if (!(c > 0.0 && c <= 1.0)) {
            throw std::invalid_argument("compression ratio must be in (0, 1]");
        }
    }
};

// k = ceil(c * G), nudged so exactly-representable products (e.g. 0.1 * 10)
// do not round up one element too many.
inline std::size_t k_of(CompressionRatio c, std::size_t g) {
    if (g == 0) throw std::invalid_argument("empty gradient (G == 0)");
    double raw = std::ceil(c.c * static_cast<double>(g) - 1e-9);
    auto k = static_cast<std::size_t>(raw);
    return std::min(std::max<std::size_t>(k, 1), g);
}

namespace detail {

// Largest-|value| order; equal magnitudes keep the lower index.
inline void select_topk_indices(const std::vector<double>& v, std::size_t begin,
                                std::size_t end, std::size_t k,
                                std::vector<std::size_t>& out) {
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    auto cmp = [&](std::size_t a, std::size_t b) {
        double ma = std::fabs(v[a]), mb = std::fabs(v[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     idx.end(), cmp);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    out.insert(out.end(), idx.begin(), idx.end());
}

}  // namespace detail

inline SparseGrad topk_exact(const DenseGrad& g, CompressionRatio c) {
    std::size_t k = k_of(c, g.size());
    SparseGrad out;
    out.total_len = g.size();
    detail::select_topk_indices(g.values, 0, g.size(), k, out.indices);
    out.values.reserve(k);
    for (std::size_t i : out.indices) out.values.push_back(g.values[i]);
    return out;
}

inline SparseGrad topk_layerwise(const DenseGrad& g, CompressionRatio c) {
    if (g.layer_map.empty()) return topk_exact(g, c);
    SparseGrad out;
    out.total_len = g.size();
    for (const auto& layer : g.layer_map) {
        std::size_t k = k_of(c, layer.length);
        detail::select_topk_indices(g.values, layer.offset, layer.offset + layer.length,
                                    k, out.indices);
    }
    out.values.reserve(out.indices.size());
    for (std::size_t i : out.indices) out.values.push_back(g.values[i]);
    return out;
}

// Bisects a magnitude threshold in [0, max|g|] so that the number of
// elements at or above it approximates k. Stops early on an exact hit.
inline SparseGrad topk_threshold(const DenseGrad& g, CompressionRatio c, int rounds = 25) {
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    std::size_t k = k_of(c, g.size());
    double hi = 0.0;
    for (double x : g.values) hi = std::max(hi, std::fabs(x));
    double lo = 0.0;
    double t = 0.0;
    for (int r = 0; r < rounds; ++r) {
        t = (lo + hi) / 2.0;
        std::size_t count = 0;
        for (double x : g.values) {
            if (std::fabs(x) >= t) ++count;
        }
        if (count == k) break;
        if (count > k) {
            lo = t;
        } else {
            hi = t;
        }
    }
    SparseGrad out;
    out.total_len = g.size();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::fabs(g.values[i]) >= t) {
            out.indices.push_back(i);
            out.values.push_back(g.values[i]);
        }
    }
    return out;
}

inline DenseGrad error_feedback(const DenseGrad& g_o, const ResidualStore& store, int worker) {
    const auto& res = store.of(worker);
    if (res.size() != g_o.size()) throw std::invalid_argument("residual length mismatch");
    DenseGrad g_e = g_o;
    for (std::size_t i = 0; i < g_e.size(); ++i) g_e.values[i] += res[i];
    return g_e;
}

inline std::vector<double> residual_update(const DenseGrad& g_e, const SparseGrad& g_c) {
    validate(g_c);
    if (g_c.total_len != g_e.size()) throw std::invalid_argument("residual length mismatch");
    std::vector<double> res = g_e.values;
    for (std::size_t i = 0; i < g_c.indices.size(); ++i) {
        res[g_c.indices[i]] -= g_c.values[i];
    }
    return res;
}

inline double squared_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double compression_gain(const DenseGrad& g_e, const SparseGrad& g_c) {
    double denom = squared_norm(g_e.values);
    if (denom == 0.0) throw std::runtime_error("degenerate gradient");
    return squared_norm(g_c.values) / denom;
}

// Rolling mean of per-step gain samples over a fixed window.
struct GainTracker {
    std::size_t window = 50;
    std::deque<double> samples;

    explicit GainTracker(std::size_t w = 50) : window(w) {
        if (window == 0) throw std::invalid_argument("window must be positive");
    }

    void push(double gain) {
        samples.push_back(gain);
        if (samples.size() > window) samples.pop_front();
    }

    std::size_t count() const { return samples.size(); }

    double mean() const {
        if (samples.empty()) throw std::runtime_error("no gain samples");
        return std::accumulate(samples.begin(), samples.end(), 0.0) /
               static_cast<double>(samples.size());
    }
};

}  // namespace flexcomm
