#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexcomm {

struct LayerSpan {
    std::string name;
    std::size_t offset = 0;
    std::size_t length = 0;
};

// Flat gradient/parameter vector with a layer partition of [0, G).
struct DenseGrad {
    std::vector<double> values;
    std::vector<LayerSpan> layer_map;

    std::size_t size() const { return values.size(); }
};

// Compressed gradient as parallel (index, value) arrays. Indices are
// strictly ascending and unique, each in [0, total_len).
struct SparseGrad {
    std::vector<std::size_t> indices;
    std::vector<double> values;
    std::size_t total_len = 0;

    std::size_t nnz() const { return indices.size(); }
};

inline void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::runtime_error(std::string("non-finite value in ") + what);
        }
    }
}

inline void validate(const SparseGrad& s) {
    if (s.total_len == 0) throw std::invalid_argument("empty gradient (G == 0)");
    if (s.indices.size() != s.values.size()) {
        throw std::invalid_argument("sparse index/value length mismatch");
    }
    for (std::size_t i = 0; i < s.indices.size(); ++i) {
        if (s.indices[i] >= s.total_len) throw std::out_of_range("index out of range");
        if (i > 0 && s.indices[i] <= s.indices[i - 1]) {
            throw std::invalid_argument("sparse indices not strictly ascending");
        }
    }
}

inline DenseGrad flatten(const std::vector<std::vector<double>>& layer_grads,
                         const std::vector<std::string>& names = {}) {
    if (layer_grads.empty()) throw std::invalid_argument("no layers");
    DenseGrad out;
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layer_grads.size(); ++l) {
        const auto& g = layer_grads[l];
        check_finite(g, "layer gradient");
        std::string name = l < names.size() ? names[l] : "L" + std::to_string(l);
        out.layer_map.push_back({std::move(name), offset, g.size()});
        out.values.insert(out.values.end(), g.begin(), g.end());
        offset += g.size();
    }
    return out;
}

inline DenseGrad densify(const SparseGrad& s) {
    validate(s);
    DenseGrad out;
    out.values.assign(s.total_len, 0.0);
    for (std::size_t i = 0; i < s.indices.size(); ++i) {
        out.values[s.indices[i]] = s.values[i];
    }
    out.layer_map.push_back({"L0", 0, s.total_len});
    return out;
}

// One residual vector of length G per logical worker, all-zero at step 0.
struct ResidualStore {
    std::vector<std::vector<double>> residual;

    ResidualStore() = default;
    ResidualStore(int workers, std::size_t g)
        : residual(static_cast<std::size_t>(workers), std::vector<double>(g, 0.0)) {}

    std::vector<double>& of(int worker) { return residual.at(static_cast<std::size_t>(worker)); }
    const std::vector<double>& of(int worker) const {
        return residual.at(static_cast<std::size_t>(worker));
    }
};

}  // namespace flexcomm
