#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexcomm/core.hpp"

namespace flexcomm {

struct Sample {
    std::vector<double> x;
    int label = 0;
};

using Batch = std::vector<const Sample*>;

enum class ModelKind { SoftmaxRegression, Mlp1Hidden };

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "softmax_regression") return ModelKind::SoftmaxRegression;
    if (s == "mlp_1hidden") return ModelKind::Mlp1Hidden;
    throw std::invalid_argument("unknown model kind: " + s);
}

// Hand-differentiated classifiers small enough that the gradient can be
// cross-checked against finite differences.
struct SmallModel {
    ModelKind kind = ModelKind::SoftmaxRegression;
    int features = 0;
    int hidden = 0;
    int classes = 0;
    std::vector<double> params;

    SmallModel() = default;
    SmallModel(ModelKind k, int f, int h, int c) : kind(k), features(f), hidden(h), classes(c) {
        if (f < 1 || c < 2) throw std::invalid_argument("bad model dims");
        if (k == ModelKind::Mlp1Hidden && h < 1) throw std::invalid_argument("bad hidden dim");
        params.assign(param_count(), 0.0);
    }

    std::size_t param_count() const {
        auto f = static_cast<std::size_t>(features);
        auto h = static_cast<std::size_t>(hidden);
        auto c = static_cast<std::size_t>(classes);
        if (kind == ModelKind::SoftmaxRegression) return c * f + c;
        return h * f + h + c * h + c;
    }

    std::vector<LayerSpan> layer_map() const {
        auto f = static_cast<std::size_t>(features);
        auto h = static_cast<std::size_t>(hidden);
        auto c = static_cast<std::size_t>(classes);
        if (kind == ModelKind::SoftmaxRegression) {
            return {{"w", 0, c * f}, {"b", c * f, c}};
        }
        std::size_t o = 0;
        std::vector<LayerSpan> m;
        m.push_back({"w1", o, h * f}); o += h * f;
        m.push_back({"b1", o, h}); o += h;
        m.push_back({"w2", o, c * h}); o += c * h;
        m.push_back({"b2", o, c});
        return m;
    }

    void init(std::mt19937_64& rng, double scale = 0.1) {
        if (kind == ModelKind::SoftmaxRegression) {
            std::fill(params.begin(), params.end(), 0.0);
            return;
        }
        std::normal_distribution<double> dist(0.0, scale);
        for (double& p : params) p = dist(rng);
    }
};

namespace detail {

inline void softmax_inplace(std::vector<double>& z) {
    double zmax = z.front();
    for (double v : z) zmax = std::max(zmax, v);
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

}  // namespace detail

struct GradResult {
    double loss = 0.0;
    DenseGrad grad;
};

// Mean cross-entropy loss and its exact analytic gradient over a minibatch.
inline GradResult compute_grad(const SmallModel& m, const Batch& batch) {
    if (batch.empty()) throw std::invalid_argument("empty minibatch");
    const auto f = static_cast<std::size_t>(m.features);
    const auto c = static_cast<std::size_t>(m.classes);
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    GradResult out;
    out.grad.values.assign(m.param_count(), 0.0);
    out.grad.layer_map = m.layer_map();

    if (m.kind == ModelKind::SoftmaxRegression) {
        const double* w = m.params.data();          // c x f
        const double* b = m.params.data() + c * f;  // c
        double* dw = out.grad.values.data();
        double* db = out.grad.values.data() + c * f;
        std::vector<double> z(c);
        for (const Sample* s : batch) {
            for (std::size_t j = 0; j < c; ++j) {
                double dot = b[j];
                for (std::size_t i = 0; i < f; ++i) dot += w[j * f + i] * s->x[i];
                z[j] = dot;
            }
            detail::softmax_inplace(z);
            out.loss -= std::log(std::max(z[static_cast<std::size_t>(s->label)], 1e-300));
            for (std::size_t j = 0; j < c; ++j) {
                double delta = z[j] - (static_cast<int>(j) == s->label ? 1.0 : 0.0);
                for (std::size_t i = 0; i < f; ++i) dw[j * f + i] += delta * s->x[i] * inv_b;
                db[j] += delta * inv_b;
            }
        }
    } else {
        const auto h = static_cast<std::size_t>(m.hidden);
        const double* w1 = m.params.data();
        const double* b1 = w1 + h * f;
        const double* w2 = b1 + h;
        const double* b2 = w2 + c * h;
        double* dw1 = out.grad.values.data();
        double* db1 = dw1 + h * f;
        double* dw2 = db1 + h;
        double* db2 = dw2 + c * h;
        std::vector<double> a(h), z(c), dh(h);
        for (const Sample* s : batch) {
            for (std::size_t j = 0; j < h; ++j) {
                double dot = b1[j];
                for (std::size_t i = 0; i < f; ++i) dot += w1[j * f + i] * s->x[i];
                a[j] = std::tanh(dot);
            }
            for (std::size_t j = 0; j < c; ++j) {
                double dot = b2[j];
                for (std::size_t i = 0; i < h; ++i) dot += w2[j * h + i] * a[i];
                z[j] = dot;
            }
            detail::softmax_inplace(z);
            out.loss -= std::log(std::max(z[static_cast<std::size_t>(s->label)], 1e-300));
            std::fill(dh.begin(), dh.end(), 0.0);
            for (std::size_t j = 0; j < c; ++j) {
                double delta = z[j] - (static_cast<int>(j) == s->label ? 1.0 : 0.0);
                for (std::size_t i = 0; i < h; ++i) {
                    dw2[j * h + i] += delta * a[i] * inv_b;
                    dh[i] += delta * w2[j * h + i];
                }
                db2[j] += delta * inv_b;
            }
            for (std::size_t j = 0; j < h; ++j) {
                double dz = dh[j] * (1.0 - a[j] * a[j]);
                for (std::size_t i = 0; i < f; ++i) dw1[j * f + i] += dz * s->x[i] * inv_b;
                db1[j] += dz * inv_b;
            }
        }
    }
    out.loss *= inv_b;
    return out;
}

inline void sgd_update(SmallModel& m, const DenseGrad& aggregated, double eta) {
    if (aggregated.size() != m.params.size()) {
        throw std::invalid_argument("gradient/parameter length mismatch");
    }
    for (std::size_t i = 0; i < m.params.size(); ++i) {
        m.params[i] -= eta * aggregated.values[i];
    }
}

inline double accuracy(const SmallModel& m, const std::vector<Sample>& data) {
    if (data.empty()) return 0.0;
    Batch batch;
    std::size_t correct = 0;
    const auto f = static_cast<std::size_t>(m.features);
    const auto c = static_cast<std::size_t>(m.classes);
    for (const auto& s : data) {
        // argmax of logits; softmax is monotone so we skip it
        int best = 0;
        double best_z = -1e300;
        for (std::size_t j = 0; j < c; ++j) {
            double dot;
            if (m.kind == ModelKind::SoftmaxRegression) {
                dot = m.params[c * f + j];
                for (std::size_t i = 0; i < f; ++i) dot += m.params[j * f + i] * s.x[i];
            } else {
                const auto h = static_cast<std::size_t>(m.hidden);
                const double* w1 = m.params.data();
                const double* b1 = w1 + h * f;
                const double* w2 = b1 + h;
                const double* b2 = w2 + c * h;
                dot = b2[j];
                for (std::size_t i = 0; i < h; ++i) {
                    double pre = b1[i];
                    for (std::size_t q = 0; q < f; ++q) pre += w1[i * f + q] * s.x[q];
                    dot += w2[j * h + i] * std::tanh(pre);
                }
            }
            if (dot > best_z) {
                best_z = dot;
                best = static_cast<int>(j);
            }
        }
        if (best == s.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

// Gaussian class blobs, sharded contiguously across workers so shards are
// disjoint and the global dataset depends only on the seed.
struct SyntheticDataset {
    std::vector<Sample> all;
    std::vector<std::pair<std::size_t, std::size_t>> shards;  // (begin, end) per worker

    static SyntheticDataset make_blobs(int workers, std::size_t samples_per_worker,
                                       int features, int classes, std::uint64_t seed,
                                       double spread = 1.2) {
        if (workers < 1 || samples_per_worker == 0) {
            throw std::invalid_argument("bad dataset shape");
        }
        SyntheticDataset ds;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, spread);
        std::uniform_real_distribution<double> center(-3.0, 3.0);
        std::vector<std::vector<double>> centers(static_cast<std::size_t>(classes));
        for (auto& ce : centers) {
            ce.resize(static_cast<std::size_t>(features));
            for (double& v : ce) v = center(rng);
        }
        std::size_t total = static_cast<std::size_t>(workers) * samples_per_worker;
        ds.all.reserve(total);
        for (std::size_t i = 0; i < total; ++i) {
            Sample s;
            s.label = static_cast<int>(i % static_cast<std::size_t>(classes));
            s.x.resize(static_cast<std::size_t>(features));
            const auto& ce = centers[static_cast<std::size_t>(s.label)];
            for (std::size_t j = 0; j < s.x.size(); ++j) s.x[j] = ce[j] + noise(rng);
            ds.all.push_back(std::move(s));
        }
        for (int w = 0; w < workers; ++w) {
            std::size_t begin = static_cast<std::size_t>(w) * samples_per_worker;
            ds.shards.emplace_back(begin, begin + samples_per_worker);
        }
        return ds;
    }
};

}  // namespace flexcomm
