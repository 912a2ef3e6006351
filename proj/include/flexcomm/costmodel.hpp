#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace flexcomm {

// alpha-beta network parameters. Bandwidth is given in bits/s; beta is the
// per-byte transfer time, so the conversion happens in exactly one place.
struct NetParams {
    double alpha = 0.0;          // seconds per message
    double bandwidth = 1e9;      // bits per second

    NetParams() = default;
    NetParams(double alpha_s, double bandwidth_bps) : alpha(alpha_s), bandwidth(bandwidth_bps) {
        if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
        if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
    }

    double beta() const { return 8.0 / bandwidth; }  // seconds per byte

    bool operator==(const NetParams& o) const {
        return alpha == o.alpha && bandwidth == o.bandwidth;
    }
};

struct MessageSpec {
    double m_bytes = 4.0;  // dense gradient payload, bytes
    double c = 1.0;        // compression ratio
    int n = 1;             // worker count

    MessageSpec() = default;
    MessageSpec(double m, double cr, int workers) : m_bytes(m), c(cr), n(workers) {
        if (m_bytes < 4.0) throw std::invalid_argument("message must be >= 4 bytes");
        if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("compression ratio out of (0,1]");
        if (n < 1) throw std::invalid_argument("worker count must be >= 1");
    }
};

struct CostBreakdown {
    double ps = 0.0;
    double ring_ar = 0.0;
    double tree_ar = 0.0;
    double broadcast = 0.0;
    double allgather_dense = 0.0;
    double ag_compressed = 0.0;
    double art_ring = 0.0;
    double art_tree = 0.0;
};

// All logs base 2; N=1 zeroes every log(N) and (N-1) term.
inline double cost_ps(const NetParams& net, const MessageSpec& msg) {
    return 2.0 * net.alpha + 2.0 * (msg.n - 1) * msg.m_bytes * net.beta();
}

inline double cost_ring_ar(const NetParams& net, const MessageSpec& msg) {
    double nm1 = msg.n - 1;
    return 2.0 * nm1 * net.alpha + 2.0 * (nm1 / msg.n) * msg.m_bytes * net.beta();
}

inline double cost_tree_ar(const NetParams& net, const MessageSpec& msg) {
    double lg = std::log2(static_cast<double>(msg.n));
    return 2.0 * net.alpha * lg + 2.0 * lg * msg.m_bytes * net.beta();
}

inline double cost_broadcast(const NetParams& net, const MessageSpec& msg) {
    double lg = std::log2(static_cast<double>(msg.n));
    return net.alpha * lg + lg * msg.m_bytes * net.beta();
}

inline double cost_allgather_dense(const NetParams& net, const MessageSpec& msg) {
    double lg = std::log2(static_cast<double>(msg.n));
    return net.alpha * lg + (msg.n - 1) * msg.m_bytes * net.beta();
}

// Allgather of compressed values plus indices: 2Mc bytes on the wire.
inline double cost_ag_compressed(const NetParams& net, const MessageSpec& msg) {
    double lg = std::log2(static_cast<double>(msg.n));
    return net.alpha * lg + 2.0 * msg.m_bytes * msg.c * net.beta() * (msg.n - 1);
}

// Two-phase compressed aggregation: index broadcast followed by ring allreduce.
inline double cost_art_ring(const NetParams& net, const MessageSpec& msg) {
    double nm1 = msg.n - 1;
    double lg = std::log2(static_cast<double>(msg.n));
    double mc = msg.m_bytes * msg.c;
    return net.alpha * (2.0 * nm1 + lg) + mc * net.beta() * (2.0 * nm1 / msg.n + lg);
}

inline double cost_art_tree(const NetParams& net, const MessageSpec& msg) {
    double lg = std::log2(static_cast<double>(msg.n));
    double mc = msg.m_bytes * msg.c;
    return 3.0 * net.alpha * lg + 3.0 * mc * net.beta() * lg;
}

inline CostBreakdown cost_primitives(const NetParams& net, const MessageSpec& msg) {
    CostBreakdown b;
    b.ps = cost_ps(net, msg);
    b.ring_ar = cost_ring_ar(net, msg);
    b.tree_ar = cost_tree_ar(net, msg);
    b.broadcast = cost_broadcast(net, msg);
    b.allgather_dense = cost_allgather_dense(net, msg);
    b.ag_compressed = cost_ag_compressed(net, msg);
    b.art_ring = cost_art_ring(net, msg);
    b.art_tree = cost_art_tree(net, msg);
    return b;
}

enum class Collective { AG, ART_RING, ART_TREE };

inline const char* to_string(Collective c) {
    switch (c) {
        case Collective::AG: return "AG";
        case Collective::ART_RING: return "ART_RING";
        case Collective::ART_TREE: return "ART_TREE";
    }
    return "?";
}

// Closed-form preferences, written as cross-multiplied linear forms so they
// agree with the direct cost comparison whenever it is strict.
inline bool prefer_ring_over_tree(const NetParams& net, const MessageSpec& msg) {
    double lg = std::log2(static_cast<double>(msg.n));
    double nm1 = msg.n - 1;
    double mc = msg.m_bytes * msg.c;
    // alpha * (N-1-logN) < Mc * beta * (logN - (N-1)/N)
    return net.alpha * (nm1 - lg) < mc * net.beta() * (lg - nm1 / msg.n);
}

inline bool prefer_ring_over_ag(const NetParams& net, const MessageSpec& msg) {
    double lg = std::log2(static_cast<double>(msg.n));
    double nm1 = msg.n - 1;
    double mc = msg.m_bytes * msg.c;
    // alpha/beta < Mc * (1 - 1/N - logN / (2(N-1)))
    return net.alpha < mc * net.beta() * (1.0 - 1.0 / msg.n - lg / (2.0 * nm1));
}

inline bool prefer_tree_over_ag(const NetParams& net, const MessageSpec& msg) {
    double lg = std::log2(static_cast<double>(msg.n));
    double nm1 = msg.n - 1;
    double mc = msg.m_bytes * msg.c;
    // alpha/beta < Mc * ((N-1)/logN - 3/2)
    return net.alpha < mc * net.beta() * (nm1 / lg - 1.5);
}

struct CollectiveChoice {
    Collective collective = Collective::AG;
    CostBreakdown costs;
};

inline CollectiveChoice select_collective(const NetParams& net, const MessageSpec& msg) {
    if (msg.n < 2) throw std::invalid_argument("selection undefined for single worker");
    CollectiveChoice out;
    out.costs = cost_primitives(net, msg);
    double best = out.costs.ag_compressed;
    out.collective = Collective::AG;
    if (out.costs.art_ring < best) {
        best = out.costs.art_ring;
        out.collective = Collective::ART_RING;
    }
    if (out.costs.art_tree < best) {
        out.collective = Collective::ART_TREE;
    }
    return out;
}

// Dense gradient byte size implied by a measured compressed-allgather time;
// inverts cost_ag_compressed for M.
inline double derive_m_from_ag(const NetParams& net, double c, int n, double measured_seconds) {
    double lg = std::log2(static_cast<double>(n));
    return (measured_seconds - net.alpha * lg) / (2.0 * c * net.beta() * (n - 1));
}

enum class CollectivePair { RING_VS_TREE, RING_VS_AG, TREE_VS_AG };

// CR at which the preferred collective flips, from the equality case of the
// corresponding selection inequality. nullopt when no crossover lies in (0,1].
inline std::optional<double> crossover_cr(const NetParams& net, double m_bytes, int n,
                                          CollectivePair between) {
    if (n < 2) throw std::invalid_argument("selection undefined for single worker");
    double lg = std::log2(static_cast<double>(n));
    double nm1 = n - 1;
    double coeff = 0.0;
    switch (between) {
        case CollectivePair::RING_VS_TREE:
            // equality of alpha*(N-1-logN) and Mc*beta*(logN-(N-1)/N)
            if (nm1 - lg <= 0.0 || lg - nm1 / n <= 0.0) return std::nullopt;
            coeff = (lg - nm1 / n) / (nm1 - lg);
            break;
        case CollectivePair::RING_VS_AG:
            coeff = 1.0 - 1.0 / n - lg / (2.0 * nm1);
            break;
        case CollectivePair::TREE_VS_AG:
            coeff = nm1 / lg - 1.5;
            break;
    }
    if (coeff <= 0.0) return std::nullopt;
    double c = (net.alpha / net.beta()) / (m_bytes * coeff);
    if (c > 1.0) return std::nullopt;
    return c;
}

}  // namespace flexcomm
