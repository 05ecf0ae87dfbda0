#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "weaver/errors.hpp"
#include "weaver/graph.hpp"

namespace weaver {

/// Compact adjacency over an explicit node subset, with local indices.
/// Extracted from a full graph or a (box-restricted) phase view so the
/// spectral and conductance routines can run on one representation.
struct Subgraph {
    std::vector<NodeId> nodes;               // original ids, ascending
    std::vector<std::vector<std::uint32_t>> adj;  // local indices

    std::size_t n() const { return nodes.size(); }

    std::size_t max_degree() const {
        std::size_t m = 0;
        for (const auto& a : adj) m = std::max(m, a.size());
        return m;
    }

    bool connected() const {
        if (nodes.empty()) return true;
        std::vector<char> seen(n(), 0);
        std::vector<std::uint32_t> stack{0};
        seen[0] = 1;
        std::size_t cnt = 1;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (auto v : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++cnt;
                    stack.push_back(v);
                }
        }
        return cnt == n();
    }
};

inline Subgraph extract_subgraph(const PhaseView& view,
                                 const std::vector<NodeId>& nodes) {
    Subgraph s;
    s.nodes = nodes;
    s.adj.resize(nodes.size());
    std::vector<std::int64_t> local(view.base->n(), -1);
    for (std::uint32_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;
    for (std::uint32_t i = 0; i < nodes.size(); ++i)
        view.for_neighbors(nodes[i], [&](NodeId v) {
            if (local[v] >= 0) s.adj[i].push_back(static_cast<std::uint32_t>(local[v]));
        });
    return s;
}

inline Subgraph as_subgraph(const EmbeddedGraph& g) {
    Subgraph s;
    s.nodes.resize(g.n());
    for (NodeId u = 0; u < g.n(); ++u) s.nodes[u] = u;
    s.adj.resize(g.n());
    for (NodeId u = 0; u < g.n(); ++u)
        for (const auto& h : g.neighbors(u)) s.adj[u].push_back(h.to);
    return s;
}

inline bool is_connected(const EmbeddedGraph& g) {
    return as_subgraph(g).connected();
}

// ---------------------------------------------------------------------------
// Euclidean minimum spanning tree (dense Prim; comparisons on squared
// distances, lengths accumulated exactly once per tree edge).
// ---------------------------------------------------------------------------

inline double mst_weight(const std::vector<Point>& coords) {
    const std::size_t n = coords.size();
    if (n < 2) throw Error("mst_weight needs at least 2 points");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best2(n, inf);
    std::vector<char> done(n, 0);
    best2[0] = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t u = n;
        double b = inf;
        for (std::size_t v = 0; v < n; ++v)
            if (!done[v] && best2[v] < b) {
                b = best2[v];
                u = v;
            }
        done[u] = 1;
        total += std::sqrt(best2[u]);
        const Point pu = coords[u];
        for (std::size_t v = 0; v < n; ++v) {
            if (done[v]) continue;
            const double dx = pu.x - coords[v].x, dy = pu.y - coords[v].y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best2[v]) best2[v] = d2;
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Conductance by exhaustive cut enumeration (n <= 20).
// phi = min over nonempty proper S of |E(S, S~)| / min(vol S, vol S~).
// ---------------------------------------------------------------------------

inline double conductance_exact(const Subgraph& g) {
    const std::size_t n = g.n();
    if (n > 20) throw TooLarge("conductance_exact limited to n <= 20");
    if (n < 2) throw Error("conductance needs at least 2 nodes");
    if (!g.connected()) throw NotConnected();
    std::vector<std::uint32_t> bits(n, 0), deg(n, 0);
    std::uint64_t total_vol = 0;
    for (std::size_t u = 0; u < n; ++u) {
        for (auto v : g.adj[u]) bits[u] |= (1u << v);
        deg[u] = static_cast<std::uint32_t>(g.adj[u].size());
        total_vol += deg[u];
    }
    double phi = std::numeric_limits<double>::infinity();
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        std::uint64_t cut = 0, vol = 0;
        for (std::uint32_t m = mask; m;) {
            const int u = std::countr_zero(m);
            m &= m - 1;
            cut += std::popcount(bits[u] & ~mask);
            vol += deg[u];
        }
        const std::uint64_t mv = std::min<std::uint64_t>(vol, total_vol - vol);
        if (mv == 0) continue;
        phi = std::min(phi, static_cast<double>(cut) / static_cast<double>(mv));
    }
    return phi;
}

inline double conductance_exact(const EmbeddedGraph& g) {
    return conductance_exact(as_subgraph(g));
}

// ---------------------------------------------------------------------------
// Spectral gap of the lazy walk matrix P = I - L/(D+1), D = max degree.
// Power iteration runs on the half-shifted operator Q = I - L/(2(D+1)),
// whose spectrum is nonnegative, deflated against the uniform stationary
// vector; gap = 1 - lambda_2(P) = 2 (1 - nu_2(Q)).
// ---------------------------------------------------------------------------

inline double spectral_gap(const Subgraph& g, double tol = 1e-9) {
    const std::size_t n = g.n();
    if (n < 2) throw Error("spectral gap needs at least 2 nodes");
    if (!g.connected()) throw NotConnected();
    const double denom = 2.0 * (static_cast<double>(g.max_degree()) + 1.0);

    std::vector<double> x(n), y(n);
    Rng rng(stream_seed(0x5eedULL, n, g.max_degree(), StreamPurpose::Oracle));
    for (auto& v : x) v = rng.next_double() - 0.5;

    auto deflate_normalize = [&](std::vector<double>& v) {
        double mean = 0.0;
        for (double t : v) mean += t;
        mean /= static_cast<double>(n);
        double norm = 0.0;
        for (double& t : v) {
            t -= mean;
            norm += t * t;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            v[0] = 1.0;
            if (n > 1) v[1] = -1.0;
            norm = std::sqrt(2.0);
        }
        for (double& t : v) t /= norm;
    };
    deflate_normalize(x);

    const std::size_t cap = static_cast<std::size_t>(
        10.0 * static_cast<double>(n) * std::max(1.0, std::log2(static_cast<double>(n))));
    double nu_prev = -1.0;
    double nu = 0.0;
    for (std::size_t it = 0; it < cap; ++it) {
        // y = Q x
        for (std::size_t u = 0; u < n; ++u) {
            double lx = static_cast<double>(g.adj[u].size()) * x[u];
            for (auto v : g.adj[u]) lx -= x[v];
            y[u] = x[u] - lx / denom;
        }
        nu = 0.0;
        for (std::size_t u = 0; u < n; ++u) nu += x[u] * y[u];
        x.swap(y);
        deflate_normalize(x);
        if (it > 32 && std::abs(nu - nu_prev) < tol) break;
        nu_prev = nu;
    }
    return 2.0 * (1.0 - nu);
}

inline double spectral_gap(const EmbeddedGraph& g) {
    return spectral_gap(as_subgraph(g));
}

// ---------------------------------------------------------------------------
// Shortest paths by propagation cost (Dijkstra on Euclidean edge weights).
// ---------------------------------------------------------------------------

struct SsspResult {
    std::vector<double> cost;
    std::vector<std::int64_t> parent;

    bool reached(NodeId v) const {
        return cost[v] < std::numeric_limits<double>::infinity();
    }
};

inline SsspResult dijkstra(const EmbeddedGraph& g, NodeId src) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    SsspResult r{std::vector<double>(g.n(), inf),
                 std::vector<std::int64_t>(g.n(), -1)};
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    r.cost[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > r.cost[u]) continue;
        for (const auto& h : g.neighbors(u)) {
            const double nd = d + g.edge_weight(u, h.to);
            if (nd < r.cost[h.to]) {
                r.cost[h.to] = nd;
                r.parent[h.to] = u;
                pq.emplace(nd, h.to);
            }
        }
    }
    return r;
}

struct PathResult {
    double cost = 0.0;
    std::size_t hops = 0;
    std::vector<NodeId> path;
};

inline PathResult shortest_path(const EmbeddedGraph& g, NodeId u, NodeId v) {
    const auto sssp = dijkstra(g, u);
    if (!sssp.reached(v)) throw Unreachable("no path between nodes");
    PathResult r;
    r.cost = sssp.cost[v];
    for (std::int64_t w = v; w != -1; w = sssp.parent[w])
        r.path.push_back(static_cast<NodeId>(w));
    std::reverse(r.path.begin(), r.path.end());
    r.hops = r.path.size() - 1;
    return r;
}

/// Hop distances from a source (unweighted BFS); -1 where unreachable.
inline std::vector<std::int64_t> bfs_hops(const EmbeddedGraph& g, NodeId src) {
    std::vector<std::int64_t> hop(g.n(), -1);
    std::vector<NodeId> frontier{src};
    hop[src] = 0;
    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId u : frontier)
            for (const auto& h : g.neighbors(u))
                if (hop[h.to] < 0) {
                    hop[h.to] = hop[u] + 1;
                    next.push_back(h.to);
                }
        frontier = std::move(next);
    }
    return hop;
}

// ---------------------------------------------------------------------------
// Baseline stretch: sampled ratio of shortest-path propagation cost to
// straight-line distance. Each sampled source contributes its
// Euclidean-nearest non-neighbor (the worst-case witness shape) plus one
// uniform partner.
// ---------------------------------------------------------------------------

struct StretchSample {
    std::vector<double> ratios;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
};

inline StretchSample baseline_stretch(const EmbeddedGraph& g,
                                      std::size_t pair_sample,
                                      std::uint64_t seed) {
    StretchSample out;
    if (g.n() < 2) return out;
    Rng rng(stream_seed(seed, 0, 0, StreamPurpose::PairSample));
    const std::size_t sources = std::max<std::size_t>(1, pair_sample / 2);
    for (std::size_t s = 0; s < sources; ++s) {
        const NodeId u = static_cast<NodeId>(rng.next_index(g.n()));
        // nearest node not adjacent to u (and not u itself)
        NodeId nearest = u;
        double nd = std::numeric_limits<double>::infinity();
        for (NodeId v = 0; v < g.n(); ++v) {
            if (v == u || g.has_edge(u, v)) continue;
            const double d = euclid(g.point(u), g.point(v));
            if (d < nd && d > 0.0) {
                nd = d;
                nearest = v;
            }
        }
        NodeId rnd = static_cast<NodeId>(rng.next_index(g.n()));
        if (rnd == u) rnd = (rnd + 1) % g.n();
        const auto sssp = dijkstra(g, u);
        for (NodeId v : {nearest, rnd}) {
            if (v == u || !sssp.reached(v)) continue;
            const double d = euclid(g.point(u), g.point(v));
            if (d <= 0.0) continue;
            out.ratios.push_back(sssp.cost[v] / d);
        }
    }
    for (double r : out.ratios) {
        out.max_ratio = std::max(out.max_ratio, r);
        out.mean_ratio += r;
    }
    if (!out.ratios.empty()) out.mean_ratio /= static_cast<double>(out.ratios.size());
    return out;
}

}  // namespace weaver
