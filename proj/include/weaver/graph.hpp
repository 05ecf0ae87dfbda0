#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "weaver/errors.hpp"
#include "weaver/geometry.hpp"
#include "weaver/grid_index.hpp"
#include "weaver/rng.hpp"

namespace weaver {

using NodeId = std::uint32_t;
using TagMask = std::uint32_t;

struct HalfEdge {
    NodeId to;
    TagMask tags;
};

/// Undirected graph embedded in the unit square. Edges carry a set of phase
/// tags (bitmask); edge weights are always derived from the embedding, never
/// stored. Adjacency lists are kept sorted by neighbor id.
class EmbeddedGraph {
public:
    EmbeddedGraph() = default;
    EmbeddedGraph(std::vector<Point> coords, std::uint32_t gen_degree,
                  std::uint64_t seed)
        : coords_(std::move(coords)),
          adj_(coords_.size()),
          gen_degree_(gen_degree),
          seed_(seed) {}

    std::size_t n() const { return coords_.size(); }
    const std::vector<Point>& coords() const { return coords_; }
    Point point(NodeId u) const { return coords_[u]; }
    std::uint32_t gen_degree() const { return gen_degree_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const HalfEdge> neighbors(NodeId u) const { return adj_[u]; }
    std::size_t degree(NodeId u) const { return adj_[u].size(); }

    double edge_weight(NodeId u, NodeId v) const {
        return euclid(coords_[u], coords_[v]);
    }

    /// Adds (or re-tags) the undirected edge {u, v} with the given phase.
    /// Self-loops are rejected; tags accumulate on an existing edge.
    void add_edge(NodeId u, NodeId v, int phase) {
        if (u == v) return;
        const TagMask bit = TagMask{1} << phase;
        insert_half(u, v, bit);
        insert_half(v, u, bit);
    }

    TagMask edge_tags(NodeId u, NodeId v) const {
        const auto* h = find_half(u, v);
        return h ? h->tags : 0;
    }

    bool has_edge(NodeId u, NodeId v) const { return find_half(u, v) != nullptr; }

    std::size_t max_degree() const {
        std::size_t m = 0;
        for (const auto& a : adj_) m = std::max(m, a.size());
        return m;
    }

    std::size_t edge_count() const {
        std::size_t half = 0;
        for (const auto& a : adj_) half += a.size();
        return half / 2;
    }

    /// Union of all phase tags present on any edge.
    TagMask all_tags() const {
        TagMask t = 0;
        for (const auto& a : adj_)
            for (const auto& h : a) t |= h.tags;
        return t;
    }

private:
    const HalfEdge* find_half(NodeId u, NodeId v) const {
        const auto& a = adj_[u];
        auto it = std::lower_bound(
            a.begin(), a.end(), v,
            [](const HalfEdge& h, NodeId id) { return h.to < id; });
        return (it != a.end() && it->to == v) ? &*it : nullptr;
    }

    void insert_half(NodeId u, NodeId v, TagMask bit) {
        auto& a = adj_[u];
        auto it = std::lower_bound(
            a.begin(), a.end(), v,
            [](const HalfEdge& h, NodeId id) { return h.to < id; });
        if (it != a.end() && it->to == v)
            it->tags |= bit;
        else
            a.insert(it, HalfEdge{v, bit});
    }

    std::vector<Point> coords_;
    std::vector<std::vector<HalfEdge>> adj_;
    std::uint32_t gen_degree_ = 0;
    std::uint64_t seed_ = 0;
};

/// Read-only view of one phase's edges, optionally restricted to a box
/// (both endpoints must lie inside). This is the per-phase graph walked by
/// the construction protocol.
struct PhaseView {
    const EmbeddedGraph* base = nullptr;
    int phase = 0;
    std::optional<Box> box;

    bool node_in_view(NodeId u) const {
        return !box || box->contains(base->point(u));
    }

    template <typename F>
    void for_neighbors(NodeId u, F&& f) const {
        const TagMask bit = TagMask{1} << phase;
        for (const auto& h : base->neighbors(u)) {
            if (!(h.tags & bit)) continue;
            if (box && !box->contains(base->point(h.to))) continue;
            f(h.to);
        }
    }

    std::size_t view_degree(NodeId u) const {
        std::size_t d = 0;
        for_neighbors(u, [&](NodeId) { ++d; });
        return d;
    }
};

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Simple d-regular graph on n uniformly embedded points (all edges tagged
/// phase 0). Stub matching: random stub pairs, rejecting self-loops and
/// multi-edges; if the remaining stubs admit no valid pair the whole pairing
/// restarts. Restarts are rare for d = O(1).
inline EmbeddedGraph gen_random_regular(std::size_t n, std::size_t d,
                                        std::uint64_t seed) {
    if (d < 1 || d >= n || (n * d) % 2 != 0) throw InfeasibleDegree(n, d);
    EmbeddedGraph g(sample_points(n, seed), static_cast<std::uint32_t>(d), seed);
    Rng rng(stream_seed(seed, 0, 0, StreamPurpose::Pairing));

    std::vector<NodeId> stubs;
    std::vector<std::vector<NodeId>> adj(n);
    for (int attempt = 0;; ++attempt) {
        stubs.clear();
        for (NodeId u = 0; u < n; ++u)
            for (std::size_t k = 0; k < d; ++k) stubs.push_back(u);
        for (auto& a : adj) a.clear();

        bool stuck = false;
        while (!stubs.empty() && !stuck) {
            bool paired = false;
            for (int tries = 0; tries < 64 && !paired; ++tries) {
                const std::size_t i = rng.next_index(stubs.size());
                std::size_t j = rng.next_index(stubs.size() - 1);
                if (j >= i) ++j;
                const NodeId u = stubs[i], v = stubs[j];
                if (u == v) continue;
                if (std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end())
                    continue;
                adj[u].push_back(v);
                adj[v].push_back(u);
                // swap-pop the two stubs, higher index first
                const auto hi = std::max(i, j), lo = std::min(i, j);
                stubs[hi] = stubs.back();
                stubs.pop_back();
                stubs[lo] = stubs.back();
                stubs.pop_back();
                paired = true;
            }
            if (paired) continue;
            // Verify a valid pair really does not exist before restarting.
            stuck = true;
            for (std::size_t a = 0; a < stubs.size() && stuck; ++a)
                for (std::size_t b = a + 1; b < stubs.size() && stuck; ++b) {
                    const NodeId u = stubs[a], v = stubs[b];
                    if (u != v && std::find(adj[u].begin(), adj[u].end(), v) ==
                                      adj[u].end())
                        stuck = false;
                }
        }
        if (!stuck) break;
        if (attempt > 1000)
            throw InfeasibleDegree(n, d);  // should be unreachable
    }
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : adj[u])
            if (u < v) g.add_edge(u, v, 0);
    return g;
}

/// G(n, p): each unordered pair joined independently with probability p
/// (geometric skipping over the pair sequence). Phase-0 tags.
inline EmbeddedGraph gen_gnp(std::size_t n, double p, std::uint64_t seed) {
    if (!(p >= 0.0) || p > 1.0) throw Error("p must be in [0, 1]");
    EmbeddedGraph g(sample_points(n, seed), 0, seed);
    if (p == 0.0 || n < 2) return g;
    Rng rng(stream_seed(seed, 0, 0, StreamPurpose::GnpEdges));
    const double total = static_cast<double>(n) * (n - 1) / 2.0;
    auto pair_of = [n](std::uint64_t k) {
        // k-th pair in row-major order over u < v
        NodeId u = 0;
        std::uint64_t row = n - 1;
        while (k >= row) {
            k -= row;
            --row;
            ++u;
        }
        return std::pair<NodeId, NodeId>{u, static_cast<NodeId>(u + 1 + k)};
    };
    if (p == 1.0) {
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v = u + 1; v < n; ++v) g.add_edge(u, v, 0);
        return g;
    }
    const double log1mp = std::log1p(-p);
    double pos = -1.0;
    for (;;) {
        const double u01 = std::max(rng.next_double(), 1e-300);
        pos += 1.0 + std::floor(std::log(u01) / log1mp);
        if (pos >= total) break;
        auto [a, b] = pair_of(static_cast<std::uint64_t>(pos));
        g.add_edge(a, b, 0);
    }
    return g;
}

/// Edge set of the geometric graph with radius rho over the given coords:
/// {u, v} iff euclid(u, v) <= rho. Deterministic in the coords alone.
template <typename F>
inline void for_rgg_edges(const std::vector<Point>& coords, double rho, F&& f) {
    const GridIndex index(coords, std::max(rho, 1.0 / 4096.0));
    for (NodeId u = 0; u < coords.size(); ++u) {
        const Box b{coords[u], 2.0 * rho};
        // candidate scan; keep only u < v to emit each edge once
        for (NodeId v : index.nodes_in_box(b))
            if (v > u && euclid(coords[u], coords[v]) <= rho) f(u, v);
    }
}

/// Random geometric graph G(n, rho): uniform points, edge iff euclid <= rho.
inline EmbeddedGraph gen_rgg(std::size_t n, double rho, std::uint64_t seed) {
    if (!(rho > 0.0)) throw Error("rho must be positive");
    EmbeddedGraph g(sample_points(n, seed), 0, seed);
    for_rgg_edges(g.coords(), rho, [&](NodeId u, NodeId v) { g.add_edge(u, v, 0); });
    return g;
}

// ---------------------------------------------------------------------------
// Serialization: line-oriented text, bit-exact round-trip.
//   n d seed
//   node <id> <x> <y>
//   edge <u> <v> <tagmask>
// ---------------------------------------------------------------------------

inline std::string format_coord(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void serialize_graph(const EmbeddedGraph& g, std::ostream& os) {
    os << g.n() << ' ' << g.gen_degree() << ' ' << g.seed() << '\n';
    for (NodeId u = 0; u < g.n(); ++u)
        os << "node " << u << ' ' << format_coord(g.point(u).x) << ' '
           << format_coord(g.point(u).y) << '\n';
    for (NodeId u = 0; u < g.n(); ++u)
        for (const auto& h : g.neighbors(u))
            if (u < h.to) os << "edge " << u << ' ' << h.to << ' ' << h.tags << '\n';
}

inline std::string serialize_graph(const EmbeddedGraph& g) {
    std::ostringstream os;
    serialize_graph(g, os);
    return os.str();
}

inline EmbeddedGraph parse_graph(std::istream& is) {
    std::size_t n = 0;
    std::uint32_t d = 0;
    std::uint64_t seed = 0;
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty graph file");
    {
        std::istringstream h(line);
        if (!(h >> n >> d >> seed)) throw ParseError("bad header: " + line);
    }
    std::vector<Point> coords(n);
    std::vector<bool> seen(n, false);
    std::vector<std::tuple<NodeId, NodeId, TagMask>> edges;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "node") {
            NodeId id;
            double x, y;
            if (!(ls >> id >> x >> y) || id >= n)
                throw ParseError("bad node line: " + line);
            coords[id] = Point{x, y};
            seen[id] = true;
        } else if (kind == "edge") {
            NodeId u, v;
            TagMask tags;
            if (!(ls >> u >> v >> tags) || u >= n || v >= n)
                throw ParseError("bad edge line: " + line);
            edges.emplace_back(u, v, tags);
        } else {
            throw ParseError("unknown record: " + line);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!seen[i]) throw ParseError("missing node " + std::to_string(i));
    EmbeddedGraph g(std::move(coords), d, seed);
    for (auto [u, v, tags] : edges)
        for (int ph = 0; ph < 32; ++ph)
            if (tags & (TagMask{1} << ph)) g.add_edge(u, v, ph);
    return g;
}

inline EmbeddedGraph parse_graph(const std::string& text) {
    std::istringstream is(text);
    return parse_graph(is);
}

}  // namespace weaver
