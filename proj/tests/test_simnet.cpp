#include <catch2/catch_amalgamated.hpp>

#include "weaver/graph.hpp"
#include "weaver/simnet.hpp"

using namespace weaver;

namespace {

EmbeddedGraph two_nodes() {
    EmbeddedGraph g(std::vector<Point>{{0.4, 0.5}, {0.6, 0.5}}, 0, 1);
    g.add_edge(0, 1, 0);
    return g;
}

std::vector<WalkToken> tokens_at(NodeId origin, std::size_t count) {
    std::vector<WalkToken> ts(count);
    for (std::uint32_t i = 0; i < count; ++i) ts[i] = WalkToken{origin, 1, 0, i};
    return ts;
}

// Exact lazy-walk distribution after `steps` steps, eligible edges only
// (phase tag + box filter), matching the engine's step rule.
std::vector<double> exact_walk_distribution(const EmbeddedGraph& g, int phase,
                                            const Box& box, std::size_t delta,
                                            NodeId origin, std::uint32_t steps) {
    const std::size_t n = g.n();
    std::vector<std::vector<NodeId>> eligible(n);
    for (NodeId v = 0; v < n; ++v) {
        const TagMask bit = TagMask{1} << phase;
        for (const auto& h : g.neighbors(v)) {
            if (!(h.tags & bit)) continue;
            if (!box.contains(g.point(h.to))) continue;
            eligible[v].push_back(h.to);
        }
    }
    std::vector<double> p(n, 0.0), q(n, 0.0);
    p[origin] = 1.0;
    for (std::uint32_t s = 0; s < steps; ++s) {
        std::fill(q.begin(), q.end(), 0.0);
        for (NodeId v = 0; v < n; ++v) {
            if (p[v] == 0.0) continue;
            const double move =
                std::min(1.0, static_cast<double>(eligible[v].size()) /
                                  (static_cast<double>(delta) + 1.0));
            q[v] += p[v] * (1.0 - move);
            if (!eligible[v].empty()) {
                const double share = p[v] * move / eligible[v].size();
                for (NodeId w : eligible[v]) q[w] += share;
            }
        }
        p.swap(q);
    }
    return p;
}

}  // namespace

TEST_CASE("engine with no tokens finishes in zero rounds") {
    const auto g = two_nodes();
    RoundEngine e(g, 0, 1.0, 8, 4, 1);
    CHECK(e.run_until_done() == 0);
    CHECK(e.endpoints().empty());
}

TEST_CASE("zero-length token terminates where injected") {
    const auto g = two_nodes();
    RoundEngine e(g, 0, 1.0, 8, 4, 1);
    e.inject(tokens_at(0, 1), 0);
    CHECK(e.run_until_done() == 0);
    REQUIRE(e.endpoints().size() == 1);
    CHECK(e.endpoints()[0].node == 0);
}

TEST_CASE("capacity one serializes a burst of tokens") {
    const auto g = two_nodes();
    // delta = 0 makes the move probability deg/(delta+1) = 1: no lazy holds
    RoundEngine e(g, 0, 1.0, 0, 1, 7);
    const std::size_t k = 17;
    e.inject(tokens_at(0, k), 1);
    const auto rounds = e.run_until_done();
    CHECK(rounds == k);  // one crossing per round through the single edge
    CHECK(e.endpoints().size() == k);
    for (const auto& ep : e.endpoints()) CHECK(ep.node == 1);
    CHECK(e.max_edge_load_seen() <= 1);
}

TEST_CASE("a lone token takes exactly its walk length in rounds") {
    const auto g = gen_random_regular(64, 4, 11);
    for (std::uint32_t len : {1u, 5u, 40u}) {
        RoundEngine e(g, 0, 2.0, 4, 100, 3);
        e.inject(tokens_at(7, 1), len);
        CHECK(e.run_until_done() == len);
        CHECK(e.endpoints().size() == 1);
    }
}

TEST_CASE("token with no eligible neighbors freezes and ends at its origin") {
    EmbeddedGraph g(std::vector<Point>{{0.1, 0.1}, {0.9, 0.9}}, 0, 1);
    g.add_edge(0, 1, 0);
    // box around node 0 excludes node 1 entirely
    RoundEngine e(g, 0, 0.2, 4, 4, 5);
    e.inject(tokens_at(0, 3), 12);
    const auto rounds = e.run_until_done();
    CHECK(rounds == 12);  // holds consume rounds until the steps run out
    REQUIRE(e.endpoints().size() == 3);
    for (const auto& ep : e.endpoints()) CHECK(ep.node == 0);
}

TEST_CASE("tokens are conserved and stay inside their boxes") {
    const auto g = gen_random_regular(256, 8, 21);
    const double side = 0.5;
    std::vector<WalkToken> ts;
    for (NodeId u = 0; u < 32; ++u)
        for (std::uint32_t i = 0; i < 20; ++i) ts.push_back({u, 1, 0, i});
    RoundEngine e(g, 0, side, 8, 100, 99);
    std::size_t max_load = 0;
    e.trace = [&](const RoundTrace& t) { max_load = std::max(max_load, t.max_edge_load); };
    e.inject(ts, 48);
    e.run_until_done();
    REQUIRE(e.endpoints().size() == ts.size());
    CHECK(max_load <= 100);
    for (const auto& ep : e.endpoints()) {
        const Box box{g.point(ep.origin), side};
        CHECK(box.contains(g.point(ep.node)));
    }
}

TEST_CASE("identical seeds give identical runs") {
    const auto g = gen_random_regular(128, 6, 33);
    auto run = [&](std::uint64_t seed) {
        RoundEngine e(g, 0, 1.0, 6, 2, seed);
        std::vector<WalkToken> ts;
        for (NodeId u = 0; u < g.n(); u += 3)
            for (std::uint32_t i = 0; i < 4; ++i) ts.push_back({u, 1, 0, i});
        e.inject(ts, 30);
        const auto rounds = e.run_until_done();
        auto eps = e.endpoints();
        std::sort(eps.begin(), eps.end(), [](const WalkEndpoint& a, const WalkEndpoint& b) {
            return std::tie(a.origin, a.walk_index) < std::tie(b.origin, b.walk_index);
        });
        std::vector<NodeId> ends;
        for (const auto& ep : eps) ends.push_back(ep.node);
        return std::make_pair(rounds, ends);
    };
    const auto a = run(42);
    const auto b = run(42);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    const auto c = run(43);
    CHECK(a.second != c.second);
}

TEST_CASE("tight capacity queues tokens without losing them") {
    const auto g = gen_random_regular(64, 4, 55);
    std::vector<WalkToken> ts;
    for (std::uint32_t i = 0; i < 200; ++i) ts.push_back({5, 1, 0, i});
    RoundEngine e(g, 0, 2.0, 4, 1, 8);
    std::size_t max_load = 0;
    e.trace = [&](const RoundTrace& t) { max_load = std::max(max_load, t.max_edge_load); };
    e.inject(ts, 10);
    const auto rounds = e.run_until_done();
    CHECK(rounds > 10);  // congestion must delay some walks
    CHECK(max_load <= 1);
    CHECK(e.endpoints().size() == ts.size());
}

TEST_CASE("walk endpoints match the exact chain on a 12-node box") {
    // twelve nodes clustered inside one box, connected geometrically
    auto pts = sample_points(12, 201);
    for (auto& p : pts) {
        p.x = 0.4 + p.x * 0.2;
        p.y = 0.4 + p.y * 0.2;
    }
    EmbeddedGraph g(pts, 0, 201);
    for_rgg_edges(g.coords(), 0.13, [&](NodeId u, NodeId v) { g.add_edge(u, v, 0); });
    const Box box{g.point(0), 0.5};
    const std::size_t delta = g.max_degree();
    const std::uint32_t steps = 24;

    const auto exact = exact_walk_distribution(g, 0, box, delta, 0, steps);

    const std::size_t walks = 10000;
    RoundEngine e(g, 0, box.side, delta, 1 << 20, 31415);
    e.inject(tokens_at(0, walks), steps);
    e.run_until_done();
    std::vector<double> hist(g.n(), 0.0);
    for (const auto& ep : e.endpoints()) hist[ep.node] += 1.0 / walks;

    double tv = 0.0;
    for (std::size_t v = 0; v < g.n(); ++v) tv += std::abs(hist[v] - exact[v]);
    tv /= 2.0;
    CHECK(tv < 0.05);
}

TEST_CASE("long walks on an expander mix towards uniform over the box") {
    const std::size_t n = 256;
    const auto g = gen_random_regular(n, 8, 77);
    const NodeId origin = 3;
    const Box box{g.point(origin), 1.0};
    const std::uint32_t steps = 64;  // 8 log2(n)
    const auto exact = exact_walk_distribution(g, 0, box, 8, origin, steps);

    const std::size_t walks = 10000;
    RoundEngine e(g, 0, box.side, 8, 1 << 20, 2718);
    e.inject(tokens_at(origin, walks), steps);
    e.run_until_done();
    std::vector<double> hist(g.n(), 0.0);
    for (const auto& ep : e.endpoints()) hist[ep.node] += 1.0 / walks;

    double tv_exact = 0.0;
    for (std::size_t v = 0; v < g.n(); ++v) tv_exact += std::abs(hist[v] - exact[v]);
    tv_exact /= 2.0;
    CHECK(tv_exact < 0.1);

    // and the exact distribution itself is near-uniform over the reachable box
    std::vector<NodeId> box_nodes;
    for (NodeId v = 0; v < n; ++v)
        if (exact[v] > 0.0) box_nodes.push_back(v);
    double tv_uniform = 0.0;
    for (NodeId v : box_nodes)
        tv_uniform += std::abs(exact[v] - 1.0 / box_nodes.size());
    tv_uniform /= 2.0;
    CHECK(tv_uniform < 0.1);
}
