#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "cogk/activation.hpp"
#include "cogk/core.hpp"
#include "cogk/errors.hpp"
#include "cogk/symbols.hpp"
#include "cogk/value.hpp"

using namespace cogk;

TEST_CASE("symbol interning is idempotent") {
    SymbolTable t;
    Symbol a = t.intern("red");
    Symbol b = t.intern("red");
    CHECK(a == b);
    CHECK(t.text(a) == "red");
    Symbol g1 = t.intern("g1");
    CHECK(t.intern("g1") == g1);
    CHECK(g1 != a);
}

TEST_CASE("innate vocabulary is reserved") {
    SymbolTable t;
    CHECK_THROWS_AS(t.intern("busy"), KernelError);
    CHECK_THROWS_AS(t.intern("retrieve-blend"), KernelError);
    try {
        t.intern("success");
        FAIL("expected collision");
    } catch (const KernelError& e) {
        CHECK(e.code() == Errc::vocabulary_collision);
    }
    // parser-facing resolve() maps reserved texts to the innate atom instead
    CHECK(t.resolve("busy") == t.innate("busy"));
    CHECK(t.resolve("wombat") == t.intern("wombat"));
}

TEST_CASE("innate atoms are distinct and stable") {
    SymbolTable t;
    Innate in(t);
    std::set<Symbol> all{in.free, in.busy, in.success, in.failure,
                         in.percept, in.command, in.payload, in.cue, in.retrieved, in.status,
                         in.state_no_change, in.tie, in.conflict, in.operator_no_change,
                         in.cmd_retrieve, in.cmd_retrieve_blend, in.cmd_retrieve_name,
                         in.cmd_em_query, in.cmd_em_next, in.cmd_em_prev,
                         in.cmd_store, in.cmd_motor, in.cmd_halt};
    CHECK(all.size() == 23);
    CHECK(t.is_innate(in.tie));
    CHECK(in.is_command(in.cmd_halt));
    CHECK_FALSE(in.is_command(in.free));
    CHECK(in.is_impasse(in.operator_no_change));
    CHECK(in.is_status_value(in.failure));
}

TEST_CASE("value ordering and display") {
    SymbolTable t;
    Value n = Value::num(2);
    Value s = Value::sym(t.intern("red"));
    Value str = Value::str("red");
    CHECK(n != str);
    CHECK(s != str);
    CHECK(n.show(t) == "2");
    CHECK(s.show(t) == "red");
    CHECK(str.show(t) == "\"red\"");
    CHECK(Value::num(2.5).show(t) == "2.5");
    CHECK(Value::num(-3).show(t) == "-3");
}

TEST_CASE("assemble_chunk groups elements by node") {
    SymbolTable t;
    Symbol g1 = t.intern("g1"), h2 = t.intern("h2");
    Symbol color = t.intern("color"), size = t.intern("size");
    std::vector<Element> es{
        {1, g1, color, Value::sym(t.intern("red"))},
        {2, g1, size, Value::num(2)},
    };
    Chunk c = assemble_chunk(es);
    CHECK(c.name == g1);
    CHECK(c.elements.size() == 2);

    std::vector<Element> mixed{
        {1, g1, color, Value::sym(t.intern("red"))},
        {2, h2, color, Value::sym(t.intern("red"))},
    };
    CHECK_THROWS_AS(assemble_chunk(mixed), KernelError);
    try {
        assemble_chunk(std::vector<Element>{});
        FAIL("expected empty-chunk");
    } catch (const KernelError& e) {
        CHECK(e.code() == Errc::empty_chunk);
    }
}

TEST_CASE("linked follows node-ref chains") {
    SymbolTable t;
    Symbol s1 = t.intern("s1"), g1 = t.intern("g1"), h1 = t.intern("h1"), z9 = t.intern("z9");
    std::vector<Element> graph{
        {1, s1, t.intern("a"), Value::sym(g1)},
        {2, g1, t.intern("b"), Value::sym(h1)},
    };
    auto r = linked(graph, s1, h1);
    CHECK(r.reachable);
    CHECK(r.depth == 2);
    CHECK_FALSE(linked(graph, s1, z9).reachable);
    CHECK(linked(graph, s1, s1).depth == 0);
    // numeric values never link
    std::vector<Element> numeric{{1, s1, t.intern("n"), Value::num(7)}};
    CHECK_FALSE(linked(numeric, s1, g1).reachable);
}

// brute-force reachability on an adjacency list, oblivious to Element structure
static bool bfs_oracle(const std::vector<std::pair<int, int>>& edges, int root, int target, int n,
                       int* depth_out) {
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : edges) adj[a].push_back(b);
    std::vector<int> dist(n, -1);
    dist[root] = 0;
    std::vector<int> q{root};
    for (size_t i = 0; i < q.size(); ++i) {
        int u = q[i];
        for (int v : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    *depth_out = dist[target];
    return dist[target] >= 0;
}

TEST_CASE("linked agrees with BFS oracle on random graphs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        SymbolTable t;
        int n = std::uniform_int_distribution<int>(2, 50)(rng);
        std::vector<Symbol> nodes;
        for (int i = 0; i < n; ++i) nodes.push_back(t.intern("n" + std::to_string(i)));
        int m = std::uniform_int_distribution<int>(0, 2 * n)(rng);
        std::vector<Element> graph;
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < m; ++i) {
            int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
            int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
            graph.push_back({static_cast<ElementId>(i + 1), nodes[a],
                             t.intern("e" + std::to_string(i)), Value::sym(nodes[b])});
            edges.emplace_back(a, b);
        }
        int root = std::uniform_int_distribution<int>(0, n - 1)(rng);
        int target = std::uniform_int_distribution<int>(0, n - 1)(rng);
        int want_depth = 0;
        bool want = bfs_oracle(edges, root, target, n, &want_depth);
        auto got = linked(graph, nodes[root], nodes[target]);
        CHECK(got.reachable == want);
        if (want) CHECK(got.depth == want_depth);
    }
}

TEST_CASE("bla matches hand-computed values") {
    // single access of age 1 s
    std::vector<int64_t> one{1000};
    CHECK(bla(one, 2000, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
    // ages 2 s and 1 s
    std::vector<int64_t> two{1000, 2000};
    double want = std::log(std::pow(2.0, -0.5) + 1.0);
    CHECK(bla(two, 3000, 0.5) == doctest::Approx(want).epsilon(1e-12));
    CHECK(bla(two, 3000, 0.5) == doctest::Approx(0.53475).epsilon(1e-4));
    // empty history is a minus-infinity sentinel
    CHECK(bla({}, 1000, 0.5) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("bla strictly increases with an extra recent access") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        int k = std::uniform_int_distribution<int>(1, 20)(rng);
        int64_t now = std::uniform_int_distribution<int64_t>(100000, 10000000)(rng);
        std::vector<int64_t> hist;
        for (int i = 0; i < k; ++i)
            hist.push_back(std::uniform_int_distribution<int64_t>(0, now - 1000)(rng));
        double base = bla(hist, now, 0.5);
        std::vector<int64_t> more = hist;
        more.push_back(now - 500);
        CHECK(bla(more, now, 0.5) > base);

        // shifting one access later (more recent) also strictly increases
        std::vector<int64_t> shifted = hist;
        size_t pick = std::uniform_int_distribution<size_t>(0, hist.size() - 1)(rng);
        if (shifted[pick] + 100 < now) {
            shifted[pick] += 100;
            CHECK(bla(shifted, now, 0.5) > base);
        }
    }
}

TEST_CASE("status symbols round-trip") {
    SymbolTable t;
    Innate in(t);
    CHECK(status_symbol(in, StatusState::free_) == in.free);
    CHECK(status_symbol(in, StatusState::busy) == in.busy);
    CHECK(status_symbol(in, StatusState::success) == in.success);
    CHECK(status_symbol(in, StatusState::failure) == in.failure);
}
