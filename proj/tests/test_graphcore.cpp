#include <doctest.h>

#include <bit>
#include <cstdlib>

#include <cfikit/graphcore.hpp>

using namespace cfikit;

namespace {

std::uint64_t mix(std::uint64_t & s) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
}

} // namespace

TEST_CASE("closure is a matroid closure on E(K4)") {
    UGraph g = UGraph::complete(4);
    REQUIRE(g.m() == 6);
    for (EdgeMask x = 0; x < 64; ++x) {
        EdgeMask cx = closure(g, x);
        CHECK((cx & x) == x);             // extensive
        CHECK(closure(g, cx) == cx);      // idempotent
        for (EdgeMask y = 0; y < 64; ++y)
            if ((x & y) == x) CHECK((closure(g, y) & cx) == cx); // monotone
        // exchange: y not in cl(X), y in cl(X+e) => e in cl(X+y)
        for (int e = 0; e < 6; ++e)
            for (int y = 0; y < 6; ++y) {
                if (cx & (EdgeMask{1} << y)) continue;
                EdgeMask xe = x | (EdgeMask{1} << e);
                if (! (closure(g, xe) & (EdgeMask{1} << y))) continue;
                CHECK((closure(g, x | (EdgeMask{1} << y)) & (EdgeMask{1} << e)) != 0);
            }
    }
}

TEST_CASE("rank is order independent and matroid-monotone") {
    UGraph g = UGraph::complete(4);
    // rank via greedy in id order must match the closure-theoretic rank of
    // any reordering; spot-check against an independent recomputation
    for (EdgeMask x = 0; x < 64; ++x) {
        int r = rank(g, x);
        CHECK(r >= 0);
        CHECK(r <= std::popcount(x));
        // greedy from the top end
        int r2 = 0;
        EdgeMask taken = 0;
        for (int e = 5; e >= 0; --e) {
            if (! (x & (EdgeMask{1} << e))) continue;
            if (! (closure(g, taken) & (EdgeMask{1} << e))) {
                taken |= EdgeMask{1} << e;
                ++r2;
            }
        }
        CHECK(r == r2);
        CHECK(rank(g, closure(g, x)) == r);
    }
    CHECK(rank(g, full_edge_mask(g)) == 3); // cycle rank of K4
}

TEST_CASE("bridges and components") {
    // two triangles joined by one edge: that edge is the only bridge
    UGraph g(6, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {4, 5}, {3, 5}});
    EdgeMask b = bridges_in(g, full_edge_mask(g));
    CHECK(b == (EdgeMask{1} << g.edge_index(2, 3)));
    int count = 0;
    auto comp = components_without(g, b, &count);
    CHECK(count == 2);
    CHECK(comp[0] == comp[1]);
    CHECK(comp[0] != comp[3]);
    CHECK(is_connected(g));
    CHECK_FALSE(is_two_connected(g));
    CHECK(is_two_connected(UGraph::complete(4)));
    CHECK(is_two_connected(UGraph::cycle(5)));
}

TEST_CASE("two connected core is certified or empty") {
    UGraph g = UGraph::complete(4);
    CoreResult whole = two_connected_core(g, 0);
    CHECK_FALSE(whole.core_empty);
    CHECK(whole.certified);
    CHECK(whole.block.size() == 4);

    // removing a triangle of K4 leaves a star: no 2-connected block
    EdgeMask tri = edges_to_mask({g.edge_index(0, 1), g.edge_index(0, 2), g.edge_index(1, 2)});
    CoreResult r = two_connected_core(g, tri);
    CHECK((r.core_empty || r.certified));

    std::uint64_t s = 99;
    UGraph h = random_regular_2connected(10, 3, 7);
    for (int trial = 0; trial < 200; ++trial) {
        EdgeMask x = mix(s) & full_edge_mask(h);
        CoreResult c = two_connected_core(h, x);
        CHECK((c.core_empty || c.certified));
        CHECK((c.xhat & x) == x);
    }
}

TEST_CASE("exact expansion ratios") {
    ExpansionResult k4 = expansion_exact(UGraph::complete(4));
    CHECK(k4.num * 1 == k4.den * 2); // h(K4) = 2
    ExpansionResult c6 = expansion_exact(UGraph::cycle(6));
    CHECK(c6.num * 3 == c6.den * 2); // h(C6) = 2/3
    ExpansionResult k2 = expansion_exact(UGraph::complete(2));
    CHECK(k2.num == k2.den); // h(K2) = 1
}

TEST_CASE("random cubic graphs are 3-regular, 2-connected, seed-stable") {
    UGraph a = random_regular_2connected(10, 3, 42);
    UGraph b = random_regular_2connected(10, 3, 42);
    UGraph c = random_regular_2connected(10, 3, 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(a.n() == 10);
    CHECK(a.m() == 15);
    for (int v = 0; v < a.n(); ++v) CHECK(a.degree(v) == 3);
    CHECK(is_two_connected(a));
}

TEST_CASE("flow consistency over small components") {
    FiniteAbelianGroup z2({2});
    UGraph g = UGraph::complete(4);
    DiGraph h = DiGraph::orient_by_vertex_order(g);
    SigmaCharge zero{std::vector<int>(4, 0)};

    EdgeAssignment psi(g.m());
    CHECK(is_k_consistent(h, z2, zero, psi, robust_k(4)));

    // all edges at vertex 0 set to 1: odd sum at the singleton component {0}
    // never becomes visible unless 0 is an isolated small component
    EdgeAssignment bad(g.m());
    for (auto [u, e] : g.neighbors(0)) bad.value[e] = 1;
    // components of G - dom(bad): {0} alone and {1,2,3}; sum at {0} is 3 = 1 mod 2 != 0
    CHECK_FALSE(is_k_consistent(h, z2, zero, bad, robust_k(4)));

    SigmaCharge charged{std::vector<int>{1, 0, 0, 0}};
    CHECK(is_k_consistent(h, z2, charged, bad, robust_k(4)));
}

TEST_CASE("mask tables agree with direct computation") {
    UGraph g = UGraph::complete(4);
    DiGraph h = DiGraph::orient_by_vertex_order(g);
    GraphMaskTables t(h, robust_k(4));
    for (EdgeMask x = 0; x < 64; ++x) {
        CHECK(t.rank_of(x) == rank(g, x));
        int count = 0;
        auto comp = components_without(g, x, &count);
        // every listed small component has <= n/3 vertices and its boundary
        // edges all cross the component
        for (const auto & sc : t.small_components(x)) {
            CHECK(std::popcount(sc.vertices) <= robust_k(4));
            for (auto [e, sign] : sc.boundary) {
                CHECK((x & (EdgeMask{1} << e)) != 0);
                bool tin = (sc.vertices >> h.tail(e)) & 1;
                bool hin = (sc.vertices >> h.head(e)) & 1;
                CHECK(tin != hin);
                CHECK(sign == (tin ? +1 : -1));
            }
        }
        (void)comp;
    }
}

TEST_CASE("expander profile of K4") {
    ExpanderProfile p = expander_profile(UGraph::complete(4));
    CHECK(p.n == 4);
    CHECK(p.m == 6);
    CHECK(p.h_num * 1 == p.h_den * 2);
    CHECK(p.ell_suggest >= 0);
}

TEST_CASE("min cut with side bound") {
    CutResult r = min_cut_with_sides(UGraph::cycle(6), 2);
    CHECK(r.size == 2);
}
