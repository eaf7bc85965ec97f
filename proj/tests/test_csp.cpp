#include <doctest.h>

#include <algorithm>

#include <cfikit/csp.hpp>

using namespace cfikit;

namespace {

TseitinCsp k4_tseitin(const FiniteAbelianGroup & g, const SigmaCharge & sigma) {
    return tseitin(DiGraph::orient_by_vertex_order(UGraph::complete(4)), g, sigma);
}

} // namespace

TEST_CASE("tseitin shape over K4") {
    FiniteAbelianGroup z2({2});
    TseitinCsp t = k4_tseitin(z2, SigmaCharge{std::vector<int>(4, 0)});
    CHECK(t.csp.var_count() == 6);          // one per edge
    CHECK(t.csp.constraints.size() == 4);   // one per vertex
    for (const auto & con : t.csp.constraints) {
        CHECK(con.scope.size() == 3);       // cubic
        CHECK(con.relation.size() == 4);    // |Z2|^(3-1)
        CHECK(std::is_sorted(con.scope.begin(), con.scope.end()));
    }
}

TEST_CASE("tseitin satisfiable iff total charge vanishes") {
    FiniteAbelianGroup z2({2});
    SigmaCharge zero{std::vector<int>(4, 0)};
    SigmaCharge odd{std::vector<int>{1, 0, 0, 0}};
    SigmaCharge even{std::vector<int>{1, 1, 0, 0}};

    SolveResult a = brute_force_solve(to_explicit(k4_tseitin(z2, zero).csp), true);
    CHECK(a.satisfiable);
    CHECK(a.count == 8); // cycle space of K4 has 2^3 elements
    CHECK_FALSE(brute_force_solve(to_explicit(k4_tseitin(z2, odd).csp)).satisfiable);
    CHECK(brute_force_solve(to_explicit(k4_tseitin(z2, even).csp)).satisfiable);

    FiniteAbelianGroup z3({3});
    SigmaCharge charged3{std::vector<int>{1, 0, 0, 2}}; // total 0 mod 3
    CHECK(brute_force_solve(to_explicit(k4_tseitin(z3, charged3).csp)).satisfiable);
    SigmaCharge bad3{std::vector<int>{1, 0, 0, 0}};
    CHECK_FALSE(brute_force_solve(to_explicit(k4_tseitin(z3, bad3).csp)).satisfiable);
}

TEST_CASE("solutions satisfy the instance") {
    FiniteAbelianGroup z3({3});
    TseitinCsp t = k4_tseitin(z3, SigmaCharge{std::vector<int>(4, 0)});
    ExplicitCsp ec = to_explicit(t.csp);
    SolveResult r = brute_force_solve(ec);
    REQUIRE(r.satisfiable);
    CHECK(satisfies(ec, r.solution));
    auto broken = r.solution;
    broken[0] = (broken[0] + 1) % 3;
    // flipping one edge breaks exactly its two endpoint constraints
    CHECK_FALSE(satisfies(ec, broken));
}

TEST_CASE("homogenize zeroes the shifts and is satisfiable") {
    FiniteAbelianGroup z2({2});
    TseitinCsp t = k4_tseitin(z2, SigmaCharge{std::vector<int>{1, 0, 0, 0}});
    GroupCsp h = homogenize(t.csp);
    CHECK(h.var_count() == t.csp.var_count());
    REQUIRE(h.constraints.size() == t.csp.constraints.size());
    for (std::size_t i = 0; i < h.constraints.size(); ++i) {
        CHECK(h.constraints[i].scope == t.csp.constraints[i].scope);
        CHECK(h.constraints[i].relation.contains(0)); // subgroup itself
        CHECK(h.constraints[i].relation.subgroup() == t.csp.constraints[i].relation.subgroup());
    }
    std::vector<int> zeros(static_cast<std::size_t>(h.var_count()), 0);
    CHECK(satisfies(to_explicit(h), zeros));
}

TEST_CASE("boolean tseitin uses 0/1 inside Z_p") {
    FiniteAbelianGroup z3({3});
    DiGraph h = DiGraph::orient_by_vertex_order(UGraph::complete(4));
    ExplicitCsp c = boolean_tseitin(h, 3, SigmaCharge{std::vector<int>(4, 0)});
    CHECK(c.group.order() == 3);
    CHECK(c.domain == std::vector<int>({0, 1}));
    CHECK(c.var_count() == 6);
    CHECK(c.constraints.size() == 4);
    CHECK(brute_force_solve(c).satisfiable); // all-zero flow
    // mod-2 boolean Tseitin with odd charge is the classic unsatisfiable one
    ExplicitCsp odd =
        boolean_tseitin(h, 2, SigmaCharge{std::vector<int>{1, 1, 1, 1}});
    CHECK(brute_force_solve(odd).satisfiable); // total charge 0 mod 2
    ExplicitCsp odd1 = boolean_tseitin(h, 2, SigmaCharge{std::vector<int>{1, 0, 0, 0}});
    CHECK_FALSE(brute_force_solve(odd1).satisfiable);
}

TEST_CASE("two charge disjunction instance") {
    DiGraph h = DiGraph::orient_by_vertex_order(UGraph::complete(4));
    ExtendedTseitin e = extended_tseitin_disjunction(h, 0);
    const FiniteAbelianGroup & g = e.csp.base.group;
    CHECK(g.moduli() == std::vector<int>({2, 3}));
    CHECK(e.xstar == 6);                         // appended after the edges
    CHECK(e.csp.var_count() == 7);
    CHECK(e.csp.arb_scope == std::vector<int>({6}));
    CHECK(e.csp.arb_tuples ==
          std::vector<long>({g.encode({0, 1}), g.encode({1, 0})})); // sorted codes {1,3}

    // each fixing pins x* and is unsatisfiable (charge becomes nonzero)
    for (long t : e.csp.arb_tuples) {
        GroupCsp fixed = fix_arbitrary(e.csp, t);
        CHECK_FALSE(brute_force_solve(to_explicit(fixed)).satisfiable);
    }
    // the disjunction itself is unsatisfiable: both fixings are
    CHECK_FALSE(brute_force_solve(to_explicit(e.csp)).satisfiable);
}

TEST_CASE("fixing the arbitrary constraint keeps other relations") {
    DiGraph h = DiGraph::orient_by_vertex_order(UGraph::cycle(4));
    ExtendedTseitin e = extended_tseitin_disjunction(h, 1);
    GroupCsp fixed = fix_arbitrary(e.csp, e.csp.arb_tuples[0]);
    CHECK(fixed.constraints.size() == e.csp.base.constraints.size() + 1);
    const auto & pin = fixed.constraints.back();
    CHECK(pin.scope == e.csp.arb_scope);
    CHECK(pin.relation.size() == 1);
    CHECK(pin.relation.contains(e.csp.arb_tuples[0]));
    CHECK_THROWS_AS(fix_arbitrary(e.csp, 999), Error);
}

TEST_CASE("explicit conversion of the extended instance appends the relation") {
    DiGraph h = DiGraph::orient_by_vertex_order(UGraph::complete(4));
    ExtendedTseitin e = extended_tseitin_disjunction(h, 2);
    ExplicitCsp ec = to_explicit(e.csp);
    REQUIRE(ec.constraints.size() == e.csp.base.constraints.size() + 1);
    const auto & last = ec.constraints.back();
    CHECK(last.scope == e.csp.arb_scope);
    CHECK(last.tuples == e.csp.arb_tuples);
    CHECK(ec.domain.size() == 6); // full group domain
}

TEST_CASE("brute force respects its budget") {
    FiniteAbelianGroup z3({3});
    TseitinCsp t = k4_tseitin(z3, SigmaCharge{std::vector<int>(4, 0)});
    CHECK_THROWS_AS(brute_force_solve(to_explicit(t.csp), false, 10), Error);
}
