#include <doctest.h>

#include <memory>
#include <vector>

#include <cfikit/witness.hpp>

using namespace cfikit;

namespace {

TseitinCsp k4_flow(const FiniteAbelianGroup & g, std::vector<int> charge) {
    return tseitin(DiGraph::orient_by_vertex_order(UGraph::complete(4)), g,
                   SigmaCharge{std::move(charge)});
}

} // namespace

TEST_CASE("charge oracle point values on K4 over Z2") {
    TseitinCsp t = k4_flow(FiniteAbelianGroup({2}), {0, 0, 0, 0});
    PsiOracle o = psi(t, 3);

    CHECK(o.value({}) == 1);
    CHECK(o.value({{0, 1}}) == Rat(1, 2)); // rank of one edge is 1
    CHECK(o.value({{0, 0}}) == Rat(1, 2));
    // the full star of vertex 0 isolates it; rank of the star is 2
    CHECK(o.value({{0, 1}, {1, 1}, {2, 0}}) == Rat(1, 4)); // 1+1+0 = 0
    CHECK(o.value({{0, 1}, {1, 0}, {2, 0}}) == 0);         // charge 1 at v0
    CHECK(o.value({{0, 0}, {0, 1}}) == 0);                 // conflicting entries
    CHECK(o.value({{99, 0}}) == 0);                        // not a variable

    CHECK(o.rank_full() == 3);
    CHECK(o.has_scaled());
    CHECK(o.scale() == 8);
    CHECK(o.scaled({}) == 8);
    CHECK(o.scaled({{0, 1}}) == 4);

    PsiOracle shallow = psi(t, 1);
    CHECK_THROWS_AS(shallow.value({{0, 1}, {1, 1}}), Error);
}

TEST_CASE("oracle solves the partial-solution system for any charge") {
    FiniteAbelianGroup z2({2});
    for (std::vector<int> charge : {std::vector<int>{0, 0, 0, 0}, std::vector<int>{1, 0, 0, 0}}) {
        TseitinCsp t = k4_flow(z2, charge);
        for (int lvl = 1; lvl <= 2; ++lvl) {
            LcspSystem sys(to_explicit(t.csp), lvl);
            VerifyResult v = sys.verify(psi(t, lvl));
            CHECK(v.ok);
        }
    }
    // triangle over Z3, unsatisfiable total charge
    FiniteAbelianGroup z3({3});
    TseitinCsp tri = tseitin(DiGraph::orient_by_vertex_order(UGraph::cycle(3)), z3,
                             SigmaCharge{std::vector<int>{1, 0, 0}});
    for (int lvl = 1; lvl <= 2; ++lvl) {
        LcspSystem sys(to_explicit(tri.csp), lvl);
        CHECK(sys.verify(psi(tri, lvl)).ok);
    }
}

TEST_CASE("subgroup oracle over Z2xZ3") {
    FiniteAbelianGroup g6({2, 3});
    TseitinCsp t = k4_flow(g6, {0, 0, 0, 0});
    Subgroup delta = Subgroup::span(g6, 1, {static_cast<long>(g6.encode({0, 1}))});
    REQUIRE(delta.size() == 3);

    PsiOracle o = psi_subgroup(t, delta, 2);
    CHECK(o.value({}) == 1);
    CHECK(o.value({{0, g6.encode({0, 1})}}) == Rat(1, 3));
    CHECK(o.value({{0, g6.encode({1, 0})}}) == 0); // outside the subgroup
    // the scale stays group-wide so differently restricted oracles combine
    CHECK(o.scale() == 216);
    CHECK(o.scaled({{0, g6.encode({0, 1})}}) == 72);

    // charge must stay inside the subgroup
    TseitinCsp bad = k4_flow(g6, {g6.encode({1, 0}), 0, 0, 0});
    CHECK_THROWS_AS(psi_subgroup(bad, delta, 1), Error);
    // the subgroup order must be a prime power
    Subgroup whole = Subgroup::span(g6, 1, {static_cast<long>(g6.encode({1, 1}))});
    REQUIRE(whole.size() == 6);
    CHECK_THROWS_AS(psi_subgroup(t, whole, 1), Error);
}

TEST_CASE("fixing oracle of the disjunction instance") {
    DiGraph h = DiGraph::orient_by_vertex_order(UGraph::complete(4));
    ExtendedTseitin e = extended_tseitin_disjunction(h, 0);
    const FiniteAbelianGroup & g = e.csp.base.group;
    int iota2 = g.encode({1, 0});

    ExtendedPsiOracle o(e, iota2, 2);
    CHECK(o.iota() == iota2);
    CHECK(o.xstar() == 6);
    CHECK(o.digit_count() == 7);
    CHECK(o.value({}) == 1);
    // the absorbed variable is only compatible with its own charge
    CHECK(o.value({{6, iota2}}) == 1);
    CHECK(o.value({{6, g.encode({0, 1})}}) == 0);
    // edge entries are cut to the prime-power subgroup
    CHECK(o.value({{0, iota2}}) == Rat(1, 2));
    CHECK(o.value({{0, g.encode({0, 1})}}) == 0);

    // the other fixing must be one of the allowed tuples
    CHECK_THROWS_AS(ExtendedPsiOracle(e, g.encode({1, 1}), 2), Error);
}

TEST_CASE("lift onto the gadget pair") {
    FiniteAbelianGroup z2({2});
    TseitinCsp t = k4_flow(z2, {0, 0, 0, 0});
    GraphPair pair = cfi_pair(t.csp);
    const CfiLayout & L = pair.cfi->left;
    const CfiLayout & R = pair.cfi->right;

    auto phi = std::make_shared<PsiOracle>(psi(t, 3));
    auto lifted = lift_csp_to_iso(phi, 3, pair, 1);

    CHECK(lifted->value({}) == 1);
    // variable-block pair: value of the difference assignment
    CHECK(lifted->value({{L.var_vertex(0, 0), R.var_vertex(0, 1)}}) == Rat(1, 2));
    CHECK(lifted->value({{L.var_vertex(0, 0), R.var_vertex(0, 0)}}) == Rat(1, 2));
    // color mismatch is structurally zero
    CHECK(lifted->value({{L.var_vertex(0, 0), R.var_vertex(1, 0)}}) == 0);
    CHECK(lifted->value({{L.var_vertex(0, 0), R.con_vertex(0, 0)}}) == 0);
    // constraint-block pair: the induced star assignment has rank 2
    TupleSpace ts(z2, 3);
    CHECK(lifted->value({{L.con_vertex(0, ts.encode({0, 1, 1})),
                          R.con_vertex(0, ts.encode({1, 0, 1}))}}) == Rat(1, 4));

    // scaled path agrees with the exact one
    REQUIRE(lifted->has_scaled());
    MapKey probe{{L.var_vertex(0, 0), R.var_vertex(0, 1)}};
    CHECK(Rat(lifted->scaled(probe), lifted->scale()) == lifted->value(probe));

    // the lift solves the isomorphism system, and its transpose the reverse
    LisoSystem sys(pair.left, pair.right, 1);
    CHECK(sys.verify(*lifted).ok);
    LisoSystem rev(pair.right, pair.left, 1);
    auto flipped = std::make_shared<TransposedValuation>(lifted);
    CHECK(rev.verify(*flipped).ok);

    // deeper level with a deeper source oracle
    auto phi6 = std::make_shared<PsiOracle>(psi(t, 6));
    auto lifted2 = lift_csp_to_iso(phi6, 6, pair, 2);
    LisoSystem sys2(pair.left, pair.right, 2);
    CHECK(sys2.verify(*lifted2).ok);
}

TEST_CASE("pipeline on the smallest cubic graph") {
    Theorem41Result r = theorem41_pipeline(UGraph::complete(4), 1);
    const Theorem41Report & rep = r.report;
    CHECK(rep.ok);
    CHECK(rep.level == 1);
    CHECK(rep.csp_level == 4); // the absorbing constraint has arity 4
    CHECK(rep.n == 4);
    CHECK(rep.m == 6);
    CHECK(rep.left_n == r.pair.left.n());
    CHECK(rep.right_n == r.pair.right.n());
    CHECK(rep.component_unsat[0]);
    CHECK(rep.component_unsat[1]);
    CHECK(rep.csp_oracle_ok[0]);
    CHECK(rep.csp_oracle_ok[1]);
    CHECK(rep.lift_forward_ok[0]);
    CHECK(rep.lift_forward_ok[1]);
    CHECK(rep.lift_reverse_ok[0]);
    CHECK(rep.lift_reverse_ok[1]);
    CHECK(rep.nonisomorphic);
    CHECK(rep.combine.p == 2);
    CHECK(rep.combine.q == 3);
    CHECK(rep.sampled_integral);
    CHECK(rep.final_verify.ok);
    REQUIRE(r.solution != nullptr);
    CHECK(r.solution->value({}) == 1);
}
