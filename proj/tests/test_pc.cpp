#include <doctest.h>

#include <vector>

#include <cfikit/pc.hpp>

using namespace cfikit;

namespace {

TseitinCsp triangle_flow(const FiniteAbelianGroup & g, std::vector<int> charge) {
    return tseitin(DiGraph::orient_by_vertex_order(UGraph::cycle(3)), g,
                   SigmaCharge{std::move(charge)});
}

PolySystem axioms_of(std::vector<MultilinearPoly> polys, int nvars) {
    PolySystem s;
    s.nvars = nvars;
    s.axioms = std::move(polys);
    return s;
}

} // namespace

TEST_CASE("multilinear arithmetic") {
    MultilinearPoly x0 = MultilinearPoly::variable(0, 0);
    MultilinearPoly one = MultilinearPoly::constant(0, 1);

    // x*x collapses to x, so (x0+1)^2 = 3*x0 + 1
    MultilinearPoly sq = (x0 + one) * (x0 + one);
    MultilinearPoly expect = x0.scaled(3) + one;
    CHECK(sq == expect);
    CHECK(sq.degree() == 1);
    CHECK(sq.coefficient({0}) == 3);
    CHECK(sq.coefficient({}) == 1);
    CHECK(sq.evaluate01({1}, 5) == 4);
    CHECK(sq.evaluate01({0}, 5) == 1);

    // the same square over F2 is x0 + 1
    MultilinearPoly x0p2 = MultilinearPoly::variable(2, 0);
    MultilinearPoly sq2 = (x0p2 + MultilinearPoly::constant(2, 1)) *
                          (x0p2 + MultilinearPoly::constant(2, 1));
    CHECK(sq2 == x0p2 + MultilinearPoly::constant(2, 1));

    CHECK(MultilinearPoly(0).degree() == -1);
    CHECK(MultilinearPoly(0).is_zero());
    CHECK((x0 - x0).is_zero());
    CHECK(MultilinearPoly::constant(3, 5) == MultilinearPoly::constant(3, 2));

    // add_term merges repeated variables
    MultilinearPoly dup(0);
    dup.add_term({0, 0}, 1);
    CHECK(dup == x0);

    CHECK(x0.times_var(1) == MultilinearPoly::monomial(0, {0, 1}));
    CHECK(x0.times_var(0) == x0);
}

TEST_CASE("printing and parsing") {
    MultilinearPoly p = MultilinearPoly::monomial(0, {0, 3}, 2) - MultilinearPoly::constant(0, 1);
    CHECK(p.to_string() == "-1 + 2*x0*x3");
    CHECK(MultilinearPoly::parse(0, p.to_string()) == p);
    CHECK(MultilinearPoly(0).to_string() == "0");
    CHECK(MultilinearPoly::parse(0, "0").is_zero());
    CHECK(MultilinearPoly::parse(0, "-x2") == MultilinearPoly::monomial(0, {2}, -1));
    CHECK(MultilinearPoly::parse(2, "3*x1") == MultilinearPoly::variable(2, 1));
    CHECK_THROWS_AS(MultilinearPoly::parse(0, "x0 + y1"), Error);
}

TEST_CASE("boolean flow instance system shape") {
    DiGraph k4 = DiGraph::orient_by_vertex_order(UGraph::complete(4));
    ExplicitCsp c = boolean_tseitin(k4, 2, SigmaCharge{std::vector<int>(4, 0)});
    PcspVariables vars;
    PolySystem s = p_csp(c, &vars);
    CHECK(s.nvars == 12);
    CHECK(vars.id(0, 0) == 0);
    CHECK(vars.id(0, 1) == 1);
    CHECK(vars.id(1, 0) == 2);
    // 6 value sums + 6 disjointness pairs + 4*4 forbidden tuples
    CHECK(s.axioms.size() == 28);
    int deg1 = 0, deg2 = 0, deg3 = 0;
    for (const auto & a : s.axioms) {
        if (a.degree() == 1) ++deg1;
        if (a.degree() == 2) ++deg2;
        if (a.degree() == 3) ++deg3;
    }
    CHECK(deg1 == 6);
    CHECK(deg2 == 6);
    CHECK(deg3 == 16);
}

TEST_CASE("pair system shape on a single edge") {
    ColoredGraph g;
    int c = g.intern_color("v");
    g.add_vertex(c);
    g.add_vertex(c);
    g.add_edge(0, 1);
    PisoVariables vars;
    PolySystem s = p_iso(g, g, &vars);
    CHECK(s.nvars == 4);
    REQUIRE(vars.pairs.size() == 4);
    CHECK(vars.pairs[0] == std::pair<int, int>({0, 0}));
    CHECK(vars.id(1, 1) == 3);
    CHECK(vars.id(0, 2) == -1);
    // 2 row sums + 2 column sums + 4 clash products; the two honest
    // matchings produce no axiom
    CHECK(s.axioms.size() == 8);
}

TEST_CASE("derivability agrees with semantics on pinned systems") {
    MultilinearPoly x0 = MultilinearPoly::variable(0, 0);
    MultilinearPoly one = MultilinearPoly::constant(0, 1);

    // satisfiable: 1 is never derivable
    PolySystem sat = axioms_of({x0}, 1);
    CHECK(satisfiable01(sat, 2));
    CHECK_FALSE(degree_d_derivable(sat, 2, 2, one));
    CHECK_FALSE(min_refutation_degree(sat, 2, 2).has_value());

    // x0 = 0 and x0 = 1 refute at degree 1 but not 0
    PolySystem uns = axioms_of({x0, x0 - one}, 1);
    CHECK_FALSE(satisfiable01(uns, 2));
    CHECK_FALSE(degree_d_derivable(uns, 2, 0, one));
    ClosureTrail trail;
    CHECK(degree_d_derivable(uns, 2, 1, one, 100000, &trail));
    REQUIRE_FALSE(trail.dim_per_round.empty());
    CHECK(trail.dim_per_round[0] == 2);
    auto d = min_refutation_degree(uns, 2, 3);
    REQUIRE(d.has_value());
    CHECK(*d == 1);

    // three-variable conflict needs a product step
    MultilinearPoly x1 = MultilinearPoly::variable(0, 1);
    MultilinearPoly x2 = MultilinearPoly::variable(0, 2);
    PolySystem uns3 = axioms_of({x0 * x1 - one, x0 * x2 - one, x1 + x2 - one}, 3);
    CHECK_FALSE(satisfiable01(uns3, 2));
    auto d3 = min_refutation_degree(uns3, 2, 4);
    REQUIRE(d3.has_value());
    CHECK(*d3 >= 2);
    // and the same refutation exists over F3
    CHECK(min_refutation_degree(uns3, 3, 4).has_value());

    CHECK_THROWS_AS(degree_d_derivable(uns3, 4, 2, one), Error); // p must be prime
}

TEST_CASE("search budgets are enforced") {
    DiGraph k4 = DiGraph::orient_by_vertex_order(UGraph::complete(4));
    PolySystem s = p_csp(boolean_tseitin(k4, 2, SigmaCharge{std::vector<int>(4, 0)}));
    MultilinearPoly one = MultilinearPoly::constant(0, 1);
    CHECK_THROWS_AS(degree_d_derivable(s, 2, 2, one, 3), Error);
    CHECK_THROWS_AS(satisfiable01(s, 2, 4), Error);
    CHECK(satisfiable01(s, 2)); // default budget covers 2^12
}

TEST_CASE("empty variable sets refute at degree zero") {
    ColoredGraph a, b;
    a.add_vertex(a.intern_color("a"));
    b.add_vertex(b.intern_color("b"));
    PolySystem s = p_iso(a, b);
    CHECK(s.nvars == 0);
    CHECK(s.axioms.size() == 2); // both sums collapse to -1
    CHECK_FALSE(satisfiable01(s, 2));
    auto d = min_refutation_degree(s, 2, 2);
    REQUIRE(d.has_value());
    CHECK(*d == 0);
}

TEST_CASE("substitution plumbing") {
    MultilinearPoly x0 = MultilinearPoly::variable(0, 0);
    MultilinearPoly one = MultilinearPoly::constant(0, 1);
    PolySystem s = axioms_of({x0 * MultilinearPoly::variable(0, 1), x0 - one}, 2);

    PolySystem same = apply_substitution(identity_substitution(s), s);
    REQUIRE(same.axioms.size() == s.axioms.size());
    CHECK(same.nvars == s.nvars);
    for (std::size_t i = 0; i < s.axioms.size(); ++i) CHECK(same.axioms[i] == s.axioms[i]);

    // wrong domain size
    Substitution small = identity_substitution(axioms_of({x0}, 1));
    CHECK_THROWS_AS(apply_substitution(small, s), Error);

    // declared degree bound is checked on application
    Substitution lying = identity_substitution(s);
    lying.d1 = 0;
    CHECK_THROWS_AS(apply_substitution(lying, s), Error);
}

TEST_CASE("gadget reduction degree") {
    CHECK(gadget_reduction_degree(3, 2) == 197); // (3*2 + 2^3)^2 + 1
    CHECK(gadget_reduction_degree(1, 2) == 17);  // (2 + 2)^2 + 1
    CHECK_THROWS_AS(gadget_reduction_degree(0, 2), Error);
    CHECK_THROWS_AS(gadget_reduction_degree(9, 2), Error);
    CHECK_THROWS_AS(gadget_reduction_degree(3, 0), Error);
    CHECK_THROWS_AS(gadget_reduction_degree(3, 13), Error);
}

TEST_CASE("reduction catalog") {
    auto rows = builtin_reductions(3, 2);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].name == "csp-to-iso");
    CHECK(rows[0].d1 == 3);
    CHECK(rows[0].d2 == 197);
    CHECK(rows[1].name == "iso-to-csp");
    CHECK(rows[1].d1 == 1);
    CHECK(rows[2].name == "component-fixing");
    CHECK(rows[2].d2 == 2);
    CHECK(rows[3].name == "boolean-to-extended");
    CHECK(rows[3].d2 == 4);
    for (const auto & r : rows) CHECK_FALSE(r.needs.empty());
}

TEST_CASE("gadget reductions preserve solutions pointwise") {
    FiniteAbelianGroup z2({2});
    TseitinCsp t = triangle_flow(z2, {0, 0, 0});
    GraphPair pair = cfi_pair(t.csp);
    ExplicitCsp ec = to_explicit(t.csp);

    PisoVariables iv;
    PolySystem piso = p_iso(pair.left, pair.right, &iv);
    PcspVariables cv;
    PolySystem pcsp = p_csp(ec, &cv);

    SolveResult sol = brute_force_solve(ec);
    REQUIRE(sol.satisfiable);
    std::vector<int> mapping = iso_from_solution(pair, sol.solution);

    // indicator assignments on both sides
    std::vector<std::uint8_t> iso_assign(iv.pairs.size(), 0);
    for (std::size_t i = 0; i < iv.pairs.size(); ++i)
        iso_assign[i] = mapping[iv.pairs[i].first] == iv.pairs[i].second;
    std::vector<std::uint8_t> csp_assign(static_cast<std::size_t>(pcsp.nvars), 0);
    for (int x = 0; x < ec.var_count(); ++x)
        csp_assign[static_cast<std::size_t>(cv.id(x, sol.solution[x]))] = 1;

    // csp-to-iso: target axioms vanish at the gadget image of the solution
    Substitution ci = reduction_csp_to_iso(pair, iv);
    CHECK(ci.d1 == 2); // triangle constraints have arity 2
    CHECK(ci.source_vars == pcsp.nvars);
    PolySystem moved = apply_substitution(ci, piso);
    REQUIRE(moved.axioms.size() == piso.axioms.size());
    for (const auto & a : moved.axioms) CHECK(a.evaluate01(csp_assign, 5) == 0);

    // iso-to-csp: csp axioms vanish at the indicator of the isomorphism
    Substitution ic = reduction_iso_to_csp(pair, iv);
    CHECK(ic.d1 == 1);
    CHECK(ic.source_vars == static_cast<int>(iv.pairs.size()));
    PolySystem back = apply_substitution(ic, pcsp);
    for (const auto & a : back.axioms) CHECK(a.evaluate01(iso_assign, 5) == 0);
}

TEST_CASE("component fixing reduction on a tiny disjunction") {
    auto tiny = [](const std::string & c) {
        ColoredGraph g;
        g.add_vertex(g.intern_color(c));
        return g;
    };
    GraphPair a{tiny("a"), tiny("a"), nullptr, nullptr};
    GraphPair b{tiny("b"), tiny("b"), nullptr, nullptr};
    GraphPair orp = or_pair({a, b});

    PisoVariables ov;
    PolySystem orsys = p_iso(orp.left, orp.right, &ov);
    PisoVariables comp0;
    PolySystem inner = p_iso(a.left, a.right, &comp0);
    (void)inner;
    REQUIRE(comp0.pairs.size() == 1);

    Substitution fix = reduction_component_fixing(orp, 0, ov, comp0);
    CHECK(fix.d1 == 1);
    CHECK(fix.d2 == 2);
    CHECK(fix.source_vars == static_cast<int>(comp0.pairs.size()));
    REQUIRE(fix.map.size() == ov.pairs.size());

    // the identity isomorphism of the distinguished input zeroes everything
    std::vector<std::uint8_t> assign(comp0.pairs.size(), 1);
    PolySystem moved = apply_substitution(fix, orsys);
    for (const auto & ax : moved.axioms) CHECK(ax.evaluate01(assign, 5) == 0);
}

TEST_CASE("boolean embedding of the disjunction instance") {
    DiGraph tri = DiGraph::orient_by_vertex_order(UGraph::cycle(3));
    ExtendedTseitin ext = extended_tseitin_disjunction(tri, 0);

    Substitution sub = reduction_boolean_to_extended(ext, 2);
    CHECK(sub.source_vars == 6); // two indicators per edge
    CHECK(sub.d1 == 1);
    CHECK(sub.d2 == 4); // vstar absorbs the fresh variable: arity 3 + 1
    CHECK_THROWS_AS(reduction_boolean_to_extended(ext, 5), Error);

    PolySystem target = p_csp(to_explicit(ext.csp));
    PolySystem moved = apply_substitution(sub, target);

    // a boolean solution of the point-charge instance kills every axiom
    ExplicitCsp boolcsp = boolean_tseitin(tri, 2, SigmaCharge{std::vector<int>{1, 0, 0}});
    SolveResult sol = brute_force_solve(boolcsp);
    REQUIRE(sol.satisfiable);
    std::vector<std::uint8_t> assign(6, 0);
    for (int e = 0; e < 3; ++e) assign[static_cast<std::size_t>(2 * e + sol.solution[e])] = 1;
    for (const auto & ax : moved.axioms) CHECK(ax.evaluate01(assign, 7) == 0);
}
