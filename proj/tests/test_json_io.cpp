#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include <cfikit/json_io.hpp>

using namespace cfikit;

namespace {

TseitinCsp sample_flow() {
    return tseitin(DiGraph::orient_by_vertex_order(UGraph::cycle(4)), FiniteAbelianGroup({2, 3}),
                   SigmaCharge{std::vector<int>{1, 0, 0, 5}});
}

} // namespace

TEST_CASE("group roundtrip and hash stability") {
    FiniteAbelianGroup g({2, 3});
    std::string j = group_to_json(g);
    CHECK(group_from_json(j) == g);
    CHECK(j == group_to_json(g)); // deterministic bytes
    CHECK(content_hash(j) == content_hash(j));
    CHECK(content_hash("a") != content_hash("b"));
    CHECK(content_hash("").size() == 16); // zero-padded hex
}

TEST_CASE("group csp roundtrip") {
    TseitinCsp t = sample_flow();
    std::string j = group_csp_to_json(t.csp);
    GroupCsp back = group_csp_from_json(j);
    CHECK(back.group == t.csp.group);
    CHECK(back.variables == t.csp.variables);
    REQUIRE(back.constraints.size() == t.csp.constraints.size());
    for (std::size_t i = 0; i < back.constraints.size(); ++i) {
        CHECK(back.constraints[i].scope == t.csp.constraints[i].scope);
        CHECK(back.constraints[i].relation.same_coset(t.csp.constraints[i].relation));
    }
    CHECK(group_csp_to_json(back) == j);
}

TEST_CASE("extended csp roundtrip") {
    ExtendedTseitin e = extended_tseitin_disjunction(
        DiGraph::orient_by_vertex_order(UGraph::complete(4)), 1);
    std::string j = extended_csp_to_json(e.csp);
    ExtendedGroupCsp back = extended_csp_from_json(j);
    CHECK(back.arb_scope == e.csp.arb_scope);
    CHECK(back.arb_tuples == e.csp.arb_tuples);
    CHECK(back.base.variables == e.csp.base.variables);
    CHECK(extended_csp_to_json(back) == j);
}

TEST_CASE("explicit csp roundtrip") {
    ExplicitCsp c = boolean_tseitin(DiGraph::orient_by_vertex_order(UGraph::cycle(3)), 3,
                                    SigmaCharge{std::vector<int>{1, 2, 0}});
    std::string j = explicit_csp_to_json(c);
    ExplicitCsp back = explicit_csp_from_json(j);
    CHECK(back.group == c.group);
    CHECK(back.domain == c.domain);
    CHECK(back.variables == c.variables);
    REQUIRE(back.constraints.size() == c.constraints.size());
    for (std::size_t i = 0; i < back.constraints.size(); ++i) {
        CHECK(back.constraints[i].scope == c.constraints[i].scope);
        CHECK(back.constraints[i].tuples == c.constraints[i].tuples);
    }
    CHECK(explicit_csp_to_json(back) == j);
}

TEST_CASE("colored graph roundtrip keeps names and tags") {
    ColoredGraph g;
    int a = g.intern_color("a"), b = g.intern_color("b");
    int red = g.intern_edge_color("red");
    g.add_vertex(a, "first");
    g.add_vertex(b);
    g.add_vertex(a);
    g.add_edge(0, 1, red);
    g.add_edge(1, 2);

    std::string j = colored_graph_to_json(g);
    ColoredGraph back = colored_graph_from_json(j);
    REQUIRE(back.n() == 3);
    CHECK(back.palette()[back.color(0)] == "a");
    CHECK(back.palette()[back.color(1)] == "b");
    CHECK(back.tag(0) == "first");
    CHECK(back.m() == 2);
    CHECK(back.edge_palette()[back.edge_code(0, 1)] == "red");
    CHECK(back.edge_code(1, 2) == -1);
    CHECK(colored_graph_to_json(back) == j);

    CHECK(verify_isomorphism(g, back, {0, 1, 2}));
}

TEST_CASE("graph pair roundtrip") {
    TseitinCsp t = tseitin(DiGraph::orient_by_vertex_order(UGraph::cycle(3)),
                           FiniteAbelianGroup({2}), SigmaCharge{std::vector<int>{0, 0, 0}});
    GraphPair p = cfi_pair(t.csp);
    std::string j = graph_pair_to_json(p);
    GraphPair back = graph_pair_from_json(j);
    CHECK(back.left.n() == p.left.n());
    CHECK(back.right.m() == p.right.m());
    CHECK(back.cfi == nullptr); // layouts are not serialized
    CHECK(verify_isomorphism(p.left, back.left, [&] {
        std::vector<int> id(p.left.n());
        for (int v = 0; v < p.left.n(); ++v) id[v] = v;
        return id;
    }()));
}

TEST_CASE("edge list roundtrip") {
    UGraph g = UGraph::complete(4);
    std::string text = ugraph_to_edge_list(g);
    UGraph back = ugraph_from_edge_list(text);
    CHECK(back == g);
    CHECK(ugraph_from_edge_list("0 1\n2 3\n").n() == 4);
    CHECK_THROWS_AS(ugraph_from_edge_list("0 x"), Error);
}

TEST_CASE("plain export subdivides and tags colors") {
    ColoredGraph g;
    int a = g.intern_color("a");
    g.add_vertex(a);
    g.add_vertex(a);
    g.add_edge(0, 1, g.intern_edge_color("red"));

    std::string text = dimacs_plain(g);
    REQUIRE(text.rfind("p edge ", 0) == 0);
    // counts on the p line match the emitted e lines
    std::istringstream in(text);
    std::string tok;
    int n = 0, m = 0;
    in >> tok >> tok >> n >> m;
    int lines = 0, u, v;
    while (in >> tok >> u >> v) {
        CHECK(tok == "e");
        CHECK(u >= 1);
        CHECK(v >= 1);
        CHECK(u <= n);
        CHECK(v <= n);
        ++lines;
    }
    CHECK(lines == m);
    CHECK(n > 2); // subdivision and tails added structure
}

TEST_CASE("system text roundtrip") {
    ColoredGraph g;
    int c = g.intern_color("v");
    g.add_vertex(c);
    g.add_vertex(c);
    g.add_edge(0, 1);
    LisoSystem sys(g, g, 1);
    MaterializedSystem m = sys.materialize();

    std::string text = system_to_text(m);
    MaterializedSystem back = system_from_text(text);
    CHECK(back.nvars == m.nvars);
    REQUIRE(back.rows.size() == m.rows.size());
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        CHECK(back.rows[i].terms == m.rows[i].terms);
        CHECK(back.rows[i].rhs == m.rows[i].rhs);
    }
    CHECK(system_to_text(back) == text);
    CHECK_THROWS_AS(system_from_text("vars\n"), Error);

    std::string vj = varindex_to_json(m);
    CHECK(vj.find("\"nvars\"") != std::string::npos);
    CHECK(vj.find("\"keys\"") != std::string::npos);
}

TEST_CASE("solution vector roundtrip") {
    std::vector<std::pair<long, Rat>> entries = {{0, Rat(1)}, {3, Rat(1, 2)}, {7, Rat(-2, 3)}};
    std::string j = solution_to_json(entries);
    auto back = solution_from_json(j);
    CHECK(back == entries);
    CHECK(solution_to_json(back) == j);
    CHECK(solution_from_json("{}").empty());
    CHECK_THROWS_AS(solution_from_json("[1,2]"), Error);
}

TEST_CASE("poly system text roundtrip") {
    DiGraph k4 = DiGraph::orient_by_vertex_order(UGraph::complete(4));
    PolySystem s = p_csp(boolean_tseitin(k4, 2, SigmaCharge{std::vector<int>(4, 0)}));
    std::string text = poly_system_to_text(s);
    PolySystem back = poly_system_from_text(text);
    CHECK(back.nvars == s.nvars);
    REQUIRE(back.axioms.size() == s.axioms.size());
    for (std::size_t i = 0; i < s.axioms.size(); ++i) CHECK(back.axioms[i] == s.axioms[i]);
    CHECK(poly_system_to_text(back) == text);

    PolySystem tiny = poly_system_from_text("# vars 5\nx1*x4 + -1\n\nx0\n");
    CHECK(tiny.nvars == 5);
    CHECK(tiny.axioms.size() == 2);
    CHECK_THROWS_AS(poly_system_from_text("# vars 2\nx0 ++ 1\n"), Error);
}

TEST_CASE("report emitters are stable and well formed") {
    ColoredGraph c6 = plain_colored(UGraph::cycle(6));
    ColoredGraph tt = plain_colored(UGraph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}));
    WlReport rep = wl_report(c6, tt, 2);
    std::string j = wl_report_to_json(rep);
    CHECK(j == wl_report_to_json(rep));
    CHECK(j.find("\"min_distinguishing_k\"") != std::string::npos);

    VerifyResult vr;
    vr.ok = false;
    vr.equations = 7;
    vr.terms = 9;
    vr.violated = "unit";
    vr.lhs = Rat(1, 2);
    vr.rhs = 1;
    std::string vj = verify_result_to_json(vr);
    CHECK(vj.find("\"violated\"") != std::string::npos);
    CHECK(vj.find("1/2") != std::string::npos);

    ExpanderProfile p = expander_profile(UGraph::complete(4));
    std::string pj = expander_profile_to_json(p);
    CHECK(pj.find("\"h\"") != std::string::npos);

    CoreResult cr = two_connected_core(UGraph::complete(4), 0);
    std::string cj = core_result_to_json(cr);
    CHECK(cj == core_result_to_json(cr));
}

TEST_CASE("bad documents raise io errors") {
    CHECK_THROWS_AS(group_from_json("{"), Error);
    CHECK_THROWS_AS(group_from_json("[]"), Error);
    CHECK_THROWS_AS(colored_graph_from_json("{\"vertices\":3}"), Error);
    CHECK_THROWS_AS(explicit_csp_from_json("{\"group\":{\"moduli\":[2]}}"), Error);
}
