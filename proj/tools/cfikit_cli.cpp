// Command-line front end.  Exit codes: 0 success, 1 a verified mathematical
// claim failed (the loud-failure channel), 2 usage/budget/io errors.  Stdout
// carries exactly one JSON report; everything else goes to stderr.

#include <cstdint>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <cfikit/json_io.hpp>

using namespace cfikit;
using nlohmann::json;

namespace {

std::string dump(const json & j) { return j.dump(2) + "\n"; }

void report(const std::string & text) { std::cout << text; }

struct Common {
    std::uint64_t seed = 0;
    bool seed_given = false;
    int jobs = 1; // accepted for interface stability; all sections run sequentially
};

bool has_prefix(const std::string & s, const std::string & p) {
    return s.size() >= p.size() && s.compare(0, p.size(), p) == 0;
}

int parse_count(const std::string & s, const std::string & what) {
    require(! s.empty(), ErrorKind::precondition, what + " is empty");
    for (char c : s)
        require(c >= '0' && c <= '9', ErrorKind::precondition, "bad " + what + ": " + s);
    return std::stoi(s);
}

UGraph parse_ugraph(const std::string & spec, const Common & common) {
    if (has_prefix(spec, "cubic:")) {
        require(common.seed_given, ErrorKind::precondition,
                "--seed is required for randomized graphs");
        int n = parse_count(spec.substr(6), "vertex count");
        return random_regular_2connected(n, 3, common.seed);
    }
    if (has_prefix(spec, "file:")) return ugraph_from_edge_list(read_text_file(spec.substr(5)));
    if (spec.size() >= 2 && spec[0] == 'k')
        return UGraph::complete(parse_count(spec.substr(1), "vertex count"));
    if (spec.size() >= 2 && spec[0] == 'c')
        return UGraph::cycle(parse_count(spec.substr(1), "vertex count"));
    if (spec.size() >= 2 && spec[0] == 'p') {
        int n = parse_count(spec.substr(1), "vertex count");
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
        return UGraph(n, std::move(edges));
    }
    throw Error(ErrorKind::precondition,
                "unrecognized graph spec (use kN, cN, pN, cubic:N, file:PATH): " + spec);
}

FiniteAbelianGroup parse_group(const std::string & spec) {
    std::vector<int> moduli;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t next = spec.find('x', pos);
        std::string tok = spec.substr(pos, next == std::string::npos ? next : next - pos);
        require(tok.size() >= 2 && (tok[0] == 'z' || tok[0] == 'Z'), ErrorKind::precondition,
                "unrecognized group spec (use z2, z3, z2xz3, ...): " + spec);
        moduli.push_back(parse_count(tok.substr(1), "modulus"));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return FiniteAbelianGroup(moduli);
}

std::vector<long> parse_long_list(const std::string & spec) {
    std::vector<long> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t next = spec.find(',', pos);
        std::string tok = spec.substr(pos, next == std::string::npos ? next : next - pos);
        if (! tok.empty()) out.push_back(std::stol(tok));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

SigmaCharge parse_sigma(const std::string & spec, const FiniteAbelianGroup & group, int n) {
    SigmaCharge s;
    s.value.assign(static_cast<std::size_t>(n), 0);
    if (spec == "zero") return s;
    if (has_prefix(spec, "odd:v")) {
        int v = parse_count(spec.substr(5), "vertex id");
        require(v >= 0 && v < n, ErrorKind::precondition, "sigma vertex out of range");
        require(group.order() >= 2, ErrorKind::precondition, "group too small");
        s.value[static_cast<std::size_t>(v)] = 1;
        return s;
    }
    if (has_prefix(spec, "codes:")) {
        std::vector<long> codes = parse_long_list(spec.substr(6));
        require(static_cast<int>(codes.size()) == n, ErrorKind::precondition,
                "sigma needs one code per vertex");
        for (int v = 0; v < n; ++v) {
            require(codes[static_cast<std::size_t>(v)] >= 0 &&
                        codes[static_cast<std::size_t>(v)] < group.order(),
                    ErrorKind::precondition, "sigma code out of range");
            s.value[static_cast<std::size_t>(v)] = static_cast<int>(codes[static_cast<std::size_t>(v)]);
        }
        return s;
    }
    throw Error(ErrorKind::precondition,
                "unrecognized sigma spec (use zero, odd:vI, codes:c0,c1,...): " + spec);
}

// accepts group, extended, and explicit instance documents
ExplicitCsp load_explicit_csp(const std::string & text) {
    json j = json::parse(text, nullptr, false);
    require(! j.is_discarded(), ErrorKind::io, "malformed JSON document");
    if (j.contains("arb")) return to_explicit(extended_csp_from_json(text));
    if (j.contains("domain")) return explicit_csp_from_json(text);
    return to_explicit(group_csp_from_json(text));
}

int max_arity(const GroupCsp & c) {
    int k = 1;
    for (const auto & con : c.constraints) k = std::max(k, static_cast<int>(con.scope.size()));
    return k;
}

json sparse_rat(const std::vector<std::pair<long, Rat>> & entries) {
    json j = json::object();
    for (const auto & [idx, v] : entries)
        if (v != 0) j[std::to_string(idx)] = rat_to_string(v);
    return j;
}

// instance file or inline report, depending on -o
void deliver(const std::string & payload, const std::string & out, json meta) {
    if (out.empty()) {
        report(payload);
        return;
    }
    write_text_file(out, payload);
    meta["output"] = out;
    meta["hash"] = content_hash(payload);
    report(dump(meta));
}

struct TseitinArgs {
    std::string graph, group = "z2", sigma = "zero";
    int level = 1;
};

TseitinCsp build_tseitin(const TseitinArgs & a, const Common & common) {
    UGraph g = parse_ugraph(a.graph, common);
    FiniteAbelianGroup grp = parse_group(a.group);
    DiGraph h = DiGraph::orient_by_vertex_order(g);
    return tseitin(h, grp, parse_sigma(a.sigma, grp, g.n()));
}

PsiOracle build_psi(const TseitinCsp & t, int level, const std::string & delta) {
    if (delta.empty()) return psi(t, level);
    Subgroup d = Subgroup::span(t.csp.group, 1, parse_long_list(delta));
    return psi_subgroup(t, d, level);
}

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"group-CSP gadget pairs, lifted linear systems and their exact witnesses"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand
    Common common;
    app.add_option("--seed", common.seed, "seed for randomized constructions")
        ->each([&](const std::string &) { common.seed_given = true; });
    app.add_option("--jobs", common.jobs, "parallelism cap (sections currently run sequentially)")
        ->check(CLI::PositiveNumber);

    long max_vars = kDefaultVarBudget;
    std::uint64_t node_budget = 50'000'000, enum_budget = 10'000'000, tuple_budget = 2'000'000;
    long monomial_budget = 100'000;
    app.add_option("--max-vars", max_vars, "variable cap for materialized systems")
        ->envname("CFIKIT_MAX_VARS");
    app.add_option("--node-budget", node_budget, "search node cap for isomorphism backtracking")
        ->envname("CFIKIT_NODE_BUDGET");
    app.add_option("--enum-budget", enum_budget, "assignment cap for brute-force solving")
        ->envname("CFIKIT_ENUM_BUDGET");
    app.add_option("--tuple-budget", tuple_budget, "tuple cap for refinement runs")
        ->envname("CFIKIT_TUPLE_BUDGET");
    app.add_option("--monomial-budget", monomial_budget, "monomial cap for degree searches")
        ->envname("CFIKIT_MONOMIAL_BUDGET");

    // ------------------------------------------------------------------ gen
    auto * gen = app.add_subcommand("gen", "construct instances");
    gen->require_subcommand(1);

    struct {
        TseitinArgs t;
        std::string out;
    } g_ts;
    auto * gen_ts = gen->add_subcommand("tseitin", "flow instance of an oriented graph");
    gen_ts->add_option("--graph", g_ts.t.graph)->required();
    gen_ts->add_option("--group", g_ts.t.group);
    gen_ts->add_option("--sigma", g_ts.t.sigma);
    gen_ts->add_option("-o,--out", g_ts.out);
    gen_ts->callback([&] {
        TseitinCsp t = build_tseitin(g_ts.t, common);
        deliver(group_csp_to_json(t.csp), g_ts.out,
                {{"kind", "tseitin"},
                 {"variables", t.csp.var_count()},
                 {"constraints", t.csp.constraints.size()}});
    });

    struct {
        std::string graph, sigma = "zero", out;
        int p = 2;
    } g_bts;
    auto * gen_bts = gen->add_subcommand("boolean-tseitin", "0/1 flow instance inside Z_p");
    gen_bts->add_option("--graph", g_bts.graph)->required();
    gen_bts->add_option("-p,--p", g_bts.p)->required();
    gen_bts->add_option("--sigma", g_bts.sigma);
    gen_bts->add_option("-o,--out", g_bts.out);
    gen_bts->callback([&] {
        UGraph g = parse_ugraph(g_bts.graph, common);
        FiniteAbelianGroup zp({g_bts.p});
        DiGraph h = DiGraph::orient_by_vertex_order(g);
        ExplicitCsp c = boolean_tseitin(h, g_bts.p, parse_sigma(g_bts.sigma, zp, g.n()));
        deliver(explicit_csp_to_json(c), g_bts.out,
                {{"kind", "boolean-tseitin"},
                 {"variables", c.var_count()},
                 {"constraints", c.constraints.size()}});
    });

    struct {
        std::string graph, out;
        int vstar = 0;
    } g_ext;
    auto * gen_ext = gen->add_subcommand("extended", "two-charge disjunction instance over Z2xZ3");
    gen_ext->add_option("--graph", g_ext.graph)->required();
    gen_ext->add_option("--vstar", g_ext.vstar);
    gen_ext->add_option("-o,--out", g_ext.out);
    gen_ext->callback([&] {
        UGraph g = parse_ugraph(g_ext.graph, common);
        ExtendedTseitin e =
            extended_tseitin_disjunction(DiGraph::orient_by_vertex_order(g), g_ext.vstar);
        deliver(extended_csp_to_json(e.csp), g_ext.out,
                {{"kind", "extended"},
                 {"variables", e.csp.var_count()},
                 {"xstar", e.xstar}});
    });

    struct {
        TseitinArgs t;
        std::string in, out;
    } g_cfi;
    auto * gen_cfi = gen->add_subcommand("cfi", "gadget graph pair of a group CSP");
    gen_cfi->add_option("--in", g_cfi.in, "group CSP document (overrides --graph)");
    gen_cfi->add_option("--graph", g_cfi.t.graph);
    gen_cfi->add_option("--group", g_cfi.t.group);
    gen_cfi->add_option("--sigma", g_cfi.t.sigma);
    gen_cfi->add_option("-o,--out", g_cfi.out);
    gen_cfi->callback([&] {
        require(! g_cfi.in.empty() || ! g_cfi.t.graph.empty(), ErrorKind::precondition,
                "gen cfi needs --in or --graph");
        GroupCsp c = g_cfi.in.empty()
                         ? build_tseitin(g_cfi.t, common).csp
                         : group_csp_from_json(read_text_file(g_cfi.in));
        GraphPair pair = cfi_pair(c);
        deliver(graph_pair_to_json(pair), g_cfi.out,
                {{"kind", "cfi"}, {"left_n", pair.left.n()}, {"right_n", pair.right.n()}});
    });

    struct {
        std::vector<std::string> in;
        std::string out;
    } g_or;
    auto * gen_or = gen->add_subcommand("or-pair", "disjunction pair of input pairs");
    gen_or->add_option("--in", g_or.in, "input pair documents, one per position")->required();
    gen_or->add_option("-o,--out", g_or.out);
    gen_or->callback([&] {
        std::vector<GraphPair> inputs;
        for (const auto & path : g_or.in)
            inputs.push_back(graph_pair_from_json(read_text_file(path)));
        GraphPair pair = or_pair(inputs);
        deliver(graph_pair_to_json(pair), g_or.out,
                {{"kind", "or-pair"},
                 {"width", inputs.size()},
                 {"left_n", pair.left.n()},
                 {"right_n", pair.right.n()}});
    });

    // ----------------------------------------------------------------- emit
    auto * emit = app.add_subcommand("emit", "materialize systems");
    emit->require_subcommand(1);

    struct {
        std::string in, out, vars_out;
        int level = 1;
    } e_liso, e_lcsp, e_piso, e_pcsp;

    auto * emit_liso = emit->add_subcommand("liso", "partial-isomorphism equality system");
    emit_liso->add_option("--in", e_liso.in, "graph pair document")->required();
    emit_liso->add_option("--level", e_liso.level)->required();
    emit_liso->add_option("-o,--out", e_liso.out);
    emit_liso->add_option("--vars-out", e_liso.vars_out);
    emit_liso->callback([&] {
        GraphPair pair = graph_pair_from_json(read_text_file(e_liso.in));
        LisoSystem sys(pair.left, pair.right, e_liso.level);
        MaterializedSystem ms = sys.materialize(max_vars);
        if (! e_liso.vars_out.empty()) write_text_file(e_liso.vars_out, varindex_to_json(ms));
        deliver(system_to_text(ms), e_liso.out,
                {{"kind", "liso"}, {"nvars", ms.nvars}, {"rows", ms.rows.size()}});
    });

    auto * emit_lcsp = emit->add_subcommand("lcsp", "partial-solution equality system");
    emit_lcsp->add_option("--in", e_lcsp.in, "CSP document")->required();
    emit_lcsp->add_option("--level", e_lcsp.level)->required();
    emit_lcsp->add_option("-o,--out", e_lcsp.out);
    emit_lcsp->add_option("--vars-out", e_lcsp.vars_out);
    emit_lcsp->callback([&] {
        LcspSystem sys(load_explicit_csp(read_text_file(e_lcsp.in)), e_lcsp.level);
        MaterializedSystem ms = sys.materialize(max_vars);
        if (! e_lcsp.vars_out.empty()) write_text_file(e_lcsp.vars_out, varindex_to_json(ms));
        deliver(system_to_text(ms), e_lcsp.out,
                {{"kind", "lcsp"}, {"nvars", ms.nvars}, {"rows", ms.rows.size()}});
    });

    auto * emit_piso = emit->add_subcommand("piso", "polynomial isomorphism system");
    emit_piso->add_option("--in", e_piso.in, "graph pair document")->required();
    emit_piso->add_option("-o,--out", e_piso.out);
    emit_piso->callback([&] {
        GraphPair pair = graph_pair_from_json(read_text_file(e_piso.in));
        PolySystem s = p_iso(pair.left, pair.right);
        deliver(poly_system_to_text(s), e_piso.out,
                {{"kind", "piso"}, {"nvars", s.nvars}, {"axioms", s.axioms.size()}});
    });

    auto * emit_pcsp = emit->add_subcommand("pcsp", "polynomial CSP system");
    emit_pcsp->add_option("--in", e_pcsp.in, "CSP document")->required();
    emit_pcsp->add_option("-o,--out", e_pcsp.out);
    emit_pcsp->callback([&] {
        PolySystem s = p_csp(load_explicit_csp(read_text_file(e_pcsp.in)));
        deliver(poly_system_to_text(s), e_pcsp.out,
                {{"kind", "pcsp"}, {"nvars", s.nvars}, {"axioms", s.axioms.size()}});
    });

    // ---------------------------------------------------------------- solve
    auto * solve = app.add_subcommand("solve", "decide materialized systems");
    solve->require_subcommand(1);

    struct {
        std::string in, solution_out;
        int p = 2;
    } s_int, s_mod;

    auto * solve_int = solve->add_subcommand("integer", "integral feasibility via column reduction");
    solve_int->add_option("--in", s_int.in)->required();
    solve_int->add_option("--solution-out", s_int.solution_out);
    solve_int->callback([&] {
        MaterializedSystem ms = system_from_text(read_text_file(s_int.in));
        IntegerSolveResult r = solve_integer(ms);
        json j{{"feasible", r.feasible}, {"verified", r.verified}, {"nvars", ms.nvars}};
        if (r.feasible) {
            json sol = json::object();
            for (long i = 0; i < static_cast<long>(r.solution.size()); ++i)
                if (r.solution[static_cast<std::size_t>(i)] != 0)
                    sol[std::to_string(i)] = r.solution[static_cast<std::size_t>(i)].get_str();
            if (! s_int.solution_out.empty())
                write_text_file(s_int.solution_out, dump(sol));
            else
                j["solution"] = sol;
        } else {
            std::vector<std::pair<long, Rat>> cert(r.certificate.begin(), r.certificate.end());
            j["certificate"] = sparse_rat(cert);
            j["certificate_rhs"] = rat_to_string(r.certificate_rhs);
        }
        report(dump(j));
    });

    auto * solve_mod = solve->add_subcommand("modp", "feasibility over the prime field");
    solve_mod->add_option("--in", s_mod.in)->required();
    solve_mod->add_option("-p,--p", s_mod.p)->required();
    solve_mod->add_option("--solution-out", s_mod.solution_out);
    solve_mod->callback([&] {
        MaterializedSystem ms = system_from_text(read_text_file(s_mod.in));
        ModpSolveResult r = solve_modp(ms, s_mod.p);
        json j{{"feasible", r.feasible},
               {"verified", r.verified},
               {"p", r.p},
               {"nvars", ms.nvars}};
        if (r.feasible) {
            json sol = json::object();
            for (long i = 0; i < static_cast<long>(r.solution.size()); ++i)
                if (r.solution[static_cast<std::size_t>(i)] != 0)
                    sol[std::to_string(i)] = r.solution[static_cast<std::size_t>(i)];
            if (! s_mod.solution_out.empty())
                write_text_file(s_mod.solution_out, dump(sol));
            else
                j["solution"] = sol;
        } else {
            json cert = json::object();
            for (auto [idx, c] : r.certificate) cert[std::to_string(idx)] = c;
            j["certificate"] = cert;
            j["certificate_rhs"] = r.certificate_rhs;
        }
        report(dump(j));
    });

    // -------------------------------------------------------------- witness
    auto * wit = app.add_subcommand("witness", "evaluate witness assignments");
    wit->require_subcommand(1);

    struct {
        TseitinArgs t;
        std::string delta, out;
    } w_psi, w_lift;

    auto * wit_psi = wit->add_subcommand("psi", "flow witness over the partial-solution system");
    wit_psi->add_option("--graph", w_psi.t.graph)->required();
    wit_psi->add_option("--group", w_psi.t.group);
    wit_psi->add_option("--sigma", w_psi.t.sigma);
    wit_psi->add_option("--level", w_psi.t.level)->required();
    wit_psi->add_option("--delta", w_psi.delta, "generator codes of the value subgroup");
    wit_psi->add_option("-o,--out", w_psi.out);
    wit_psi->callback([&] {
        TseitinCsp t = build_tseitin(w_psi.t, common);
        PsiOracle oracle = build_psi(t, w_psi.t.level, w_psi.delta);
        LcspSystem sys(to_explicit(t.csp), w_psi.t.level);
        MaterializedSystem ms = sys.materialize(max_vars);
        std::vector<std::pair<long, Rat>> entries;
        for (long i = 0; i < ms.nvars; ++i) {
            Rat v = oracle.value(ms.vars[static_cast<std::size_t>(i)]);
            if (v != 0) entries.emplace_back(i, v);
        }
        deliver(solution_to_json(entries), w_psi.out,
                {{"kind", "psi"}, {"nvars", ms.nvars}, {"nonzero", entries.size()}});
    });

    auto * wit_lift = wit->add_subcommand("lift", "lifted witness over the gadget pair system");
    wit_lift->add_option("--graph", w_lift.t.graph)->required();
    wit_lift->add_option("--group", w_lift.t.group);
    wit_lift->add_option("--sigma", w_lift.t.sigma);
    wit_lift->add_option("--level", w_lift.t.level)->required();
    wit_lift->add_option("-o,--out", w_lift.out);
    wit_lift->callback([&] {
        TseitinCsp t = build_tseitin(w_lift.t, common);
        const int phi_level = max_arity(t.csp) * w_lift.t.level;
        auto phi = std::make_shared<PsiOracle>(psi(t, phi_level));
        GraphPair pair = cfi_pair(t.csp);
        auto lifted = lift_csp_to_iso(phi, phi_level, pair, w_lift.t.level);
        LisoSystem sys(pair.left, pair.right, w_lift.t.level);
        MaterializedSystem ms = sys.materialize(max_vars);
        std::vector<std::pair<long, Rat>> entries;
        for (long i = 0; i < ms.nvars; ++i) {
            Rat v = lifted->value(ms.vars[static_cast<std::size_t>(i)]);
            if (v != 0) entries.emplace_back(i, v);
        }
        deliver(solution_to_json(entries), w_lift.out,
                {{"kind", "lift"}, {"nvars", ms.nvars}, {"nonzero", entries.size()}});
    });

    struct {
        std::string x, y, out;
        int p = 2, q = 3;
    } w_comb;
    auto * wit_comb = wit->add_subcommand("combine", "two-prime combination of solution files");
    wit_comb->add_option("--x", w_comb.x, "p-solution document")->required();
    wit_comb->add_option("-p,--p", w_comb.p);
    wit_comb->add_option("--y", w_comb.y, "q-solution document")->required();
    wit_comb->add_option("-q,--q", w_comb.q);
    wit_comb->add_option("-o,--out", w_comb.out);
    wit_comb->callback([&] {
        auto to_map = [](const std::vector<std::pair<long, Rat>> & v) {
            std::map<MapKey, Rat> m;
            for (const auto & [idx, val] : v)
                m[MapKey{{static_cast<int>(idx), static_cast<int>(idx)}}] = val;
            return m;
        };
        auto xs = solution_from_json(read_text_file(w_comb.x));
        auto ys = solution_from_json(read_text_file(w_comb.y));
        CombineReport rep;
        auto combined = combine_pq(to_map(xs), w_comb.p, to_map(ys), w_comb.q, &rep);
        std::vector<std::pair<long, Rat>> entries;
        for (const auto & [k, v] : combined)
            if (v != 0) entries.emplace_back(k.front().first, v);
        deliver(solution_to_json(entries), w_comb.out,
                {{"kind", "combine"},
                 {"p", rep.p},
                 {"q", rep.q},
                 {"z", rep.z},
                 {"alpha", rep.alpha.get_str()},
                 {"beta", rep.beta.get_str()}});
    });

    // --------------------------------------------------------------- verify
    auto * verify = app.add_subcommand("verify", "re-check the library's claims");
    verify->require_subcommand(1);

    struct {
        TseitinArgs t;
        std::string delta;
    } v_psi;
    auto * verify_psi = verify->add_subcommand("psi", "flow witness satisfies its system");
    verify_psi->add_option("--graph", v_psi.t.graph)->required();
    verify_psi->add_option("--group", v_psi.t.group);
    verify_psi->add_option("--sigma", v_psi.t.sigma);
    verify_psi->add_option("--level", v_psi.t.level)->required();
    verify_psi->add_option("--delta", v_psi.delta);
    verify_psi->callback([&] {
        TseitinCsp t = build_tseitin(v_psi.t, common);
        PsiOracle oracle = build_psi(t, v_psi.t.level, v_psi.delta);
        LcspSystem sys(to_explicit(t.csp), v_psi.t.level);
        VerifyResult r = sys.verify(oracle);
        report(verify_result_to_json(r));
        require(r.ok, ErrorKind::verification, "flow witness rejected: " + r.violated);
    });

    struct {
        TseitinArgs t;
        std::string in;
    } v_l31;
    auto * verify_l31 = verify->add_subcommand(
        "lemma31", "satisfiability of a group CSP matches gadget pair isomorphism");
    verify_l31->add_option("--in", v_l31.in, "group CSP document (overrides --graph)");
    verify_l31->add_option("--graph", v_l31.t.graph);
    verify_l31->add_option("--group", v_l31.t.group);
    verify_l31->add_option("--sigma", v_l31.t.sigma);
    verify_l31->callback([&] {
        require(! v_l31.in.empty() || ! v_l31.t.graph.empty(), ErrorKind::precondition,
                "verify lemma31 needs --in or --graph");
        GroupCsp c = v_l31.in.empty() ? build_tseitin(v_l31.t, common).csp
                                      : group_csp_from_json(read_text_file(v_l31.in));
        ExplicitCsp ec = to_explicit(c);
        GraphPair pair = cfi_pair(c);
        SolveResult s = brute_force_solve(ec, false, enum_budget);
        auto iso = brute_force_isomorphic(pair.left, pair.right, node_budget);
        bool roundtrip = true;
        if (s.satisfiable) iso_from_solution(pair, s.solution); // throws when broken
        if (iso) roundtrip = satisfies(ec, solution_from_iso(pair, *iso));
        bool agree = s.satisfiable == iso.has_value();
        report(dump(json{{"satisfiable", s.satisfiable},
                         {"isomorphic", iso.has_value()},
                         {"agree", agree},
                         {"roundtrip", roundtrip}}));
        require(agree, ErrorKind::verification,
                "lemma31: satisfiability and isomorphism disagree");
        require(roundtrip, ErrorKind::verification,
                "lemma31: recovered assignment does not satisfy the instance");
    });

    struct {
        std::vector<std::string> in;
    } v_l32;
    auto * verify_l32 = verify->add_subcommand(
        "lemma32", "disjunction pair isomorphic iff some input pair is");
    verify_l32->add_option("--in", v_l32.in, "input pair documents")->required();
    verify_l32->callback([&] {
        std::vector<GraphPair> inputs;
        for (const auto & path : v_l32.in)
            inputs.push_back(graph_pair_from_json(read_text_file(path)));
        GraphPair pair = or_pair(inputs);
        json per = json::array();
        bool any = false;
        for (const auto & p : inputs) {
            bool iso = brute_force_isomorphic(p.left, p.right, node_budget).has_value();
            per.push_back(iso);
            any = any || iso;
        }
        bool sides = brute_force_isomorphic(pair.left, pair.right, node_budget).has_value();
        report(dump(json{{"inputs_isomorphic", per},
                         {"any_input_isomorphic", any},
                         {"sides_isomorphic", sides},
                         {"agree", any == sides}}));
        require(any == sides, ErrorKind::verification,
                "lemma32: disjunction pair disagrees with its inputs");
    });

    struct {
        std::string graph;
        int vstar = 0;
    } v_l33;
    auto * verify_l33 = verify->add_subcommand(
        "lemma33", "two-charge disjunction pair isomorphic iff some fixing is satisfiable");
    verify_l33->add_option("--graph", v_l33.graph)->required();
    verify_l33->add_option("--vstar", v_l33.vstar);
    verify_l33->callback([&] {
        UGraph g = parse_ugraph(v_l33.graph, common);
        ExtendedTseitin e =
            extended_tseitin_disjunction(DiGraph::orient_by_vertex_order(g), v_l33.vstar);
        json per = json::array();
        bool any = false;
        for (long t : e.csp.arb_tuples) {
            bool sat =
                brute_force_solve(to_explicit(fix_arbitrary(e.csp, t)), false, enum_budget)
                    .satisfiable;
            per.push_back(sat);
            any = any || sat;
        }
        GraphPair pair = extended_pair(e);
        bool sides = brute_force_isomorphic(pair.left, pair.right, node_budget).has_value();
        report(dump(json{{"fixings_satisfiable", per},
                         {"any_fixing_satisfiable", any},
                         {"sides_isomorphic", sides},
                         {"agree", any == sides}}));
        require(any == sides, ErrorKind::verification,
                "lemma33: disjunction pair disagrees with its fixings");
    });

    struct {
        std::string graph, solution_out, system_out;
        int level = 1;
        bool timing = false;
    } v_t41;
    auto * verify_t41 =
        verify->add_subcommand("theorem41", "full integral-witness / non-isomorphism pipeline");
    verify_t41->add_option("--graph", v_t41.graph)->required();
    verify_t41->add_option("--level", v_t41.level)->required();
    verify_t41->add_flag("--timing", v_t41.timing, "include wall-clock stage times");
    verify_t41->add_option("--solution-out", v_t41.solution_out);
    verify_t41->add_option("--system-out", v_t41.system_out);
    verify_t41->callback([&] {
        UGraph g = parse_ugraph(v_t41.graph, common);
        std::string hash =
            content_hash(ugraph_to_edge_list(g) + "level " + std::to_string(v_t41.level));
        Theorem41Result res = theorem41_pipeline(g, v_t41.level, node_budget);
        if (! v_t41.solution_out.empty() || ! v_t41.system_out.empty()) {
            LisoSystem sys(res.pair.left, res.pair.right, v_t41.level);
            MaterializedSystem ms = sys.materialize(max_vars);
            if (! v_t41.system_out.empty()) write_text_file(v_t41.system_out, system_to_text(ms));
            if (! v_t41.solution_out.empty()) {
                std::vector<std::pair<long, Rat>> entries;
                for (long i = 0; i < ms.nvars; ++i) {
                    Rat v = res.solution->value(ms.vars[static_cast<std::size_t>(i)]);
                    if (v != 0) entries.emplace_back(i, v);
                }
                write_text_file(v_t41.solution_out, solution_to_json(entries));
            }
        }
        report(theorem41_report_to_json(res.report, hash, v_t41.timing));
        std::cerr << "integral-solution: " << (res.report.ok ? "OK" : "FAIL")
                  << ", non-isomorphic: " << (res.report.nonisomorphic ? "OK" : "FAIL")
                  << std::endl;
        require(res.report.ok, ErrorKind::verification, "theorem41 pipeline reported failure");
    });

    // ------------------------------------------------------------------- pc
    auto * pc = app.add_subcommand("pc", "polynomial derivability tools");
    pc->require_subcommand(1);

    struct {
        std::string in, target = "1";
        int field = 2, degree = 0;
    } p_der;
    auto * pc_der = pc->add_subcommand("derivable", "bounded-degree derivability of a target");
    pc_der->add_option("--in", p_der.in, "polynomial system file")->required();
    pc_der->add_option("--field", p_der.field)->required();
    pc_der->add_option("--degree", p_der.degree)->required();
    pc_der->add_option("--target", p_der.target, "target polynomial (default 1)");
    pc_der->callback([&] {
        PolySystem s = poly_system_from_text(read_text_file(p_der.in));
        ClosureTrail trail;
        bool got = degree_d_derivable(s, p_der.field, p_der.degree,
                                      MultilinearPoly::parse(0, p_der.target), monomial_budget,
                                      &trail);
        report(dump(json{{"derivable", got},
                         {"field", p_der.field},
                         {"degree", p_der.degree},
                         {"dims", trail.dim_per_round},
                         {"monomials", trail.monomial_budget_used}}));
    });

    struct {
        std::string in;
        int field = 2, dmax = 4;
    } p_min;
    auto * pc_min = pc->add_subcommand("mindegree", "least refutation degree up to a cap");
    pc_min->add_option("--in", p_min.in, "polynomial system file")->required();
    pc_min->add_option("--field", p_min.field)->required();
    pc_min->add_option("--dmax", p_min.dmax)->required();
    pc_min->callback([&] {
        PolySystem s = poly_system_from_text(read_text_file(p_min.in));
        std::vector<ClosureTrail> trails;
        auto d = min_refutation_degree(s, p_min.field, p_min.dmax, monomial_budget, &trails);
        json per = json::array();
        for (std::size_t i = 0; i < trails.size(); ++i)
            per.push_back(json{{"d", i}, {"dims", trails[i].dim_per_round}});
        report(dump(json{{"degree", d ? json(*d) : json(nullptr)},
                         {"field", p_min.field},
                         {"dmax", p_min.dmax},
                         {"per_degree", per}}));
    });

    struct {
        TseitinArgs t;
        std::string kind, out;
        bool catalog = false;
        int arity = 3, order = 2, p = 2, vstar = 0, position = 0;
    } p_red;
    auto * pc_red = pc->add_subcommand("reduce", "low-degree substitutions between systems");
    pc_red->add_flag("--catalog", p_red.catalog, "list the built-in reductions");
    pc_red->add_option("--arity", p_red.arity);
    pc_red->add_option("--order", p_red.order);
    pc_red->add_option("--kind", p_red.kind,
                       "csp-to-iso | iso-to-csp | component-fixing | boolean-to-extended");
    pc_red->add_option("--graph", p_red.t.graph);
    pc_red->add_option("--group", p_red.t.group);
    pc_red->add_option("--sigma", p_red.t.sigma);
    pc_red->add_option("-p,--p", p_red.p);
    pc_red->add_option("--vstar", p_red.vstar);
    pc_red->add_option("--position", p_red.position);
    pc_red->add_option("-o,--out", p_red.out);
    pc_red->callback([&] {
        if (p_red.catalog) {
            json rows = json::array();
            for (const auto & r : builtin_reductions(p_red.arity, p_red.order))
                rows.push_back(json{{"name", r.name},
                                    {"d1", r.d1},
                                    {"d2", r.d2},
                                    {"needs", r.needs}});
            report(dump(json{{"arity", p_red.arity}, {"order", p_red.order}, {"rows", rows}}));
            return;
        }
        require(! p_red.kind.empty() && ! p_red.t.graph.empty(), ErrorKind::precondition,
                "pc reduce needs --catalog or --kind with --graph");
        Substitution sub;
        PolySystem target;
        if (p_red.kind == "csp-to-iso" || p_red.kind == "iso-to-csp") {
            TseitinCsp t = build_tseitin(p_red.t, common);
            GraphPair pair = cfi_pair(t.csp);
            PisoVariables iv;
            PolySystem iso = p_iso(pair.left, pair.right, &iv);
            PolySystem csp = p_csp(to_explicit(t.csp));
            if (p_red.kind == "csp-to-iso") {
                sub = reduction_csp_to_iso(pair, iv);
                target = std::move(iso);
            } else {
                sub = reduction_iso_to_csp(pair, iv);
                target = std::move(csp);
            }
        } else if (p_red.kind == "boolean-to-extended") {
            UGraph g = parse_ugraph(p_red.t.graph, common);
            ExtendedTseitin e =
                extended_tseitin_disjunction(DiGraph::orient_by_vertex_order(g), p_red.vstar);
            sub = reduction_boolean_to_extended(e, p_red.p);
            target = p_csp(to_explicit(e.csp));
        } else if (p_red.kind == "component-fixing") {
            UGraph g = parse_ugraph(p_red.t.graph, common);
            ExtendedTseitin e =
                extended_tseitin_disjunction(DiGraph::orient_by_vertex_order(g), p_red.vstar);
            GraphPair orpair = extended_pair(e);
            require(p_red.position >= 0 &&
                        p_red.position < static_cast<int>(orpair.orp->inputs.size()),
                    ErrorKind::precondition, "no such input position");
            PisoVariables ov, cv;
            target = p_iso(orpair.left, orpair.right, &ov);
            const GraphPair & input = orpair.orp->inputs[static_cast<std::size_t>(p_red.position)];
            p_iso(input.left, input.right, &cv);
            sub = reduction_component_fixing(orpair, p_red.position, ov, cv);
        } else {
            throw Error(ErrorKind::precondition, "unknown reduction kind: " + p_red.kind);
        }
        PolySystem out = apply_substitution(sub, target);
        int dmax = 0;
        for (const auto & a : out.axioms) dmax = std::max(dmax, a.degree());
        json j{{"kind", p_red.kind},
               {"d1", sub.d1},
               {"d2", sub.d2},
               {"note", sub.note},
               {"target_axioms", target.axioms.size()},
               {"substituted_max_degree", dmax},
               {"source_vars", out.nvars}};
        if (! p_red.out.empty()) {
            write_text_file(p_red.out, poly_system_to_text(out));
            j["output"] = p_red.out;
        }
        report(dump(j));
    });

    // ------------------------------------------------------------------- wl
    struct {
        std::string in, left, right;
        int kmax = 3;
    } w_args;
    auto * wl_cmd = app.add_subcommand("wl", "color refinement baseline");
    wl_cmd->add_option("--in", w_args.in, "graph pair document");
    wl_cmd->add_option("--left", w_args.left, "colored graph document");
    wl_cmd->add_option("--right", w_args.right, "colored graph document");
    wl_cmd->add_option("--kmax", w_args.kmax);
    wl_cmd->callback([&] {
        ColoredGraph a, b;
        if (! w_args.in.empty()) {
            GraphPair pair = graph_pair_from_json(read_text_file(w_args.in));
            a = pair.left;
            b = pair.right;
        } else {
            require(! w_args.left.empty() && ! w_args.right.empty(), ErrorKind::precondition,
                    "wl needs --in or both --left and --right");
            a = colored_graph_from_json(read_text_file(w_args.left));
            b = colored_graph_from_json(read_text_file(w_args.right));
        }
        report(wl_report_to_json(wl_report(a, b, w_args.kmax, tuple_budget)));
    });

    // -------------------------------------------------------------- profile
    auto * prof = app.add_subcommand("profile", "graph diagnostics");
    prof->require_subcommand(1);

    struct {
        std::string graph;
        int exact_budget = 20;
    } pr_exp;
    auto * prof_exp = prof->add_subcommand("expansion", "exact edge expansion and closure growth");
    prof_exp->add_option("--graph", pr_exp.graph)->required();
    prof_exp->add_option("--exact-budget", pr_exp.exact_budget);
    prof_exp->callback([&] {
        UGraph g = parse_ugraph(pr_exp.graph, common);
        report(expander_profile_to_json(expander_profile(g, pr_exp.exact_budget)));
    });

    struct {
        std::string graph, remove;
    } pr_core;
    auto * prof_core = prof->add_subcommand("core", "2-connected core after edge deletion");
    prof_core->add_option("--graph", pr_core.graph)->required();
    prof_core->add_option("--remove", pr_core.remove, "edge ids, comma separated");
    prof_core->callback([&] {
        UGraph g = parse_ugraph(pr_core.graph, common);
        std::vector<int> ids;
        for (long v : parse_long_list(pr_core.remove)) {
            require(v >= 0 && v < g.m(), ErrorKind::precondition, "edge id out of range");
            ids.push_back(static_cast<int>(v));
        }
        report(core_result_to_json(two_connected_core(g, edges_to_mask(ids))));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error & e) {
        std::cerr << "error: " << e.what() << std::endl;
        return e.kind() == ErrorKind::verification ? 1 : 2;
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
