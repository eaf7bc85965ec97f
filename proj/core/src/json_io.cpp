#include <cfikit/json_io.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cfikit {

using nlohmann::json;

namespace {

std::string dump(const json & j) { return j.dump(2) + "\n"; }

json parse_document(const std::string & text) {
    json j = json::parse(text, nullptr, false);
    require(! j.is_discarded(), ErrorKind::io, "malformed JSON document");
    return j;
}

// json access errors (missing field, wrong type) become io errors
template <typename F>
auto guarded(F && f) {
    try {
        return f();
    } catch (const json::exception & e) {
        throw Error(ErrorKind::io, std::string("bad document: ") + e.what());
    }
}

json group_json(const FiniteAbelianGroup & g) { return json{{"moduli", g.moduli()}}; }

FiniteAbelianGroup group_from(const json & j) {
    return FiniteAbelianGroup(j.at("moduli").get<std::vector<int>>());
}

json element_json(const FiniteAbelianGroup & g, int code) { return json(g.decode(code)); }

int element_from(const FiniteAbelianGroup & g, const json & j) {
    return g.encode(j.get<std::vector<int>>());
}

json tuple_json(const TupleSpace & ts, long code) {
    json arr = json::array();
    for (int i = 0; i < ts.arity(); ++i) arr.push_back(element_json(ts.group(), ts.get(code, i)));
    return arr;
}

long tuple_from(const TupleSpace & ts, const json & j) {
    require(j.is_array() && static_cast<int>(j.size()) == ts.arity(), ErrorKind::io,
            "tuple arity does not match the constraint scope");
    std::vector<int> codes;
    for (const auto & e : j) codes.push_back(element_from(ts.group(), e));
    return ts.encode(codes);
}

json coset_json(const Coset & c) {
    const Subgroup & s = c.subgroup();
    json gens = json::array();
    for (long g : s.generators()) gens.push_back(tuple_json(s.tuples(), g));
    return json{{"arity", s.arity()},
                {"generators", gens},
                {"shift", tuple_json(s.tuples(), c.shift())}};
}

Coset coset_from(const FiniteAbelianGroup & grp, const json & j) {
    int arity = j.at("arity").get<int>();
    require(arity >= 1, ErrorKind::io, "coset arity must be positive");
    TupleSpace ts(grp, arity);
    std::vector<long> gens;
    for (const auto & e : j.at("generators")) gens.push_back(tuple_from(ts, e));
    Subgroup sub = Subgroup::span(grp, arity, gens);
    long shift = tuple_from(ts, j.at("shift"));
    return Coset(std::move(sub), shift);
}

json group_csp_json(const GroupCsp & c) {
    json cons = json::array();
    for (const auto & con : c.constraints)
        cons.push_back(json{{"scope", con.scope}, {"coset", coset_json(con.relation)}});
    return json{{"group", group_json(c.group)}, {"variables", c.variables},
                {"constraints", cons}};
}

GroupCsp group_csp_from(const json & j) {
    GroupCsp c{group_from(j.at("group")), j.at("variables").get<std::vector<std::string>>(), {}};
    for (const auto & jc : j.at("constraints")) {
        auto scope = jc.at("scope").get<std::vector<int>>();
        for (int x : scope)
            require(x >= 0 && x < c.var_count(), ErrorKind::io, "scope variable out of range");
        Coset rel = coset_from(c.group, jc.at("coset"));
        require(rel.subgroup().arity() == static_cast<int>(scope.size()), ErrorKind::io,
                "coset arity does not match the scope");
        c.constraints.push_back({std::move(scope), std::move(rel)});
    }
    return c;
}

json colored_graph_json(const ColoredGraph & g) {
    json verts = json::array();
    for (int v = 0; v < g.n(); ++v) {
        json e{{"id", v}};
        e["color"] = g.color(v) >= 0 ? json(g.palette()[static_cast<std::size_t>(g.color(v))])
                                     : json(nullptr);
        if (! g.tag(v).empty()) e["tag"] = g.tag(v);
        verts.push_back(std::move(e));
    }
    json edges = json::array();
    for (int i = 0; i < g.m(); ++i) {
        json e{{"u", g.edges()[static_cast<std::size_t>(i)].first},
               {"v", g.edges()[static_cast<std::size_t>(i)].second}};
        if (g.edge_color(i) >= 0)
            e["color"] = g.edge_palette()[static_cast<std::size_t>(g.edge_color(i))];
        edges.push_back(std::move(e));
    }
    return json{{"vertices", verts}, {"edges", edges}};
}

ColoredGraph colored_graph_from(const json & j) {
    const json & verts = j.at("vertices");
    const int n = static_cast<int>(verts.size());
    std::vector<std::string> color(static_cast<std::size_t>(n)), tag(static_cast<std::size_t>(n));
    std::vector<bool> colored(static_cast<std::size_t>(n), false), seen = colored;
    for (const auto & jv : verts) {
        int id = jv.at("id").get<int>();
        require(id >= 0 && id < n && ! seen[static_cast<std::size_t>(id)], ErrorKind::io,
                "vertex ids must be 0..n-1 without repeats");
        seen[static_cast<std::size_t>(id)] = true;
        if (jv.contains("color") && ! jv.at("color").is_null()) {
            color[static_cast<std::size_t>(id)] = jv.at("color").get<std::string>();
            colored[static_cast<std::size_t>(id)] = true;
        }
        if (jv.contains("tag")) tag[static_cast<std::size_t>(id)] = jv.at("tag").get<std::string>();
    }
    ColoredGraph g;
    for (int v = 0; v < n; ++v) {
        int c = colored[static_cast<std::size_t>(v)]
                    ? g.intern_color(color[static_cast<std::size_t>(v)])
                    : -1;
        g.add_vertex(c, tag[static_cast<std::size_t>(v)]);
    }
    for (const auto & je : j.at("edges")) {
        int u = je.at("u").get<int>(), v = je.at("v").get<int>();
        int ec = -1;
        if (je.contains("color") && ! je.at("color").is_null())
            ec = g.intern_edge_color(je.at("color").get<std::string>());
        g.add_edge(u, v, ec);
    }
    return g;
}

json rows_json(const MaterializedSystem & sys) {
    json keys = json::array(), labels = json::array();
    for (const MapKey & k : sys.vars) {
        json pairs = json::array();
        for (auto [l, r] : k) pairs.push_back(json::array({l, r}));
        keys.push_back(std::move(pairs));
        labels.push_back(key_to_string(k));
    }
    return json{{"nvars", sys.nvars}, {"keys", keys}, {"labels", labels}};
}

json verify_json(const VerifyResult & r) {
    return json{{"ok", r.ok},          {"equations", r.equations},
                {"terms", r.terms},    {"violated", r.violated},
                {"lhs", rat_to_string(r.lhs)}, {"rhs", rat_to_string(r.rhs)}};
}

} // namespace

std::string read_text_file(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string & path, const std::string & content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::io, "cannot create " + path);
    out << content;
    out.flush();
    require(out.good(), ErrorKind::io, "failed writing " + path);
}

std::string content_hash(const std::string & text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string group_to_json(const FiniteAbelianGroup & g) { return dump(group_json(g)); }

FiniteAbelianGroup group_from_json(const std::string & text) {
    json j = parse_document(text);
    return guarded([&] { return group_from(j); });
}

std::string group_csp_to_json(const GroupCsp & c) { return dump(group_csp_json(c)); }

GroupCsp group_csp_from_json(const std::string & text) {
    json j = parse_document(text);
    return guarded([&] { return group_csp_from(j); });
}

std::string extended_csp_to_json(const ExtendedGroupCsp & c) {
    json j = group_csp_json(c.base);
    TupleSpace ts(c.base.group, static_cast<int>(c.arb_scope.size()));
    json tuples = json::array();
    for (long t : c.arb_tuples) tuples.push_back(tuple_json(ts, t));
    j["arb"] = json{{"scope", c.arb_scope}, {"tuples", tuples}};
    return dump(j);
}

ExtendedGroupCsp extended_csp_from_json(const std::string & text) {
    json j = parse_document(text);
    return guarded([&] {
        ExtendedGroupCsp c{group_csp_from(j), {}, {}};
        const json & arb = j.at("arb");
        c.arb_scope = arb.at("scope").get<std::vector<int>>();
        for (int x : c.arb_scope)
            require(x >= 0 && x < c.var_count(), ErrorKind::io, "arb scope out of range");
        require(! c.arb_scope.empty(), ErrorKind::io, "arb scope must be nonempty");
        TupleSpace ts(c.base.group, static_cast<int>(c.arb_scope.size()));
        for (const auto & t : arb.at("tuples")) c.arb_tuples.push_back(tuple_from(ts, t));
        std::sort(c.arb_tuples.begin(), c.arb_tuples.end());
        c.arb_tuples.erase(std::unique(c.arb_tuples.begin(), c.arb_tuples.end()),
                           c.arb_tuples.end());
        return c;
    });
}

std::string explicit_csp_to_json(const ExplicitCsp & c) {
    json dom = json::array();
    for (int d : c.domain) dom.push_back(element_json(c.group, d));
    json cons = json::array();
    for (const auto & con : c.constraints) {
        TupleSpace ts(c.group, static_cast<int>(con.scope.size()));
        json tuples = json::array();
        for (long t : con.tuples) tuples.push_back(tuple_json(ts, t));
        cons.push_back(json{{"scope", con.scope}, {"tuples", tuples}});
    }
    return dump(json{{"group", group_json(c.group)},
                     {"domain", dom},
                     {"variables", c.variables},
                     {"constraints", cons}});
}

ExplicitCsp explicit_csp_from_json(const std::string & text) {
    json j = parse_document(text);
    return guarded([&] {
        ExplicitCsp c{group_from(j.at("group")), {},
                      j.at("variables").get<std::vector<std::string>>(), {}};
        for (const auto & d : j.at("domain")) c.domain.push_back(element_from(c.group, d));
        std::sort(c.domain.begin(), c.domain.end());
        c.domain.erase(std::unique(c.domain.begin(), c.domain.end()), c.domain.end());
        require(! c.domain.empty(), ErrorKind::io, "domain must be nonempty");
        for (const auto & jc : j.at("constraints")) {
            ExplicitCsp::Constraint con;
            con.scope = jc.at("scope").get<std::vector<int>>();
            for (int x : con.scope)
                require(x >= 0 && x < c.var_count(), ErrorKind::io, "scope variable out of range");
            TupleSpace ts(c.group, static_cast<int>(con.scope.size()));
            for (const auto & t : jc.at("tuples")) con.tuples.push_back(tuple_from(ts, t));
            std::sort(con.tuples.begin(), con.tuples.end());
            con.tuples.erase(std::unique(con.tuples.begin(), con.tuples.end()), con.tuples.end());
            c.constraints.push_back(std::move(con));
        }
        return c;
    });
}

std::string colored_graph_to_json(const ColoredGraph & g) { return dump(colored_graph_json(g)); }

ColoredGraph colored_graph_from_json(const std::string & text) {
    json j = parse_document(text);
    return guarded([&] { return colored_graph_from(j); });
}

std::string graph_pair_to_json(const GraphPair & pair) {
    return dump(json{{"left", colored_graph_json(pair.left)},
                     {"right", colored_graph_json(pair.right)}});
}

GraphPair graph_pair_from_json(const std::string & text) {
    json j = parse_document(text);
    return guarded([&] {
        GraphPair p;
        p.left = colored_graph_from(j.at("left"));
        p.right = colored_graph_from(j.at("right"));
        return p;
    });
}

std::string ugraph_to_edge_list(const UGraph & g) {
    std::string out;
    for (auto [u, v] : g.edges())
        out += std::to_string(u) + " " + std::to_string(v) + "\n";
    return out;
}

UGraph ugraph_from_edge_list(const std::string & text) {
    std::istringstream in(text);
    std::vector<std::pair<int, int>> edges;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int u, v;
        if (! (ls >> u)) continue; // blank line
        require(static_cast<bool>(ls >> v), ErrorKind::io, "edge line needs two vertex ids");
        require(u >= 0 && v >= 0, ErrorKind::io, "vertex ids must be nonnegative");
        edges.emplace_back(u, v);
        n = std::max({n, u + 1, v + 1});
    }
    return UGraph(n, std::move(edges));
}

std::string dimacs_plain(const ColoredGraph & g) {
    // tails: edge color ec -> length ec+1; vertex color c -> length EP+1+c
    const int ep = static_cast<int>(g.edge_palette().size());
    std::vector<std::pair<int, int>> edges;
    int fresh = g.n();
    auto tail = [&](int at, int len) {
        for (int i = 0; i < len; ++i) {
            edges.emplace_back(at, fresh);
            at = fresh++;
        }
    };
    for (int e = 0; e < g.m(); ++e) {
        auto [u, v] = g.edges()[static_cast<std::size_t>(e)];
        int mid = fresh++;
        edges.emplace_back(u, mid);
        edges.emplace_back(mid, v);
        if (g.edge_color(e) >= 0) tail(mid, g.edge_color(e) + 1);
    }
    for (int v = 0; v < g.n(); ++v)
        if (g.color(v) >= 0) tail(v, ep + 1 + g.color(v));
    std::string out = "p edge " + std::to_string(fresh) + " " + std::to_string(edges.size()) + "\n";
    for (auto [u, v] : edges)
        out += "e " + std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
    return out;
}

std::string system_to_text(const MaterializedSystem & sys) {
    std::string out =
        "vars " + std::to_string(sys.nvars) + " eqs " + std::to_string(sys.rows.size()) + "\n";
    for (const auto & row : sys.rows) {
        out += "eq " + std::to_string(row.rhs) + " " + std::to_string(row.terms.size());
        for (auto [idx, c] : row.terms)
            out += " " + std::to_string(idx) + " " + std::to_string(c);
        out += "\n";
    }
    return out;
}

MaterializedSystem system_from_text(const std::string & text) {
    std::istringstream in(text);
    std::string tok;
    MaterializedSystem sys;
    long eqs = 0;
    require(static_cast<bool>(in >> tok) && tok == "vars" && static_cast<bool>(in >> sys.nvars),
            ErrorKind::io, "system header must start with 'vars N'");
    require(static_cast<bool>(in >> tok) && tok == "eqs" && static_cast<bool>(in >> eqs),
            ErrorKind::io, "system header must continue with 'eqs M'");
    require(sys.nvars >= 0 && eqs >= 0, ErrorKind::io, "negative sizes in system header");
    for (long i = 0; i < eqs; ++i) {
        MaterializedSystem::Row row;
        long k = 0;
        require(static_cast<bool>(in >> tok) && tok == "eq", ErrorKind::io,
                "each system row must start with 'eq'");
        require(static_cast<bool>(in >> row.rhs >> k) && k >= 0, ErrorKind::io,
                "bad row header");
        for (long t = 0; t < k; ++t) {
            long idx, c;
            require(static_cast<bool>(in >> idx >> c), ErrorKind::io, "truncated row");
            require(idx >= 0 && idx < sys.nvars, ErrorKind::io, "term index out of range");
            row.terms.emplace_back(idx, c);
        }
        sys.rows.push_back(std::move(row));
    }
    return sys;
}

std::string varindex_to_json(const MaterializedSystem & sys) { return dump(rows_json(sys)); }

std::string solution_to_json(const std::vector<std::pair<long, Rat>> & entries) {
    json j = json::object();
    for (const auto & [idx, v] : entries)
        if (v != 0) j[std::to_string(idx)] = rat_to_string(v);
    return dump(j);
}

std::vector<std::pair<long, Rat>> solution_from_json(const std::string & text) {
    json j = parse_document(text);
    return guarded([&] {
        std::vector<std::pair<long, Rat>> out;
        require(j.is_object(), ErrorKind::io, "solution document must be an object");
        for (const auto & [key, val] : j.items())
            out.emplace_back(std::stol(key), rat_from_string(val.get<std::string>()));
        std::sort(out.begin(), out.end(),
                  [](const auto & a, const auto & b) { return a.first < b.first; });
        return out;
    });
}

std::string poly_system_to_text(const PolySystem & s) {
    std::string out = "# vars " + std::to_string(s.nvars) + "\n";
    for (const auto & a : s.axioms) out += a.to_string() + "\n";
    return out;
}

PolySystem poly_system_from_text(const std::string & text) {
    PolySystem s;
    std::istringstream in(text);
    std::string line;
    int maxvar = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string tok;
            if (ls >> tok && tok == "vars") {
                int n;
                require(static_cast<bool>(ls >> n) && n >= 0, ErrorKind::io, "bad vars comment");
                s.nvars = n;
            }
            continue;
        }
        MultilinearPoly p = MultilinearPoly::parse(0, line);
        if (p.degree() > 0) maxvar = std::max(maxvar, p.terms().rbegin()->first.back());
        s.axioms.push_back(std::move(p));
    }
    s.nvars = std::max(s.nvars, maxvar + 1);
    return s;
}

std::string wl_report_to_json(const WlReport & rep) {
    json per = json::array();
    for (const WlResult & r : rep.per_k)
        per.push_back(json{{"k", r.k},
                           {"distinguished", r.distinguished},
                           {"rounds", r.rounds},
                           {"colors", r.colors}});
    return dump(json{{"per_k", per}, {"min_distinguishing_k", rep.min_distinguishing_k}});
}

std::string verify_result_to_json(const VerifyResult & r) { return dump(verify_json(r)); }

std::string theorem41_report_to_json(const Theorem41Report & rep,
                                     const std::string & instance_hash, bool with_timing) {
    json j{{"ok", rep.ok},
           {"instance", instance_hash},
           {"level", rep.level},
           {"csp_level", rep.csp_level},
           {"n", rep.n},
           {"m", rep.m},
           {"left_n", rep.left_n},
           {"right_n", rep.right_n},
           {"gamma_position", rep.gamma_position},
           {"component_unsat", rep.component_unsat},
           {"csp_oracle_ok", rep.csp_oracle_ok},
           {"lift_forward_ok", rep.lift_forward_ok},
           {"lift_reverse_ok", rep.lift_reverse_ok},
           {"nonisomorphic", rep.nonisomorphic},
           {"combine",
            json{{"p", rep.combine.p},
                 {"q", rep.combine.q},
                 {"z", rep.combine.z},
                 {"alpha", rep.combine.alpha.get_str()},
                 {"beta", rep.combine.beta.get_str()}}},
           {"sampled_keys", rep.sampled_keys},
           {"sampled_integral", rep.sampled_integral},
           {"final_verify", verify_json(rep.final_verify)}};
    if (with_timing) {
        json stages = json::array();
        for (const auto & [name, secs] : rep.stage_seconds)
            stages.push_back(json::array({name, secs}));
        j["stage_seconds"] = stages;
    }
    return dump(j);
}

std::string expander_profile_to_json(const ExpanderProfile & p) {
    return dump(json{{"n", p.n},
                     {"m", p.m},
                     {"h", std::to_string(p.h_num) + "/" + std::to_string(p.h_den)},
                     {"c", std::to_string(p.c_num) + "/" + std::to_string(p.c_den)},
                     {"ell_suggest", p.ell_suggest}});
}

std::string core_result_to_json(const CoreResult & r) {
    return dump(json{{"xhat", mask_to_edges(r.xhat)},
                     {"block", r.block},
                     {"core_empty", r.core_empty},
                     {"certified", r.certified}});
}

} // namespace cfikit
