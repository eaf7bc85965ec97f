#include <cfikit/csp.hpp>

#include <algorithm>

#include <cfikit/errors.hpp>

namespace cfikit {

namespace {

std::string edge_var_name(const UGraph & g, int e) {
    auto [u, v] = g.edge(e);
    return "e" + std::to_string(u) + "_" + std::to_string(v);
}

} // namespace

TseitinCsp tseitin(const DiGraph & h, const FiniteAbelianGroup & group, const SigmaCharge & sigma) {
    const UGraph & g = h.skeleton();
    require(static_cast<int>(sigma.value.size()) == g.n(), ErrorKind::arity,
            "one charge per vertex");
    TseitinCsp out{{group, {}, {}}, h, sigma, {}};
    for (int e = 0; e < g.m(); ++e) out.csp.variables.push_back(edge_var_name(g, e));
    for (int v = 0; v < g.n(); ++v) {
        require(g.degree(v) >= 1, ErrorKind::precondition,
                "vertex " + std::to_string(v) + " has no incident edge, constraint degenerates");
        std::vector<int> scope;
        for (auto [w, e] : g.neighbors(v)) {
            (void)w;
            scope.push_back(e);
        }
        std::sort(scope.begin(), scope.end());
        std::vector<int> signs;
        for (int e : scope) signs.push_back(h.sign_at(e, v));
        int k = static_cast<int>(scope.size());
        Subgroup kernel = Subgroup::sum_kernel(group, k, signs);
        // shift: put the whole charge on the first coordinate; its sign is an
        // involution so s*(s*sigma) = sigma
        TupleSpace tuples(group, k);
        std::vector<int> shift(k, 0);
        shift[0] = (signs[0] == 1) ? sigma.value[v] : group.neg(sigma.value[v]);
        out.csp.constraints.push_back({scope, Coset(kernel, tuples.encode(shift))});
        out.signs.push_back(std::move(signs));
    }
    return out;
}

ExplicitCsp boolean_tseitin(const DiGraph & h, int p, const SigmaCharge & sigma) {
    require(p >= 2, ErrorKind::precondition, "modulus must be >= 2");
    const UGraph & g = h.skeleton();
    require(static_cast<int>(sigma.value.size()) == g.n(), ErrorKind::arity,
            "one charge per vertex");
    FiniteAbelianGroup group({p});
    ExplicitCsp out{group, {0, 1}, {}, {}};
    for (int e = 0; e < g.m(); ++e) out.variables.push_back(edge_var_name(g, e));
    for (int v = 0; v < g.n(); ++v) {
        require(g.degree(v) >= 1, ErrorKind::precondition,
                "vertex " + std::to_string(v) + " has no incident edge, constraint degenerates");
        std::vector<int> scope;
        for (auto [w, e] : g.neighbors(v)) {
            (void)w;
            scope.push_back(e);
        }
        std::sort(scope.begin(), scope.end());
        int k = static_cast<int>(scope.size());
        TupleSpace tuples(group, k);
        std::vector<long> rel;
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
            int sum = 0;
            std::vector<int> t(k);
            for (int i = 0; i < k; ++i) {
                t[i] = (bits >> i) & 1;
                int signed_val = (h.sign_at(scope[i], v) == 1) ? t[i] : group.neg(t[i]);
                sum = group.add(sum, signed_val);
            }
            if (sum == sigma.value[v]) rel.push_back(tuples.encode(t));
        }
        std::sort(rel.begin(), rel.end());
        out.constraints.push_back({scope, std::move(rel)});
    }
    return out;
}

GroupCsp homogenize(const GroupCsp & c) {
    GroupCsp out{c.group, c.variables, {}};
    for (const auto & con : c.constraints)
        out.constraints.push_back({con.scope, Coset(con.relation.subgroup(), 0)});
    return out;
}

ExplicitCsp to_explicit(const GroupCsp & c) {
    ExplicitCsp out{c.group, {}, c.variables, {}};
    for (int e = 0; e < c.group.order(); ++e) out.domain.push_back(e);
    for (const auto & con : c.constraints)
        out.constraints.push_back({con.scope, con.relation.elements()});
    return out;
}

ExplicitCsp to_explicit(const ExtendedGroupCsp & c) {
    ExplicitCsp out = to_explicit(c.base);
    std::vector<long> tuples = c.arb_tuples;
    std::sort(tuples.begin(), tuples.end());
    out.constraints.push_back({c.arb_scope, std::move(tuples)});
    return out;
}

GroupCsp fix_arbitrary(const ExtendedGroupCsp & c, long tuple_code) {
    require(std::binary_search(c.arb_tuples.begin(), c.arb_tuples.end(), tuple_code),
            ErrorKind::precondition, "tuple is not in the arbitrary relation");
    GroupCsp out = c.base;
    int k = static_cast<int>(c.arb_scope.size());
    out.constraints.push_back(
        {c.arb_scope, Coset(Subgroup::trivial(c.base.group, k), tuple_code)});
    return out;
}

ExtendedTseitin extended_tseitin_disjunction(const DiGraph & h, int vstar) {
    const UGraph & g = h.skeleton();
    require(0 <= vstar && vstar < g.n(), ErrorKind::precondition, "vstar out of range");
    FiniteAbelianGroup group({2, 3});
    SigmaCharge zero{std::vector<int>(g.n(), 0)};
    TseitinCsp flow = tseitin(h, group, zero);

    ExtendedTseitin out{{std::move(flow.csp), {}, {}}, h, vstar, 0, std::move(flow.signs)};
    out.xstar = out.csp.base.var_count();
    out.csp.base.variables.push_back("xstar");

    // rebuild the vstar constraint with the absorbed variable: sum of signed
    // edge values minus xstar = 0
    auto & con = out.csp.base.constraints[vstar];
    std::vector<int> scope = con.scope;
    std::vector<int> signs = out.signs[vstar];
    scope.push_back(out.xstar);
    signs.push_back(-1);
    int k = static_cast<int>(scope.size());
    con.scope = scope;
    con.relation = Coset(Subgroup::sum_kernel(group, k, signs), 0);
    out.signs[vstar] = signs;

    int iota2 = group.encode({1, 0}), iota3 = group.encode({0, 1});
    out.csp.arb_scope = {out.xstar};
    out.csp.arb_tuples = {iota2, iota3};
    std::sort(out.csp.arb_tuples.begin(), out.csp.arb_tuples.end());
    return out;
}

bool satisfies(const ExplicitCsp & c, const std::vector<int> & assignment) {
    require(assignment.size() == c.variables.size(), ErrorKind::arity,
            "assignment length mismatch");
    for (const auto & con : c.constraints) {
        TupleSpace tuples(c.group, static_cast<int>(con.scope.size()));
        std::vector<int> t;
        t.reserve(con.scope.size());
        for (int x : con.scope) t.push_back(assignment[x]);
        if (! std::binary_search(con.tuples.begin(), con.tuples.end(), tuples.encode(t)))
            return false;
    }
    return true;
}

SolveResult brute_force_solve(const ExplicitCsp & c, bool count_all, std::uint64_t budget) {
    int n = c.var_count();
    int dsize = static_cast<int>(c.domain.size());
    require(dsize >= 1, ErrorKind::precondition, "empty domain");
    double space = 1;
    for (int i = 0; i < n; ++i) {
        space *= dsize;
        if (space > static_cast<double>(budget))
            throw Error(ErrorKind::budget, "assignment space exceeds the solve budget");
    }

    // group constraints by the largest variable in scope so each is checked
    // as soon as it becomes fully assigned
    std::vector<std::vector<int>> ready(n + 1);
    for (size_t ci = 0; ci < c.constraints.size(); ++ci) {
        int last = -1;
        for (int x : c.constraints[ci].scope) last = std::max(last, x);
        require(last >= 0, ErrorKind::precondition, "constraint with empty scope");
        ready[last].push_back(static_cast<int>(ci));
    }
    std::vector<TupleSpace> spaces;
    spaces.reserve(c.constraints.size());
    for (const auto & con : c.constraints)
        spaces.emplace_back(c.group, static_cast<int>(con.scope.size()));

    SolveResult out;
    out.counted = count_all;
    std::vector<int> assign(n, -1);
    std::vector<int> scratch;

    // iterative lexicographic DFS over domain positions
    std::vector<int> pos(n, -1);
    int depth = 0;
    if (n == 0) {
        out.satisfiable = true; // no variables: empty assignment, constraints have scopes
        out.count = 1;
        return out;
    }
    while (depth >= 0) {
        ++pos[depth];
        if (pos[depth] >= dsize) {
            pos[depth] = -1;
            --depth;
            continue;
        }
        assign[depth] = c.domain[pos[depth]];
        bool ok = true;
        for (int ci : ready[depth]) {
            const auto & con = c.constraints[ci];
            scratch.clear();
            for (int x : con.scope) scratch.push_back(assign[x]);
            if (! std::binary_search(con.tuples.begin(), con.tuples.end(),
                                     spaces[ci].encode(scratch))) {
                ok = false;
                break;
            }
        }
        if (! ok) continue;
        if (depth == n - 1) {
            if (! out.satisfiable) {
                out.satisfiable = true;
                out.solution = assign;
            }
            if (! count_all) return out;
            ++out.count;
            continue;
        }
        ++depth;
    }
    return out;
}

} // namespace cfikit
