#include <cfikit/pc.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace cfikit {

namespace {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

long inv_mod(long a, int p) {
    // p prime, a != 0 mod p; Fermat
    long r = 1, b = ((a % p) + p) % p, e = p - 2;
    while (e > 0) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

// sum of C(n, 0..d), capped at cap+1
long monomials_up_to(int n, int d, long cap) {
    long total = 0, binom = 1;
    for (int i = 0; i <= d && i <= n; ++i) {
        total += binom;
        if (total > cap) return cap + 1;
        if (i < n) {
            if (binom > cap * (i + 1) / (n - i) + 1) return cap + 1;
            binom = binom * (n - i) / (i + 1);
        }
    }
    return total;
}

} // namespace

// ----------------------------------------------------------- MultilinearPoly

MultilinearPoly::MultilinearPoly(int field) : field_(field) {
    require(field == 0 || field >= 2, ErrorKind::domain, "field must be 0 or a prime");
}

long MultilinearPoly::norm(long c) const {
    if (field_ == 0) return c;
    long r = c % field_;
    return r < 0 ? r + field_ : r;
}

MultilinearPoly MultilinearPoly::constant(int field, long c) {
    MultilinearPoly p(field);
    p.add_term({}, c);
    return p;
}

MultilinearPoly MultilinearPoly::variable(int field, int x) {
    MultilinearPoly p(field);
    p.add_term({x}, 1);
    return p;
}

MultilinearPoly MultilinearPoly::monomial(int field, Monomial m, long c) {
    MultilinearPoly p(field);
    p.add_term(std::move(m), c);
    return p;
}

int MultilinearPoly::degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(terms_.rbegin()->first.size());
}

long MultilinearPoly::coefficient(const Monomial & m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0 : it->second;
}

void MultilinearPoly::add_term(Monomial m, long c) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end()); // x*x -> x
    c = norm(c);
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(std::move(m), c);
    if (!fresh) {
        it->second = norm(it->second + c);
        if (it->second == 0) terms_.erase(it);
    }
}

MultilinearPoly & MultilinearPoly::operator+=(const MultilinearPoly & o) {
    require(field_ == o.field_, ErrorKind::domain, "field mismatch");
    for (const auto & [m, c] : o.terms_) add_term(m, c);
    return *this;
}

MultilinearPoly & MultilinearPoly::operator-=(const MultilinearPoly & o) {
    require(field_ == o.field_, ErrorKind::domain, "field mismatch");
    for (const auto & [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

MultilinearPoly MultilinearPoly::operator+(const MultilinearPoly & o) const {
    MultilinearPoly r = *this;
    r += o;
    return r;
}

MultilinearPoly MultilinearPoly::operator-(const MultilinearPoly & o) const {
    MultilinearPoly r = *this;
    r -= o;
    return r;
}

MultilinearPoly MultilinearPoly::operator*(const MultilinearPoly & o) const {
    require(field_ == o.field_, ErrorKind::domain, "field mismatch");
    MultilinearPoly r(field_);
    Monomial merged;
    for (const auto & [m1, c1] : terms_)
        for (const auto & [m2, c2] : o.terms_) {
            merged.clear();
            std::set_union(m1.begin(), m1.end(), m2.begin(), m2.end(),
                           std::back_inserter(merged));
            r.add_term(merged, c1 * c2);
        }
    return r;
}

MultilinearPoly MultilinearPoly::scaled(long c) const {
    MultilinearPoly r(field_);
    for (const auto & [m, cf] : terms_) r.add_term(m, cf * c);
    return r;
}

MultilinearPoly MultilinearPoly::times_var(int x) const {
    MultilinearPoly r(field_);
    Monomial merged;
    for (const auto & [m, c] : terms_) {
        merged = m;
        auto it = std::lower_bound(merged.begin(), merged.end(), x);
        if (it == merged.end() || *it != x) merged.insert(it, x);
        r.add_term(merged, c);
    }
    return r;
}

MultilinearPoly MultilinearPoly::reduced_mod(int p) const {
    require(p >= 2, ErrorKind::domain, "modulus must be at least 2");
    MultilinearPoly r(p);
    for (const auto & [m, c] : terms_) r.add_term(m, c);
    return r;
}

long MultilinearPoly::evaluate01(const std::vector<std::uint8_t> & assign, int p) const {
    long total = 0;
    for (const auto & [m, c] : terms_) {
        bool on = true;
        for (int x : m) {
            if (x < 0 || x >= static_cast<int>(assign.size()) || assign[x] == 0) {
                on = false;
                break;
            }
        }
        if (on) total += c % p;
    }
    long r = total % p;
    return r < 0 ? r + p : r;
}

bool MultilinearPoly::operator==(const MultilinearPoly & o) const {
    return field_ == o.field_ && terms_ == o.terms_;
}

std::string MultilinearPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto & [m, c] : terms_) {
        if (!out.empty()) out += " + ";
        if (m.empty()) {
            out += std::to_string(c);
            continue;
        }
        if (c == 1) {
        } else if (c == -1) {
            out += "-";
        } else {
            out += std::to_string(c);
            out += "*";
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i) out += "*";
            out += "x" + std::to_string(m[i]);
        }
    }
    return out;
}

MultilinearPoly MultilinearPoly::parse(int field, const std::string & text) {
    MultilinearPoly out(field);
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty() || t == "0") return out;
    std::size_t i = 0;
    while (i < t.size()) {
        long coeff = 1;
        bool neg = false;
        if (t[i] == '+') ++i;
        if (i < t.size() && t[i] == '-') {
            neg = true;
            ++i;
        }
        if (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
            long v = 0;
            while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])))
                v = v * 10 + (t[i++] - '0');
            coeff = v;
            if (i < t.size() && t[i] == '*') ++i;
        }
        Monomial m;
        while (i < t.size() && t[i] == 'x') {
            ++i;
            require(i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])),
                    ErrorKind::io, "bad variable token in polynomial");
            int v = 0;
            while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])))
                v = v * 10 + (t[i++] - '0');
            m.push_back(v);
            if (i < t.size() && t[i] == '*') ++i;
        }
        require(i >= t.size() || t[i] == '+' || t[i] == '-', ErrorKind::io,
                "unexpected character in polynomial");
        out.add_term(std::move(m), neg ? -coeff : coeff);
    }
    return out;
}

// ------------------------------------------------------------------ systems

int PisoVariables::id(int v, int w) const {
    if (v < 0 || v >= static_cast<int>(by_left.size())) return -1;
    for (int i : by_left[static_cast<std::size_t>(v)])
        if (pairs[static_cast<std::size_t>(i)].second == w) return i;
    return -1;
}

PolySystem p_iso(const ColoredGraph & g, const ColoredGraph & h, PisoVariables * vars) {
    ColoredGraph h2 = h;
    h2.align_palettes_with(g);
    PisoVariables vv;
    vv.by_left.assign(static_cast<std::size_t>(g.n()), {});
    vv.by_right.assign(static_cast<std::size_t>(h2.n()), {});
    for (int v = 0; v < g.n(); ++v)
        for (int w = 0; w < h2.n(); ++w)
            if (g.color(v) == h2.color(w)) {
                int id = static_cast<int>(vv.pairs.size());
                vv.pairs.emplace_back(v, w);
                vv.by_left[static_cast<std::size_t>(v)].push_back(id);
                vv.by_right[static_cast<std::size_t>(w)].push_back(id);
            }

    PolySystem s;
    s.nvars = static_cast<int>(vv.pairs.size());
    for (auto [v, w] : vv.pairs)
        s.var_names.push_back(std::to_string(v) + ":" + std::to_string(w));
    for (int w = 0; w < h2.n(); ++w) {
        MultilinearPoly a = MultilinearPoly::constant(0, -1);
        for (int i : vv.by_right[static_cast<std::size_t>(w)]) a.add_term({i}, 1);
        s.axioms.push_back(std::move(a));
    }
    for (int v = 0; v < g.n(); ++v) {
        MultilinearPoly a = MultilinearPoly::constant(0, -1);
        for (int i : vv.by_left[static_cast<std::size_t>(v)]) a.add_term({i}, 1);
        s.axioms.push_back(std::move(a));
    }
    for (int i = 0; i < s.nvars; ++i)
        for (int j = i + 1; j < s.nvars; ++j) {
            PartialMap pm{vv.pairs[static_cast<std::size_t>(i)],
                          vv.pairs[static_cast<std::size_t>(j)]};
            if (!is_partial_isomorphism(g, h2, pm))
                s.axioms.push_back(MultilinearPoly::monomial(0, {i, j}));
        }
    if (vars) *vars = std::move(vv);
    return s;
}

int PcspVariables::id(int x, int code) const {
    if (x < 0 || x >= csp_vars) return -1;
    auto it = std::lower_bound(domain.begin(), domain.end(), code);
    if (it == domain.end() || *it != code) return -1;
    return x * static_cast<int>(domain.size()) + static_cast<int>(it - domain.begin());
}

PolySystem p_csp(const ExplicitCsp & c, PcspVariables * vars) {
    PcspVariables vv;
    vv.domain = c.domain;
    vv.csp_vars = c.var_count();
    const int dsz = static_cast<int>(c.domain.size());
    require(dsz >= 1, ErrorKind::precondition, "empty domain");

    PolySystem s;
    s.nvars = vv.csp_vars * dsz;
    for (int x = 0; x < vv.csp_vars; ++x)
        for (int j = 0; j < dsz; ++j)
            s.var_names.push_back(std::to_string(x) + ":" + std::to_string(c.domain[j]));
    for (int x = 0; x < vv.csp_vars; ++x) {
        MultilinearPoly a = MultilinearPoly::constant(0, -1);
        for (int j = 0; j < dsz; ++j) a.add_term({x * dsz + j}, 1);
        s.axioms.push_back(std::move(a));
        for (int j = 0; j < dsz; ++j)
            for (int j2 = j + 1; j2 < dsz; ++j2)
                s.axioms.push_back(MultilinearPoly::monomial(0, {x * dsz + j, x * dsz + j2}));
    }
    for (const auto & con : c.constraints) {
        const int k = static_cast<int>(con.scope.size());
        TupleSpace ts(c.group, k);
        std::vector<int> pos(static_cast<std::size_t>(k), 0), val(static_cast<std::size_t>(k));
        while (true) {
            for (int i = 0; i < k; ++i) val[static_cast<std::size_t>(i)] = c.domain[pos[i]];
            long code = ts.encode(val);
            if (!std::binary_search(con.tuples.begin(), con.tuples.end(), code)) {
                Monomial m;
                for (int i = 0; i < k; ++i) m.push_back(con.scope[i] * dsz + pos[i]);
                s.axioms.push_back(MultilinearPoly::monomial(0, std::move(m)));
            }
            int i = k - 1;
            while (i >= 0 && pos[i] == dsz - 1) pos[i--] = 0;
            if (i < 0) break;
            ++pos[i];
        }
    }
    if (vars) *vars = std::move(vv);
    return s;
}

// ------------------------------------------------------------------ closure

namespace {

// row-echelon basis over F_p keyed by leading (graded-lex greatest) monomial;
// entries are monic
struct EchelonBasis {
    std::map<Monomial, MultilinearPoly, MonomialOrder> rows;
    int p;

    explicit EchelonBasis(int p) : p(p) {}

    MultilinearPoly reduce(MultilinearPoly f) const {
        while (!f.is_zero()) {
            const Monomial & lead = f.terms().rbegin()->first;
            auto it = rows.find(lead);
            if (it == rows.end()) break;
            f -= it->second.scaled(f.terms().rbegin()->second);
        }
        return f;
    }

    // fully reduces f; inserts the monic remainder, false if it vanished
    bool insert(MultilinearPoly f) {
        f = reduce(std::move(f));
        if (f.is_zero()) return false;
        long lc = f.terms().rbegin()->second;
        Monomial lead = f.terms().rbegin()->first;
        rows.emplace(std::move(lead), f.scaled(inv_mod(lc, p)));
        return true;
    }
};

} // namespace

bool degree_d_derivable(const PolySystem & s, int p, int d, const MultilinearPoly & target,
                        long monomial_budget, ClosureTrail * trail) {
    require(is_prime(p), ErrorKind::domain, "coefficient field must be a prime field");
    require(d >= 0, ErrorKind::precondition, "degree must be nonnegative");
    long used = monomials_up_to(s.nvars, d, monomial_budget);
    require(used <= monomial_budget, ErrorKind::budget,
            "monomial space exceeds the budget at this degree");
    if (trail) {
        trail->dim_per_round.clear();
        trail->monomial_budget_used = used;
    }

    MultilinearPoly goal = target.reduced_mod(p);
    if (goal.is_zero()) return true;
    if (goal.degree() > d) return false;

    EchelonBasis basis(p);
    for (const auto & a : s.axioms) {
        MultilinearPoly f = a.reduced_mod(p);
        if (f.is_zero() || f.degree() > d) continue;
        basis.insert(std::move(f));
    }
    if (trail) trail->dim_per_round.push_back(static_cast<long>(basis.rows.size()));

    bool added = true;
    while (added) {
        added = false;
        std::vector<const MultilinearPoly *> snapshot;
        snapshot.reserve(basis.rows.size());
        for (const auto & [lead, f] : basis.rows) snapshot.push_back(&f);
        std::vector<MultilinearPoly> fresh;
        for (const MultilinearPoly * f : snapshot)
            for (int x = 0; x < s.nvars; ++x) {
                MultilinearPoly g = f->times_var(x);
                if (g.degree() > d) continue;
                g = basis.reduce(std::move(g));
                if (!g.is_zero()) fresh.push_back(std::move(g));
            }
        for (auto & g : fresh)
            if (basis.insert(std::move(g))) added = true;
        if (trail) trail->dim_per_round.push_back(static_cast<long>(basis.rows.size()));
    }
    return basis.reduce(goal).is_zero();
}

std::optional<int> min_refutation_degree(const PolySystem & s, int p, int d_max,
                                         long monomial_budget,
                                         std::vector<ClosureTrail> * trails) {
    if (trails) trails->clear();
    const MultilinearPoly one = MultilinearPoly::constant(0, 1);
    for (int d = 0; d <= d_max; ++d) {
        ClosureTrail t;
        bool got = degree_d_derivable(s, p, d, one, monomial_budget, &t);
        if (trails) trails->push_back(std::move(t));
        if (got) return d;
    }
    return std::nullopt;
}

bool satisfiable01(const PolySystem & s, int p, std::uint64_t budget) {
    require(is_prime(p), ErrorKind::domain, "coefficient field must be a prime field");
    require(s.nvars <= 62, ErrorKind::budget, "variable count too large to enumerate");
    const std::uint64_t total = std::uint64_t{1} << s.nvars;
    require(total <= budget, ErrorKind::budget, "assignment enumeration exceeds the budget");
    std::vector<std::uint8_t> assign(static_cast<std::size_t>(s.nvars), 0);
    for (std::uint64_t word = 0; word < total; ++word) {
        for (int i = 0; i < s.nvars; ++i) assign[static_cast<std::size_t>(i)] = (word >> i) & 1;
        bool ok = true;
        for (const auto & a : s.axioms)
            if (a.evaluate01(assign, p) != 0) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

// --------------------------------------------------------------- reductions

PolySystem apply_substitution(const Substitution & sub, const PolySystem & target) {
    require(static_cast<int>(sub.map.size()) == target.nvars, ErrorKind::domain,
            "substitution must cover every target variable");
    for (const auto & f : sub.map)
        require(f.degree() <= sub.d1, ErrorKind::precondition,
                "substitution entry exceeds its declared degree");
    PolySystem out;
    out.nvars = sub.source_vars;
    out.axioms.reserve(target.axioms.size());
    for (const auto & q : target.axioms) {
        MultilinearPoly acc(0);
        for (const auto & [m, c] : q.terms()) {
            MultilinearPoly prod = MultilinearPoly::constant(0, c);
            for (int y : m) {
                prod = prod * sub.map[static_cast<std::size_t>(y)];
                if (prod.is_zero()) break;
            }
            acc += prod;
        }
        out.axioms.push_back(std::move(acc));
    }
    return out;
}

Substitution identity_substitution(const PolySystem & s) {
    Substitution sub;
    sub.source_vars = s.nvars;
    sub.map.reserve(static_cast<std::size_t>(s.nvars));
    for (int i = 0; i < s.nvars; ++i) sub.map.push_back(MultilinearPoly::variable(0, i));
    sub.d1 = 1;
    int dmax = 0;
    for (const auto & a : s.axioms) dmax = std::max(dmax, a.degree());
    sub.d2 = dmax;
    sub.note = "identity";
    return sub;
}

long gadget_reduction_degree(int arity, int group_order) {
    require(arity >= 1 && arity <= 8 && group_order >= 1 && group_order <= 12,
            ErrorKind::precondition, "gadget degree formula out of its supported range");
    long pw = 1;
    for (int i = 0; i < arity; ++i) pw *= group_order;
    long base = static_cast<long>(arity) * group_order + pw;
    return base * base + 1;
}

namespace {

int csp_max_arity(const GroupCsp & c) {
    int k = 1;
    for (const auto & con : c.constraints) k = std::max(k, static_cast<int>(con.scope.size()));
    return k;
}

} // namespace

Substitution reduction_csp_to_iso(const GraphPair & pair, const PisoVariables & iso_vars) {
    require(pair.cfi != nullptr, ErrorKind::unsupported,
            "reduction needs the gadget layout of the pair");
    const CfiPairLayout & lay = *pair.cfi;
    const FiniteAbelianGroup & grp = lay.left.csp.group;
    const int order = grp.order();

    Substitution sub;
    sub.source_vars = lay.left.csp.var_count() * order;
    sub.d1 = csp_max_arity(lay.left.csp);
    sub.d2 = static_cast<int>(std::min<long>(gadget_reduction_degree(sub.d1, order), INT32_MAX));
    sub.note = "asserted: side conditions follow semantically per constraint";
    sub.map.reserve(iso_vars.pairs.size());
    for (auto [v, w] : iso_vars.pairs) {
        const auto & li = lay.left.vinfo[static_cast<std::size_t>(v)];
        const auto & ri = lay.right.vinfo[static_cast<std::size_t>(w)];
        if (li.kind != ri.kind || li.owner != ri.owner) {
            sub.map.push_back(MultilinearPoly(0));
            continue;
        }
        if (li.kind == 0) {
            int alpha = grp.sub(static_cast<int>(li.code), static_cast<int>(ri.code));
            sub.map.push_back(MultilinearPoly::variable(0, li.owner * order + alpha));
        } else {
            const auto & scope = lay.left.csp.constraints[static_cast<std::size_t>(li.owner)].scope;
            TupleSpace ts(grp, static_cast<int>(scope.size()));
            Monomial m;
            for (std::size_t i = 0; i < scope.size(); ++i) {
                int alpha = grp.sub(ts.get(li.code, static_cast<int>(i)),
                                    ts.get(ri.code, static_cast<int>(i)));
                m.push_back(scope[i] * order + alpha);
            }
            sub.map.push_back(MultilinearPoly::monomial(0, std::move(m)));
        }
    }
    return sub;
}

Substitution reduction_iso_to_csp(const GraphPair & pair, const PisoVariables & iso_vars) {
    require(pair.cfi != nullptr, ErrorKind::unsupported,
            "reduction needs the gadget layout of the pair");
    const CfiPairLayout & lay = *pair.cfi;
    const FiniteAbelianGroup & grp = lay.left.csp.group;
    const int order = grp.order();

    Substitution sub;
    sub.source_vars = static_cast<int>(iso_vars.pairs.size());
    sub.d1 = 1;
    sub.d2 = static_cast<int>(
        std::min<long>(gadget_reduction_degree(csp_max_arity(lay.left.csp), order), INT32_MAX));
    sub.note = "asserted: side conditions follow semantically per gadget";
    const int nv = lay.left.csp.var_count();
    sub.map.reserve(static_cast<std::size_t>(nv) * order);
    for (int x = 0; x < nv; ++x)
        for (int gamma = 0; gamma < order; ++gamma) {
            int v = lay.left.var_vertex(x, 0);
            int w = lay.right.var_vertex(x, grp.neg(gamma));
            int id = iso_vars.id(v, w);
            require(id >= 0, ErrorKind::generation, "missing gadget variable in the pair");
            sub.map.push_back(MultilinearPoly::variable(0, id));
        }
    return sub;
}

Substitution reduction_component_fixing(const GraphPair & orpair, int position,
                                        const PisoVariables & or_vars,
                                        const PisoVariables & component_vars) {
    require(orpair.orp != nullptr, ErrorKind::unsupported,
            "reduction needs the disjunction layout of the pair");
    const OrLayout & orp = *orpair.orp;
    const int width = static_cast<int>(orp.inputs.size());
    require(position >= 0 && position < width, ErrorKind::precondition, "no such input position");

    // component matching: flip the selection bit at `position`
    const int npairs = static_cast<int>(orp.side[0].size());
    std::vector<int> match0(static_cast<std::size_t>(npairs), -1);
    std::vector<int> by_mask(std::size_t{1} << width, -1);
    for (int ci = 0; ci < npairs; ++ci) {
        unsigned mask = 0;
        for (int i = 0; i < width; ++i)
            mask |= static_cast<unsigned>(orp.side[1][static_cast<std::size_t>(ci)].selection[i] & 1)
                    << i;
        by_mask[mask] = ci;
    }
    for (int ci = 0; ci < npairs; ++ci) {
        unsigned mask = 0;
        for (int i = 0; i < width; ++i)
            mask |= static_cast<unsigned>(orp.side[0][static_cast<std::size_t>(ci)].selection[i] & 1)
                    << i;
        match0[static_cast<std::size_t>(ci)] = by_mask[mask ^ (1u << position)];
        require(match0[static_cast<std::size_t>(ci)] >= 0, ErrorKind::precondition,
                "unmatched component");
    }

    Substitution sub;
    sub.source_vars = static_cast<int>(component_vars.pairs.size());
    sub.d1 = 1;
    sub.d2 = 2;
    sub.note = "checked: every substituted axiom is zero, trivial, or a component axiom";
    sub.map.reserve(or_vars.pairs.size());
    for (auto [a, b] : or_vars.pairs) {
        const auto & lu = orp.vloc[0][static_cast<std::size_t>(a)];
        const auto & rw = orp.vloc[1][static_cast<std::size_t>(b)];
        if (match0[static_cast<std::size_t>(lu.comp)] != rw.comp || lu.pos != rw.pos) {
            sub.map.push_back(MultilinearPoly(0));
            continue;
        }
        if (lu.pos != position) { // includes connectors (pos -1)
            sub.map.push_back(lu.base == rw.base ? MultilinearPoly::constant(0, 1)
                                                 : MultilinearPoly(0));
            continue;
        }
        const int sel = orp.side[0][static_cast<std::size_t>(lu.comp)].selection[position];
        const int v = sel == 0 ? lu.base : rw.base;
        const int w = sel == 0 ? rw.base : lu.base;
        int id = component_vars.id(v, w);
        require(id >= 0, ErrorKind::generation, "missing component variable");
        sub.map.push_back(MultilinearPoly::variable(0, id));
    }
    return sub;
}

Substitution reduction_boolean_to_extended(const ExtendedTseitin & ext, int p) {
    require(p == 2 || p == 3, ErrorKind::domain, "embedding is defined for p in {2, 3}");
    const FiniteAbelianGroup & grp = ext.csp.base.group;
    require(grp.moduli() == std::vector<int>({2, 3}), ErrorKind::precondition,
            "extended instance must live over Z2xZ3");
    const int order = grp.order();
    const int m = ext.h.m();
    const int iota = p == 2 ? grp.encode({1, 0}) : grp.encode({0, 1});

    Substitution sub;
    sub.source_vars = 2 * m; // boolean system: two values per edge
    sub.d1 = 1;
    int karity = 1;
    for (const auto & con : ext.csp.base.constraints)
        karity = std::max(karity, static_cast<int>(con.scope.size()));
    sub.d2 = karity + 1;
    sub.note = "asserted: substituted constraints follow from the matching vertex constraint";
    sub.map.reserve(static_cast<std::size_t>(ext.csp.var_count()) * order);
    for (int x = 0; x < ext.csp.var_count(); ++x)
        for (int gamma = 0; gamma < order; ++gamma) {
            if (x == ext.xstar) {
                sub.map.push_back(gamma == iota ? MultilinearPoly::constant(0, 1)
                                                : MultilinearPoly(0));
                continue;
            }
            if (gamma == FiniteAbelianGroup::zero())
                sub.map.push_back(MultilinearPoly::variable(0, x * 2));
            else if (gamma == iota)
                sub.map.push_back(MultilinearPoly::variable(0, x * 2 + 1));
            else
                sub.map.push_back(MultilinearPoly(0));
        }
    return sub;
}

std::vector<ReductionInfo> builtin_reductions(int arity, int group_order) {
    long d0 = gadget_reduction_degree(arity, group_order);
    return {
        {"csp-to-iso", arity, d0, "cfi pair with layout"},
        {"iso-to-csp", 1, d0, "cfi pair with layout"},
        {"component-fixing", 1, 2, "disjunction pair with layout"},
        {"boolean-to-extended", 1, arity + 1, "extended flow instance over Z2xZ3"},
    };
}

} // namespace cfikit
