#include <cfikit/cfi.hpp>

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

#include <cfikit/errors.hpp>

namespace cfikit {

int ColoredGraph::add_vertex(int c, std::string tag) {
    require(c >= 0 && c < static_cast<int>(palette_.size()), ErrorKind::precondition,
            "vertex color is not in the palette");
    color_.push_back(c);
    tag_.push_back(std::move(tag));
    adj_.emplace_back();
    return n() - 1;
}

void ColoredGraph::add_edge(int u, int v, int ec) {
    require(u >= 0 && v >= 0 && u < n() && v < n() && u != v, ErrorKind::precondition,
            "edge endpoints out of range");
    require(ec >= -1 && ec < static_cast<int>(edge_palette_.size()), ErrorKind::precondition,
            "edge color is not in the palette");
    if (u > v) std::swap(u, v);
    edges_.emplace_back(u, v);
    edge_color_.push_back(ec);
    adj_[u].emplace_back(v, ec);
    adj_[v].emplace_back(u, ec);
}

int ColoredGraph::intern_color(const std::string & name) {
    for (int i = 0; i < static_cast<int>(palette_.size()); ++i)
        if (palette_[i] == name) return i;
    palette_.push_back(name);
    return static_cast<int>(palette_.size()) - 1;
}

int ColoredGraph::intern_edge_color(const std::string & name) {
    for (int i = 0; i < static_cast<int>(edge_palette_.size()); ++i)
        if (edge_palette_[i] == name) return i;
    edge_palette_.push_back(name);
    return static_cast<int>(edge_palette_.size()) - 1;
}

int ColoredGraph::edge_code(int u, int v) const {
    if (u == v) return -2;
    if (adj_[u].size() > adj_[v].size()) std::swap(u, v);
    for (auto [w, ec] : adj_[u])
        if (w == v) return ec;
    return -2;
}

void ColoredGraph::align_palettes_with(const ColoredGraph & ref) {
    auto remap = [](std::vector<std::string> & pal, std::vector<int> & cols,
                    const std::vector<std::string> & refpal) {
        std::vector<std::string> merged = refpal;
        std::vector<int> trans(pal.size());
        for (std::size_t i = 0; i < pal.size(); ++i) {
            auto it = std::find(merged.begin(), merged.end(), pal[i]);
            if (it == merged.end()) {
                merged.push_back(pal[i]);
                it = merged.end() - 1;
            }
            trans[i] = static_cast<int>(it - merged.begin());
        }
        for (int & c : cols)
            if (c >= 0) c = trans[c];
        pal = std::move(merged);
    };
    remap(palette_, color_, ref.palette_);
    remap(edge_palette_, edge_color_, ref.edge_palette_);
    for (auto & nb : adj_) nb.clear();
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto [u, v] = edges_[e];
        adj_[u].emplace_back(v, edge_color_[e]);
        adj_[v].emplace_back(u, edge_color_[e]);
    }
}

int CfiLayout::con_vertex(int c, long tuple_code) const {
    const auto & t = con_tuples[c];
    auto it = std::lower_bound(t.begin(), t.end(), tuple_code);
    require(it != t.end() && *it == tuple_code, ErrorKind::query,
            "tuple code is not in the relation of constraint " + std::to_string(c));
    return con_base[c] + static_cast<int>(it - t.begin());
}

ColoredGraph cfi_graph(const GroupCsp & c, CfiLayout * layout, const std::string & prefix) {
    ColoredGraph g;
    CfiLayout lay{c, {}, {}, {}, {}};
    const long ord = c.group.order();
    for (std::size_t x = 0; x < c.variables.size(); ++x) {
        int col = g.intern_color(prefix + "L(" + c.variables[x] + ")");
        lay.var_base.push_back(g.n());
        for (long v = 0; v < ord; ++v) {
            g.add_vertex(col, prefix + c.variables[x] + "=" + std::to_string(v));
            lay.vinfo.push_back({0, static_cast<int>(x), v});
        }
    }
    for (std::size_t j = 0; j < c.constraints.size(); ++j) {
        const auto & con = c.constraints[j];
        const int k = static_cast<int>(con.scope.size());
        require(k >= 1, ErrorKind::arity, "constraint scope is empty");
        for (int i = 0; i < k; ++i) {
            require(con.scope[i] >= 0 && con.scope[i] < static_cast<int>(c.variables.size()),
                    ErrorKind::precondition, "constraint scope variable out of range");
            for (int i2 = i + 1; i2 < k; ++i2)
                require(con.scope[i] != con.scope[i2], ErrorKind::precondition,
                        "constraint scope repeats a variable");
        }
        int col = g.intern_color(prefix + "L(C" + std::to_string(j) + ")");
        TupleSpace ts(c.group, k);
        std::vector<long> tuples = con.relation.elements();
        lay.con_base.push_back(g.n());
        lay.con_tuples.push_back(tuples);
        for (long t : tuples) {
            int vid = g.add_vertex(col, prefix + "C" + std::to_string(j) + ":" + std::to_string(t));
            lay.vinfo.push_back({1, static_cast<int>(j), t});
            for (int i = 0; i < k; ++i) {
                int ec = g.intern_edge_color(prefix + "M" + std::to_string(i + 1));
                g.add_edge(lay.var_base[con.scope[i]] + static_cast<int>(ts.get(t, i)), vid, ec);
            }
        }
    }
    if (layout) *layout = std::move(lay);
    return g;
}

GraphPair cfi_pair(const GroupCsp & c) {
    GraphPair out;
    CfiLayout ll{c, {}, {}, {}, {}};
    CfiLayout rr{homogenize(c), {}, {}, {}, {}};
    out.left = cfi_graph(c, &ll);
    out.right = cfi_graph(rr.csp, &rr);
    out.cfi = std::make_shared<CfiPairLayout>(CfiPairLayout{std::move(ll), std::move(rr)});
    return out;
}

namespace {

// disjoint-union append, interning colors by name; returns vertex offset
int append_graph(ColoredGraph & dst, const ColoredGraph & src) {
    const int off = dst.n();
    std::vector<int> cmap(src.palette().size()), emap(src.edge_palette().size());
    for (std::size_t i = 0; i < src.palette().size(); ++i)
        cmap[i] = dst.intern_color(src.palette()[i]);
    for (std::size_t i = 0; i < src.edge_palette().size(); ++i)
        emap[i] = dst.intern_edge_color(src.edge_palette()[i]);
    for (int v = 0; v < src.n(); ++v) dst.add_vertex(cmap[src.color(v)], src.tag(v));
    for (int e = 0; e < src.m(); ++e) {
        auto [u, v] = src.edges()[e];
        int ec = src.edge_color(e);
        dst.add_edge(off + u, off + v, ec < 0 ? -1 : emap[ec]);
    }
    return off;
}

// color ids survive because names are interned in palette order
ColoredGraph with_prefixed_palette(const ColoredGraph & g, const std::string & prefix) {
    ColoredGraph out;
    for (const auto & name : g.palette()) out.intern_color(prefix + name);
    for (const auto & name : g.edge_palette()) out.intern_edge_color(prefix + name);
    for (int v = 0; v < g.n(); ++v) out.add_vertex(g.color(v), prefix + g.tag(v));
    for (int e = 0; e < g.m(); ++e) {
        auto [u, v] = g.edges()[e];
        out.add_edge(u, v, g.edge_color(e));
    }
    return out;
}

// appends one sequence component built from blocks[0..l) to dst; connector i
// (1-based color) is adjacent to every vertex of blocks i-1 and i
void append_sequence(ColoredGraph & dst, const std::vector<const ColoredGraph *> & blocks,
                     const std::string & connector_prefix, std::vector<int> & block_offset,
                     std::vector<int> & connector) {
    const int l = static_cast<int>(blocks.size());
    block_offset.resize(l);
    connector.resize(l);
    for (int i = 0; i < l; ++i) block_offset[i] = append_graph(dst, *blocks[i]);
    const int blocks_end = dst.n();
    for (int i = 0; i < l; ++i) {
        int col = dst.intern_color(connector_prefix + std::to_string(i + 1));
        connector[i] = dst.add_vertex(col, connector_prefix + std::to_string(i + 1));
    }
    auto block_end = [&](int b) { return b + 1 < l ? block_offset[b + 1] : blocks_end; };
    for (int i = 0; i < l; ++i)
        for (int b = std::max(0, i - 1); b <= i; ++b)
            for (int v = block_offset[b]; v < block_end(b); ++v)
                dst.add_edge(v, connector[i]);
}

} // namespace

ColoredGraph sequence_graph(const std::vector<ColoredGraph> & blocks,
                            const std::string & connector_prefix) {
    require(!blocks.empty(), ErrorKind::precondition, "sequence needs at least one block");
    ColoredGraph out;
    std::vector<const ColoredGraph *> ptrs;
    for (const auto & b : blocks) ptrs.push_back(&b);
    std::vector<int> off, conn;
    append_sequence(out, ptrs, connector_prefix, off, conn);
    return out;
}

GraphPair or_pair(const std::vector<GraphPair> & pairs) {
    require(!pairs.empty(), ErrorKind::precondition, "disjunction needs at least one pair");
    require(pairs.size() <= 16, ErrorKind::budget, "disjunction width capped at 16");
    const int l = static_cast<int>(pairs.size());
    GraphPair out;
    auto lay = std::make_shared<OrLayout>();
    lay->inputs = pairs;
    std::vector<ColoredGraph> pref[2];
    for (int i = 0; i < l; ++i) {
        std::string p = "p" + std::to_string(i + 1) + ".";
        pref[0].push_back(with_prefixed_palette(pairs[i].left, p));
        pref[1].push_back(with_prefixed_palette(pairs[i].right, p));
    }
    for (int parity = 0; parity < 2; ++parity) {
        ColoredGraph & side = parity == 0 ? out.left : out.right;
        for (unsigned long s = 0; s < (1ul << l); ++s) {
            if (static_cast<int>(std::popcount(s)) % 2 != parity) continue;
            OrLayout::Component comp;
            comp.offset = side.n();
            std::vector<const ColoredGraph *> blocks;
            for (int i = 0; i < l; ++i) {
                int a = static_cast<int>((s >> i) & 1);
                comp.selection.push_back(a);
                blocks.push_back(&pref[a][i]);
            }
            append_sequence(side, blocks, "S", comp.block_offset, comp.connector);
            comp.size = side.n() - comp.offset;
            const int ci = static_cast<int>(lay->side[parity].size());
            lay->vloc[parity].resize(side.n());
            for (int i = 0; i < l; ++i) {
                int end = i + 1 < l ? comp.block_offset[i + 1] : comp.connector[0];
                for (int v = comp.block_offset[i]; v < end; ++v)
                    lay->vloc[parity][v] = {ci, i, v - comp.block_offset[i]};
            }
            for (int i = 0; i < l; ++i) lay->vloc[parity][comp.connector[i]] = {ci, -1, i};
            lay->side[parity].push_back(std::move(comp));
        }
    }
    out.orp = std::move(lay);
    return out;
}

GraphPair extended_pair(const ExtendedGroupCsp & c) {
    std::vector<GraphPair> parts;
    for (long t : c.arb_tuples) parts.push_back(cfi_pair(fix_arbitrary(c, t)));
    GraphPair out = or_pair(parts);
    out.orp->tuple_per_position = c.arb_tuples;
    return out;
}

GraphPair extended_pair(const ExtendedTseitin & c) { return extended_pair(c.csp); }

bool is_partial_isomorphism(const ColoredGraph & g, const ColoredGraph & h, const PartialMap & pi) {
    const std::size_t k = pi.size();
    for (std::size_t i = 0; i < k; ++i) {
        auto [u, v] = pi[i];
        if (u < 0 || u >= g.n() || v < 0 || v >= h.n()) return false;
        if (g.palette()[g.color(u)] != h.palette()[h.color(v)]) return false;
        for (std::size_t j = i + 1; j < k; ++j) {
            auto [u2, v2] = pi[j];
            if (u == u2 || v == v2) return false;
            int eg = g.edge_code(u, u2), eh = h.edge_code(v, v2);
            if ((eg == -2) != (eh == -2)) return false;
            if (eg == -2) continue;
            if ((eg == -1) != (eh == -1)) return false;
            if (eg >= 0 && g.edge_palette()[eg] != h.edge_palette()[eh]) return false;
        }
    }
    return true;
}

bool verify_isomorphism(const ColoredGraph & g, const ColoredGraph & h,
                        const std::vector<int> & mapping, std::string * why) {
    auto fail = [&](const std::string & msg) {
        if (why) *why = msg;
        return false;
    };
    if (g.n() != h.n() || g.m() != h.m()) return fail("vertex or edge counts differ");
    if (static_cast<int>(mapping.size()) != g.n()) return fail("mapping has wrong length");
    std::vector<char> hit(h.n(), 0);
    for (int v = 0; v < g.n(); ++v) {
        int w = mapping[v];
        if (w < 0 || w >= h.n() || hit[w]) return fail("mapping is not a bijection");
        hit[w] = 1;
        if (g.palette()[g.color(v)] != h.palette()[h.color(w)])
            return fail("color mismatch at vertex " + std::to_string(v));
    }
    for (int e = 0; e < g.m(); ++e) {
        auto [u, v] = g.edges()[e];
        int eh = h.edge_code(mapping[u], mapping[v]);
        if (eh == -2)
            return fail("edge {" + std::to_string(u) + "," + std::to_string(v) + "} not preserved");
        int eg = g.edge_color(e);
        if ((eg == -1) != (eh == -1) ||
            (eg >= 0 && g.edge_palette()[eg] != h.edge_palette()[eh]))
            return fail("edge color mismatch on {" + std::to_string(u) + "," + std::to_string(v) +
                        "}");
    }
    return true;
}

std::vector<int> iso_from_solution(const GraphPair & pair, const std::vector<int> & solution) {
    require(pair.cfi != nullptr, ErrorKind::precondition, "pair carries no gadget layout");
    const CfiLayout & L = pair.cfi->left;
    const CfiLayout & R = pair.cfi->right;
    const GroupCsp & c = L.csp;
    const long ord = c.group.order();
    require(solution.size() == c.variables.size(), ErrorKind::arity,
            "assignment length does not match the variable count");
    for (int s : solution)
        require(s >= 0 && s < ord, ErrorKind::domain, "assignment value out of range");
    {
        ExplicitCsp e = to_explicit(c);
        for (std::size_t j = 0; j < e.constraints.size(); ++j) {
            std::vector<int> restricted;
            for (int x : e.constraints[j].scope) restricted.push_back(solution[x]);
            TupleSpace ts(c.group, static_cast<int>(e.constraints[j].scope.size()));
            long code = ts.encode(restricted);
            const auto & tu = e.constraints[j].tuples;
            require(std::binary_search(tu.begin(), tu.end(), code), ErrorKind::precondition,
                    "assignment violates constraint " + std::to_string(j));
        }
    }
    std::vector<int> mapping(pair.left.n(), -1);
    for (std::size_t x = 0; x < c.variables.size(); ++x)
        for (long v = 0; v < ord; ++v)
            mapping[L.var_vertex(static_cast<int>(x), static_cast<int>(v))] =
                R.var_vertex(static_cast<int>(x), static_cast<int>(c.group.sub(v, solution[x])));
    for (std::size_t j = 0; j < c.constraints.size(); ++j) {
        const auto & scope = c.constraints[j].scope;
        TupleSpace ts(c.group, scope.size());
        std::vector<int> shift;
        for (int x : scope) shift.push_back(solution[x]);
        long shift_code = ts.encode(shift);
        for (long t : L.con_tuples[j])
            mapping[L.con_vertex(static_cast<int>(j), t)] =
                R.con_vertex(static_cast<int>(j), ts.sub(t, shift_code));
    }
    std::string why;
    require(verify_isomorphism(pair.left, pair.right, mapping, &why), ErrorKind::verification,
            "induced mapping is not an isomorphism: " + why);
    return mapping;
}

std::vector<int> solution_from_iso(const GraphPair & pair, const std::vector<int> & mapping) {
    require(pair.cfi != nullptr, ErrorKind::precondition, "pair carries no gadget layout");
    std::string why;
    require(verify_isomorphism(pair.left, pair.right, mapping, &why), ErrorKind::precondition,
            "mapping is not an isomorphism: " + why);
    const CfiLayout & L = pair.cfi->left;
    const CfiLayout & R = pair.cfi->right;
    const GroupCsp & c = L.csp;
    const long ord = c.group.order();
    std::vector<int> sol(c.variables.size(), -1);
    for (std::size_t x = 0; x < c.variables.size(); ++x) {
        for (long v = 0; v < ord; ++v)
            if (mapping[L.var_vertex(static_cast<int>(x), static_cast<int>(v))] ==
                R.var_vertex(static_cast<int>(x), 0)) {
                sol[x] = static_cast<int>(v);
                break;
            }
        require(sol[x] >= 0, ErrorKind::verification,
                "isomorphism does not map the block of " + c.variables[x] + " onto itself");
    }
    ExplicitCsp e = to_explicit(c);
    for (std::size_t j = 0; j < e.constraints.size(); ++j) {
        std::vector<int> restricted;
        for (int x : e.constraints[j].scope) restricted.push_back(sol[x]);
        TupleSpace ts(c.group, e.constraints[j].scope.size());
        const auto & tu = e.constraints[j].tuples;
        require(std::binary_search(tu.begin(), tu.end(), ts.encode(restricted)),
                ErrorKind::verification,
                "recovered assignment violates constraint " + std::to_string(j));
    }
    return sol;
}

namespace {

// joint colour refinement with backtracking individualization
struct IsoSearch {
    const ColoredGraph & a;
    const ColoredGraph & b;
    std::uint64_t budget;
    std::uint64_t nodes = 0;

    bool refine(std::vector<int> & ca, std::vector<int> & cb, int & ncolors) const {
        for (;;) {
            std::map<std::vector<long>, int> ids;
            auto sig = [&](const ColoredGraph & g, const std::vector<int> & c, int v) {
                std::vector<long> s;
                s.reserve(g.degree(v) + 1);
                for (auto [u, ec] : g.neighbors(v))
                    s.push_back((static_cast<long>(ec + 2) << 24) | c[u]);
                std::sort(s.begin(), s.end());
                s.insert(s.begin(), c[v]);
                return s;
            };
            std::vector<int> na(a.n()), nb(b.n());
            for (int v = 0; v < a.n(); ++v) {
                auto s = sig(a, ca, v);
                auto it = ids.try_emplace(std::move(s), static_cast<int>(ids.size())).first;
                na[v] = it->second;
            }
            for (int v = 0; v < b.n(); ++v) {
                auto s = sig(b, cb, v);
                auto it = ids.try_emplace(std::move(s), static_cast<int>(ids.size())).first;
                nb[v] = it->second;
            }
            int nn = static_cast<int>(ids.size());
            std::vector<int> cnta(nn, 0), cntb(nn, 0);
            for (int v : na) ++cnta[v];
            for (int v : nb) ++cntb[v];
            if (cnta != cntb) return false;
            bool stable = nn == ncolors;
            ca = std::move(na);
            cb = std::move(nb);
            ncolors = nn;
            if (stable) return true;
        }
    }

    std::optional<std::vector<int>> run(std::vector<int> ca, std::vector<int> cb, int ncolors) {
        if (++nodes > budget)
            throw Error(ErrorKind::budget, "isomorphism search exceeded its node budget");
        if (!refine(ca, cb, ncolors)) return std::nullopt;
        std::vector<int> count(ncolors, 0);
        for (int v : ca) ++count[v];
        int target = -1;
        for (int c = 0; c < ncolors; ++c)
            if (count[c] > 1 && (target < 0 || count[c] < count[target])) target = c;
        if (target < 0) {
            std::vector<int> bvert(ncolors, -1), mapping(a.n());
            for (int v = 0; v < b.n(); ++v) bvert[cb[v]] = v;
            for (int v = 0; v < a.n(); ++v) mapping[v] = bvert[ca[v]];
            if (verify_isomorphism(a, b, mapping)) return mapping;
            return std::nullopt;
        }
        int pivot = -1;
        for (int v = 0; v < a.n(); ++v)
            if (ca[v] == target) {
                pivot = v;
                break;
            }
        for (int w = 0; w < b.n(); ++w) {
            if (cb[w] != target) continue;
            std::vector<int> ca2 = ca, cb2 = cb;
            ca2[pivot] = ncolors;
            cb2[w] = ncolors;
            if (auto r = run(std::move(ca2), std::move(cb2), ncolors + 1)) return r;
        }
        return std::nullopt;
    }
};

} // namespace

std::optional<std::vector<int>> brute_force_isomorphic(const ColoredGraph & g,
                                                       const ColoredGraph & h,
                                                       std::uint64_t node_budget) {
    if (g.n() != h.n() || g.m() != h.m()) return std::nullopt;
    if (g.n() == 0) return std::vector<int>{};
    ColoredGraph hh = h;
    hh.align_palettes_with(g);
    IsoSearch search{g, hh, node_budget};
    std::vector<int> ca(g.n()), cb(hh.n());
    for (int v = 0; v < g.n(); ++v) ca[v] = g.color(v);
    for (int v = 0; v < hh.n(); ++v) cb[v] = hh.color(v);
    // initial colors live in a shared id space only after one renumbering pass
    int ncolors = -1;
    return search.run(std::move(ca), std::move(cb), ncolors);
}

} // namespace cfikit
