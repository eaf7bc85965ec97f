#include <cfikit/wl.hpp>

#include <algorithm>
#include <array>
#include <unordered_map>

namespace cfikit {

namespace {

std::uint64_t fnv1a(const std::vector<int> & v) {
    std::uint64_t h = 1469598103934665603ull;
    for (int x : v) {
        std::uint64_t u = static_cast<std::uint32_t>(x);
        for (int b = 0; b < 4; ++b) {
            h ^= (u >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    }
    return h;
}

// Joint color dictionary.  Signatures are not stored: each hash bucket keeps
// (color, owner element); a hit is accepted only after recomputing the
// owner's signature and comparing exactly, so collisions cannot merge
// distinct classes.
struct JointDict {
    struct Entry {
        int color;
        int which;
        long idx;
    };
    std::unordered_map<std::uint64_t, std::vector<Entry>> table;
    int count = 0;
    std::vector<int> probe;

    template <typename Recompute>
    int intern(const std::vector<int> & sig, int which, long idx, Recompute && redo) {
        auto & chain = table[fnv1a(sig)];
        for (const Entry & e : chain) {
            redo(e.which, e.idx, probe);
            if (probe == sig) return e.color;
        }
        chain.push_back({count, which, idx});
        return count++;
    }
};

bool histograms_match(const std::vector<int> & a, const std::vector<int> & b, int colors) {
    std::vector<long> ca(static_cast<std::size_t>(colors), 0), cb = ca;
    for (int c : a) ++ca[static_cast<std::size_t>(c)];
    for (int c : b) ++cb[static_cast<std::size_t>(c)];
    return ca == cb;
}

WlResult run_vertex_refinement(const ColoredGraph & g, const ColoredGraph & h) {
    const int n = g.n();
    const std::array<const ColoredGraph *, 2> gr{&g, &h};
    std::array<std::vector<int>, 2> cur;
    int colors = 0;
    {
        JointDict dict;
        auto initial = [&](int which, long v, std::vector<int> & out) {
            out.assign(1, gr[static_cast<std::size_t>(which)]->color(static_cast<int>(v)));
        };
        std::vector<int> sig;
        for (int which = 0; which < 2; ++which) {
            cur[static_cast<std::size_t>(which)].resize(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v) {
                initial(which, v, sig);
                cur[static_cast<std::size_t>(which)][static_cast<std::size_t>(v)] =
                    dict.intern(sig, which, v, initial);
            }
        }
        colors = dict.count;
    }
    if (!histograms_match(cur[0], cur[1], colors)) return {1, true, 0, colors};

    int rounds = 0;
    std::vector<std::pair<int, int>> nb;
    while (true) {
        JointDict dict;
        auto signature = [&](int which, long vv, std::vector<int> & out) {
            const int v = static_cast<int>(vv);
            const std::vector<int> & c = cur[static_cast<std::size_t>(which)];
            out.clear();
            out.push_back(c[static_cast<std::size_t>(v)]);
            nb.clear();
            for (auto [u, ec] : gr[static_cast<std::size_t>(which)]->neighbors(v))
                nb.emplace_back(ec, c[static_cast<std::size_t>(u)]);
            std::sort(nb.begin(), nb.end());
            for (auto [ec, cc] : nb) {
                out.push_back(ec);
                out.push_back(cc);
            }
        };
        std::array<std::vector<int>, 2> nxt;
        std::vector<int> sig;
        for (int which = 0; which < 2; ++which) {
            nxt[static_cast<std::size_t>(which)].resize(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v) {
                signature(which, v, sig);
                nxt[static_cast<std::size_t>(which)][static_cast<std::size_t>(v)] =
                    dict.intern(sig, which, v, signature);
            }
        }
        ++rounds;
        const int prev = colors;
        colors = dict.count;
        cur = std::move(nxt);
        if (!histograms_match(cur[0], cur[1], colors)) return {1, true, rounds, colors};
        if (colors == prev) return {1, false, rounds, colors};
    }
}

WlResult run_tuple_refinement(const ColoredGraph & g, const ColoredGraph & h, int k, long ntuples) {
    const int n = g.n();
    const std::array<const ColoredGraph *, 2> gr{&g, &h};
    std::vector<long> pw(static_cast<std::size_t>(k));
    pw[static_cast<std::size_t>(k - 1)] = 1;
    for (int i = k - 2; i >= 0; --i)
        pw[static_cast<std::size_t>(i)] = pw[static_cast<std::size_t>(i + 1)] * n;
    auto digit = [&](long idx, int i) {
        return static_cast<int>(idx / pw[static_cast<std::size_t>(i)] % n);
    };

    std::array<std::vector<int>, 2> cur;
    int colors = 0;
    std::vector<int> u(static_cast<std::size_t>(k));
    {
        JointDict dict;
        auto atomic = [&](int which, long idx, std::vector<int> & out) {
            const ColoredGraph & gg = *gr[static_cast<std::size_t>(which)];
            out.clear();
            for (int i = 0; i < k; ++i) u[static_cast<std::size_t>(i)] = digit(idx, i);
            for (int i = 0; i < k; ++i) out.push_back(gg.color(u[static_cast<std::size_t>(i)]));
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j) {
                    out.push_back(u[static_cast<std::size_t>(i)] == u[static_cast<std::size_t>(j)]
                                      ? 1
                                      : 0);
                    out.push_back(gg.edge_code(u[static_cast<std::size_t>(i)],
                                               u[static_cast<std::size_t>(j)]));
                }
        };
        std::vector<int> sig;
        for (int which = 0; which < 2; ++which) {
            cur[static_cast<std::size_t>(which)].resize(static_cast<std::size_t>(ntuples));
            for (long idx = 0; idx < ntuples; ++idx) {
                atomic(which, idx, sig);
                cur[static_cast<std::size_t>(which)][static_cast<std::size_t>(idx)] =
                    dict.intern(sig, which, idx, atomic);
            }
        }
        colors = dict.count;
    }
    if (!histograms_match(cur[0], cur[1], colors)) return {k, true, 0, colors};

    int rounds = 0;
    std::vector<int> rows(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    std::vector<int> order(static_cast<std::size_t>(n));
    while (true) {
        JointDict dict;
        // new(t) = (old(t), sorted over substituted vertices u of the vector
        // (old(t[0->u]), ..., old(t[k-1->u])))
        auto signature = [&](int which, long idx, std::vector<int> & out) {
            const std::vector<int> & c = cur[static_cast<std::size_t>(which)];
            out.clear();
            out.push_back(c[static_cast<std::size_t>(idx)]);
            for (int i = 0; i < k; ++i) u[static_cast<std::size_t>(i)] = digit(idx, i);
            for (int uu = 0; uu < n; ++uu)
                for (int i = 0; i < k; ++i) {
                    long sub = idx + static_cast<long>(uu - u[static_cast<std::size_t>(i)]) *
                                         pw[static_cast<std::size_t>(i)];
                    rows[static_cast<std::size_t>(uu * k + i)] =
                        c[static_cast<std::size_t>(sub)];
                }
            for (int uu = 0; uu < n; ++uu) order[static_cast<std::size_t>(uu)] = uu;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return std::lexicographical_compare(rows.begin() + a * k, rows.begin() + (a + 1) * k,
                                                    rows.begin() + b * k,
                                                    rows.begin() + (b + 1) * k);
            });
            for (int uu : order)
                out.insert(out.end(), rows.begin() + uu * k, rows.begin() + (uu + 1) * k);
        };
        std::array<std::vector<int>, 2> nxt;
        std::vector<int> sig;
        for (int which = 0; which < 2; ++which) {
            nxt[static_cast<std::size_t>(which)].resize(static_cast<std::size_t>(ntuples));
            for (long idx = 0; idx < ntuples; ++idx) {
                signature(which, idx, sig);
                nxt[static_cast<std::size_t>(which)][static_cast<std::size_t>(idx)] =
                    dict.intern(sig, which, idx, signature);
            }
        }
        ++rounds;
        const int prev = colors;
        colors = dict.count;
        cur = std::move(nxt);
        if (!histograms_match(cur[0], cur[1], colors)) return {k, true, rounds, colors};
        if (colors == prev) return {k, false, rounds, colors};
    }
}

} // namespace

ColoredGraph plain_colored(const UGraph & g) {
    ColoredGraph c;
    int plain = c.intern_color("v");
    for (int v = 0; v < g.n(); ++v) c.add_vertex(plain);
    for (auto [a, b] : g.edges()) c.add_edge(a, b);
    return c;
}

WlResult wl_run(const ColoredGraph & g, const ColoredGraph & h, int k,
                std::uint64_t tuple_budget) {
    require(k >= 1, ErrorKind::precondition, "refinement dimension must be at least 1");
    if (g.n() != h.n()) return {k, true, 0, 0};
    std::uint64_t ntuples = 1;
    for (int i = 0; i < k; ++i) {
        if (g.n() > 0 && ntuples > tuple_budget / static_cast<std::uint64_t>(g.n())) {
            ntuples = tuple_budget + 1;
            break;
        }
        ntuples *= static_cast<std::uint64_t>(g.n());
    }
    require(ntuples <= tuple_budget / 2, ErrorKind::budget,
            "tuple budget exceeded at this dimension");
    ColoredGraph h2 = h;
    h2.align_palettes_with(g);
    return k == 1 ? run_vertex_refinement(g, h2)
                  : run_tuple_refinement(g, h2, k, static_cast<long>(ntuples));
}

bool wl_distinguish(const ColoredGraph & g, const ColoredGraph & h, int k,
                    std::uint64_t tuple_budget) {
    return wl_run(g, h, k, tuple_budget).distinguished;
}

WlReport wl_report(const ColoredGraph & g, const ColoredGraph & h, int kmax,
                   std::uint64_t tuple_budget) {
    require(kmax >= 1, ErrorKind::precondition, "refinement dimension must be at least 1");
    WlReport rep;
    for (int k = 1; k <= kmax; ++k) {
        rep.per_k.push_back(wl_run(g, h, k, tuple_budget));
        if (rep.per_k.back().distinguished && rep.min_distinguishing_k < 0)
            rep.min_distinguishing_k = k;
    }
    return rep;
}

} // namespace cfikit
