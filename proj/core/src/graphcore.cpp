#include <cfikit/graphcore.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <cfikit/errors.hpp>

namespace cfikit {

UGraph::UGraph(int n, std::vector<std::pair<int, int>> edge_list) : n_(n) {
    require(n >= 0, ErrorKind::precondition, "negative vertex count");
    for (auto & [u, v] : edge_list) {
        require(0 <= u && u < n && 0 <= v && v < n, ErrorKind::precondition,
                "edge endpoint out of range");
        require(u != v, ErrorKind::precondition, "self-loops not supported");
        if (u > v) std::swap(u, v);
    }
    std::sort(edge_list.begin(), edge_list.end());
    auto dup = std::adjacent_find(edge_list.begin(), edge_list.end());
    require(dup == edge_list.end(), ErrorKind::precondition, "duplicate edge");
    edges_ = std::move(edge_list);
    adj_.assign(n_, {});
    for (int e = 0; e < m(); ++e) {
        adj_[edges_[e].first].emplace_back(edges_[e].second, e);
        adj_[edges_[e].second].emplace_back(edges_[e].first, e);
    }
}

UGraph UGraph::complete(int n) {
    std::vector<std::pair<int, int>> es;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) es.emplace_back(u, v);
    return UGraph(n, std::move(es));
}

UGraph UGraph::cycle(int n) {
    require(n >= 3, ErrorKind::precondition, "cycle needs >= 3 vertices");
    std::vector<std::pair<int, int>> es;
    for (int u = 0; u < n; ++u) es.emplace_back(u, (u + 1) % n);
    return UGraph(n, std::move(es));
}

int UGraph::edge_index(int u, int v) const {
    if (u > v) std::swap(u, v);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(u, v));
    if (it != edges_.end() && *it == std::make_pair(u, v))
        return static_cast<int>(it - edges_.begin());
    return -1;
}

DiGraph::DiGraph(UGraph skeleton, std::vector<bool> flip)
    : skeleton_(std::move(skeleton)), flip_(std::move(flip)) {
    require(static_cast<int>(flip_.size()) == skeleton_.m(), ErrorKind::arity,
            "one orientation bit per edge");
}

DiGraph DiGraph::orient_by_vertex_order(UGraph skeleton) {
    std::vector<bool> flip(skeleton.m(), false);
    return DiGraph(std::move(skeleton), std::move(flip));
}

EdgeMask full_edge_mask(const UGraph & g) {
    require(g.m() <= 62, ErrorKind::budget, "edge mask limited to 62 edges");
    return (g.m() == 0) ? 0 : ((EdgeMask{1} << g.m()) - 1);
}

std::vector<int> mask_to_edges(EdgeMask mask) {
    std::vector<int> out;
    for (int e = 0; mask; ++e, mask >>= 1)
        if (mask & 1) out.push_back(e);
    return out;
}

EdgeMask edges_to_mask(const std::vector<int> & edge_ids) {
    EdgeMask m = 0;
    for (int e : edge_ids) {
        require(0 <= e && e < 62, ErrorKind::domain, "edge id out of mask range");
        m |= EdgeMask{1} << e;
    }
    return m;
}

namespace {

// iterative DFS computing components over active edges
void flood(const UGraph & g, EdgeMask active, int start, std::vector<int> & comp, int id) {
    std::vector<int> stack{start};
    comp[start] = id;
    while (! stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto [w, e] : g.neighbors(v))
            if ((active >> e) & 1)
                if (comp[w] < 0) {
                    comp[w] = id;
                    stack.push_back(w);
                }
    }
}

struct BridgeDfs {
    const UGraph & g;
    EdgeMask active;
    std::vector<int> disc, low;
    int timer = 0;
    EdgeMask bridges = 0;

    explicit BridgeDfs(const UGraph & g, EdgeMask active)
        : g(g), active(active), disc(g.n(), -1), low(g.n(), 0) {}

    void run(int root) {
        // explicit stack; (vertex, parent edge, neighbor cursor)
        struct Frame { int v, pe; size_t i; };
        std::vector<Frame> st;
        disc[root] = low[root] = timer++;
        st.push_back({root, -1, 0});
        while (! st.empty()) {
            auto & f = st.back();
            if (f.i < g.neighbors(f.v).size()) {
                auto [w, e] = g.neighbors(f.v)[f.i++];
                if (! ((active >> e) & 1) || e == f.pe) continue;
                if (disc[w] < 0) {
                    disc[w] = low[w] = timer++;
                    st.push_back({w, e, 0});
                }
                else
                    low[f.v] = std::min(low[f.v], disc[w]);
            }
            else {
                st.pop_back();
                if (! st.empty()) {
                    auto & p = st.back();
                    low[p.v] = std::min(low[p.v], low[f.v]);
                    if (low[f.v] > disc[p.v]) bridges |= EdgeMask{1} << f.pe;
                }
            }
        }
    }
};

} // namespace

std::vector<int> components_without(const UGraph & g, EdgeMask removed, int * count) {
    EdgeMask active = full_edge_mask(g) & ~removed;
    std::vector<int> comp(g.n(), -1);
    int id = 0;
    for (int v = 0; v < g.n(); ++v)
        if (comp[v] < 0) flood(g, active, v, comp, id++);
    if (count) *count = id;
    return comp;
}

bool is_connected(const UGraph & g) {
    if (g.n() == 0) return true;
    int c = 0;
    components_without(g, 0, &c);
    return c == 1;
}

bool is_two_connected(const UGraph & g) {
    if (g.n() <= 2) return false;
    if (! is_connected(g)) return false;
    // remove each vertex in turn; small n makes the quadratic check fine
    for (int x = 0; x < g.n(); ++x) {
        std::vector<int> comp(g.n(), -1);
        comp[x] = -2;
        int id = 0;
        for (int v = 0; v < g.n(); ++v)
            if (comp[v] == -1) {
                std::vector<int> stack{v};
                comp[v] = id;
                while (! stack.empty()) {
                    int a = stack.back();
                    stack.pop_back();
                    for (auto [b, e] : g.neighbors(a)) {
                        (void)e;
                        if (comp[b] == -1) {
                            comp[b] = id;
                            stack.push_back(b);
                        }
                    }
                }
                ++id;
            }
        if (id > 1) return false;
    }
    return true;
}

EdgeMask bridges_in(const UGraph & g, EdgeMask active) {
    BridgeDfs dfs(g, active);
    for (int v = 0; v < g.n(); ++v)
        if (dfs.disc[v] < 0) dfs.run(v);
    return dfs.bridges;
}

EdgeMask closure(const UGraph & g, EdgeMask x) {
    EdgeMask all = full_edge_mask(g);
    for (;;) {
        EdgeMask b = bridges_in(g, all & ~x);
        if ((b & ~x) == 0) return x;
        x |= b;
    }
}

int rank(const UGraph & g, EdgeMask x) {
    EdgeMask kept = 0;
    int r = 0;
    for (int e = 0; e < g.m(); ++e)
        if ((x >> e) & 1) {
            if (! ((closure(g, kept) >> e) & 1)) {
                kept |= EdgeMask{1} << e;
                ++r;
            }
        }
    return r;
}

CoreResult two_connected_core(const UGraph & g, EdgeMask x) {
    CoreResult out;
    EdgeMask active = full_edge_mask(g) & ~x;

    // block decomposition (biconnected components as edge classes) of the
    // remaining subgraph, via the standard low-link edge stack
    std::vector<int> disc(g.n(), -1), low(g.n(), 0);
    std::vector<int> estack;
    std::vector<std::vector<int>> blocks;
    int timer = 0;
    struct Frame { int v, pe; size_t i; };
    for (int root = 0; root < g.n(); ++root) {
        if (disc[root] >= 0) continue;
        std::vector<Frame> st;
        disc[root] = low[root] = timer++;
        st.push_back({root, -1, 0});
        while (! st.empty()) {
            auto & f = st.back();
            if (f.i < g.neighbors(f.v).size()) {
                auto [w, e] = g.neighbors(f.v)[f.i++];
                if (! ((active >> e) & 1) || e == f.pe) continue;
                if (disc[w] < 0) {
                    estack.push_back(e);
                    disc[w] = low[w] = timer++;
                    st.push_back({w, e, 0});
                }
                else if (disc[w] < disc[f.v]) {
                    estack.push_back(e);
                    low[f.v] = std::min(low[f.v], disc[w]);
                }
            }
            else {
                st.pop_back();
                if (! st.empty()) {
                    auto & p = st.back();
                    low[p.v] = std::min(low[p.v], low[f.v]);
                    if (low[f.v] >= disc[p.v]) {
                        // pop one block off the edge stack
                        std::vector<int> blk;
                        for (;;) {
                            int e = estack.back();
                            estack.pop_back();
                            blk.push_back(e);
                            if (e == f.pe) break;
                        }
                        blocks.push_back(std::move(blk));
                    }
                }
            }
        }
    }

    // pick the largest block spanning >= 3 vertices
    int best = -1;
    size_t best_edges = 0;
    int best_minv = -1;
    for (size_t i = 0; i < blocks.size(); ++i) {
        std::set<int> vs;
        for (int e : blocks[i]) {
            vs.insert(g.edge(e).first);
            vs.insert(g.edge(e).second);
        }
        if (vs.size() < 3) continue;
        int minv = *vs.begin();
        if (best < 0 || blocks[i].size() > best_edges ||
            (blocks[i].size() == best_edges && minv < best_minv)) {
            best = static_cast<int>(i);
            best_edges = blocks[i].size();
            best_minv = minv;
        }
    }

    if (best < 0) {
        out.xhat = full_edge_mask(g);
        out.core_empty = true;
        out.certified = true;
        return out;
    }

    EdgeMask keep = edges_to_mask(blocks[best]);
    out.xhat = full_edge_mask(g) & ~keep;
    out.core_empty = false;
    std::set<int> vs;
    for (int e : blocks[best]) {
        vs.insert(g.edge(e).first);
        vs.insert(g.edge(e).second);
    }
    out.block.assign(vs.begin(), vs.end());

    // certify on the induced subgraph
    std::vector<int> idx(g.n(), -1);
    for (size_t i = 0; i < out.block.size(); ++i) idx[out.block[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> es;
    for (int e : blocks[best])
        es.emplace_back(idx[g.edge(e).first], idx[g.edge(e).second]);
    out.certified = is_two_connected(UGraph(static_cast<int>(out.block.size()), std::move(es)));
    require(out.certified, ErrorKind::verification, "kept block failed the 2-connectivity check");
    return out;
}

ExpansionResult expansion_exact(const UGraph & g, int exact_budget_n) {
    require(g.n() >= 2, ErrorKind::precondition, "expansion needs >= 2 vertices");
    require(g.n() <= exact_budget_n, ErrorKind::budget,
            "exact expansion limited to " + std::to_string(exact_budget_n) + " vertices");
    ExpansionResult best;
    best.num = -1;
    std::uint64_t full = (std::uint64_t{1} << g.n()) - 1;
    for (std::uint64_t w = 1; w <= full; ++w) {
        int size = std::popcount(w);
        if (2 * size > g.n()) continue;
        int boundary = 0;
        for (auto [u, v] : g.edges())
            boundary += (((w >> u) & 1) != ((w >> v) & 1));
        // strict cross-multiplied comparison keeps the first witness on ties
        if (best.num < 0 || static_cast<long>(boundary) * best.den < best.num * size)
            best = {boundary, size, w};
    }
    long g_ = std::gcd(best.num, best.den);
    if (g_ > 1) { best.num /= g_; best.den /= g_; }
    return best;
}

SpectralEstimate spectral_gap_estimate(const UGraph & g, int iterations) {
    SpectralEstimate out;
    int n = g.n();
    if (n < 2) return out;
    int d = g.degree(0);
    for (int v = 0; v < n; ++v)
        require(g.degree(v) == d, ErrorKind::precondition, "spectral estimate expects a regular graph");

    // B = A + dI is PSD for d-regular graphs; deflate the all-ones vector,
    // power-iterate, and report a residual interval around the Rayleigh
    // quotient.  Diagnostic only: no downstream computation consumes this.
    std::vector<double> x(n), y(n);
    for (int v = 0; v < n; ++v) x[v] = 1.0 + 0.001 * ((v * 2654435761u) % 97);
    auto deflate = [&](std::vector<double> & v) {
        double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        for (double & t : v) t -= mean;
    };
    auto norm = [&](const std::vector<double> & v) {
        double s = 0;
        for (double t : v) s += t * t;
        return std::sqrt(s);
    };
    deflate(x);
    double lambda_b = 0;
    for (int it = 0; it < iterations; ++it) {
        std::fill(y.begin(), y.end(), 0.0);
        for (auto [u, v] : g.edges()) {
            y[u] += x[v];
            y[v] += x[u];
        }
        for (int v = 0; v < n; ++v) y[v] += d * x[v];
        deflate(y);
        double ny = norm(y);
        if (ny < 1e-300) { x.assign(n, 0.0); break; }
        for (int v = 0; v < n; ++v) x[v] = y[v] / ny;
        lambda_b = ny;
        out.iterations = it + 1;
    }
    // residual ||Bx - lambda x||
    std::fill(y.begin(), y.end(), 0.0);
    for (auto [u, v] : g.edges()) {
        y[u] += x[v];
        y[v] += x[u];
    }
    for (int v = 0; v < n; ++v) y[v] += d * x[v];
    double rayleigh = 0;
    for (int v = 0; v < n; ++v) rayleigh += y[v] * x[v];
    double res = 0;
    for (int v = 0; v < n; ++v) {
        double t = y[v] - rayleigh * x[v];
        res += t * t;
    }
    res = std::sqrt(res);
    (void)lambda_b;
    out.lambda2_lo = rayleigh - d - res;
    out.lambda2_hi = rayleigh - d + res;
    out.cheeger_lower = (d - out.lambda2_hi) / 2.0;
    return out;
}

UGraph random_regular_2connected(int n, int d, std::uint64_t seed, int max_tries) {
    require(n > d && d >= 1, ErrorKind::precondition, "need n > d >= 1");
    require((n * d) % 2 == 0, ErrorKind::precondition, "n*d must be even");
    std::mt19937_64 rng(seed);
    std::vector<int> stubs(static_cast<size_t>(n) * d);
    for (int v = 0; v < n; ++v)
        for (int i = 0; i < d; ++i) stubs[static_cast<size_t>(v) * d + i] = v;
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::set<std::pair<int, int>> es;
        bool ok = true;
        for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) { ok = false; break; }
            if (u > v) std::swap(u, v);
            if (! es.emplace(u, v).second) { ok = false; break; }
        }
        if (! ok) continue;
        UGraph g(n, std::vector<std::pair<int, int>>(es.begin(), es.end()));
        if (is_two_connected(g)) return g;
    }
    throw Error(ErrorKind::generation,
                "no simple 2-connected pairing found in " + std::to_string(max_tries) + " tries");
}

CutResult min_cut_with_sides(const UGraph & g, int min_side) {
    CutResult best;
    require(g.n() <= 24, ErrorKind::budget, "exhaustive cut scan limited to 24 vertices");
    // fix vertex 0 outside W to halve the scan
    std::uint64_t half = std::uint64_t{1} << (g.n() - 1);
    for (std::uint64_t s = 1; s < half; ++s) {
        std::uint64_t side = s << 1;
        int size = std::popcount(side);
        if (size < min_side || g.n() - size < min_side) continue;
        int cut = 0;
        for (auto [u, v] : g.edges())
            cut += (((side >> u) & 1) != ((side >> v) & 1));
        if (best.size < 0 || cut < best.size) best = {cut, side};
    }
    return best;
}

bool is_k_consistent(const DiGraph & h, const FiniteAbelianGroup & group,
                     const SigmaCharge & sigma, const EdgeAssignment & psi, int k) {
    const UGraph & g = h.skeleton();
    require(static_cast<int>(psi.value.size()) == g.m(), ErrorKind::arity,
            "assignment indexed by edge id");
    require(static_cast<int>(sigma.value.size()) == g.n(), ErrorKind::arity,
            "one charge per vertex");
    EdgeMask dom = psi.domain_mask();
    int comp_count = 0;
    std::vector<int> comp = components_without(g, dom, &comp_count);
    std::vector<int> size(comp_count, 0);
    for (int v = 0; v < g.n(); ++v) ++size[comp[v]];
    for (int c = 0; c < comp_count; ++c) {
        if (size[c] > k) continue;
        // boundary edges of the component are all assigned (they are exactly
        // the deleted edges with one endpoint inside)
        int lhs = 0, rhs = 0;
        for (int v = 0; v < g.n(); ++v)
            if (comp[v] == c) rhs = group.add(rhs, sigma.value[v]);
        for (int e = 0; e < g.m(); ++e) {
            if (! ((dom >> e) & 1)) continue;
            bool tin = comp[h.tail(e)] == c, hin = comp[h.head(e)] == c;
            if (tin == hin) continue;
            int val = psi.value[e];
            lhs = group.add(lhs, tin ? val : group.neg(val));
        }
        if (lhs != rhs) return false;
    }
    return true;
}

ExpanderProfile expander_profile(const UGraph & g, int exact_budget_n) {
    ExpanderProfile out;
    out.n = g.n();
    out.m = g.m();
    auto h = expansion_exact(g, exact_budget_n);
    out.h_num = h.num;
    out.h_den = h.den;
    // deterministic sample: all singletons and all pairs of edges
    long cn = 1, cd = 1;
    auto consider = [&](EdgeMask x) {
        auto core = two_connected_core(g, x);
        long num = std::popcount(core.xhat);
        long den = std::popcount(x);
        if (num * cd > cn * den) { cn = num; cd = den; }
    };
    for (int e = 0; e < g.m(); ++e) consider(EdgeMask{1} << e);
    for (int e = 0; e < g.m(); ++e)
        for (int f = e + 1; f < g.m(); ++f) consider((EdgeMask{1} << e) | (EdgeMask{1} << f));
    long gg = std::gcd(cn, cd);
    out.c_num = cn / gg;
    out.c_den = cd / gg;
    // floor((m-1) / (3c)) with c as a fraction
    if (out.c_num > 0) out.ell_suggest = static_cast<int>(((long)(out.m - 1) * out.c_den) / (3 * out.c_num));
    return out;
}

GraphMaskTables::GraphMaskTables(const DiGraph & h, int small_limit)
    : h_(h), small_limit_(small_limit) {
    const UGraph & g = h_.skeleton();
    require(g.m() <= 20, ErrorKind::budget, "mask tables limited to 20 edges");
    size_t total = size_t{1} << g.m();
    rank_.resize(total);
    small_.resize(total);
    for (size_t x = 0; x < total; ++x) {
        rank_[x] = static_cast<std::int8_t>(rank(g, x));
        int cc = 0;
        std::vector<int> comp = components_without(g, x, &cc);
        std::vector<int> size(cc, 0);
        for (int v = 0; v < g.n(); ++v) ++size[comp[v]];
        for (int c = 0; c < cc; ++c) {
            if (size[c] > small_limit_) continue;
            SmallComp sc;
            for (int v = 0; v < g.n(); ++v)
                if (comp[v] == c) sc.vertices |= std::uint64_t{1} << v;
            for (int e = 0; e < g.m(); ++e) {
                if (! ((x >> e) & 1)) continue;
                bool tin = comp[h_.tail(e)] == c, hin = comp[h_.head(e)] == c;
                if (tin == hin) continue;
                sc.boundary.emplace_back(e, tin ? +1 : -1);
            }
            small_[x].push_back(std::move(sc));
        }
    }
}

} // namespace cfikit
