#include <cfikit/linsys.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace cfikit {

MapKey canonical_key(MapKey k) {
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

std::string key_to_string(const MapKey & k) {
    std::string s = "{";
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i) s += ",";
        s += "(" + std::to_string(k[i].first) + "," + std::to_string(k[i].second) + ")";
    }
    return s + "}";
}

namespace {

struct KeyHash {
    std::size_t operator()(const MapKey & k) const {
        std::size_t h = 1469598103934665603ull;
        for (auto [a, b] : k) {
            h = (h ^ static_cast<std::size_t>(a)) * 1099511628211ull;
            h = (h ^ static_cast<std::size_t>(b)) * 1099511628211ull;
        }
        return h;
    }
};

// key + one extra pair, kept canonical
void compose(const MapKey & pi, std::pair<int, int> pr, MapKey & out) {
    out.clear();
    out.reserve(pi.size() + 1);
    auto it = std::lower_bound(pi.begin(), pi.end(), pr);
    out.insert(out.end(), pi.begin(), it);
    out.push_back(pr);
    out.insert(out.end(), it, pi.end());
}

} // namespace

long Valuation::scaled(const MapKey & key) const {
    Rat v = value(key) * scale();
    require(v.get_den() == 1, ErrorKind::precondition,
            "valuation value does not conform to the declared scale");
    require(v.get_num().fits_slong_p(), ErrorKind::precondition, "scaled value overflows");
    return v.get_num().get_si();
}

void Valuation::extension_support(const MapKey &, int, int, std::vector<int> &) const {
    throw Error(ErrorKind::precondition, "valuation offers no support hints");
}

void Valuation::extension_begin(const MapKey & pi, int fixed, int side) const {
    ext_pi_ = pi;
    ext_fixed_ = fixed;
    ext_side_ = side;
}

long Valuation::scaled_extension(int v) const {
    MapKey k;
    compose(ext_pi_, ext_side_ == 0 ? std::pair{v, ext_fixed_} : std::pair{ext_fixed_, v}, k);
    return scaled(k);
}

MapValuation::MapValuation(std::map<MapKey, Rat> values) : values_(std::move(values)) {}

Rat MapValuation::value(const MapKey & key) const {
    auto it = values_.find(key);
    return it == values_.end() ? Rat(0) : it->second;
}

// ---------------------------------------------------------------------------
// equation streaming

// Receives one equation at a time.  Kind 0 is the unit equation [{}] = 1;
// kinds 1/2 are sums of extensions of `pi` by a fixed right (resp. left)
// vertex, minus [pi].  The system offers its own candidate enumeration via
// `cands`; a sink may ignore it when the valuation brings support hints.
class EquationSink {
public:
    struct Candidates {
        virtual ~Candidates() = default;
        virtual void emit(EquationSink & s) const = 0;
    };

    virtual ~EquationSink() = default;
    virtual bool equation(int kind, const MapKey & pi, int fixed, const Candidates & cands) = 0;
    virtual void ext(int v) = 0;
};

namespace {

std::string describe_eq(bool csp_flavor, int kind, const MapKey & pi, int fixed) {
    if (kind == 0) return "unit [{}] = 1";
    std::ostringstream os;
    if (csp_flavor)
        os << "row psi=" << key_to_string(pi) << " x=" << fixed;
    else
        os << (kind == 1 ? "row pi=" : "col pi=") << key_to_string(pi)
           << (kind == 1 ? " w=" : " v=") << fixed;
    return os.str();
}

class VerifySink final : public EquationSink {
public:
    VerifySink(const Valuation & val, bool csp_flavor) : val_(val), csp_(csp_flavor) {
        scaled_ = val.has_scaled();
        hints_ = val.has_support_hints();
        if (scaled_) scale_ = val.scale();
    }

    bool equation(int kind, const MapKey & pi, int fixed, const Candidates & cands) override {
        ++res_.equations;
        if (kind == 0) {
            ++res_.terms;
            Rat lhs = val_.value(pi);
            if (lhs != 1) return fail_unit(lhs);
            return true;
        }
        int side = (kind == 1) ? 0 : 1;
        buf_.clear();
        if (hints_)
            val_.extension_support(pi, fixed, side, buf_);
        else
            cands.emit(*this); // fills buf_ through ext()
        res_.terms += static_cast<long long>(buf_.size()) + 1;
        if (scaled_) {
            val_.extension_begin(pi, fixed, side);
            long long sum = 0;
            for (int v : buf_) sum += val_.scaled_extension(v);
            if (sum == val_.scaled(pi)) return true;
        } else {
            Rat sum = 0;
            MapKey k;
            for (int v : buf_) {
                compose(pi, side == 0 ? std::pair{v, fixed} : std::pair{fixed, v}, k);
                sum += val_.value(k);
            }
            if (sum == val_.value(pi)) return true;
        }
        return fail_sum(kind, pi, fixed, side);
    }

    void ext(int v) override { buf_.push_back(v); }

    VerifyResult take() { return std::move(res_); }

private:
    bool fail_unit(const Rat & lhs) {
        res_.ok = false;
        res_.violated = describe_eq(csp_, 0, {}, -1);
        res_.lhs = lhs;
        res_.rhs = 1;
        return false;
    }

    bool fail_sum(int kind, const MapKey & pi, int fixed, int side) {
        res_.ok = false;
        res_.violated = describe_eq(csp_, kind, pi, fixed);
        Rat lhs = 0;
        MapKey k;
        for (int v : buf_) {
            compose(pi, side == 0 ? std::pair{v, fixed} : std::pair{fixed, v}, k);
            lhs += val_.value(k);
        }
        res_.lhs = lhs;
        res_.rhs = val_.value(pi);
        return false;
    }

    const Valuation & val_;
    bool csp_, scaled_ = false, hints_ = false;
    long scale_ = 1;
    std::vector<int> buf_;
    VerifyResult res_;
};

class MaterializeSink final : public EquationSink {
public:
    MaterializeSink(std::vector<MapKey> universe, bool csp_flavor) : csp_(csp_flavor) {
        sys_.vars = std::move(universe);
        sys_.nvars = static_cast<long>(sys_.vars.size());
        index_.reserve(sys_.vars.size() * 2);
        for (long i = 0; i < sys_.nvars; ++i) index_.emplace(sys_.vars[i], i);
    }

    bool equation(int kind, const MapKey & pi, int fixed, const Candidates & cands) override {
        row_.terms.clear();
        row_.rhs = 0;
        if (kind == 0) {
            row_.terms.push_back({lookup(pi), 1});
            row_.rhs = 1;
        } else {
            side_ = (kind == 1) ? 0 : 1;
            pi_ = &pi;
            fixed_ = fixed;
            cands.emit(*this);
            row_.terms.push_back({lookup(pi), -1});
            std::sort(row_.terms.begin(), row_.terms.end());
        }
        row_.label = describe_eq(csp_, kind, pi, fixed);
        sys_.rows.push_back(row_);
        return true;
    }

    void ext(int v) override {
        compose(*pi_, side_ == 0 ? std::pair{v, fixed_} : std::pair{fixed_, v}, key_);
        row_.terms.push_back({lookup(key_), 1});
    }

    MaterializedSystem take() { return std::move(sys_); }

private:
    long lookup(const MapKey & k) const {
        auto it = index_.find(k);
        require(it != index_.end(), ErrorKind::precondition,
                "internal: equation term outside the enumerated universe");
        return it->second;
    }

    bool csp_;
    MaterializedSystem sys_;
    std::unordered_map<MapKey, long, KeyHash> index_;
    MaterializedSystem::Row row_;
    const MapKey * pi_ = nullptr;
    int fixed_ = -1, side_ = 0;
    MapKey key_;
};

} // namespace

VerifyResult LinearSystem::verify(const Valuation & val) const {
    VerifySink sink(val, dynamic_cast<const LcspSystem *>(this) != nullptr);
    run(sink);
    return sink.take();
}

MaterializedSystem LinearSystem::materialize(long max_vars) const {
    std::vector<MapKey> universe;
    collect_universe(max_vars, universe);
    MaterializeSink sink(std::move(universe), dynamic_cast<const LcspSystem *>(this) != nullptr);
    run(sink);
    return sink.take();
}

long LinearSystem::universe_size(long max_vars) const {
    std::vector<MapKey> universe;
    collect_universe(max_vars, universe);
    return static_cast<long>(universe.size());
}

// ---------------------------------------------------------------------------
// isomorphism systems

LisoSystem::LisoSystem(const ColoredGraph & g, const ColoredGraph & h, int level)
    : LinearSystem(level), g_(&g), h_(&h) {
    require(level >= 1, ErrorKind::precondition, "system level must be at least 1");
    if (g.palette() != h.palette() || g.edge_palette() != h.edge_palette()) {
        h_aligned_ = std::make_shared<ColoredGraph>(h);
        h_aligned_->align_palettes_with(g);
        h_ = h_aligned_.get();
    }
    const std::size_t ng = static_cast<std::size_t>(g_->n()), nh = static_cast<std::size_t>(h_->n());
    require(ng * ng + nh * nh <= 64u * 1000 * 1000, ErrorKind::budget,
            "graphs too large for the dense adjacency tables");
    require(g_->edge_palette().size() < 65533 && h_->edge_palette().size() < 65533,
            ErrorKind::budget, "edge palette too large");

    ncolors_ = static_cast<int>(std::max(g_->palette().size(), h_->palette().size()));
    gclass_.assign(ncolors_, {});
    hclass_.assign(ncolors_, {});
    for (int v = 0; v < g_->n(); ++v) gclass_[g_->color(v)].push_back(v);
    for (int v = 0; v < h_->n(); ++v) hclass_[h_->color(v)].push_back(v);

    gcode_.assign(ng * ng, 0);
    hcode_.assign(nh * nh, 0);
    auto fill = [](const ColoredGraph & gr, std::vector<std::uint16_t> & m) {
        const std::size_t n = static_cast<std::size_t>(gr.n());
        for (std::size_t e = 0; e < gr.edges().size(); ++e) {
            auto [u, v] = gr.edges()[e];
            std::uint16_t code = static_cast<std::uint16_t>(gr.edge_color(e) + 2);
            m[static_cast<std::size_t>(u) * n + v] = code;
            m[static_cast<std::size_t>(v) * n + u] = code;
        }
    };
    fill(*g_, gcode_);
    fill(*h_, hcode_);
}

bool LisoSystem::pair_is_partial_iso(const MapKey & key) const {
    for (std::size_t i = 0; i < key.size(); ++i) {
        auto [u, w] = key[i];
        if (u < 0 || u >= g_->n() || w < 0 || w >= h_->n()) return false;
        if (g_->color(u) != h_->color(w)) return false;
        for (std::size_t j = i + 1; j < key.size(); ++j) {
            auto [u2, w2] = key[j];
            if (u == u2 || w == w2) return false;
            if (gc(u, u2) != hc(w, w2)) return false;
        }
    }
    return true;
}

namespace {

// depth-first enumeration of partial isomorphisms of one exact size, in
// canonical (lexicographic) order; pairs are added with strictly increasing
// left vertex
template <class Compat, class Fn>
void enum_exact(int nleft, const std::vector<std::vector<int>> * rclass,
                const std::function<int(int)> & left_color, Compat && compat, int size,
                MapKey & cur, int min_left, Fn && fn) {
    if (static_cast<int>(cur.size()) == size) {
        fn(const_cast<const MapKey &>(cur));
        return;
    }
    for (int u = min_left; u < nleft; ++u) {
        int c = left_color(u);
        if (c < 0 || c >= static_cast<int>(rclass->size())) continue;
        for (int w : (*rclass)[c]) {
            if (!compat(cur, u, w)) continue;
            cur.push_back({u, w});
            enum_exact(nleft, rclass, left_color, compat, size, cur, u + 1, fn);
            cur.pop_back();
        }
    }
}

} // namespace

void LisoSystem::collect_universe(long max_vars, std::vector<MapKey> & out) const {
    out.clear();
    auto compat = [&](const MapKey & cur, int u, int w) {
        for (auto [u2, w2] : cur) {
            if (w2 == w) return false;
            if (gc(u, u2) != hc(w, w2)) return false;
        }
        return true;
    };
    std::function<int(int)> lcolor = [&](int u) { return g_->color(u); };
    MapKey cur;
    for (int s = 0; s <= level_; ++s)
        enum_exact(g_->n(), &hclass_, lcolor, compat, s, cur, 0, [&](const MapKey & k) {
            require(static_cast<long>(out.size()) < max_vars, ErrorKind::budget,
                    "variable universe exceeds the budget of " + std::to_string(max_vars));
            out.push_back(k);
        });
}

void LisoSystem::run(EquationSink & sink) const {
    struct NoCands final : EquationSink::Candidates {
        void emit(EquationSink &) const override {}
    };
    struct RowCands final : EquationSink::Candidates {
        const LisoSystem * sys = nullptr;
        const MapKey * pi = nullptr;
        int w = -1;
        void emit(EquationSink & s) const override {
            int c = sys->h_->color(w);
            if (c >= static_cast<int>(sys->gclass_.size())) return;
            for (int v : sys->gclass_[c]) {
                bool ok = true;
                for (auto [u2, w2] : *pi) {
                    if (u2 == v || sys->gc(v, u2) != sys->hc(w, w2)) { ok = false; break; }
                }
                if (ok) s.ext(v);
            }
        }
    };
    struct ColCands final : EquationSink::Candidates {
        const LisoSystem * sys = nullptr;
        const MapKey * pi = nullptr;
        int v = -1;
        void emit(EquationSink & s) const override {
            int c = sys->g_->color(v);
            if (c >= static_cast<int>(sys->hclass_.size())) return;
            for (int w : sys->hclass_[c]) {
                bool ok = true;
                for (auto [u2, w2] : *pi) {
                    if (w2 == w || sys->gc(v, u2) != sys->hc(w, w2)) { ok = false; break; }
                }
                if (ok) s.ext(w);
            }
        }
    };

    NoCands none;
    MapKey empty;
    if (!sink.equation(0, empty, -1, none)) return;

    auto compat = [&](const MapKey & cur, int u, int w) {
        for (auto [u2, w2] : cur) {
            if (w2 == w) return false;
            if (gc(u, u2) != hc(w, w2)) return false;
        }
        return true;
    };
    std::function<int(int)> lcolor = [&](int u) { return g_->color(u); };

    bool stop = false;
    // pass 1: row sums, extension by a fixed right vertex
    for (int s = 0; s <= level_ - 1 && !stop; ++s) {
        MapKey cur;
        enum_exact(g_->n(), &hclass_, lcolor, compat, s, cur, 0, [&](const MapKey & pi) {
            if (stop) return;
            RowCands cands;
            cands.sys = this;
            cands.pi = &pi;
            for (int w = 0; w < h_->n() && !stop; ++w) {
                bool in_image = false;
                for (auto [u2, w2] : pi)
                    if (w2 == w) { in_image = true; break; }
                if (in_image) continue; // trivial [pi] = [pi]
                cands.w = w;
                if (!sink.equation(1, pi, w, cands)) stop = true;
            }
        });
    }
    // pass 2: column sums, extension by a fixed left vertex
    for (int s = 0; s <= level_ - 1 && !stop; ++s) {
        MapKey cur;
        enum_exact(g_->n(), &hclass_, lcolor, compat, s, cur, 0, [&](const MapKey & pi) {
            if (stop) return;
            ColCands cands;
            cands.sys = this;
            cands.pi = &pi;
            for (int v = 0; v < g_->n() && !stop; ++v) {
                bool in_domain = false;
                for (auto [u2, w2] : pi)
                    if (u2 == v) { in_domain = true; break; }
                if (in_domain) continue;
                cands.v = v;
                if (!sink.equation(2, pi, v, cands)) stop = true;
            }
        });
    }
}

// ---------------------------------------------------------------------------
// csp systems

LcspSystem::LcspSystem(ExplicitCsp csp, int level) : LinearSystem(level), csp_(std::move(csp)) {
    require(level >= 1, ErrorKind::precondition, "system level must be at least 1");
    watch_.assign(csp_.var_count(), {});
    for (std::size_t c = 0; c < csp_.constraints.size(); ++c)
        for (int x : csp_.constraints[c].scope) {
            require(x >= 0 && x < csp_.var_count(), ErrorKind::precondition,
                    "constraint scope out of range");
            watch_[x].push_back(static_cast<int>(c));
        }
}

namespace {

// value of variable x under a canonical key, -1 if unassigned
int key_value(const MapKey & psi, int x) {
    for (auto [xv, g] : psi)
        if (xv == x) return g;
    return -1;
}

} // namespace

bool LcspSystem::is_partial_solution(const MapKey & key) const {
    for (std::size_t i = 0; i < key.size(); ++i) {
        auto [x, g] = key[i];
        if (x < 0 || x >= csp_.var_count()) return false;
        if (!std::binary_search(csp_.domain.begin(), csp_.domain.end(), g)) return false;
        if (i + 1 < key.size() && key[i + 1].first == x) return false; // two values for x
    }
    for (const auto & con : csp_.constraints) {
        TupleSpace ts(csp_.group, static_cast<int>(con.scope.size()));
        std::vector<int> vals(con.scope.size());
        bool covered = true;
        for (std::size_t i = 0; i < con.scope.size(); ++i) {
            int v = key_value(key, con.scope[i]);
            if (v < 0) { covered = false; break; }
            vals[i] = v;
        }
        if (!covered) continue;
        if (!std::binary_search(con.tuples.begin(), con.tuples.end(), ts.encode(vals)))
            return false;
    }
    return true;
}

// extension of a partial solution psi by (x, gamma), x unassigned: checks
// only constraints that mention x and became fully covered
static bool extension_ok(const ExplicitCsp & csp, const std::vector<std::vector<int>> & watch,
                         const MapKey & psi, int x, int gamma) {
    for (int ci : watch[x]) {
        const auto & con = csp.constraints[ci];
        std::vector<int> vals(con.scope.size());
        bool covered = true;
        for (std::size_t i = 0; i < con.scope.size(); ++i) {
            int xv = con.scope[i];
            int v = (xv == x) ? gamma : key_value(psi, xv);
            if (v < 0) { covered = false; break; }
            vals[i] = v;
        }
        if (!covered) continue;
        TupleSpace ts(csp.group, static_cast<int>(con.scope.size()));
        if (!std::binary_search(con.tuples.begin(), con.tuples.end(), ts.encode(vals)))
            return false;
    }
    return true;
}

void LcspSystem::collect_universe(long max_vars, std::vector<MapKey> & out) const {
    out.clear();
    MapKey cur;
    // depth-first by exact size, pairs added with increasing variable id
    std::function<void(int, int)> rec = [&](int size, int min_var) {
        if (static_cast<int>(cur.size()) == size) {
            require(static_cast<long>(out.size()) < max_vars, ErrorKind::budget,
                    "variable universe exceeds the budget of " + std::to_string(max_vars));
            out.push_back(cur);
            return;
        }
        for (int x = min_var; x < csp_.var_count(); ++x)
            for (int g : csp_.domain) {
                if (!extension_ok(csp_, watch_, cur, x, g)) continue;
                cur.push_back({x, g});
                rec(size, x + 1);
                cur.pop_back();
            }
    };
    for (int s = 0; s <= level_; ++s) rec(s, 0);
}

void LcspSystem::run(EquationSink & sink) const {
    struct NoCands final : EquationSink::Candidates {
        void emit(EquationSink &) const override {}
    };
    struct ValueCands final : EquationSink::Candidates {
        const LcspSystem * sys = nullptr;
        const MapKey * psi = nullptr;
        int x = -1;
        void emit(EquationSink & s) const override {
            for (int g : sys->csp_.domain)
                if (extension_ok(sys->csp_, sys->watch_, *psi, x, g)) s.ext(g);
        }
    };

    NoCands none;
    MapKey empty;
    if (!sink.equation(0, empty, -1, none)) return;

    bool stop = false;
    MapKey cur;
    std::function<void(int, int, const std::function<void(const MapKey &)> &)> rec =
        [&](int size, int min_var, const std::function<void(const MapKey &)> & fn) {
            if (stop) return;
            if (static_cast<int>(cur.size()) == size) {
                fn(cur);
                return;
            }
            for (int x = min_var; x < csp_.var_count() && !stop; ++x)
                for (int g : csp_.domain) {
                    if (!extension_ok(csp_, watch_, cur, x, g)) continue;
                    cur.push_back({x, g});
                    rec(size, x + 1, fn);
                    cur.pop_back();
                    if (stop) break;
                }
        };

    for (int s = 0; s <= level_ - 1 && !stop; ++s)
        rec(s, 0, [&](const MapKey & psi) {
            ValueCands cands;
            cands.sys = this;
            cands.psi = &psi;
            for (int x = 0; x < csp_.var_count() && !stop; ++x) {
                if (key_value(psi, x) >= 0) continue; // trivial [psi] = [psi]
                cands.x = x;
                // kind 2: the composed pair is (x, gamma), variable first
                if (!sink.equation(2, psi, x, cands)) stop = true;
            }
        });
}

// ---------------------------------------------------------------------------
// exact integer solving (column Hermite reduction)

namespace {

using SparseCol = std::vector<std::pair<long, Int>>; // (row, value), row-sorted

const Int * col_entry(const SparseCol & c, long row) {
    auto it = std::lower_bound(c.begin(), c.end(), row,
                               [](const auto & a, long r) { return a.first < r; });
    if (it == c.end() || it->first != row) return nullptr;
    return &it->second;
}

// dst -= q * src
void col_axpy(SparseCol & dst, const Int & q, const SparseCol & src) {
    if (q == 0 || src.empty()) return;
    SparseCol out;
    out.reserve(dst.size() + src.size());
    std::size_t i = 0, j = 0;
    while (i < dst.size() || j < src.size()) {
        if (j == src.size() || (i < dst.size() && dst[i].first < src[j].first)) {
            out.push_back(std::move(dst[i++]));
        } else if (i == dst.size() || src[j].first < dst[i].first) {
            out.push_back({src[j].first, -q * src[j].second});
            ++j;
        } else {
            Int v = dst[i].second - q * src[j].second;
            if (v != 0) out.push_back({dst[i].first, std::move(v)});
            ++i;
            ++j;
        }
    }
    dst = std::move(out);
}

void col_negate(SparseCol & c) {
    for (auto & [r, v] : c) v = -v;
}

Int floor_div(const Int & a, const Int & b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

} // namespace

IntegerSolveResult solve_integer(const MaterializedSystem & sys) {
    const long n = sys.nvars;
    const long m = static_cast<long>(sys.rows.size());
    require(n <= 200000, ErrorKind::budget, "system too large for the exact solver");

    std::vector<SparseCol> A(n), H(n), U(n);
    for (long r = 0; r < m; ++r)
        for (auto [idx, c] : sys.rows[r].terms)
            if (c != 0) A[idx].push_back({r, Int(c)});
    H = A;
    for (long j = 0; j < n; ++j) U[j].push_back({j, Int(1)});

    std::vector<char> pivoted(n, 0);
    std::vector<std::pair<long, long>> pivots; // (row, column)

    std::vector<long> live;
    for (long r = 0; r < m; ++r) {
        live.clear();
        for (long j = 0; j < n; ++j)
            if (!pivoted[j] && col_entry(H[j], r)) live.push_back(j);
        if (live.empty()) continue;
        while (live.size() > 1) {
            std::size_t best = 0;
            Int bestabs = abs(*col_entry(H[live[0]], r));
            for (std::size_t t = 1; t < live.size(); ++t) {
                Int a = abs(*col_entry(H[live[t]], r));
                if (a < bestabs) { bestabs = a; best = t; }
            }
            long jm = live[best];
            const Int pm = *col_entry(H[jm], r);
            std::vector<long> next = {jm};
            for (long j : live) {
                if (j == jm) continue;
                Int q = floor_div(*col_entry(H[j], r), pm);
                col_axpy(H[j], q, H[jm]);
                col_axpy(U[j], q, U[jm]);
                if (col_entry(H[j], r)) next.push_back(j);
            }
            std::sort(next.begin(), next.end());
            live = std::move(next);
        }
        long jp = live[0];
        if (*col_entry(H[jp], r) < 0) { col_negate(H[jp]); col_negate(U[jp]); }
        const Int piv = *col_entry(H[jp], r);
        for (auto [pr, pj] : pivots) {
            (void)pr;
            const Int * e = col_entry(H[pj], r);
            if (!e) continue;
            Int q = floor_div(*e, piv);
            if (q != 0) {
                col_axpy(H[pj], q, H[jp]);
                col_axpy(U[pj], q, U[jp]);
            }
        }
        pivots.push_back({r, jp});
        pivoted[jp] = 1;
    }

    // recheck A * U = H column by column before trusting the reduction
    {
        std::vector<Int> dense(m, 0);
        for (long j = 0; j < n; ++j) {
            for (auto & [i, u] : U[j])
                for (auto & [r, a] : A[i]) dense[r] += u * a;
            std::size_t hi = 0;
            for (long r = 0; r < m; ++r) {
                const Int * expect = nullptr;
                if (hi < H[j].size() && H[j][hi].first == r) expect = &H[j][hi++].second;
                require(dense[r] == (expect ? *expect : Int(0)), ErrorKind::verification,
                        "A*U = H recheck failed");
                dense[r] = 0;
            }
        }
    }

    IntegerSolveResult res;
    std::vector<Int> b(m, 0), residual(m, 0);
    for (long r = 0; r < m; ++r) residual[r] = b[r] = Int(sys.rows[r].rhs);

    const long k = static_cast<long>(pivots.size());
    std::vector<Int> y(k, 0);
    long bad_pivot = -1;
    for (long t = 0; t < k && bad_pivot < 0; ++t) {
        auto [r, j] = pivots[t];
        const Int piv = *col_entry(H[j], r);
        if (residual[r] % piv != 0) {
            bad_pivot = t;
            break;
        }
        y[t] = residual[r] / piv;
        if (y[t] != 0)
            for (auto & [rr, v] : H[j]) residual[rr] -= y[t] * v;
    }

    // rational back-solve of w^T H_P = target over the first `upto` pivots
    auto solve_w = [&](long upto, const std::function<Rat(long)> & target) {
        std::vector<Rat> w(upto + 1, Rat(0));
        for (long bcol = upto; bcol >= 0; --bcol) {
            Rat acc = target(bcol);
            for (long a = bcol + 1; a <= upto; ++a) {
                const Int * e = col_entry(H[pivots[bcol].second], pivots[a].first);
                if (e) acc -= w[a] * Rat(*e);
            }
            w[bcol] = acc / Rat(*col_entry(H[pivots[bcol].second], pivots[bcol].first));
        }
        return w;
    };

    auto verify_certificate = [&](const std::vector<std::pair<long, Rat>> & u, const Rat & rhs,
                                  bool want_zero_rows) {
        std::map<long, Rat> colsum; // variable -> u^T A entry
        Rat bsum = 0;
        for (auto & [r, c] : u) {
            for (auto [idx, coef] : sys.rows[r].terms) colsum[idx] += c * Rat(coef);
            bsum += c * Rat(sys.rows[r].rhs);
        }
        for (auto & [idx, v] : colsum) {
            (void)idx;
            if (want_zero_rows)
                require(v == 0, ErrorKind::verification, "certificate row combination not in the kernel");
            else
                require(v.get_den() == 1, ErrorKind::verification,
                        "certificate row combination is not integral");
        }
        require(bsum == rhs && rhs.get_den() != 1, ErrorKind::verification,
                "certificate right-hand side is integral");
    };

    if (bad_pivot >= 0) {
        // rational solution exists on the pivot rows but is non-integral at
        // this pivot: u = e_t (H_P)^{-1} scattered to the pivot rows
        long t = bad_pivot;
        auto w = solve_w(t, [&](long b_) { return Rat(b_ == t ? 1 : 0); });
        res.certificate.clear();
        for (long a = 0; a <= t; ++a)
            if (w[a] != 0) res.certificate.push_back({pivots[a].first, w[a]});
        Rat rhs = 0;
        for (long a = 0; a <= t; ++a) rhs += w[a] * Rat(b[pivots[a].first]);
        res.certificate_rhs = rhs;
        verify_certificate(res.certificate, rhs, false);
        res.feasible = false;
        res.verified = true;
        return res;
    }

    long bad_row = -1;
    for (long r = 0; r < m; ++r)
        if (residual[r] != 0) { bad_row = r; break; }

    if (bad_row >= 0) {
        // rationally inconsistent: express row bad_row over the pivot rows,
        // the difference is in the left kernel with nonzero rhs
        auto w = solve_w(k - 1, [&](long b_) {
            const Int * e = col_entry(H[pivots[b_].second], bad_row);
            return e ? Rat(*e) : Rat(0);
        });
        Rat rho = Rat(b[bad_row]);
        for (long a = 0; a < k; ++a) rho -= w[a] * Rat(b[pivots[a].first]);
        require(rho != 0, ErrorKind::verification, "inconsistent row has zero residual");
        Rat scalef = Rat(1) / (2 * rho);
        std::map<long, Rat> u;
        u[bad_row] += scalef;
        for (long a = 0; a < k; ++a)
            if (w[a] != 0) u[pivots[a].first] -= scalef * w[a];
        res.certificate.assign(u.begin(), u.end());
        res.certificate_rhs = Rat(1, 2);
        verify_certificate(res.certificate, res.certificate_rhs, true);
        res.feasible = false;
        res.verified = true;
        return res;
    }

    res.solution.assign(n, Int(0));
    for (long t = 0; t < k; ++t) {
        if (y[t] == 0) continue;
        for (auto & [i, u] : U[pivots[t].second]) res.solution[i] += y[t] * u;
    }
    for (long r = 0; r < m; ++r) {
        Int acc = 0;
        for (auto [idx, c] : sys.rows[r].terms) acc += Int(c) * res.solution[idx];
        require(acc == b[r], ErrorKind::verification, "integral solution failed the recheck");
    }
    res.feasible = true;
    res.verified = true;
    return res;
}

// ---------------------------------------------------------------------------
// dense elimination mod p

namespace {

bool is_small_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

int inv_mod(int a, int p) {
    int r = 1;
    for (int e = p - 2; e > 0; e >>= 1) {
        if (e & 1) r = static_cast<int>(static_cast<long long>(r) * a % p);
        a = static_cast<int>(static_cast<long long>(a) * a % p);
    }
    return r;
}

ModpSolveResult solve_mod2(const MaterializedSystem & sys) {
    const long n = sys.nvars;
    const long m = static_cast<long>(sys.rows.size());
    const long width = n + m + 1; // A | I | b
    const long words = (width + 63) / 64;
    std::vector<std::vector<std::uint64_t>> row(m, std::vector<std::uint64_t>(words, 0));
    auto set_bit = [&](long r, long c) { row[r][c >> 6] ^= (1ull << (c & 63)); };
    auto get_bit = [&](long r, long c) { return (row[r][c >> 6] >> (c & 63)) & 1u; };
    for (long r = 0; r < m; ++r) {
        for (auto [idx, c] : sys.rows[r].terms)
            if (c & 1) set_bit(r, idx);
        set_bit(r, n + r);
        if (sys.rows[r].rhs & 1) set_bit(r, n + m);
    }

    ModpSolveResult res;
    res.p = 2;
    std::vector<long> pivcol;
    long cur = 0;
    for (long col = 0; col < n && cur < m; ++col) {
        long pr = -1;
        for (long r = cur; r < m; ++r)
            if (get_bit(r, col)) { pr = r; break; }
        if (pr < 0) continue;
        std::swap(row[cur], row[pr]);
        for (long r = cur + 1; r < m; ++r)
            if (get_bit(r, col))
                for (long wd = 0; wd < words; ++wd) row[r][wd] ^= row[cur][wd];
        pivcol.push_back(col);
        ++cur;
    }
    for (long r = cur; r < m; ++r) {
        if (!get_bit(r, n + m)) continue;
        // row r of the transform is a left-kernel combination with rhs 1
        for (long i = 0; i < m; ++i)
            if (get_bit(r, n + i)) res.certificate.push_back({i, 1});
        res.certificate_rhs = 1;
        // recheck from the original rows
        std::vector<int> acc(n, 0);
        int bacc = 0;
        for (auto [ri, c] : res.certificate) {
            (void)c;
            for (auto [idx, coef] : sys.rows[ri].terms) acc[idx] = (acc[idx] + coef) & 1;
            bacc = (bacc + static_cast<int>(sys.rows[ri].rhs)) & 1;
        }
        for (long i = 0; i < n; ++i)
            require(acc[i] == 0, ErrorKind::verification, "mod-2 certificate not in the kernel");
        require(bacc == 1, ErrorKind::verification, "mod-2 certificate has zero right-hand side");
        res.feasible = false;
        res.verified = true;
        return res;
    }
    res.solution.assign(n, 0);
    for (long t = cur - 1; t >= 0; --t) {
        long col = pivcol[t];
        int v = static_cast<int>(get_bit(t, n + m));
        for (long c = col + 1; c < n; ++c)
            if (get_bit(t, c) && res.solution[c]) v ^= 1;
        res.solution[col] = v;
    }
    for (long r = 0; r < m; ++r) {
        int acc = 0;
        for (auto [idx, c] : sys.rows[r].terms) acc = (acc + c * res.solution[idx]) & 1;
        require(acc == (sys.rows[r].rhs & 1), ErrorKind::verification,
                "mod-2 solution failed the recheck");
    }
    res.feasible = true;
    res.verified = true;
    return res;
}

} // namespace

ModpSolveResult solve_modp(const MaterializedSystem & sys, int p) {
    require(is_small_prime(p) && p <= 251, ErrorKind::unsupported,
            "modulus must be a prime at most 251");
    if (p == 2) return solve_mod2(sys);

    const long n = sys.nvars;
    const long m = static_cast<long>(sys.rows.size());
    const long width = n + m + 1;
    require(m * width <= 100 * 1000 * 1000, ErrorKind::budget,
            "system too large for the dense mod-p solver");
    auto norm = [&](long long v) { return static_cast<int>(((v % p) + p) % p); };

    std::vector<std::vector<std::uint8_t>> row(m, std::vector<std::uint8_t>(width, 0));
    for (long r = 0; r < m; ++r) {
        for (auto [idx, c] : sys.rows[r].terms) row[r][idx] = static_cast<std::uint8_t>(norm(c));
        row[r][n + r] = 1;
        row[r][n + m] = static_cast<std::uint8_t>(norm(sys.rows[r].rhs));
    }

    ModpSolveResult res;
    res.p = p;
    std::vector<long> pivcol;
    long cur = 0;
    for (long col = 0; col < n && cur < m; ++col) {
        long pr = -1;
        for (long r = cur; r < m; ++r)
            if (row[r][col]) { pr = r; break; }
        if (pr < 0) continue;
        std::swap(row[cur], row[pr]);
        int inv = inv_mod(row[cur][col], p);
        if (inv != 1)
            for (long c = 0; c < width; ++c)
                row[cur][c] = static_cast<std::uint8_t>(row[cur][c] * inv % p);
        for (long r = cur + 1; r < m; ++r) {
            int f = row[r][col];
            if (!f) continue;
            int fp = p - f;
            for (long c = 0; c < width; ++c)
                row[r][c] = static_cast<std::uint8_t>((row[r][c] + fp * row[cur][c]) % p);
        }
        pivcol.push_back(col);
        ++cur;
    }
    for (long r = cur; r < m; ++r) {
        if (!row[r][n + m]) continue;
        for (long i = 0; i < m; ++i)
            if (row[r][n + i]) res.certificate.push_back({i, row[r][n + i]});
        res.certificate_rhs = row[r][n + m];
        std::vector<int> acc(n, 0);
        int bacc = 0;
        for (auto [ri, c] : res.certificate) {
            for (auto [idx, coef] : sys.rows[ri].terms) acc[idx] = norm(acc[idx] + c * coef);
            bacc = norm(bacc + c * sys.rows[ri].rhs);
        }
        for (long i = 0; i < n; ++i)
            require(acc[i] == 0, ErrorKind::verification, "mod-p certificate not in the kernel");
        require(bacc == res.certificate_rhs && bacc != 0, ErrorKind::verification,
                "mod-p certificate has zero right-hand side");
        res.feasible = false;
        res.verified = true;
        return res;
    }
    res.solution.assign(n, 0);
    for (long t = cur - 1; t >= 0; --t) {
        long col = pivcol[t];
        long long v = row[t][n + m];
        for (long c = col + 1; c < n; ++c)
            if (row[t][c] && res.solution[c]) v -= static_cast<long long>(row[t][c]) * res.solution[c];
        res.solution[col] = norm(v);
    }
    for (long r = 0; r < m; ++r) {
        long long acc = 0;
        for (auto [idx, c] : sys.rows[r].terms) acc += static_cast<long long>(c) * res.solution[idx];
        require(norm(acc) == norm(sys.rows[r].rhs), ErrorKind::verification,
                "mod-p solution failed the recheck");
    }
    res.feasible = true;
    res.verified = true;
    return res;
}

// ---------------------------------------------------------------------------

bool feasible_01(const MaterializedSystem & sys) {
    const long n = sys.nvars;
    const long m = static_cast<long>(sys.rows.size());
    require(n <= 60, ErrorKind::budget, "exhaustive {0,1} check limited to 60 variables");

    std::vector<std::vector<std::pair<long, long>>> byvar(n); // variable -> (row, coef)
    std::vector<long> cursum(m, 0), rem_lo(m, 0), rem_hi(m, 0);
    for (long r = 0; r < m; ++r)
        for (auto [idx, c] : sys.rows[r].terms) {
            byvar[idx].push_back({r, c});
            if (c > 0) rem_hi[r] += c;
            else rem_lo[r] += c;
        }

    long long nodes = 0;
    std::function<bool(long)> rec = [&](long i) -> bool {
        if (++nodes > 10'000'000) throw Error(ErrorKind::budget, "exhaustive {0,1} search budget exceeded");
        if (i == n) {
            for (long r = 0; r < m; ++r)
                if (cursum[r] != sys.rows[r].rhs) return false;
            return true;
        }
        for (int val = 0; val <= 1; ++val) {
            bool ok = true;
            for (auto [r, c] : byvar[i]) {
                cursum[r] += val * c;
                if (c > 0) rem_hi[r] -= c;
                else rem_lo[r] -= c;
            }
            for (auto [r, c] : byvar[i]) {
                (void)c;
                if (cursum[r] + rem_lo[r] > sys.rows[r].rhs || cursum[r] + rem_hi[r] < sys.rows[r].rhs) {
                    ok = false;
                    break;
                }
            }
            if (ok && rec(i + 1)) return true;
            for (auto [r, c] : byvar[i]) {
                cursum[r] -= val * c;
                if (c > 0) rem_hi[r] += c;
                else rem_lo[r] += c;
            }
        }
        return false;
    };
    return rec(0);
}

// ---------------------------------------------------------------------------
// two-prime combination

namespace {

bool all_integral(const std::map<MapKey, Rat> & x) {
    for (auto & [k, v] : x) {
        (void)k;
        if (v.get_den() != 1) return false;
    }
    return true;
}

} // namespace

std::map<MapKey, Rat> combine_pq(const std::map<MapKey, Rat> & x, int p,
                                 const std::map<MapKey, Rat> & y, int q,
                                 CombineReport * report) {
    require(p >= 2 && q >= 2, ErrorKind::precondition, "moduli must be at least 2");
    require(std::gcd(p, q) == 1, ErrorKind::domain, "combination requires coprime moduli");
    for (auto & [k, v] : x)
        require(is_p_power_value(v, p), ErrorKind::precondition,
                "first input is not p-power valued at " + key_to_string(k));
    for (auto & [k, v] : y)
        require(is_p_power_value(v, q), ErrorKind::precondition,
                "second input is not q-power valued at " + key_to_string(k));

    CombineReport rep;
    rep.p = p;
    rep.q = q;
    if (all_integral(x)) {
        rep.z = 0;
        rep.alpha = 1;
        rep.beta = 0;
        if (report) *report = rep;
        return x;
    }
    if (all_integral(y)) {
        rep.z = 0;
        rep.alpha = 0;
        rep.beta = 1;
        if (report) *report = rep;
        return y;
    }

    long z = 1;
    for (auto & [k, v] : x) {
        (void)k;
        z = std::max(z, denominator_exponent(v, p));
    }
    for (auto & [k, v] : y) {
        (void)k;
        z = std::max(z, denominator_exponent(v, q));
    }
    Int pz = int_pow(Int(p), static_cast<unsigned long>(z));
    Int qz = int_pow(Int(q), static_cast<unsigned long>(z));
    Int s, t;
    Int g = ext_gcd(pz, qz, s, t);
    require(g == 1, ErrorKind::domain, "moduli powers are not coprime");
    rep.z = z;
    rep.alpha = s;
    rep.beta = t;

    Rat ca = Rat(s * pz), cb = Rat(t * qz);
    std::map<MapKey, Rat> out;
    for (auto & [k, v] : x) out[k] += ca * v;
    for (auto & [k, v] : y) out[k] += cb * v;
    for (auto it = out.begin(); it != out.end();) {
        require(it->second.get_den() == 1, ErrorKind::verification,
                "combined value is not integral at " + key_to_string(it->first));
        if (it->second == 0) it = out.erase(it);
        else ++it;
    }
    if (report) *report = rep;
    return out;
}

namespace {

class CombinedValuation final : public Valuation {
public:
    CombinedValuation(std::shared_ptr<const Valuation> x, std::shared_ptr<const Valuation> y,
                      const Int & ca, const Int & cb)
        : x_(std::move(x)), y_(std::move(y)), ca_(ca), cb_(cb) {
        rca_ = Rat(ca);
        rcb_ = Rat(cb);
        scaled_ok_ = x_->has_scaled() && y_->has_scaled() && x_->scale() == y_->scale() &&
                     ca_.fits_slong_p() && cb_.fits_slong_p();
        if (scaled_ok_) {
            lca_ = ca_.get_si();
            lcb_ = cb_.get_si();
        }
        hints_ = x_->has_support_hints() && y_->has_support_hints();
    }

    Rat value(const MapKey & key) const override {
        return rca_ * x_->value(key) + rcb_ * y_->value(key);
    }

    bool has_scaled() const override { return scaled_ok_; }
    long scale() const override { return x_->scale(); }
    long scaled(const MapKey & key) const override {
        return lca_ * x_->scaled(key) + lcb_ * y_->scaled(key);
    }

    bool has_support_hints() const override { return hints_; }
    void extension_support(const MapKey & pi, int fixed, int side,
                           std::vector<int> & out) const override {
        x_->extension_support(pi, fixed, side, out);
        buf_.clear();
        y_->extension_support(pi, fixed, side, buf_);
        out.insert(out.end(), buf_.begin(), buf_.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }

    void extension_begin(const MapKey & pi, int fixed, int side) const override {
        x_->extension_begin(pi, fixed, side);
        y_->extension_begin(pi, fixed, side);
    }
    long scaled_extension(int v) const override {
        return lca_ * x_->scaled_extension(v) + lcb_ * y_->scaled_extension(v);
    }

    int denominator_exponent_bound() const override { return 0; }

private:
    std::shared_ptr<const Valuation> x_, y_;
    Int ca_, cb_;
    Rat rca_, rcb_;
    long lca_ = 0, lcb_ = 0;
    bool scaled_ok_ = false, hints_ = false;
    mutable std::vector<int> buf_;
};

} // namespace

std::shared_ptr<const Valuation> combine_pq(std::shared_ptr<const Valuation> x, int p,
                                            std::shared_ptr<const Valuation> y, int q,
                                            CombineReport * report) {
    require(x && y, ErrorKind::precondition, "null valuation");
    require(p >= 2 && q >= 2, ErrorKind::precondition, "moduli must be at least 2");
    require(std::gcd(p, q) == 1, ErrorKind::domain, "combination requires coprime moduli");
    int bx = x->denominator_exponent_bound();
    int by = y->denominator_exponent_bound();
    require(bx >= 0 && by >= 0, ErrorKind::precondition,
            "oracle combination needs declared denominator bounds");

    CombineReport rep;
    rep.p = p;
    rep.q = q;
    if (bx == 0) {
        rep.z = 0;
        rep.alpha = 1;
        rep.beta = 0;
        if (report) *report = rep;
        return x;
    }
    if (by == 0) {
        rep.z = 0;
        rep.alpha = 0;
        rep.beta = 1;
        if (report) *report = rep;
        return y;
    }
    long z = std::max({1, bx, by});
    Int pz = int_pow(Int(p), static_cast<unsigned long>(z));
    Int qz = int_pow(Int(q), static_cast<unsigned long>(z));
    Int s, t;
    Int g = ext_gcd(pz, qz, s, t);
    require(g == 1, ErrorKind::domain, "moduli powers are not coprime");
    rep.z = z;
    rep.alpha = s;
    rep.beta = t;
    if (report) *report = rep;
    return std::make_shared<CombinedValuation>(std::move(x), std::move(y), s * pz, t * qz);
}

} // namespace cfikit
