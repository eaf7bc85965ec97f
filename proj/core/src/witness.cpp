#include <cfikit/witness.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <string>

namespace cfikit {

namespace {

constexpr long kScaledCap = 1L << 40;      // headroom for equation sums in long
constexpr long kDigitTableBudget = 2'000'000;

} // namespace

// ---------------------------------------------------------------- PsiOracle

PsiOracle::PsiOracle(const TseitinCsp & t, int level)
    : group_(t.csp.group), h_(t.h), sigma_(t.sigma), level_(level), m_(h_.m()), n_(h_.n()),
      order_(group_.order()), in_delta_(static_cast<std::size_t>(order_), 1), dsize_(order_),
      tables_(h_, robust_k(h_.n())) {
    finish_setup();
}

PsiOracle::PsiOracle(const TseitinCsp & t, int level, const Subgroup & delta)
    : group_(t.csp.group), h_(t.h), sigma_(t.sigma), level_(level), m_(h_.m()), n_(h_.n()),
      order_(group_.order()), in_delta_(static_cast<std::size_t>(order_), 0),
      dsize_(delta.size()), tables_(h_, robust_k(h_.n())) {
    require(delta.group() == group_ && delta.arity() == 1, ErrorKind::precondition,
            "subgroup must live in the instance group");
    for (long c : delta.elements()) in_delta_[static_cast<std::size_t>(c)] = 1;
    finish_setup();
    require(dsize_ == 1 || dprime_ != 0, ErrorKind::precondition,
            "subgroup order must be a prime power");
}

void PsiOracle::finish_setup() {
    require(level_ >= 0, ErrorKind::precondition, "level must be nonnegative");
    require(is_connected(h_.skeleton()), ErrorKind::precondition,
            "flow instance must be connected");
    require(static_cast<int>(sigma_.value.size()) == n_, ErrorKind::precondition,
            "charge must cover every vertex");
    for (int v = 0; v < n_; ++v) {
        int c = sigma_.value[static_cast<std::size_t>(v)];
        require(c >= 0 && c < order_, ErrorKind::domain, "charge value out of range");
        require(in_delta_[static_cast<std::size_t>(c)] != 0, ErrorKind::precondition,
                "charge escapes the subgroup");
    }
    rank_full_ = tables_.rank_of(m_ > 0 ? (EdgeMask{1} << m_) - 1 : 0);

    if (dsize_ > 1) {
        long x = dsize_;
        int p = 2;
        while (x % p != 0) ++p;
        dexp_ = 0;
        while (x % p == 0) {
            x /= p;
            ++dexp_;
        }
        if (x == 1) dprime_ = p;
        else { dprime_ = 0; dexp_ = 0; }
    }
    dbound_ = dsize_ == 1 ? 0 : (dprime_ != 0 ? dexp_ * rank_full_ : -1);

    dpow_.assign(static_cast<std::size_t>(rank_full_) + 1, 1);
    for (int r = 1; r <= rank_full_; ++r) dpow_[r] = dpow_[r - 1] * dsize_;

    has_scaled_ = true;
    scale_ = 1;
    for (int r = 0; r < rank_full_; ++r) {
        if (scale_ > kScaledCap / order_) {
            has_scaled_ = false;
            break;
        }
        scale_ *= order_;
    }
    if (has_scaled_) {
        svals_.assign(static_cast<std::size_t>(rank_full_) + 1, 0);
        for (int r = 0; r <= rank_full_; ++r) svals_[r] = scale_ / dpow_[r];
    } else {
        scale_ = 1;
    }
}

long PsiOracle::parse(const MapKey & key, int * vals) const {
    EdgeMask dom = 0;
    for (auto [e, g] : key) {
        if (e < 0 || e >= m_ || g < 0 || g >= order_) return -1;
        if (!in_delta_[static_cast<std::size_t>(g)]) return -1;
        EdgeMask bit = EdgeMask{1} << e;
        if (dom & bit) {
            if (vals[e] != g) return -1;
            continue;
        }
        dom |= bit;
        vals[e] = g;
    }
    return static_cast<long>(dom);
}

bool PsiOracle::balanced(EdgeMask dom, const int * vals) const {
    for (const auto & sc : tables_.small_components(dom)) {
        int lhs = FiniteAbelianGroup::zero();
        for (auto [e, s] : sc.boundary)
            lhs = s > 0 ? group_.add(lhs, vals[e]) : group_.sub(lhs, vals[e]);
        int rhs = FiniteAbelianGroup::zero();
        for (std::uint64_t wm = sc.vertices; wm; wm &= wm - 1)
            rhs = group_.add(rhs, sigma_.value[static_cast<std::size_t>(std::countr_zero(wm))]);
        if (lhs != rhs) return false;
    }
    return true;
}

Rat PsiOracle::value(const MapKey & key) const {
    require(static_cast<int>(key.size()) <= level_, ErrorKind::query,
            "key exceeds the oracle level");
    int vals[64];
    long dom = parse(key, vals);
    if (dom < 0 || !balanced(static_cast<EdgeMask>(dom), vals)) return Rat(0);
    return rat_pow(dsize_, -static_cast<long>(tables_.rank_of(static_cast<EdgeMask>(dom))));
}

long PsiOracle::scaled(const MapKey & key) const {
    require(has_scaled_, ErrorKind::unsupported, "no scaled form for this instance");
    require(static_cast<int>(key.size()) <= level_, ErrorKind::query,
            "key exceeds the oracle level");
    int vals[64];
    long dom = parse(key, vals);
    if (dom < 0 || !balanced(static_cast<EdgeMask>(dom), vals)) return 0;
    return svals_[static_cast<std::size_t>(tables_.rank_of(static_cast<EdgeMask>(dom)))];
}

long PsiOracle::scaled_digits(const std::uint8_t * digit) const {
    EdgeMask dom = 0;
    int vals[64];
    for (int e = 0; e < m_; ++e) {
        int d = digit[e];
        if (d >= order_) {
            if (d == order_) continue; // unassigned
            return 0;
        }
        if (!in_delta_[static_cast<std::size_t>(d)]) return 0;
        dom |= EdgeMask{1} << e;
        vals[e] = d;
    }
    if (!balanced(dom, vals)) return 0;
    return svals_[static_cast<std::size_t>(tables_.rank_of(dom))];
}

PsiOracle psi(const TseitinCsp & t, int level) { return PsiOracle(t, level); }

PsiOracle psi_subgroup(const TseitinCsp & t, const Subgroup & delta, int level) {
    return PsiOracle(t, level, delta);
}

// -------------------------------------------------------- ExtendedPsiOracle

namespace {

SigmaCharge point_charge(const ExtendedTseitin & c, int iota) {
    const FiniteAbelianGroup & g = c.csp.base.group;
    require(iota >= 0 && iota < g.order(), ErrorKind::domain, "charge code out of range");
    require(c.vstar >= 0 && c.vstar < c.h.n(), ErrorKind::precondition,
            "absorbing vertex out of range");
    SigmaCharge s;
    s.value.assign(static_cast<std::size_t>(c.h.n()), FiniteAbelianGroup::zero());
    s.value[static_cast<std::size_t>(c.vstar)] = iota;
    return s;
}

} // namespace

ExtendedPsiOracle::ExtendedPsiOracle(const ExtendedTseitin & c, int iota_code, int level)
    : level_(level), xstar_(c.xstar), iota_(iota_code),
      inner_(tseitin(c.h, c.csp.base.group, point_charge(c, iota_code)), level,
             Subgroup::span(c.csp.base.group, 1, {static_cast<long>(iota_code)})) {
    require(c.csp.arb_scope.size() == 1 && c.csp.arb_scope[0] == c.xstar, ErrorKind::precondition,
            "extended instance must pin exactly the absorbed variable");
    require(std::binary_search(c.csp.arb_tuples.begin(), c.csp.arb_tuples.end(),
                               static_cast<long>(iota_code)),
            ErrorKind::precondition, "charge is not one of the allowed fixings");
    require(xstar_ == c.h.m(), ErrorKind::precondition,
            "absorbed variable must follow the edge variables");
}

bool ExtendedPsiOracle::strip(const MapKey & key, MapKey & out) const {
    out.clear();
    out.reserve(key.size());
    for (auto [x, g] : key) {
        if (x == xstar_) {
            if (g != iota_) return false;
            continue;
        }
        if (x < 0 || x > xstar_) return false;
        out.emplace_back(x, g);
    }
    return true;
}

Rat ExtendedPsiOracle::value(const MapKey & key) const {
    require(static_cast<int>(key.size()) <= level_, ErrorKind::query,
            "key exceeds the oracle level");
    MapKey stripped;
    if (!strip(key, stripped)) return Rat(0);
    return inner_.value(stripped);
}

long ExtendedPsiOracle::scaled(const MapKey & key) const {
    require(static_cast<int>(key.size()) <= level_, ErrorKind::query,
            "key exceeds the oracle level");
    MapKey stripped;
    if (!strip(key, stripped)) return 0;
    return inner_.scaled(stripped);
}

long ExtendedPsiOracle::scaled_digits(const std::uint8_t * digit) const {
    const int d = digit[xstar_];
    if (d != inner_.group().order() && d != iota_) return 0;
    return inner_.scaled_digits(digit);
}

// ------------------------------------------------------ TransposedValuation

TransposedValuation::TransposedValuation(std::shared_ptr<const Valuation> inner)
    : inner_(std::move(inner)) {
    require(inner_ != nullptr, ErrorKind::precondition, "null valuation");
}

MapKey TransposedValuation::flip(const MapKey & key) {
    MapKey out(key.size());
    for (std::size_t i = 0; i < key.size(); ++i) out[i] = {key[i].second, key[i].first};
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------- LiftedIsoOracle

LiftedIsoOracle::LiftedIsoOracle(std::shared_ptr<const Valuation> phi, int phi_level,
                                 const GraphPair & pair, int level)
    : phi_(std::move(phi)), cfi_(pair.cfi), phi_level_(phi_level), level_(level) {
    require(phi_ != nullptr, ErrorKind::precondition, "null source oracle");
    require(cfi_ != nullptr, ErrorKind::precondition, "pair carries no gadget layout");
    require(level_ >= 0, ErrorKind::precondition, "level must be nonnegative");

    grp_ = &cfi_->left.csp.group;
    order_ = grp_->order();
    nvars_ = cfi_->left.csp.var_count();
    ln_ = static_cast<int>(cfi_->left.vinfo.size());
    rn_ = static_cast<int>(cfi_->right.vinfo.size());

    const auto & lcons = cfi_->left.csp.constraints;
    const auto & rcons = cfi_->right.csp.constraints;
    require(rcons.size() == lcons.size() && cfi_->right.csp.var_count() == nvars_ &&
                cfi_->right.csp.group == *grp_,
            ErrorKind::precondition, "pair sides disagree on the csp shape");
    max_arity_ = 1;
    for (std::size_t j = 0; j < lcons.size(); ++j) {
        require(rcons[j].scope == lcons[j].scope, ErrorKind::precondition,
                "pair sides disagree on the csp shape");
        max_arity_ = std::max(max_arity_, static_cast<int>(lcons[j].scope.size()));
    }
    require(max_arity_ <= 16, ErrorKind::budget, "constraint arity cap is 16");
    require(phi_level_ >= max_arity_ * level_, ErrorKind::precondition,
            "source oracle level too low for this lift");

    for (int sdx = 0; sdx < 2; ++sdx) {
        const CfiLayout & lay = sdx == 0 ? cfi_->left : cfi_->right;
        SideEntries & se = ent_[sdx];
        const int n = static_cast<int>(lay.vinfo.size());
        se.off.reserve(static_cast<std::size_t>(n) + 1);
        se.off.push_back(0);
        for (int v = 0; v < n; ++v) {
            const auto & vi = lay.vinfo[static_cast<std::size_t>(v)];
            if (vi.kind == 0) {
                se.var.push_back(vi.owner);
                se.code.push_back(static_cast<std::uint8_t>(vi.code));
            } else {
                const auto & scope = lay.csp.constraints[static_cast<std::size_t>(vi.owner)].scope;
                TupleSpace ts(lay.csp.group, static_cast<int>(scope.size()));
                for (std::size_t i = 0; i < scope.size(); ++i) {
                    se.var.push_back(scope[i]);
                    se.code.push_back(static_cast<std::uint8_t>(ts.get(vi.code, static_cast<int>(i))));
                }
            }
            se.off.push_back(static_cast<int>(se.var.size()));
        }
    }

    digit_ = dynamic_cast<const DigitEvaluable *>(phi_.get());
    if (digit_)
        require(digit_->digit_count() == nvars_ && digit_->digit_radix() == order_ + 1,
                ErrorKind::precondition, "digit view disagrees with the csp shape");

    has_scaled_ = phi_->has_scaled();
    phi_scale_ = has_scaled_ ? phi_->scale() : 1;

    if (digit_) {
        const int radix = order_ + 1;
        pow_.assign(static_cast<std::size_t>(nvars_) + 1, 0);
        pow_[0] = 1;
        bool fits = has_scaled_ && phi_scale_ <= INT32_MAX;
        for (int i = 1; i <= nvars_ && fits; ++i) {
            if (pow_[i - 1] > kDigitTableBudget / radix) {
                fits = false;
                break;
            }
            pow_[i] = pow_[i - 1] * radix;
        }
        if (fits) {
            const long entries = pow_[static_cast<std::size_t>(nvars_)];
            empty_idx_ = entries - 1; // all digits at order_, the top of every radix slot
            table_.assign(static_cast<std::size_t>(entries), 0);
            std::vector<std::uint8_t> dig(static_cast<std::size_t>(nvars_), 0);
            for (long idx = 0; idx < entries; ++idx) {
                table_[static_cast<std::size_t>(idx)] =
                    static_cast<std::int32_t>(digit_->scaled_digits(dig.data()));
                for (int i = 0; i < nvars_; ++i) {
                    if (static_cast<int>(++dig[static_cast<std::size_t>(i)]) <= order_) break;
                    dig[static_cast<std::size_t>(i)] = 0;
                }
            }
        }
        edig_.assign(static_cast<std::size_t>(nvars_), static_cast<std::uint8_t>(order_));
    }
}

bool LiftedIsoOracle::pair_entries(int u, int w, std::pair<int, int> * out, int * cnt) const {
    if (u < 0 || u >= ln_ || w < 0 || w >= rn_) return false;
    const auto & li = cfi_->left.vinfo[static_cast<std::size_t>(u)];
    const auto & ri = cfi_->right.vinfo[static_cast<std::size_t>(w)];
    if (li.kind != ri.kind || li.owner != ri.owner) return false;
    const int lo = ent_[0].off[static_cast<std::size_t>(u)];
    const int n = ent_[0].off[static_cast<std::size_t>(u) + 1] - lo;
    const int ro = ent_[1].off[static_cast<std::size_t>(w)];
    // same owner, same scope, so the flattened counts agree
    for (int i = 0; i < n; ++i)
        out[i] = {ent_[0].var[static_cast<std::size_t>(lo + i)],
                  grp_->sub(ent_[0].code[static_cast<std::size_t>(lo + i)],
                            ent_[1].code[static_cast<std::size_t>(ro + i)])};
    *cnt = n;
    return true;
}

bool LiftedIsoOracle::psi_key(const MapKey & pi, MapKey & out) const {
    out.clear();
    std::pair<int, int> buf[16];
    for (auto [u, w] : pi) {
        int cnt = 0;
        if (!pair_entries(u, w, buf, &cnt)) return false;
        out.insert(out.end(), buf, buf + cnt);
    }
    std::sort(out.begin(), out.end());
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].first == out[i - 1].first && out[i].second != out[i - 1].second) return false;
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return true;
}

Rat LiftedIsoOracle::value(const MapKey & key) const {
    MapKey k;
    if (!psi_key(key, k)) return Rat(0);
    return phi_->value(k);
}

long LiftedIsoOracle::scaled(const MapKey & key) const {
    require(has_scaled_, ErrorKind::unsupported, "no scaled form for this oracle");
    MapKey k;
    if (!psi_key(key, k)) return 0;
    return phi_->scaled(k);
}

void LiftedIsoOracle::extension_support(const MapKey &, int fixed, int side,
                                        std::vector<int> & out) const {
    out.clear();
    const CfiLayout & flay = side == 0 ? cfi_->right : cfi_->left;
    const CfiLayout & clay = side == 0 ? cfi_->left : cfi_->right;
    const int fn = side == 0 ? rn_ : ln_;
    if (fixed < 0 || fixed >= fn) return;
    const auto & vi = flay.vinfo[static_cast<std::size_t>(fixed)];
    int base, cnt;
    if (vi.kind == 0) {
        base = clay.var_base[static_cast<std::size_t>(vi.owner)];
        cnt = order_;
    } else {
        base = clay.con_base[static_cast<std::size_t>(vi.owner)];
        cnt = static_cast<int>(clay.con_tuples[static_cast<std::size_t>(vi.owner)].size());
    }
    out.reserve(static_cast<std::size_t>(cnt));
    for (int i = 0; i < cnt; ++i) out.push_back(base + i);
}

void LiftedIsoOracle::extension_begin(const MapKey & pi, int fixed, int side) const {
    ext_fall_ = digit_ == nullptr || !has_scaled_;
    if (ext_fall_) {
        Valuation::extension_begin(pi, fixed, side);
        return;
    }
    ext_side_v_ = side;
    ext_fixed_v_ = fixed;
    ext_dead_ = false;
    std::fill(edig_.begin(), edig_.end(), static_cast<std::uint8_t>(order_));
    eidx_ = empty_idx_;
    std::pair<int, int> buf[16];
    for (auto [u, w] : pi) {
        int cnt = 0;
        if (!pair_entries(u, w, buf, &cnt)) {
            ext_dead_ = true;
            return;
        }
        for (int i = 0; i < cnt; ++i) {
            const int x = buf[i].first, d = buf[i].second;
            const std::uint8_t cur = edig_[static_cast<std::size_t>(x)];
            if (cur == order_) {
                edig_[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(d);
                if (!table_.empty()) eidx_ += static_cast<long>(d - order_) * pow_[static_cast<std::size_t>(x)];
            } else if (cur != static_cast<std::uint8_t>(d)) {
                ext_dead_ = true;
                return;
            }
        }
    }
}

long LiftedIsoOracle::scaled_extension(int v) const {
    if (ext_fall_) return Valuation::scaled_extension(v);
    if (ext_dead_) return 0;
    const int u = ext_side_v_ == 0 ? v : ext_fixed_v_;
    const int w = ext_side_v_ == 0 ? ext_fixed_v_ : v;
    std::pair<int, int> buf[16];
    int cnt = 0;
    if (!pair_entries(u, w, buf, &cnt)) return 0;
    std::pair<int, std::uint8_t> undo[16];
    int un = 0;
    long idx = eidx_;
    bool ok = true;
    for (int i = 0; i < cnt; ++i) {
        const int x = buf[i].first, d = buf[i].second;
        const std::uint8_t cur = edig_[static_cast<std::size_t>(x)];
        if (cur == order_) {
            undo[un++] = {x, cur};
            edig_[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(d);
            if (!table_.empty()) idx += static_cast<long>(d - order_) * pow_[static_cast<std::size_t>(x)];
        } else if (cur != static_cast<std::uint8_t>(d)) {
            ok = false;
            break;
        }
    }
    long r = 0;
    if (ok) r = table_.empty() ? digit_->scaled_digits(edig_.data())
                               : table_[static_cast<std::size_t>(idx)];
    while (un > 0) {
        --un;
        edig_[static_cast<std::size_t>(undo[un].first)] = undo[un].second;
    }
    return r;
}

std::shared_ptr<const LiftedIsoOracle> lift_csp_to_iso(std::shared_ptr<const Valuation> phi,
                                                       int phi_level, const GraphPair & pair,
                                                       int level) {
    return std::make_shared<LiftedIsoOracle>(std::move(phi), phi_level, pair, level);
}

// ----------------------------------------------------------- LiftedOrOracle

LiftedOrOracle::LiftedOrOracle(const GraphPair & orpair, int position,
                               std::shared_ptr<const Valuation> phi, int level)
    : orp_(orpair.orp), phi_(std::move(phi)), gamma_(position), level_(level) {
    require(orp_ != nullptr, ErrorKind::precondition, "pair carries no disjunction layout");
    require(phi_ != nullptr, ErrorKind::precondition, "null source oracle");
    require(level_ >= 0, ErrorKind::precondition, "level must be nonnegative");
    width_ = static_cast<int>(orp_->inputs.size());
    require(gamma_ >= 0 && gamma_ < width_, ErrorKind::precondition, "no such input position");
    require(orp_->inputs[static_cast<std::size_t>(gamma_)].cfi != nullptr, ErrorKind::precondition,
            "distinguished input carries no gadget layout");
    npairs_ = static_cast<int>(orp_->side[0].size());
    require(static_cast<int>(orp_->side[1].size()) == npairs_ && npairs_ >= 1,
            ErrorKind::precondition, "disjunction sides disagree");

    std::vector<int> by_mask[2];
    for (int s = 0; s < 2; ++s) {
        by_mask[s].assign(std::size_t{1} << width_, -1);
        for (int ci = 0; ci < npairs_; ++ci) {
            const auto & sel = orp_->side[s][static_cast<std::size_t>(ci)].selection;
            unsigned mask = 0;
            for (int i = 0; i < width_; ++i) mask |= static_cast<unsigned>(sel[i] & 1) << i;
            by_mask[s][mask] = ci;
        }
    }
    for (int s = 0; s < 2; ++s) {
        match_[s].assign(static_cast<std::size_t>(npairs_), -1);
        for (int ci = 0; ci < npairs_; ++ci) {
            const auto & sel = orp_->side[s][static_cast<std::size_t>(ci)].selection;
            unsigned mask = 0;
            for (int i = 0; i < width_; ++i) mask |= static_cast<unsigned>(sel[i] & 1) << i;
            match_[s][ci] = by_mask[1 - s][mask ^ (1u << gamma_)];
            require(match_[s][ci] >= 0, ErrorKind::precondition, "unmatched component");
        }
    }

    const CfiPairLayout & il = *orp_->inputs[static_cast<std::size_t>(gamma_)].cfi;
    go_ = il.left.csp.group.order();
    gl_ = static_cast<int>(il.left.vinfo.size());
    gr_ = static_cast<int>(il.right.vinfo.size());

    require(phi_->value(MapKey{}) == 1, ErrorKind::precondition,
            "source oracle must send the empty key to 1");

    has_scaled_ = phi_->has_scaled();
    phi_scale_ = has_scaled_ ? phi_->scale() : 1;
    if (has_scaled_) {
        scale_ = 1;
        for (int i = 0; i < npairs_; ++i) {
            if (scale_ > kScaledCap / phi_scale_) {
                has_scaled_ = false;
                break;
            }
            scale_ *= phi_scale_;
        }
    }
    if (has_scaled_) {
        pad_.assign(static_cast<std::size_t>(npairs_) + 1, 1);
        for (int i = 1; i <= npairs_; ++i) pad_[i] = pad_[i - 1] * phi_scale_;
        spf_.assign(static_cast<std::size_t>(gl_) * static_cast<std::size_t>(gr_), 0);
        MapKey k{{0, 0}};
        for (int lu = 0; lu < gl_; ++lu)
            for (int rw = 0; rw < gr_; ++rw) {
                k[0] = {lu, rw};
                spf_[static_cast<std::size_t>(lu) * gr_ + rw] = phi_->scaled(k);
            }
    } else {
        scale_ = 1;
    }
    const int b = phi_->denominator_exponent_bound();
    dbound_ = b >= 0 ? b * npairs_ : -1;
}

bool LiftedOrOracle::decompose(const MapKey & key, std::vector<Piece> & out) const {
    out.clear();
    for (auto [u, w] : key) {
        if (u < 0 || w < 0 || u >= static_cast<int>(orp_->vloc[0].size()) ||
            w >= static_cast<int>(orp_->vloc[1].size()))
            return false;
        const auto & lu = orp_->vloc[0][static_cast<std::size_t>(u)];
        const auto & rw = orp_->vloc[1][static_cast<std::size_t>(w)];
        if (match_[0][static_cast<std::size_t>(lu.comp)] != rw.comp || lu.pos != rw.pos)
            return false;
        if (lu.pos != gamma_) {
            if (lu.base != rw.base) return false;
            continue;
        }
        const int a = orp_->side[0][static_cast<std::size_t>(lu.comp)].selection[gamma_];
        const std::pair<int, int> np = a == 0 ? std::pair<int, int>{lu.base, rw.base}
                                              : std::pair<int, int>{rw.base, lu.base};
        Piece * pc = nullptr;
        for (auto & p : out)
            if (p.lcomp == lu.comp) {
                pc = &p;
                break;
            }
        if (pc == nullptr) {
            out.push_back({lu.comp, {}});
            pc = &out.back();
        }
        pc->pairs.push_back(np);
    }
    for (auto & p : out) p.pairs = canonical_key(std::move(p.pairs));
    return true;
}

long LiftedOrOracle::piece_scaled(const Piece & p) const {
    if (p.pairs.size() == 1)
        return spf_[static_cast<std::size_t>(p.pairs[0].first) * gr_ + p.pairs[0].second];
    return phi_->scaled(p.pairs);
}

Rat LiftedOrOracle::value(const MapKey & key) const {
    std::vector<Piece> pieces;
    if (!decompose(key, pieces)) return Rat(0);
    Rat r(1);
    for (const auto & p : pieces) r *= phi_->value(p.pairs);
    return r;
}

long LiftedOrOracle::scaled(const MapKey & key) const {
    require(has_scaled_, ErrorKind::unsupported, "no scaled form for this oracle");
    if (have_last_ && key == last_key_) return last_scaled_;
    std::vector<Piece> pieces;
    long r = 0;
    if (decompose(key, pieces)) {
        r = pad_[static_cast<std::size_t>(npairs_ - static_cast<int>(pieces.size()))];
        for (const auto & p : pieces) r *= piece_scaled(p);
    }
    have_last_ = true;
    last_key_ = key;
    last_scaled_ = r;
    return r;
}

void LiftedOrOracle::extension_support(const MapKey &, int fixed, int side,
                                       std::vector<int> & out) const {
    out.clear();
    const int fside = side == 0 ? 1 : 0;
    const int cside = 1 - fside;
    if (fixed < 0 || fixed >= static_cast<int>(orp_->vloc[fside].size())) return;
    const auto & f = orp_->vloc[fside][static_cast<std::size_t>(fixed)];
    const int cc = match_[fside][static_cast<std::size_t>(f.comp)];
    const auto & comp = orp_->side[cside][static_cast<std::size_t>(cc)];
    if (f.pos < 0) {
        out.push_back(comp.connector[static_cast<std::size_t>(f.base)]);
        return;
    }
    if (f.pos != gamma_) {
        out.push_back(comp.block_offset[static_cast<std::size_t>(f.pos)] + f.base);
        return;
    }
    const CfiPairLayout & il = *orp_->inputs[static_cast<std::size_t>(gamma_)].cfi;
    const int fa = orp_->side[fside][static_cast<std::size_t>(f.comp)].selection[gamma_];
    const CfiLayout & flay = fa ? il.right : il.left;
    const CfiLayout & clay = comp.selection[gamma_] ? il.right : il.left;
    const auto & vi = flay.vinfo[static_cast<std::size_t>(f.base)];
    int base, cnt;
    if (vi.kind == 0) {
        base = clay.var_base[static_cast<std::size_t>(vi.owner)];
        cnt = go_;
    } else {
        base = clay.con_base[static_cast<std::size_t>(vi.owner)];
        cnt = static_cast<int>(clay.con_tuples[static_cast<std::size_t>(vi.owner)].size());
    }
    const int off = comp.block_offset[static_cast<std::size_t>(gamma_)];
    out.reserve(static_cast<std::size_t>(cnt));
    for (int i = 0; i < cnt; ++i) out.push_back(off + base + i);
}

void LiftedOrOracle::extension_begin(const MapKey & pi, int fixed, int side) const {
    if (!has_scaled_) {
        mode_ = 4; // no scaled form: run on the base protocol
        Valuation::extension_begin(pi, fixed, side);
        return;
    }
    mode_ = 0;
    const int fside = side == 0 ? 1 : 0;
    cand_side_ = 1 - fside;
    if (fixed < 0 || fixed >= static_cast<int>(orp_->vloc[fside].size())) return;
    const auto & f = orp_->vloc[fside][static_cast<std::size_t>(fixed)];
    cand_comp_ = match_[fside][static_cast<std::size_t>(f.comp)];
    epos_ = f.pos;
    ebase_ = f.base;
    if (!decompose(pi, epieces_)) return;
    const int gcount = static_cast<int>(epieces_.size());
    if (epos_ == gamma_) {
        const int target = side == 0 ? cand_comp_ : f.comp;
        cand_first_ = orp_->side[cand_side_][static_cast<std::size_t>(cand_comp_)]
                          .selection[gamma_] == 0;
        int ti = -1;
        for (int i = 0; i < gcount; ++i)
            if (epieces_[static_cast<std::size_t>(i)].lcomp == target) ti = i;
        long prod = 1;
        for (int i = 0; i < gcount; ++i)
            if (i != ti) prod *= piece_scaled(epieces_[static_cast<std::size_t>(i)]);
        if (prod == 0) return; // some untouched piece already vanishes
        if (ti >= 0) {
            mode_ = 3;
            mult_ = prod * pad_[static_cast<std::size_t>(npairs_ - gcount)];
            phi_->extension_begin(epieces_[static_cast<std::size_t>(ti)].pairs, ebase_,
                                  cand_first_ ? 0 : 1);
        } else {
            mode_ = 2;
            mult_ = prod * pad_[static_cast<std::size_t>(npairs_ - gcount - 1)];
        }
    } else {
        long prod = 1;
        for (int i = 0; i < gcount; ++i) prod *= piece_scaled(epieces_[static_cast<std::size_t>(i)]);
        if (prod == 0) return;
        mode_ = 1;
        total_ = prod * pad_[static_cast<std::size_t>(npairs_ - gcount)];
    }
}

long LiftedOrOracle::scaled_extension(int v) const {
    if (mode_ == 4) return Valuation::scaled_extension(v);
    if (mode_ == 0) return 0;
    const auto & vl = orp_->vloc[cand_side_];
    if (v < 0 || v >= static_cast<int>(vl.size())) return 0;
    const auto & x = vl[static_cast<std::size_t>(v)];
    if (x.comp != cand_comp_ || x.pos != epos_) return 0;
    if (mode_ == 1) return x.base == ebase_ ? total_ : 0;
    if (mode_ == 2) {
        const long f = spf_[cand_first_ ? static_cast<std::size_t>(x.base) * gr_ + ebase_
                                        : static_cast<std::size_t>(ebase_) * gr_ + x.base];
        return mult_ * f;
    }
    return mult_ * phi_->scaled_extension(x.base);
}

std::shared_ptr<const LiftedOrOracle> lift_extended(std::shared_ptr<const Valuation> phi_fixing,
                                                    const GraphPair & orpair, int position,
                                                    int level) {
    return std::make_shared<LiftedOrOracle>(orpair, position, std::move(phi_fixing), level);
}

// ------------------------------------------------------------- the pipeline

Theorem41Result theorem41_pipeline(const UGraph & g, int level, std::uint64_t iso_node_budget) {
    using clock = std::chrono::steady_clock;
    Theorem41Result res;
    Theorem41Report & rep = res.report;
    auto last = clock::now();
    auto mark = [&](std::string name) {
        auto now = clock::now();
        rep.stage_seconds.emplace_back(std::move(name),
                                       std::chrono::duration<double>(now - last).count());
        last = now;
    };

    require(level >= 1, ErrorKind::precondition, "level must be at least 1");
    require(g.n() >= 4, ErrorKind::precondition, "graph too small");
    for (int v = 0; v < g.n(); ++v)
        require(g.degree(v) == 3, ErrorKind::precondition, "graph must be 3-regular");
    require(is_two_connected(g), ErrorKind::precondition, "graph must be 2-connected");

    rep.level = level;
    rep.n = g.n();
    rep.m = g.m();

    DiGraph h = DiGraph::orient_by_vertex_order(g);
    ExtendedTseitin ext = extended_tseitin_disjunction(h, 0);
    res.pair = extended_pair(ext);
    GraphPair & pair = res.pair;
    rep.left_n = pair.left.n();
    rep.right_n = pair.right.n();

    const FiniteAbelianGroup & grp = ext.csp.base.group;
    const std::array<int, 2> primes{2, 3};
    const std::array<int, 2> iota{grp.encode({1, 0}), grp.encode({0, 1})};
    int karity = 1;
    for (const auto & c : ext.csp.base.constraints)
        karity = std::max(karity, static_cast<int>(c.scope.size()));
    rep.csp_level = karity * level;
    mark("build");

    std::array<std::shared_ptr<const Valuation>, 2> lifted;
    for (int i = 0; i < 2; ++i) {
        const std::string tag = "p=" + std::to_string(primes[i]);
        int pos = -1;
        const auto & tpp = pair.orp->tuple_per_position;
        for (int j = 0; j < static_cast<int>(tpp.size()); ++j)
            if (tpp[static_cast<std::size_t>(j)] == iota[static_cast<std::size_t>(i)]) pos = j;
        require(pos >= 0, ErrorKind::generation, "fixing missing from the disjunction layout");
        rep.gamma_position[static_cast<std::size_t>(i)] = pos;

        GroupCsp pinned = fix_arbitrary(ext.csp, iota[static_cast<std::size_t>(i)]);
        ExplicitCsp pinned_x = to_explicit(pinned);
        SolveResult sr = brute_force_solve(pinned_x);
        rep.component_unsat[static_cast<std::size_t>(i)] = !sr.satisfiable;
        require(!sr.satisfiable, ErrorKind::verification,
                "theorem41: charge check failed, the " + tag + " fixing is satisfiable");
        mark("charge " + tag);

        auto psis = std::make_shared<ExtendedPsiOracle>(ext, iota[static_cast<std::size_t>(i)],
                                                        rep.csp_level);
        LcspSystem csys(pinned_x, rep.csp_level);
        VerifyResult cv = csys.verify(*psis);
        rep.csp_oracle_ok[static_cast<std::size_t>(i)] = cv.ok;
        require(cv.ok, ErrorKind::verification,
                "theorem41: charge oracle rejected by its csp system (" + tag + "): " + cv.violated);
        mark("csp verify " + tag);

        const GraphPair & input = pair.orp->inputs[static_cast<std::size_t>(pos)];
        auto lift = std::make_shared<LiftedIsoOracle>(psis, rep.csp_level, input, level);
        {
            LisoSystem fsys(input.left, input.right, level);
            VerifyResult fv = fsys.verify(*lift);
            rep.lift_forward_ok[static_cast<std::size_t>(i)] = fv.ok;
            require(fv.ok, ErrorKind::verification,
                    "lemma31: lifted oracle rejected by the component system (" + tag +
                        "): " + fv.violated);
        }
        mark("lift verify " + tag);
        {
            auto tr = std::make_shared<TransposedValuation>(lift);
            LisoSystem rsys(input.right, input.left, level);
            VerifyResult rv = rsys.verify(*tr);
            rep.lift_reverse_ok[static_cast<std::size_t>(i)] = rv.ok;
            require(rv.ok, ErrorKind::verification,
                    "lemma31: transposed lifted oracle rejected (" + tag + "): " + rv.violated);
        }
        mark("lift reverse " + tag);

        lifted[static_cast<std::size_t>(i)] = std::make_shared<LiftedOrOracle>(pair, pos, lift,
                                                                               level);
        mark("or lift " + tag);
    }

    auto mapping = brute_force_isomorphic(pair.left, pair.right, iso_node_budget);
    rep.nonisomorphic = !mapping.has_value();
    require(!mapping.has_value(), ErrorKind::verification,
            "lemma33: disjunction pair admits an isomorphism");
    mark("isomorphism search");

    res.solution = combine_pq(lifted[0], 2, lifted[1], 3, &rep.combine);

    {
        const Rat unit = res.solution->value(MapKey{});
        require(unit == 1, ErrorKind::verification, "theorem41: combined unit value is not 1");
        long checked = 1;
        const int cap = std::min(pair.left.n(), 40);
        MapKey k{{0, 0}};
        for (int u = 0; u < cap; ++u)
            for (int w = 0; w < pair.right.n(); ++w) {
                k[0] = {u, w};
                const Rat v = res.solution->value(k);
                require(v.get_den() == 1, ErrorKind::verification,
                        "theorem41: combined value is not integral at " + key_to_string(k));
                ++checked;
            }
        rep.sampled_keys = checked;
        rep.sampled_integral = true;
    }
    mark("integrality sample");

    LisoSystem fin(pair.left, pair.right, level);
    rep.final_verify = fin.verify(*res.solution);
    require(rep.final_verify.ok, ErrorKind::verification,
            "theorem41: integral solution rejected: " + rep.final_verify.violated);
    mark("final verify");

    rep.ok = true;
    return res;
}

} // namespace cfikit
