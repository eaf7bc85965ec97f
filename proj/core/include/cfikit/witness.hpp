#ifndef CFIKIT_WITNESS_HPP
#define CFIKIT_WITNESS_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <cfikit/cfi.hpp>
#include <cfikit/csp.hpp>
#include <cfikit/graphcore.hpp>
#include <cfikit/linsys.hpp>

namespace cfikit {

// Digit-level query interface shared by the charge oracles: one digit per
// csp variable, group order = unassigned.  The lifts use it to sidestep
// MapKey construction on their inner loops.
class DigitEvaluable {
public:
    virtual ~DigitEvaluable() = default;

    virtual int digit_count() const = 0;
    virtual int digit_radix() const = 0; // order + 1
    virtual long scaled_digits(const std::uint8_t * digit) const = 0;
};

// Charge-splitting oracle over partial edge assignments of a flow instance:
// 1/|D|^rank(dom psi) when psi is D-valued and every small component of the
// graph minus dom(psi) balances its charge, else 0.  D is the whole group or
// a designated subgroup (the prime-power form).  Rank and component data
// come from precomputed mask tables, so the m <= 20 budget applies.
//
// The scaled fast path always uses |Gamma|^rank(E) as the common scale, no
// matter which D is active; that keeps oracles for different subgroups of
// one instance combinable without rescaling.
class PsiOracle : public Valuation, public DigitEvaluable {
public:
    PsiOracle(const TseitinCsp & t, int level);
    // subgroup form: |delta| must be a prime power and sigma must stay
    // inside delta; values outside delta are cut to 0
    PsiOracle(const TseitinCsp & t, int level, const Subgroup & delta);

    Rat value(const MapKey & key) const override;
    bool has_scaled() const override { return has_scaled_; }
    long scale() const override { return scale_; }
    long scaled(const MapKey & key) const override;
    int denominator_exponent_bound() const override { return dbound_; }

    int digit_count() const override { return m_; }
    int digit_radix() const override { return order_ + 1; }
    long scaled_digits(const std::uint8_t * digit) const override;

    int level() const { return level_; }
    int rank_full() const { return rank_full_; }
    const FiniteAbelianGroup & group() const { return group_; }
    const GraphMaskTables & tables() const { return tables_; }

private:
    void finish_setup();
    // -1 on conflict/range/delta violation, else dom mask; vals must hold m_ ints
    long parse(const MapKey & key, int * vals) const;
    bool balanced(EdgeMask dom, const int * vals) const;

    FiniteAbelianGroup group_;
    DiGraph h_;
    SigmaCharge sigma_;
    int level_, m_, n_, order_;
    std::vector<char> in_delta_;
    long dsize_;
    int dprime_ = 0, dexp_ = 0; // |D| = dprime_^dexp_ when a prime power
    GraphMaskTables tables_;
    int rank_full_ = 0;
    bool has_scaled_ = false;
    long scale_ = 1;
    int dbound_ = -1;
    std::vector<long> dpow_, svals_; // |D|^r and scale_/|D|^r per rank r
};

PsiOracle psi(const TseitinCsp & t, int level);
PsiOracle psi_subgroup(const TseitinCsp & t, const Subgroup & delta, int level);

// Charge oracle for one fixing of the two-charge disjunction instance.  Keys
// range over the extended instance's variables (edges plus the absorbed
// charge variable).  A key carrying the absorbed variable with any value
// other than the fixed charge is 0; otherwise that entry is stripped and the
// prime-power oracle for the matching charge decides.
class ExtendedPsiOracle : public Valuation, public DigitEvaluable {
public:
    ExtendedPsiOracle(const ExtendedTseitin & c, int iota_code, int level);

    Rat value(const MapKey & key) const override;
    bool has_scaled() const override { return inner_.has_scaled(); }
    long scale() const override { return inner_.scale(); }
    long scaled(const MapKey & key) const override;
    int denominator_exponent_bound() const override { return inner_.denominator_exponent_bound(); }

    int digit_count() const override { return xstar_ + 1; }
    int digit_radix() const override { return inner_.digit_radix(); }
    long scaled_digits(const std::uint8_t * digit) const override;

    int level() const { return level_; }
    int iota() const { return iota_; }
    int xstar() const { return xstar_; }
    const PsiOracle & inner() const { return inner_; }

private:
    // false when an absorbed-variable entry disqualifies the key
    bool strip(const MapKey & key, MapKey & out) const;

    int level_, xstar_, iota_;
    PsiOracle inner_;
};

// Same assignment with the two sides of every key swapped; a solution of an
// isomorphism system becomes a solution of the reversed pair's system.
class TransposedValuation : public Valuation {
public:
    explicit TransposedValuation(std::shared_ptr<const Valuation> inner);

    static MapKey flip(const MapKey & key);

    Rat value(const MapKey & key) const override { return inner_->value(flip(key)); }
    bool has_scaled() const override { return inner_->has_scaled(); }
    long scale() const override { return inner_->scale(); }
    long scaled(const MapKey & key) const override { return inner_->scaled(flip(key)); }
    int denominator_exponent_bound() const override { return inner_->denominator_exponent_bound(); }

    bool has_support_hints() const override { return inner_->has_support_hints(); }
    void extension_support(const MapKey & pi, int fixed, int side,
                           std::vector<int> & out) const override {
        inner_->extension_support(flip(pi), fixed, 1 - side, out);
    }
    void extension_begin(const MapKey & pi, int fixed, int side) const override {
        inner_->extension_begin(flip(pi), fixed, 1 - side);
    }
    long scaled_extension(int v) const override { return inner_->scaled_extension(v); }

private:
    std::shared_ptr<const Valuation> inner_;
};

// Lift of a partial-solution oracle to the gadget pair of its csp: a key
// over gadget vertices maps to the source oracle at the induced
// value-difference key.  Pairs joining different gadgets, value conflicts,
// and anything else that is not a partial isomorphism give 0.
//
// When the source oracle is digit evaluable the extension protocol runs on
// an incremental digit state, with a dense table of all digit combinations
// when that fits the budget.
class LiftedIsoOracle : public Valuation {
public:
    // phi must cover level max_arity(csp) * level
    LiftedIsoOracle(std::shared_ptr<const Valuation> phi, int phi_level,
                    const GraphPair & pair, int level);

    Rat value(const MapKey & key) const override;
    bool has_scaled() const override { return has_scaled_; }
    long scale() const override { return phi_scale_; }
    long scaled(const MapKey & key) const override;
    int denominator_exponent_bound() const override { return phi_->denominator_exponent_bound(); }

    bool has_support_hints() const override { return true; }
    void extension_support(const MapKey & pi, int fixed, int side,
                           std::vector<int> & out) const override;
    void extension_begin(const MapKey & pi, int fixed, int side) const override;
    long scaled_extension(int v) const override;

    int level() const { return level_; }
    int max_arity() const { return max_arity_; }

    // induced difference key; false when the value is structurally 0
    bool psi_key(const MapKey & pi, MapKey & out) const;

private:
    struct SideEntries {
        std::vector<int> off;            // vertex -> first flattened entry
        std::vector<int> var;            // entry -> csp variable
        std::vector<std::uint8_t> code;  // entry -> element code
    };

    bool pair_entries(int u, int w, std::pair<int, int> * out, int * cnt) const;
    long scaled_entries(const std::pair<int, int> * ent, int cnt) const;

    std::shared_ptr<const Valuation> phi_;
    const DigitEvaluable * digit_ = nullptr; // non-owning view of phi_
    std::shared_ptr<CfiPairLayout> cfi_;
    const FiniteAbelianGroup * grp_ = nullptr; // owned by *cfi_
    int phi_level_, level_, max_arity_, order_, nvars_;
    int ln_ = 0, rn_ = 0;
    SideEntries ent_[2];
    bool has_scaled_ = false;
    long phi_scale_ = 1;
    std::vector<long> pow_;           // radix powers for the digit index
    long empty_idx_ = 0;              // digit index of the all-unassigned state
    std::vector<std::int32_t> table_; // dense digit table when affordable

    // extension state (per the base-class single-verifier contract)
    mutable bool ext_dead_ = true;
    mutable bool ext_fall_ = false; // no digit view: run on the base protocol
    mutable int ext_side_v_ = 0, ext_fixed_v_ = -1;
    mutable std::vector<std::uint8_t> edig_;
    mutable long eidx_ = 0;
};

std::shared_ptr<const LiftedIsoOracle> lift_csp_to_iso(std::shared_ptr<const Valuation> phi,
                                                       int phi_level, const GraphPair & pair,
                                                       int level);

// Lift over a disjunction pair: the fixed matching pairs every left
// component with the right component whose selection differs exactly at one
// position.  A key's value is the product over matched component pairs of
// identity indicators (all other positions and the connectors) and, at the
// distinguished position, the per-fixing oracle's value on the induced piece
// key, transposed on components that carry the swapped copy.
class LiftedOrOracle : public Valuation {
public:
    // phi evaluates keys of the distinguished input pair, left side first
    LiftedOrOracle(const GraphPair & orpair, int position,
                   std::shared_ptr<const Valuation> phi, int level);

    Rat value(const MapKey & key) const override;
    bool has_scaled() const override { return has_scaled_; }
    long scale() const override { return scale_; }
    long scaled(const MapKey & key) const override;
    int denominator_exponent_bound() const override { return dbound_; }

    bool has_support_hints() const override { return true; }
    void extension_support(const MapKey & pi, int fixed, int side,
                           std::vector<int> & out) const override;
    void extension_begin(const MapKey & pi, int fixed, int side) const override;
    long scaled_extension(int v) const override;

    int level() const { return level_; }
    int position() const { return gamma_; }
    int sequence_pairs() const { return npairs_; }

private:
    struct Piece {
        int lcomp = -1;
        MapKey pairs; // normalized to (input left id, input right id)
    };

    // false when the key is structurally 0 (mismatched components, a
    // non-identity pair off the distinguished position, ...)
    bool decompose(const MapKey & key, std::vector<Piece> & out) const;
    long piece_scaled(const Piece & p) const;

    std::shared_ptr<OrLayout> orp_;
    std::shared_ptr<const Valuation> phi_;
    int gamma_, level_, width_, npairs_;
    int go_ = 0, gl_ = 0, gr_ = 0; // group order and the input pair sizes
    std::vector<int> match_[2];    // component index -> matched index, per side
    bool has_scaled_ = false;
    long phi_scale_ = 1, scale_ = 1;
    int dbound_ = -1;
    std::vector<long> pad_; // phi_scale_^i
    std::vector<long> spf_; // single-pair piece factors, gl_ x gr_

    // extension state
    mutable int mode_ = 0; // 0 all-zero, 1 identity target, 2 fresh piece, 3 active piece, 4 fallback
    mutable int cand_side_ = 0, cand_comp_ = -1, epos_ = 0, ebase_ = 0;
    mutable bool cand_first_ = true;
    mutable long total_ = 0, mult_ = 0;
    mutable std::vector<Piece> epieces_;

    mutable bool have_last_ = false; // one-key cache for the per-equation rhs
    mutable MapKey last_key_;
    mutable long last_scaled_ = 0;
};

std::shared_ptr<const LiftedOrOracle> lift_extended(std::shared_ptr<const Valuation> phi_fixing,
                                                    const GraphPair & orpair, int position,
                                                    int level);

// End-to-end construction for a 3-regular 2-connected graph: builds the
// two-charge disjunction instance and its graph pair, the two prime-power
// charge oracles, lifts both through their component pairs onto the
// disjunction pair, combines them into an integral assignment, certifies
// non-isomorphism exhaustively and verifies every equation of the
// isomorphism system at the requested level.  Any failed check throws a
// verification error naming the failing claim; a returned result passed
// everything.  Index 0 of the per-charge arrays is p=2, index 1 is p=3.
struct Theorem41Report {
    bool ok = false;
    int level = 0;     // isomorphism system level verified
    int csp_level = 0; // internal partial-solution level (max arity * level)
    int n = 0, m = 0;  // input graph
    int left_n = 0, right_n = 0;
    std::array<int, 2> gamma_position{};
    std::array<bool, 2> component_unsat{};
    std::array<bool, 2> csp_oracle_ok{};
    std::array<bool, 2> lift_forward_ok{};
    std::array<bool, 2> lift_reverse_ok{};
    bool nonisomorphic = false;
    CombineReport combine;
    long sampled_keys = 0;
    bool sampled_integral = false;
    VerifyResult final_verify;
    std::vector<std::pair<std::string, double>> stage_seconds; // wall clock, reporting only
};

struct Theorem41Result {
    GraphPair pair;
    std::shared_ptr<const Valuation> solution; // integral, verified
    Theorem41Report report;
};

Theorem41Result theorem41_pipeline(const UGraph & g, int level,
                                   std::uint64_t iso_node_budget = 50'000'000);

} // namespace cfikit

#endif
