#ifndef CFIKIT_PC_HPP
#define CFIKIT_PC_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <cfikit/cfi.hpp>
#include <cfikit/csp.hpp>

namespace cfikit {

// Monomial: sorted distinct variable ids; empty = the constant monomial.
using Monomial = std::vector<int>;

// graded lexicographic on ids
struct MonomialOrder {
    bool operator()(const Monomial & a, const Monomial & b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

// Multilinear polynomial: x*x collapses to x on every operation, so the
// x^2-x axioms are implicit.  field == 0 keeps plain integer coefficients
// (systems built once, searched over several primes); field == p reduces
// into [0, p).
class MultilinearPoly {
public:
    explicit MultilinearPoly(int field = 0);

    static MultilinearPoly constant(int field, long c);
    static MultilinearPoly variable(int field, int x);
    static MultilinearPoly monomial(int field, Monomial m, long c = 1);

    int field() const { return field_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const; // -1 for the zero polynomial
    const std::map<Monomial, long, MonomialOrder> & terms() const { return terms_; }
    long coefficient(const Monomial & m) const;

    void add_term(Monomial m, long c);
    MultilinearPoly & operator+=(const MultilinearPoly & o);
    MultilinearPoly & operator-=(const MultilinearPoly & o);
    MultilinearPoly operator+(const MultilinearPoly & o) const;
    MultilinearPoly operator-(const MultilinearPoly & o) const;
    MultilinearPoly operator*(const MultilinearPoly & o) const;
    MultilinearPoly scaled(long c) const;
    MultilinearPoly times_var(int x) const;

    MultilinearPoly reduced_mod(int p) const;

    // value under a {0,1} assignment, reduced into [0, p)
    long evaluate01(const std::vector<std::uint8_t> & assign, int p) const;

    bool operator==(const MultilinearPoly & o) const;

    std::string to_string() const; // "2*x0*x3 + -1"
    static MultilinearPoly parse(int field, const std::string & text);

private:
    long norm(long c) const;

    int field_;
    std::map<Monomial, long, MonomialOrder> terms_;
};

struct PolySystem {
    int nvars = 0;
    std::vector<MultilinearPoly> axioms;
    std::vector<std::string> var_names; // aligned with ids when nonempty
};

// variable dictionary of p_iso; only color-compatible pairs get variables,
// the rest are pinned to 0 and never materialize
struct PisoVariables {
    std::vector<std::pair<int, int>> pairs; // id -> (v, w), lexicographic
    std::vector<std::vector<int>> by_left;  // v -> ids
    std::vector<std::vector<int>> by_right; // w -> ids

    int id(int v, int w) const;
};

PolySystem p_iso(const ColoredGraph & g, const ColoredGraph & h, PisoVariables * vars = nullptr);

// variable dictionary of p_csp: id = variable * |domain| + domain position
struct PcspVariables {
    std::vector<int> domain;
    int csp_vars = 0;

    int id(int x, int code) const;
};

PolySystem p_csp(const ExplicitCsp & c, PcspVariables * vars = nullptr);

struct ClosureTrail {
    std::vector<long> dim_per_round; // dimension after seeding and after each round
    long monomial_budget_used = 0;
};

// Fixpoint of the derivable space at degree <= d over F_p: row-echelon basis
// keyed by leading monomial, each round multiplies basis elements by every
// variable and inserts the reductions.  Axioms of degree > d are unusable at
// this degree and are skipped.
bool degree_d_derivable(const PolySystem & s, int p, int d, const MultilinearPoly & target,
                        long monomial_budget = 100000, ClosureTrail * trail = nullptr);

std::optional<int> min_refutation_degree(const PolySystem & s, int p, int d_max,
                                         long monomial_budget = 100000,
                                         std::vector<ClosureTrail> * trails = nullptr);

// exhaustive {0,1} satisfiability over F_p, for cross-checks
bool satisfiable01(const PolySystem & s, int p, std::uint64_t budget = std::uint64_t{1} << 22);

// y -> f_y for every target variable y, all f_y over one source universe
struct Substitution {
    int source_vars = 0;
    std::vector<MultilinearPoly> map; // index = target variable id
    int d1 = 0;                       // max deg f_y, validated on application
    int d2 = 0;                       // derivation degree of the side conditions
    std::string note;                 // how d2 is certified
};

// substituted axiom list aligned index-wise with the target's (zeros kept)
PolySystem apply_substitution(const Substitution & sub, const PolySystem & target);

Substitution identity_substitution(const PolySystem & s);

// shared side-condition degree of the two gadget reductions:
// (k|Gamma| + |Gamma|^k)^2 + 1
long gadget_reduction_degree(int arity, int group_order);

// over P_iso(pair) variables, polynomials in P_csp(to_explicit(csp)) variables
Substitution reduction_csp_to_iso(const GraphPair & pair, const PisoVariables & iso_vars);

// over P_csp variables, single P_iso(pair) variables
Substitution reduction_iso_to_csp(const GraphPair & pair, const PisoVariables & iso_vars);

// over P_iso(or-pair) variables, polynomials in P_iso(input pair at
// `position`) variables; matched components are fixed pointwise elsewhere
Substitution reduction_component_fixing(const GraphPair & orpair, int position,
                                        const PisoVariables & or_vars,
                                        const PisoVariables & component_vars);

// over P_csp(to_explicit(ext.csp)) variables, polynomials in
// P_csp(boolean_tseitin(ext.h, p, unit charge at vstar)) variables
Substitution reduction_boolean_to_extended(const ExtendedTseitin & ext, int p);

struct ReductionInfo {
    std::string name;
    int d1 = 0;
    long d2 = 0;
    std::string needs;
};

std::vector<ReductionInfo> builtin_reductions(int arity, int group_order);

} // namespace cfikit

#endif
