#ifndef CFIKIT_LINSYS_HPP
#define CFIKIT_LINSYS_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <cfikit/cfi.hpp>
#include <cfikit/csp.hpp>
#include <cfikit/rational.hpp>

namespace cfikit {

// A set of (left,right) index pairs in canonical order (sorted, exact
// duplicates removed).  Doubles as the variable key of both system families:
// partial vertex maps for the isomorphism systems, partial value maps
// (variable id, element code) for the csp systems.  The empty key is the
// distinguished unit variable.
using MapKey = std::vector<std::pair<int, int>>;

MapKey canonical_key(MapKey k);
std::string key_to_string(const MapKey & k);

// Value oracle over keys.  Implementations must assign 0 to every key that
// is not a variable of the system at hand (non-partial-maps included); the
// streaming verifier relies on that to elide structurally-zero terms.
class Valuation {
public:
    virtual ~Valuation() = default;

    virtual Rat value(const MapKey & key) const = 0;

    // Exact fast path: every value is an integer divided by scale().
    virtual bool has_scaled() const { return false; }
    virtual long scale() const { return 1; }
    virtual long scaled(const MapKey & key) const;

    // Structural support of row/column sums: fills `out` with every v such
    // that extending `pi` by the pair (v,fixed) (side 0) or (fixed,v)
    // (side 1) can have a nonzero value.  Only consulted when
    // has_support_hints() is true; the contract is that omitted vertices
    // give value exactly 0.
    virtual bool has_support_hints() const { return false; }
    virtual void extension_support(const MapKey & pi, int fixed, int side,
                                   std::vector<int> & out) const;

    // Precomputation hook for summing many extensions of one key; the
    // default composes the key per call.  Not thread safe by design.
    virtual void extension_begin(const MapKey & pi, int fixed, int side) const;
    virtual long scaled_extension(int v) const;

    // Upper bound z such that all denominators divide p^z (p understood by
    // the caller); -1 when unknown.
    virtual int denominator_exponent_bound() const { return -1; }

protected:
    mutable MapKey ext_pi_;
    mutable int ext_fixed_ = -1;
    mutable int ext_side_ = 0;
};

// Materialized assignment; absent keys value 0.
class MapValuation : public Valuation {
public:
    explicit MapValuation(std::map<MapKey, Rat> values);

    Rat value(const MapKey & key) const override;
    const std::map<MapKey, Rat> & entries() const { return values_; }

private:
    std::map<MapKey, Rat> values_;
};

struct VerifyResult {
    bool ok = true;
    long equations = 0;
    long long terms = 0;
    std::string violated; // description of the first failed equation
    Rat lhs, rhs;         // its two sides, exactly
};

struct MaterializedSystem {
    long nvars = 0;
    std::vector<MapKey> vars; // index -> key, canonical enumeration order
    struct Row {
        std::vector<std::pair<long, long>> terms; // (var index, coefficient), index-sorted
        long rhs = 0;
        std::string label;
    };
    std::vector<Row> rows;
};

inline constexpr long kDefaultVarBudget = 50000;

class EquationSink;

// Shared streaming skeleton of the two system families.  Equations are
// emitted in a pinned order: the unit equation first, then all row sums,
// then (isomorphism systems only) all column sums; the outer key runs in
// canonical order (size ascending, then lexicographic), the inner vertex in
// ascending order.  Sums whose equation is trivially key = key are skipped.
class LinearSystem {
public:
    virtual ~LinearSystem() = default;

    int level() const { return level_; }

    VerifyResult verify(const Valuation & val) const;
    MaterializedSystem materialize(long max_vars = kDefaultVarBudget) const;
    long universe_size(long max_vars = kDefaultVarBudget) const;

    // every variable key, size <= level, canonical order; budget-guarded
    virtual void collect_universe(long max_vars, std::vector<MapKey> & out) const = 0;

protected:
    explicit LinearSystem(int level) : level_(level) {}

    virtual void run(EquationSink & sink) const = 0;
    int level_;
};

// Equality systems over partial isomorphisms of a colored graph pair.  Row
// sums extend by a fixed right vertex, column sums by a fixed left vertex.
class LisoSystem : public LinearSystem {
public:
    LisoSystem(const ColoredGraph & g, const ColoredGraph & h, int level);

    const ColoredGraph & left() const { return *g_; }
    const ColoredGraph & right() const { return *h_; }

    bool pair_is_partial_iso(const MapKey & key) const;

    void collect_universe(long max_vars, std::vector<MapKey> & out) const override;

private:
    void run(EquationSink & sink) const override;

    const ColoredGraph * g_;
    const ColoredGraph * h_;
    std::shared_ptr<ColoredGraph> h_aligned_; // owned copy when palettes differed

    int ncolors_ = 0;
    std::vector<std::uint16_t> gcode_, hcode_; // dense edge-code matrices
    std::vector<std::vector<int>> gclass_, hclass_; // color -> vertices

    std::uint16_t gc(int u, int v) const { return gcode_[static_cast<std::size_t>(u) * g_->n() + v]; }
    std::uint16_t hc(int u, int v) const { return hcode_[static_cast<std::size_t>(u) * h_->n() + v]; }
};

// Equality systems over partial solutions of an explicit CSP.
class LcspSystem : public LinearSystem {
public:
    LcspSystem(ExplicitCsp csp, int level);

    const ExplicitCsp & csp() const { return csp_; }

    // all constraints with scope inside dom(key) are satisfied and the key
    // is a function
    bool is_partial_solution(const MapKey & key) const;

    void collect_universe(long max_vars, std::vector<MapKey> & out) const override;

private:
    void run(EquationSink & sink) const override;

    ExplicitCsp csp_;
    std::vector<std::vector<int>> watch_; // variable -> constraint ids
};

struct IntegerSolveResult {
    bool feasible = false;
    std::vector<Int> solution; // dense when feasible
    // rational row combination u with u^T A integral and u^T b not integral
    std::vector<std::pair<long, Rat>> certificate;
    Rat certificate_rhs;
    bool verified = false;
};

// Hermite-style column reduction over exact integers; the unimodular column
// transform is tracked and A*U = H is rechecked before any answer is
// reported.
IntegerSolveResult solve_integer(const MaterializedSystem & sys);

struct ModpSolveResult {
    bool feasible = false;
    int p = 0;
    std::vector<int> solution; // dense mod-p values when feasible
    std::vector<std::pair<long, int>> certificate; // row combination with A^T u = 0, u^T b != 0
    int certificate_rhs = 0;
    bool verified = false;
};

ModpSolveResult solve_modp(const MaterializedSystem & sys, int p);

// exhaustive {0,1} feasibility, for cross-checking tiny systems
bool feasible_01(const MaterializedSystem & sys);

struct CombineReport {
    int p = 0, q = 0;
    long z = 0;
    Int alpha, beta; // alpha*p^z + beta*q^z = 1
};

// Two-prime combination of a p-solution and a q-solution into an integral
// solution of the same system.  If an input is already integral it is
// returned unchanged.  Inputs are validated to have p-power (q-power)
// values; gcd(p,q) must be 1.
std::map<MapKey, Rat> combine_pq(const std::map<MapKey, Rat> & x, int p,
                                 const std::map<MapKey, Rat> & y, int q,
                                 CombineReport * report = nullptr);

// Oracle-form combination; z comes from the declared denominator bounds.
std::shared_ptr<const Valuation> combine_pq(std::shared_ptr<const Valuation> x, int p,
                                            std::shared_ptr<const Valuation> y, int q,
                                            CombineReport * report = nullptr);

} // namespace cfikit

#endif
