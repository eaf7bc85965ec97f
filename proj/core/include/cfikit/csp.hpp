#ifndef CFIKIT_CSP_HPP
#define CFIKIT_CSP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <cfikit/graphcore.hpp>
#include <cfikit/group.hpp>

namespace cfikit {

// CSP whose constraints are cosets of subgroups of Gamma^k ("group CSP").
struct GroupCsp {
    FiniteAbelianGroup group;
    std::vector<std::string> variables;
    struct Constraint {
        std::vector<int> scope; // variable ids, pairwise distinct
        Coset relation;
    };
    std::vector<Constraint> constraints;

    int var_count() const { return static_cast<int>(variables.size()); }
};

// CSP with explicit tuple relations; domains are element-code subsets of a
// group so the two families share one evaluation path.
struct ExplicitCsp {
    FiniteAbelianGroup group;
    std::vector<int> domain; // sorted element codes
    std::vector<std::string> variables;
    struct Constraint {
        std::vector<int> scope;
        std::vector<long> tuples; // sorted codes in TupleSpace(group, |scope|)
    };
    std::vector<Constraint> constraints;

    int var_count() const { return static_cast<int>(variables.size()); }
};

// Group CSP plus one extra constraint with an arbitrary (non-coset) relation
// of at most a few tuples.
struct ExtendedGroupCsp {
    GroupCsp base;
    std::vector<int> arb_scope;
    std::vector<long> arb_tuples; // sorted codes

    int var_count() const { return base.var_count(); }
};

// Flow constraints of an oriented graph: per vertex v the signed sum of the
// incident edge variables equals sigma(v).  Scopes list incident edges in
// canonical id order; direction lives in the signs, not in the scope order.
struct TseitinCsp {
    GroupCsp csp;
    DiGraph h;
    SigmaCharge sigma;
    std::vector<std::vector<int>> signs; // per constraint, aligned with scope
};

TseitinCsp tseitin(const DiGraph & h, const FiniteAbelianGroup & group, const SigmaCharge & sigma);

// same constraints but variables range over {0,1} inside Z_p, relations listed
// tuple by tuple
ExplicitCsp boolean_tseitin(const DiGraph & h, int p, const SigmaCharge & sigma);

GroupCsp homogenize(const GroupCsp & c);

ExplicitCsp to_explicit(const GroupCsp & c);
ExplicitCsp to_explicit(const ExtendedGroupCsp & c);

// pins the arbitrary constraint to one of its tuples (singleton coset)
GroupCsp fix_arbitrary(const ExtendedGroupCsp & c, long tuple_code);

// The two-charge disjunction instance over Z2xZ3: flow constraints with zero
// charge except that vertex vstar absorbs a fresh variable, which is then
// restricted to {(1,0),(0,1)} by the arbitrary constraint.
struct ExtendedTseitin {
    ExtendedGroupCsp csp;
    DiGraph h;
    int vstar;
    int xstar; // variable id of the absorbed charge
    std::vector<std::vector<int>> signs; // per base constraint
};

ExtendedTseitin extended_tseitin_disjunction(const DiGraph & h, int vstar);

struct SolveResult {
    bool satisfiable = false;
    std::vector<int> solution;   // element codes per variable (lex-first)
    std::uint64_t count = 0;     // only populated in counting mode
    bool counted = false;
};

SolveResult brute_force_solve(const ExplicitCsp & c, bool count_all = false,
                              std::uint64_t budget = 10'000'000);

// evaluates a full assignment (element codes per variable)
bool satisfies(const ExplicitCsp & c, const std::vector<int> & assignment);

} // namespace cfikit

#endif
