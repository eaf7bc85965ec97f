#ifndef CFIKIT_GROUP_HPP
#define CFIKIT_GROUP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <cfikit/errors.hpp>

namespace cfikit {

// Direct product of cyclic groups Z_{n_1} x ... x Z_{n_r}.  Elements are
// handled as codes 0..order-1 in mixed radix with the first modulus most
// significant; residue vectors exist only at the API/serialization boundary.
// Group objects are immutable after construction.
class FiniteAbelianGroup {
public:
    explicit FiniteAbelianGroup(std::vector<int> moduli);

    int order() const { return order_; }
    const std::vector<int> & moduli() const { return moduli_; }

    int add(int a, int b) const { return add_[a * order_ + b]; }
    int neg(int a) const { return neg_[a]; }
    int sub(int a, int b) const { return add(a, neg(b)); }
    static constexpr int zero() { return 0; }

    // scalar multiple n*a (n may be any integer)
    int mul(long n, int a) const;

    std::vector<int> decode(int code) const;
    int encode(const std::vector<int> & residues) const;

    bool operator==(const FiniteAbelianGroup & o) const { return moduli_ == o.moduli_; }
    bool operator!=(const FiniteAbelianGroup & o) const { return ! (*this == o); }

    std::string describe() const; // "Z2xZ3" style, for reports

private:
    std::vector<int> moduli_;
    int order_;
    std::vector<int> add_, neg_;
};

// Coded k-tuples over a group, mixed radix again (coordinate 0 most
// significant).  Arity is capped so that codes fit comfortably in long.
class TupleSpace {
public:
    TupleSpace(const FiniteAbelianGroup & group, int arity);

    int arity() const { return arity_; }
    long count() const { return count_; }
    const FiniteAbelianGroup & group() const { return *group_; }

    int get(long code, int i) const { return static_cast<int>((code / stride_[i]) % group_->order()); }
    long set(long code, int i, int value) const {
        return code + (static_cast<long>(value) - get(code, i)) * stride_[i];
    }
    long encode(const std::vector<int> & element_codes) const;
    std::vector<int> decode(long code) const;

    long add(long a, long b) const;
    long neg(long a) const;
    long sub(long a, long b) const;

private:
    const FiniteAbelianGroup * group_;
    int arity_;
    long count_;
    std::vector<long> stride_;
};

// Subgroup of Gamma^k, always materialized as a sorted code vector (ambient
// sizes in this project stay tiny: |Gamma| <= 12, k <= 6).
class Subgroup {
public:
    // closure of the given generators under addition
    static Subgroup span(const FiniteAbelianGroup & group, int arity,
                         const std::vector<long> & generator_codes);

    // kernel of (x_1..x_k) -> sum_i signs[i]*x_i, signs in {+1,-1};
    // has exactly |Gamma|^(k-1) elements for k >= 1
    static Subgroup sum_kernel(const FiniteAbelianGroup & group, int arity,
                               const std::vector<int> & signs);

    static Subgroup trivial(const FiniteAbelianGroup & group, int arity);

    bool contains(long code) const;
    const std::vector<long> & elements() const { return elements_; }
    const std::vector<long> & generators() const { return generators_; }
    long size() const { return static_cast<long>(elements_.size()); }
    const TupleSpace & tuples() const { return tuples_; }
    int arity() const { return tuples_.arity(); }
    const FiniteAbelianGroup & group() const { return tuples_.group(); }

    bool operator==(const Subgroup & o) const {
        return group() == o.group() && arity() == o.arity() && elements_ == o.elements_;
    }

private:
    Subgroup(TupleSpace tuples, std::vector<long> generators, std::vector<long> elements)
        : tuples_(tuples), generators_(std::move(generators)), elements_(std::move(elements)) {}

    TupleSpace tuples_;
    std::vector<long> generators_;
    std::vector<long> elements_; // sorted, unique
};

// Coset subgroup+shift of Gamma^k.  The stored shift is whatever the
// constructor was given; normalized() rewrites it to the smallest member so
// equality tests are representation independent.
class Coset {
public:
    Coset(Subgroup subgroup, long shift_code);

    bool contains(long code) const;
    std::vector<long> elements() const; // sorted
    const Subgroup & subgroup() const { return subgroup_; }
    long shift() const { return shift_; }
    long size() const { return subgroup_.size(); }
    int arity() const { return subgroup_.arity(); }
    const FiniteAbelianGroup & group() const { return subgroup_.group(); }

    Coset normalized() const;
    bool same_coset(const Coset & o) const;

private:
    Subgroup subgroup_;
    long shift_;
};

} // namespace cfikit

#endif
