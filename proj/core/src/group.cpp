#include <cfikit/group.hpp>

#include <algorithm>
#include <set>

namespace cfikit {

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<int> moduli) : moduli_(std::move(moduli)) {
    require(! moduli_.empty(), ErrorKind::precondition, "group needs at least one modulus");
    long order = 1;
    for (int m : moduli_) {
        require(m >= 2, ErrorKind::precondition, "group moduli must be >= 2");
        order *= m;
    }
    require(order <= 4096, ErrorKind::budget, "group order beyond the supported range");
    order_ = static_cast<int>(order);

    add_.resize(static_cast<size_t>(order_) * order_);
    neg_.resize(order_);
    int r = static_cast<int>(moduli_.size());
    std::vector<int> da(r), db(r), dc(r);
    for (int a = 0; a < order_; ++a) {
        da = decode(a);
        for (int i = 0; i < r; ++i) dc[i] = (moduli_[i] - da[i]) % moduli_[i];
        neg_[a] = encode(dc);
        for (int b = 0; b < order_; ++b) {
            db = decode(b);
            for (int i = 0; i < r; ++i) dc[i] = (da[i] + db[i]) % moduli_[i];
            add_[a * order_ + b] = encode(dc);
        }
    }
}

int FiniteAbelianGroup::mul(long n, int a) const {
    n %= order_; // group exponent divides the order
    if (n < 0) n += order_;
    int acc = 0;
    for (long i = 0; i < n; ++i) acc = add(acc, a);
    return acc;
}

std::vector<int> FiniteAbelianGroup::decode(int code) const {
    std::vector<int> out(moduli_.size());
    for (int i = static_cast<int>(moduli_.size()) - 1; i >= 0; --i) {
        out[i] = code % moduli_[i];
        code /= moduli_[i];
    }
    return out;
}

int FiniteAbelianGroup::encode(const std::vector<int> & residues) const {
    require(residues.size() == moduli_.size(), ErrorKind::arity, "element arity mismatch");
    int code = 0;
    for (size_t i = 0; i < moduli_.size(); ++i) {
        int r = residues[i];
        require(0 <= r && r < moduli_[i], ErrorKind::domain, "element residue out of range");
        code = code * moduli_[i] + r;
    }
    return code;
}

std::string FiniteAbelianGroup::describe() const {
    std::string s;
    for (size_t i = 0; i < moduli_.size(); ++i) {
        if (i) s += "x";
        s += "Z" + std::to_string(moduli_[i]);
    }
    return s;
}

TupleSpace::TupleSpace(const FiniteAbelianGroup & group, int arity)
    : group_(&group), arity_(arity) {
    require(arity >= 1 && arity <= 8, ErrorKind::arity, "tuple arity out of supported range");
    stride_.assign(arity, 1);
    for (int i = arity - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * group.order();
    count_ = stride_[0] * group.order();
    require(count_ <= (1L << 40), ErrorKind::budget, "tuple space too large");
}

long TupleSpace::encode(const std::vector<int> & element_codes) const {
    require(static_cast<int>(element_codes.size()) == arity_, ErrorKind::arity,
            "tuple arity mismatch");
    long code = 0;
    for (int i = 0; i < arity_; ++i) {
        require(0 <= element_codes[i] && element_codes[i] < group_->order(),
                ErrorKind::domain, "tuple coordinate out of range");
        code += stride_[i] * element_codes[i];
    }
    return code;
}

std::vector<int> TupleSpace::decode(long code) const {
    std::vector<int> out(arity_);
    for (int i = 0; i < arity_; ++i) out[i] = get(code, i);
    return out;
}

long TupleSpace::add(long a, long b) const {
    long out = 0;
    for (int i = 0; i < arity_; ++i) out += stride_[i] * group_->add(get(a, i), get(b, i));
    return out;
}

long TupleSpace::neg(long a) const {
    long out = 0;
    for (int i = 0; i < arity_; ++i) out += stride_[i] * group_->neg(get(a, i));
    return out;
}

long TupleSpace::sub(long a, long b) const {
    long out = 0;
    for (int i = 0; i < arity_; ++i) out += stride_[i] * group_->sub(get(a, i), get(b, i));
    return out;
}

Subgroup Subgroup::span(const FiniteAbelianGroup & group, int arity,
                        const std::vector<long> & generator_codes) {
    TupleSpace tuples(group, arity);
    for (long g : generator_codes)
        require(0 <= g && g < tuples.count(), ErrorKind::domain, "generator code out of range");
    // BFS closure under addition of generators; start from 0
    std::set<long> seen{0};
    std::vector<long> frontier{0};
    while (! frontier.empty()) {
        std::vector<long> next;
        for (long s : frontier)
            for (long g : generator_codes) {
                long t = tuples.add(s, g);
                if (seen.insert(t).second) next.push_back(t);
            }
        frontier = std::move(next);
    }
    std::vector<long> elements(seen.begin(), seen.end());
    return Subgroup(tuples, generator_codes, std::move(elements));
}

Subgroup Subgroup::sum_kernel(const FiniteAbelianGroup & group, int arity,
                              const std::vector<int> & signs) {
    require(static_cast<int>(signs.size()) == arity, ErrorKind::arity,
            "one sign per coordinate required");
    for (int s : signs)
        require(s == 1 || s == -1, ErrorKind::domain, "signs must be +1 or -1");
    TupleSpace tuples(group, arity);
    // free choice of the first k-1 coordinates; the last is pinned by the
    // sign equation (signs are involutions, so s*x = y solves as x = s*y)
    std::vector<long> elements;
    long free_count = 1;
    for (int i = 0; i + 1 < arity; ++i) free_count *= group.order();
    elements.reserve(free_count);
    std::vector<int> coord(arity, 0);
    for (long f = 0; f < free_count; ++f) {
        long rest = f;
        int sum = 0;
        for (int i = arity - 2; i >= 0; --i) {
            coord[i] = static_cast<int>(rest % group.order());
            rest /= group.order();
            sum = group.add(sum, signs[i] == 1 ? coord[i] : group.neg(coord[i]));
        }
        // signs[k-1]*x = -sum
        int target = group.neg(sum);
        coord[arity - 1] = (signs[arity - 1] == 1) ? target : group.neg(target);
        elements.push_back(tuples.encode(coord));
    }
    std::sort(elements.begin(), elements.end());
    // generators: per free coordinate one unit per cyclic factor, with the
    // last coordinate solving s_i*u + s_last*x = 0
    std::vector<long> gens;
    int nfactors = static_cast<int>(group.moduli().size());
    for (int i = 0; i + 1 < arity; ++i)
        for (int j = 0; j < nfactors; ++j) {
            std::vector<int> residues(nfactors, 0);
            residues[j] = 1;
            int unit = group.encode(residues);
            int solved = (signs[i] == signs[arity - 1]) ? group.neg(unit) : unit;
            std::vector<int> g(arity, 0);
            g[i] = unit;
            g[arity - 1] = solved;
            gens.push_back(tuples.encode(g));
        }
    Subgroup result(tuples, gens, std::move(elements));
    require(Subgroup::span(group, arity, gens).elements() == result.elements(),
            ErrorKind::verification, "sum kernel generators do not span the kernel");
    return result;
}

Subgroup Subgroup::trivial(const FiniteAbelianGroup & group, int arity) {
    TupleSpace tuples(group, arity);
    return Subgroup(tuples, {}, {0});
}

bool Subgroup::contains(long code) const {
    return std::binary_search(elements_.begin(), elements_.end(), code);
}

Coset::Coset(Subgroup subgroup, long shift_code) : subgroup_(std::move(subgroup)), shift_(shift_code) {
    require(0 <= shift_ && shift_ < subgroup_.tuples().count(), ErrorKind::domain,
            "coset shift out of range");
}

bool Coset::contains(long code) const {
    return subgroup_.contains(subgroup_.tuples().sub(code, shift_));
}

std::vector<long> Coset::elements() const {
    std::vector<long> out;
    out.reserve(subgroup_.elements().size());
    for (long e : subgroup_.elements()) out.push_back(subgroup_.tuples().add(e, shift_));
    std::sort(out.begin(), out.end());
    return out;
}

Coset Coset::normalized() const {
    auto es = elements();
    return Coset(subgroup_, es.front());
}

bool Coset::same_coset(const Coset & o) const {
    return subgroup_ == o.subgroup_ && contains(o.shift());
}

} // namespace cfikit
