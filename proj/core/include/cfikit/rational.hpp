#ifndef CFIKIT_RATIONAL_HPP
#define CFIKIT_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include <cfikit/errors.hpp>

namespace cfikit {

using Int = mpz_class;
using Rat = mpq_class;

inline Int int_pow(const Int & base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// p^e for possibly negative e, as an exact rational.
inline Rat rat_pow(long base, long e) {
    Int b = int_pow(Int(base), static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) return Rat(b);
    Rat r(1, b);
    r.canonicalize();
    return r;
}

// Classical extended Euclid; returns gcd g and cofactors with a*s + b*t = g.
// The recursion is pinned down so the cofactor pair is reproducible
// (ext_gcd(2,3) = (1, -1, 1)).
inline Int ext_gcd(const Int & a, const Int & b, Int & s, Int & t) {
    if (b == 0) {
        s = (a >= 0) ? 1 : -1;
        t = 0;
        return abs(a);
    }
    Int s1, t1;
    Int q = a / b; // truncated division
    Int g = ext_gcd(b, a - q * b, s1, t1);
    s = t1;
    t = s1 - q * t1;
    return g;
}

inline std::string rat_to_string(const Rat & r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rat rat_from_string(const std::string & s) {
    Rat r;
    if (r.set_str(s, 10) != 0)
        throw Error(ErrorKind::io, "bad rational literal: " + s);
    r.canonicalize();
    return r;
}

// Largest z with p^z dividing den(r); r must have a p-power denominator times
// nothing else for p-solution classification, which callers check separately.
inline long denominator_exponent(const Rat & r, long p) {
    Int den = r.get_den();
    long z = 0;
    while (den % p == 0) {
        den /= p;
        ++z;
    }
    return z;
}

// True iff r is 0 or +-p^z for some integer z (the value set of a p-solution;
// the sign is not constrained here, verification of nonnegativity is separate).
inline bool is_p_power_value(const Rat & r, long p) {
    if (r == 0) return true;
    Int num = abs(r.get_num());
    Int den = r.get_den();
    auto pure_power = [&](Int v) {
        while (v % p == 0) v /= p;
        return v == 1;
    };
    return pure_power(num) && pure_power(den);
}

} // namespace cfikit

#endif
