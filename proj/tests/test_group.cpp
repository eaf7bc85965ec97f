#include <doctest.h>

#include <cfikit/group.hpp>

using namespace cfikit;

TEST_CASE("group arithmetic over Z2xZ3") {
    FiniteAbelianGroup g({2, 3});
    CHECK(g.order() == 6);
    CHECK(g.describe() == "Z2xZ3");
    CHECK(g.encode({0, 0}) == 0);
    CHECK(g.encode({1, 0}) == 3); // first modulus most significant
    CHECK(g.encode({0, 1}) == 1);
    for (int a = 0; a < g.order(); ++a) {
        CHECK(g.encode(g.decode(a)) == a);
        CHECK(g.add(a, g.neg(a)) == 0);
        CHECK(g.add(a, 0) == a);
        for (int b = 0; b < g.order(); ++b) {
            CHECK(g.add(a, b) == g.add(b, a));
            for (int c = 0; c < g.order(); ++c)
                CHECK(g.add(g.add(a, b), c) == g.add(a, g.add(b, c)));
        }
    }
    CHECK(g.mul(6, 5) == 0);
    CHECK(g.mul(-1, 5) == g.neg(5));
    CHECK_THROWS_AS(g.encode({2, 0}), Error);
    CHECK_THROWS_AS(FiniteAbelianGroup({1}), Error);
}

TEST_CASE("tuple space codes") {
    FiniteAbelianGroup g({3});
    TupleSpace ts(g, 3);
    CHECK(ts.count() == 27);
    for (long c = 0; c < ts.count(); ++c) CHECK(ts.encode(ts.decode(c)) == c);
    long code = ts.encode({1, 0, 2});
    CHECK(ts.get(code, 0) == 1);
    CHECK(ts.get(code, 2) == 2);
    CHECK(ts.get(ts.set(code, 1, 2), 1) == 2);
    CHECK(ts.set(code, 1, 0) == code);
    CHECK(ts.add(code, ts.neg(code)) == 0);
}

TEST_CASE("span closes under addition") {
    FiniteAbelianGroup g({2, 3});
    Subgroup triv = Subgroup::trivial(g, 2);
    CHECK(triv.size() == 1);
    CHECK(triv.contains(0));

    TupleSpace ts(g, 2);
    Subgroup s = Subgroup::span(g, 2, {ts.encode({g.encode({1, 0}), g.encode({1, 0})})});
    CHECK(s.size() == 2);
    for (long a : s.elements())
        for (long b : s.elements()) CHECK(s.contains(ts.add(a, b)));
}

TEST_CASE("sum kernel size is order^(k-1)") {
    FiniteAbelianGroup g({2, 3});
    for (int k = 1; k <= 3; ++k) {
        Subgroup ker = Subgroup::sum_kernel(g, k, std::vector<int>(k, +1));
        long expect = 1;
        for (int i = 0; i + 1 < k; ++i) expect *= g.order();
        CHECK(ker.size() == expect);
        TupleSpace ts(g, k);
        for (long code : ker.elements()) {
            int sum = 0;
            for (int i = 0; i < k; ++i) sum = g.add(sum, ts.get(code, i));
            CHECK(sum == 0);
        }
    }
    // mixed signs
    Subgroup ker = Subgroup::sum_kernel(g, 2, {+1, -1});
    TupleSpace ts(g, 2);
    for (long code : ker.elements()) CHECK(ts.get(code, 0) == ts.get(code, 1));
}

TEST_CASE("coset equality ignores the shift representative") {
    FiniteAbelianGroup g({2, 3});
    Subgroup ker = Subgroup::sum_kernel(g, 2, {+1, +1});
    TupleSpace ts(g, 2);
    long shift = ts.encode({1, 2});
    Coset a(ker, shift);
    Coset b(ker, ts.add(shift, ker.elements()[1]));
    CHECK(a.same_coset(b));
    CHECK(a.normalized().shift() == b.normalized().shift());
    CHECK(a.contains(shift));
    CHECK(a.elements() == b.elements());
    // shifting by a non-member moves the coset
    bool moved = false;
    for (long c = 0; c < ts.count() && ! moved; ++c)
        if (! a.contains(c)) {
            moved = true;
            CHECK_FALSE(a.same_coset(Coset(ker, c)));
        }
    CHECK(moved);
}
