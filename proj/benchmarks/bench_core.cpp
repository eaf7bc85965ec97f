// Microbenchmarks for the hot paths: witness oracle queries, mask-table
// construction, matroid closure, system solving and the isomorphism search.
// Fixtures are built outside the timed loops; all instances are seeded.

#include <memory>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <cfikit/cfi.hpp>
#include <cfikit/csp.hpp>
#include <cfikit/graphcore.hpp>
#include <cfikit/linsys.hpp>
#include <cfikit/witness.hpp>
#include <cfikit/wl.hpp>

using namespace cfikit;

namespace {

SigmaCharge charge(int n, int v0_code) {
    SigmaCharge s;
    s.value.assign(static_cast<std::size_t>(n), 0);
    if (n > 0) s.value[0] = v0_code;
    return s;
}

TseitinCsp cubic_instance(int n, std::uint64_t seed, int v0_code) {
    UGraph g = random_regular_2connected(n, 3, seed);
    return tseitin(DiGraph::orient_by_vertex_order(g), FiniteAbelianGroup({2}),
                   charge(n, v0_code));
}

std::vector<MapKey> random_oracle_keys(const TseitinCsp & t, int level, std::uint64_t seed,
                                       int count) {
    std::mt19937_64 rng(seed);
    const int m = static_cast<int>(t.csp.variables.size());
    const int order = static_cast<int>(t.csp.group.order());
    std::vector<MapKey> keys;
    for (int i = 0; i < count; ++i) {
        MapKey k;
        int sz = 1 + static_cast<int>(rng() % static_cast<unsigned>(level));
        for (int j = 0; j < sz; ++j)
            k.push_back({static_cast<int>(rng() % static_cast<unsigned>(m)),
                         static_cast<int>(rng() % static_cast<unsigned>(order))});
        keys.push_back(canonical_key(k));
    }
    return keys;
}

void BM_charge_oracle_queries(benchmark::State & state) {
    const int level = static_cast<int>(state.range(0));
    TseitinCsp t = cubic_instance(10, 7, 1);
    PsiOracle oracle = psi(t, level);
    std::vector<MapKey> keys = random_oracle_keys(t, level, 11, 512);
    for (auto _ : state)
        for (const MapKey & k : keys) benchmark::DoNotOptimize(oracle.value(k));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(keys.size()));
}
BENCHMARK(BM_charge_oracle_queries)->Arg(1)->Arg(2)->Arg(3);

void BM_lifted_oracle_queries(benchmark::State & state) {
    TseitinCsp t = cubic_instance(8, 3, 1);
    GraphPair pair = cfi_pair(t.csp);
    auto phi = std::make_shared<PsiOracle>(psi(t, 3));
    auto lifted = lift_csp_to_iso(phi, 3, pair, 1);
    MaterializedSystem ms = LisoSystem(pair.left, pair.right, 1).materialize(kDefaultVarBudget);
    for (auto _ : state)
        for (const MapKey & k : ms.vars) benchmark::DoNotOptimize(lifted->value(k));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(ms.vars.size()));
}
BENCHMARK(BM_lifted_oracle_queries);

void BM_mask_tables_build(benchmark::State & state) {
    UGraph g = random_regular_2connected(static_cast<int>(state.range(0)), 3, 5);
    DiGraph h = DiGraph::orient_by_vertex_order(g);
    for (auto _ : state) {
        GraphMaskTables tables(h, g.n() / 3);
        benchmark::DoNotOptimize(tables.rank_of(full_edge_mask(g)));
    }
}
BENCHMARK(BM_mask_tables_build)->Arg(8)->Arg(10)->Arg(12);

void BM_matroid_closure(benchmark::State & state) {
    UGraph g = random_regular_2connected(12, 3, 9);
    std::mt19937_64 rng(13);
    std::vector<EdgeMask> masks;
    for (int i = 0; i < 256; ++i)
        masks.push_back(rng() & ((EdgeMask{1} << g.m()) - 1));
    for (auto _ : state)
        for (EdgeMask x : masks) benchmark::DoNotOptimize(closure(g, x));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(masks.size()));
}
BENCHMARK(BM_matroid_closure);

void BM_mod2_solve_gadget_system(benchmark::State & state) {
    TseitinCsp t = cubic_instance(8, 3, 1);
    GraphPair pair = cfi_pair(t.csp);
    MaterializedSystem ms = LisoSystem(pair.left, pair.right, 1).materialize(kDefaultVarBudget);
    for (auto _ : state) benchmark::DoNotOptimize(solve_modp(ms, 2).feasible);
}
BENCHMARK(BM_mod2_solve_gadget_system);

void BM_gadget_iso_search(benchmark::State & state) {
    TseitinCsp t = cubic_instance(static_cast<int>(state.range(0)), 21, 0);
    GraphPair pair = cfi_pair(t.csp); // satisfiable charge, sides isomorphic
    for (auto _ : state)
        benchmark::DoNotOptimize(brute_force_isomorphic(pair.left, pair.right).has_value());
}
BENCHMARK(BM_gadget_iso_search)->Arg(6)->Arg(8);

void BM_wl2_refinement(benchmark::State & state) {
    TseitinCsp t = cubic_instance(10, 7, 1);
    GraphPair pair = cfi_pair(t.csp);
    for (auto _ : state)
        benchmark::DoNotOptimize(wl_run(pair.left, pair.right, 2).distinguished);
}
BENCHMARK(BM_wl2_refinement);

void BM_two_prime_combine(benchmark::State & state) {
    std::mt19937_64 rng(31);
    std::map<MapKey, Rat> x, y;
    for (int i = 0; i < 256; ++i) {
        MapKey k{{i, 0}};
        x[k] = Rat(1, 1 << (rng() % 4));
        y[k] = Rat(1, static_cast<long>(int_pow(Int(3), rng() % 4).get_si()));
    }
    for (auto _ : state) benchmark::DoNotOptimize(combine_pq(x, 2, y, 3).size());
}
BENCHMARK(BM_two_prime_combine);

} // namespace

BENCHMARK_MAIN();
