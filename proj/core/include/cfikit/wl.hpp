#ifndef CFIKIT_WL_HPP
#define CFIKIT_WL_HPP

#include <cstdint>
#include <vector>

#include <cfikit/cfi.hpp>

namespace cfikit {

// one vertex color, uncolored edges
ColoredGraph plain_colored(const UGraph & g);

struct WlResult {
    int k = 1;
    bool distinguished = false; // stable color histograms differ
    int rounds = 0;             // refinement passes executed (the last one
                                // either separated the pair or proved stability)
    int colors = 0;             // joint color count at the end
};

// Color refinement (k=1) or k-dimensional refinement over vertex k-tuples.
// Both graphs share one color dictionary per round, renumbered
// deterministically: first graph in vertex/tuple order, then the second.
// A "distinguished" verdict is a proof of non-isomorphism; "not
// distinguished" proves nothing.  Budget bounds g.n()^k + h.n()^k.
WlResult wl_run(const ColoredGraph & g, const ColoredGraph & h, int k,
                std::uint64_t tuple_budget = 2'000'000);

bool wl_distinguish(const ColoredGraph & g, const ColoredGraph & h, int k,
                    std::uint64_t tuple_budget = 2'000'000);

struct WlReport {
    std::vector<WlResult> per_k;   // k = 1..kmax in order
    int min_distinguishing_k = -1; // -1: not distinguished up to kmax
};

WlReport wl_report(const ColoredGraph & g, const ColoredGraph & h, int kmax,
                   std::uint64_t tuple_budget = 2'000'000);

} // namespace cfikit

#endif
