#ifndef CFIKIT_GRAPHCORE_HPP
#define CFIKIT_GRAPHCORE_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <cfikit/group.hpp>

namespace cfikit {

// Simple undirected graph.  Edges are stored as (u,v) with u<v in
// lexicographic order; the position in that list is the canonical edge id
// used everywhere (masks, assignments, constraint scopes).
class UGraph {
public:
    UGraph() = default;
    UGraph(int n, std::vector<std::pair<int, int>> edge_list);

    static UGraph complete(int n);
    static UGraph cycle(int n);

    int n() const { return n_; }
    int m() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>> & edges() const { return edges_; }
    std::pair<int, int> edge(int e) const { return edges_[e]; }
    int edge_index(int u, int v) const; // -1 if absent
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    // neighbors as (other endpoint, edge id)
    const std::vector<std::pair<int, int>> & neighbors(int v) const { return adj_[v]; }

    bool operator==(const UGraph & o) const { return n_ == o.n_ && edges_ == o.edges_; }

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
};

// Orientation of a UGraph: per edge a tail/head choice.  Edge ids and the
// underlying skeleton are shared with the undirected view.
class DiGraph {
public:
    DiGraph() = default;
    DiGraph(UGraph skeleton, std::vector<bool> head_is_smaller);

    // orients every edge from the smaller to the larger endpoint
    static DiGraph orient_by_vertex_order(UGraph skeleton);

    const UGraph & skeleton() const { return skeleton_; }
    int n() const { return skeleton_.n(); }
    int m() const { return skeleton_.m(); }
    int tail(int e) const { return flip_[e] ? skeleton_.edge(e).second : skeleton_.edge(e).first; }
    int head(int e) const { return flip_[e] ? skeleton_.edge(e).first : skeleton_.edge(e).second; }
    // +1 if e leaves v, -1 if e enters v
    int sign_at(int e, int v) const { return tail(e) == v ? +1 : -1; }

private:
    UGraph skeleton_;
    std::vector<bool> flip_;
};

using EdgeMask = std::uint64_t;

EdgeMask full_edge_mask(const UGraph & g);
std::vector<int> mask_to_edges(EdgeMask mask);
EdgeMask edges_to_mask(const std::vector<int> & edge_ids);

bool is_connected(const UGraph & g);
bool is_two_connected(const UGraph & g); // |V|>2, connected, no cut vertex

// bridges of the spanning subgraph (V, active)
EdgeMask bridges_in(const UGraph & g, EdgeMask active);

// connected components of (V, E \ removed); returns component id per vertex
std::vector<int> components_without(const UGraph & g, EdgeMask removed, int * count = nullptr);

// Smallest closed superset of X: X is closed when every remaining edge lies
// on a cycle of the remaining subgraph, so bridges of E\X are forced in.
EdgeMask closure(const UGraph & g, EdgeMask x);

// greedy rank in the closure matroid: |{x in X taken in id order, x not in
// cl(taken)}|; order independence is a tested matroid property
int rank(const UGraph & g, EdgeMask x);

struct CoreResult {
    EdgeMask xhat = 0;           // superset of X with E\xhat empty or 2-connected
    std::vector<int> block;      // vertices of the kept block (empty if none)
    bool core_empty = true;
    bool certified = false;      // 2-connectivity of the kept block re-checked
};
// Deletes X, decomposes into blocks, keeps a largest block (most edges, tie:
// smallest minimum vertex id) with at least 3 vertices.
CoreResult two_connected_core(const UGraph & g, EdgeMask x);

struct ExpansionResult {
    long num = 0, den = 1;        // h(G) as an exact fraction
    std::uint64_t witness = 0;    // vertex mask attaining it
};
// exact edge expansion min |boundary(W)|/|W| over 0<|W|<=n/2
ExpansionResult expansion_exact(const UGraph & g, int exact_budget_n = 20);

struct SpectralEstimate {
    double lambda2_lo = 0.0, lambda2_hi = 0.0; // residual-bound interval
    double cheeger_lower = 0.0;                // (d - lambda2_hi)/2, diagnostic only
    int iterations = 0;
};
// power iteration on A + d*I after deflating the regular top eigenvector;
// only meaningful for connected d-regular graphs, and only a diagnostic
SpectralEstimate spectral_gap_estimate(const UGraph & g, int iterations = 2000);

UGraph random_regular_2connected(int n, int d, std::uint64_t seed, int max_tries = 20000);

// minimum |cut| over vertex sets with both sides >= min_side (exhaustive)
struct CutResult { int size = -1; std::uint64_t witness = 0; };
CutResult min_cut_with_sides(const UGraph & g, int min_side);

// Partial assignment of group values to edges; -1 marks unassigned.
struct EdgeAssignment {
    std::vector<int> value;

    explicit EdgeAssignment(int m = 0) : value(m, -1) {}
    bool assigned(int e) const { return value[e] >= 0; }
    EdgeMask domain_mask() const {
        EdgeMask m = 0;
        for (size_t e = 0; e < value.size(); ++e)
            if (value[e] >= 0) m |= EdgeMask{1} << e;
        return m;
    }
    int domain_size() const {
        int c = 0;
        for (int v : value) c += (v >= 0);
        return c;
    }
};

// per-vertex group charges
struct SigmaCharge {
    std::vector<int> value; // element codes

    int total(const FiniteAbelianGroup & g) const {
        int t = 0;
        for (int v : value) t = g.add(t, v);
        return t;
    }
};

// Flow-style consistency: for every component W of G - dom(psi) with
// |W| <= k, the aggregated charge equation over the boundary of W holds.
bool is_k_consistent(const DiGraph & h, const FiniteAbelianGroup & group,
                     const SigmaCharge & sigma, const EdgeAssignment & psi, int k);

inline int robust_k(int n) { return n / 3; }

struct ExpanderProfile {
    int n = 0, m = 0;
    long h_num = 0, h_den = 1;
    long c_num = 1, c_den = 1;   // max |Xhat|/|X| over singleton and pair samples
    int ell_suggest = 0;         // floor((m-1)/(3c))
};
ExpanderProfile expander_profile(const UGraph & g, int exact_budget_n = 20);

// Precomputed per-edge-subset data used by witness evaluation; only built
// for small graphs (m <= 20).  For each mask X over edges: rank(X) and the
// components of G-X of size <= n/3 with their boundary (edge id, sign) lists.
class GraphMaskTables {
public:
    GraphMaskTables(const DiGraph & h, int small_limit);

    struct SmallComp {
        std::uint64_t vertices = 0;                 // vertex mask
        std::vector<std::pair<int, int>> boundary;  // (edge id, sign wrt the component)
    };

    int rank_of(EdgeMask x) const { return rank_[x]; }
    const std::vector<SmallComp> & small_components(EdgeMask x) const { return small_[x]; }
    const DiGraph & digraph() const { return h_; }
    int small_limit() const { return small_limit_; }

private:
    DiGraph h_;
    int small_limit_;
    std::vector<std::int8_t> rank_;
    std::vector<std::vector<SmallComp>> small_;
};

} // namespace cfikit

#endif
