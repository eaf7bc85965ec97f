#ifndef CFIKIT_CFI_HPP
#define CFIKIT_CFI_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <cfikit/csp.hpp>

namespace cfikit {

// Vertex- and edge-colored graph.  Colors are indices into name palettes;
// constructions that must agree on colors (the two sides of a pair) share
// palette names, and comparisons align palettes by name.
class ColoredGraph {
public:
    int n() const { return static_cast<int>(color_.size()); }
    int m() const { return static_cast<int>(edges_.size()); }

    int add_vertex(int color, std::string tag = {});
    void add_edge(int u, int v, int edge_color = -1); // -1 = uncolored
    int intern_color(const std::string & name);
    int intern_edge_color(const std::string & name);

    int color(int v) const { return color_[v]; }
    const std::string & tag(int v) const { return tag_[v]; }
    const std::vector<std::pair<int, int>> & edges() const { return edges_; }
    int edge_color(int e) const { return edge_color_[e]; }
    const std::vector<std::string> & palette() const { return palette_; }
    const std::vector<std::string> & edge_palette() const { return edge_palette_; }
    const std::vector<std::pair<int, int>> & neighbors(int v) const { return adj_[v]; }

    // -2 not adjacent, -1 adjacent uncolored, >=0 edge color id
    int edge_code(int u, int v) const;

    // degree counted per edge color (signature helper)
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }

    // remaps colors so that palette names match ref's ids (appending unknown
    // names); required before comparing color ids across graphs
    void align_palettes_with(const ColoredGraph & ref);

private:
    std::vector<int> color_;
    std::vector<std::string> tag_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<int> edge_color_;
    std::vector<std::vector<std::pair<int, int>>> adj_; // (neighbor, edge color)
    std::vector<std::string> palette_, edge_palette_;
};

// Where each vertex of a gadget graph came from.
struct CfiLayout {
    GroupCsp csp;
    std::vector<int> var_base;                 // variable id -> first vertex of its block
    std::vector<int> con_base;                 // constraint id -> first vertex of its block
    std::vector<std::vector<long>> con_tuples; // constraint id -> sorted relation codes
    struct VInfo {
        std::int8_t kind; // 0 variable gadget, 1 constraint gadget
        int owner;
        long code; // element code (variables) or tuple code (constraints)
    };
    std::vector<VInfo> vinfo;

    int var_vertex(int x, int element_code) const { return var_base[x] + element_code; }
    int con_vertex(int c, long tuple_code) const;
};

struct CfiPairLayout {
    CfiLayout left, right;
};

struct OrLayout;

struct GraphPair {
    ColoredGraph left, right;
    std::shared_ptr<CfiPairLayout> cfi; // set by cfi_pair
    std::shared_ptr<OrLayout> orp;      // set by or_pair / extended_pair
};

// Layout of a disjunction pair: each side is a disjoint union of sequence
// graphs over the same list of input pairs, one block per position.
struct OrLayout {
    std::vector<GraphPair> inputs;
    struct Component {
        std::vector<int> selection; // which side of input i this component carries
        std::vector<int> block_offset;
        std::vector<int> connector; // connector vertex ids, one per position
        int offset = 0, size = 0;
    };
    std::vector<Component> side[2];
    struct VLoc {
        int comp = -1;
        int pos = -1;  // block position, or -1 for a connector
        int base = -1; // vertex id within the input side (or connector position)
    };
    std::vector<VLoc> vloc[2];
    std::vector<long> tuple_per_position; // set by extended_pair: the pinned tuple
};

// gadget graph of a group CSP: one block of |Gamma| vertices per variable,
// one block per constraint with a vertex per relation member, membership
// edges colored by scope position
ColoredGraph cfi_graph(const GroupCsp & c, CfiLayout * layout = nullptr,
                       const std::string & palette_prefix = {});

// left = gadget graph of c, right = gadget graph of the homogenized instance,
// built over one palette
GraphPair cfi_pair(const GroupCsp & c);

// fresh connectors v_1..v_k, v_i adjacent to every vertex of block i-1 and i
// (v_1 only to block 1); inputs are relabelled into one vertex space
ColoredGraph sequence_graph(const std::vector<ColoredGraph> & blocks,
                            const std::string & connector_prefix = "S");

// Side j = disjoint union of sequence graphs over all selections with parity
// j; input palettes are kept position-distinct, connector colors shared.
GraphPair or_pair(const std::vector<GraphPair> & pairs);

// or_pair over the fixings of the arbitrary constraint, in tuple order
GraphPair extended_pair(const ExtendedGroupCsp & c);
GraphPair extended_pair(const ExtendedTseitin & c);

// partial map between two graphs as a sorted (left, right) pair list
using PartialMap = std::vector<std::pair<int, int>>;

bool is_partial_isomorphism(const ColoredGraph & g, const ColoredGraph & h, const PartialMap & pi);

// full-mapping check: bijective, color preserving, edge and edge-color exact
bool verify_isomorphism(const ColoredGraph & g, const ColoredGraph & h,
                        const std::vector<int> & mapping, std::string * why = nullptr);

// mapping induced by a CSP solution on a cfi_pair; verified before returning
std::vector<int> iso_from_solution(const GraphPair & pair, const std::vector<int> & solution);

// solution recovered from an isomorphism on a cfi_pair; verified too
std::vector<int> solution_from_iso(const GraphPair & pair, const std::vector<int> & mapping);

// Exact isomorphism oracle: colour refinement interleaved with backtracking
// individualization.  Exhaustive, so a nullopt answer is a proof of
// non-isomorphism; node_budget caps the number of search nodes.
std::optional<std::vector<int>> brute_force_isomorphic(const ColoredGraph & g,
                                                       const ColoredGraph & h,
                                                       std::uint64_t node_budget = 50'000'000);

} // namespace cfikit

#endif
