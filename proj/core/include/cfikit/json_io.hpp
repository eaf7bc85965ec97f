#ifndef CFIKIT_JSON_IO_HPP
#define CFIKIT_JSON_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include <cfikit/linsys.hpp>
#include <cfikit/pc.hpp>
#include <cfikit/witness.hpp>
#include <cfikit/wl.hpp>

// Serialization boundary.  Group elements appear as residue vectors, never
// as codes; colors appear as palette names.  All emitters are deterministic
// (stable field order, no timestamps) so byte-identical reruns stay
// byte-identical.

namespace cfikit {

std::string read_text_file(const std::string & path);
void write_text_file(const std::string & path, const std::string & content);

// FNV-1a over the bytes, zero-padded hex
std::string content_hash(const std::string & text);

// {"moduli":[2,3]}
std::string group_to_json(const FiniteAbelianGroup & g);
FiniteAbelianGroup group_from_json(const std::string & text);

// {"group":…,"variables":[…],"constraints":[{"scope":[…],"coset":{"arity":…,
//  "generators":[[[r…]…]…],"shift":[[r…]…]}}]}
std::string group_csp_to_json(const GroupCsp & c);
GroupCsp group_csp_from_json(const std::string & text);

// adds "arb":{"scope":[…],"tuples":[[[r…]…]…]}
std::string extended_csp_to_json(const ExtendedGroupCsp & c);
ExtendedGroupCsp extended_csp_from_json(const std::string & text);

// explicit relations: "domain":[[r…]…] and "tuples" in place of "coset"
std::string explicit_csp_to_json(const ExplicitCsp & c);
ExplicitCsp explicit_csp_from_json(const std::string & text);

// {"vertices":[{"id":…,"color":…,"tag":…}],"edges":[{"u":…,"v":…,"color":…}]}
std::string colored_graph_to_json(const ColoredGraph & g);
ColoredGraph colored_graph_from_json(const std::string & text);

// {"left":…,"right":…}; gadget layouts are construction-time data and are
// not round-tripped
std::string graph_pair_to_json(const GraphPair & pair);
GraphPair graph_pair_from_json(const std::string & text);

// one "u v" line per edge, ids 0-based; vertex count is max id + 1
std::string ugraph_to_edge_list(const UGraph & g);
UGraph ugraph_from_edge_list(const std::string & text);

// Plain export: "p edge N M" then "e u v" lines, 1-based.  Colors survive as
// structure: every edge is subdivided, and pendant paths are attached whose
// lengths encode the colors (vertex tail lengths and edge tail lengths are
// kept in disjoint ranges).
std::string dimacs_plain(const ColoredGraph & g);

// header "vars N eqs M", rows "eq <rhs> <k> <idx> <coeff> …"
std::string system_to_text(const MaterializedSystem & sys);
MaterializedSystem system_from_text(const std::string & text);

// {"nvars":…,"keys":[[[l,r]…]…],"labels":[…]} aligned with var indices
std::string varindex_to_json(const MaterializedSystem & sys);

// sparse vector {"<index>":"num/den"}; absent indices are zero
std::string solution_to_json(const std::vector<std::pair<long, Rat>> & entries);
std::vector<std::pair<long, Rat>> solution_from_json(const std::string & text);

// "# vars N" then one axiom per line ("2*x0*x1 + -1"); blank lines ignored
std::string poly_system_to_text(const PolySystem & s);
PolySystem poly_system_from_text(const std::string & text);

std::string wl_report_to_json(const WlReport & rep);

std::string verify_result_to_json(const VerifyResult & r);

// with_timing controls stage_seconds (off for byte-stable reports)
std::string theorem41_report_to_json(const Theorem41Report & rep,
                                     const std::string & instance_hash,
                                     bool with_timing = false);

std::string expander_profile_to_json(const ExpanderProfile & p);
std::string core_result_to_json(const CoreResult & r);

} // namespace cfikit

#endif
