#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "c2lab/errors.hpp"
#include "c2lab/fp.hpp"

namespace c2lab {

// Multigraph on vertices 0..vertex_count-1. Edges are ordered (tail, head)
// pairs; parallel edges are allowed, self-loops are not. Edge identity is the
// index into `edges`, and every operation that rewrites the edge list reports
// where surviving edges came from.
struct LabeledGraph {
  uint32_t vertex_count = 0;
  std::vector<std::pair<uint32_t, uint32_t>> edges;

  bool operator==(const LabeledGraph&) const = default;
};

// Throws PreconditionError unless endpoints are in range and distinct.
void check_graph(const LabeledGraph& g);

// Text form:
//   # optional comments and blank lines
//   v <vertex_count>
//   e <tail> <head>     (one line per edge, in edge order)
// parse_graph accepts comments/blanks; emit_graph writes the canonical
// comment-free form, so parse(emit(g)) == g exactly.
LabeledGraph parse_graph(const std::string& text);
std::string emit_graph(const LabeledGraph& g);
LabeledGraph load_graph_file(const std::string& path);

// Orientation- and edge-order-independent text form: edges normalized to
// (min,max) and sorted. Two labeled graphs get equal canonical text iff they
// have the same vertex count and the same edge multiset.
std::string canonical_text(const LabeledGraph& g);
uint64_t fnv1a64(const std::string& text);
std::string graph_hash(const LabeledGraph& g);  // fnv1a64 of canonical text, 16 hex digits

uint32_t degree(const LabeledGraph& g, uint32_t v);
bool is_connected(const LabeledGraph& g);
bool is_k_regular(const LabeledGraph& g, uint32_t k);
bool is_simple(const LabeledGraph& g);

// Signed vertex-edge incidence over F_p with one vertex row dropped
// (default: the highest-numbered vertex). Entry (v, e) is +1 when v is the
// head of e and -1 when v is the tail.
FpMatrix signed_incidence(const LabeledGraph& g, const PrimeField& fp,
                          uint32_t dropped_vertex);
FpMatrix signed_incidence(const LabeledGraph& g, const PrimeField& fp);

struct DeletionResult {
  LabeledGraph graph;
  std::vector<uint32_t> kept_edges;  // new edge index -> original edge index
};
DeletionResult delete_edges(const LabeledGraph& g, const std::vector<uint32_t>& edge_ids);

struct ContractionResult {
  LabeledGraph graph;
  std::vector<uint32_t> vertex_map;  // original vertex -> new vertex
  std::vector<uint32_t> kept_edges;  // new edge index -> original edge index
  std::vector<uint32_t> loop_edges;  // originals that collapsed to self-loops (dropped)
};
// Contracts the listed edges. Throws CycleCollapseError if they contain a
// cycle. Surviving vertices are renumbered densely preserving the order of
// minimum original representatives.
ContractionResult contract_edges(const LabeledGraph& g, const std::vector<uint32_t>& edge_ids);

struct SubgraphResult {
  LabeledGraph graph;
  std::vector<uint32_t> vertex_ids;  // new vertex -> original vertex
  std::vector<uint32_t> kept_edges;  // new edge index -> original edge index
};
SubgraphResult induced_subgraph(const LabeledGraph& g, const std::vector<uint32_t>& vertices);

// Enumerates spanning forests whose trees realize the given vertex blocks:
// the forest has exactly blocks.size() trees, block i is contained in tree i,
// and no tree meets two blocks. Empty blocks are allowed and stand for trees
// with no constrained vertices. Sets of chosen edge ids are visited in
// lexicographic order; the callback returns false to stop early. Returns the
// number of forests visited.
uint64_t for_each_spanning_forest(const LabeledGraph& g,
                                  const std::vector<std::vector<uint32_t>>& blocks,
                                  const std::function<bool(const std::vector<uint32_t>&)>& cb);
uint64_t for_each_spanning_tree(const LabeledGraph& g,
                                const std::function<bool(const std::vector<uint32_t>&)>& cb);
uint64_t count_spanning_trees(const LabeledGraph& g);

// True when vertex_map is a bijection carrying the edge multiset of a onto
// the edge multiset of b (orientation ignored).
bool is_graph_isomorphism(const LabeledGraph& a, const LabeledGraph& b,
                          const std::vector<uint32_t>& vertex_map);

}  // namespace c2lab
