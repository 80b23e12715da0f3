#pragma once

#include <cstdint>
#include <vector>

#include "c2lab/fp.hpp"
#include "c2lab/graph.hpp"

namespace c2lab {

// Minor specification for the graph-matrix determinant polynomials: rows of
// the edge block indexed by I and columns indexed by J are removed (|I|=|J|),
// and the variables of the edges in K are set to zero. I and J may overlap;
// K must be disjoint from both. All three lists must be strictly increasing.
struct DodgsonSpec {
  std::vector<uint32_t> I, J, K;
};

void check_dodgson_spec(const LabeledGraph& g, const DodgsonSpec& spec);

// Degree of the minor polynomial when it is not identically zero:
// |E| - |V| + 1 - |I|.
uint32_t dodgson_degree(const LabeledGraph& g, const DodgsonSpec& spec);

// Evaluates one minor polynomial at field points. The matrix is
//   [ diag(a_e)  B^T ]
//   [ -B         0   ]
// with B the signed incidence matrix missing one vertex row, minus the rows
// and columns named by the spec. Points are indexed by edge id; entries for
// edges in I, J, or K are ignored.
class PolyEvaluator {
 public:
  PolyEvaluator(const LabeledGraph& g, const DodgsonSpec& spec, const PrimeField& fp);

  uint32_t eval(const std::vector<uint32_t>& point);
  // Edges whose variables occur in the polynomial (complement of I, J, K).
  const std::vector<uint32_t>& active_edges() const { return active_edges_; }

 private:
  FpMatrix base_;
  std::vector<std::pair<std::pair<size_t, size_t>, uint32_t>> slots_;  // ((row,col), edge)
  std::vector<uint32_t> active_edges_;
  uint32_t edge_count_;
  PrimeField fp_;
};

uint32_t eval_kirchhoff(const LabeledGraph& g, const std::vector<uint32_t>& point,
                        const PrimeField& fp);
uint32_t eval_dodgson(const LabeledGraph& g, const DodgsonSpec& spec,
                      const std::vector<uint32_t>& point, const PrimeField& fp);

// A multiset of vertex blocks prescribing which tree of a spanning forest
// each constrained vertex lands in. Empty blocks are allowed: each stands for
// a tree free of constrained vertices. Canonical form: every block sorted,
// blocks ordered lexicographically (so empty blocks come first).
struct PartitionState {
  std::vector<std::vector<uint32_t>> parts;

  void canonicalize();
  // Index of the part containing v, or SIZE_MAX.
  size_t find_part(uint32_t v) const;
  size_t free_parts() const;

  auto operator<=>(const PartitionState&) const = default;
};

// A graph whose vertices and edges can be switched off without renumbering,
// so edge and vertex names stay stable across a sequence of assignments.
struct ForestHost {
  LabeledGraph graph;
  std::vector<char> vertex_active;
  std::vector<char> edge_active;

  static ForestHost all_active(const LabeledGraph& g);
  uint32_t active_degree(uint32_t v) const;
};

struct ForestTerm {
  PartitionState partition;
  uint32_t coeff = 1;

  auto operator<=>(const ForestTerm&) const = default;
};

// A coefficient combination of forest-partition polynomials over one host.
struct ForestPolyExpr {
  ForestHost host;
  std::vector<ForestTerm> terms;
};

// Sorts terms, merges equal partitions mod p, and drops zero terms.
void canonical_combine(std::vector<ForestTerm>& terms, const PrimeField& fp);

// Mod-2 rewrite of a minor polynomial as a sum of forest-partition
// polynomials on the host graph with the spec's edges switched off. Terms
// whose partition no spanning forest can realize are dropped.
ForestPolyExpr dodgson_to_forest_mod2(const LabeledGraph& g, const DodgsonSpec& spec);

uint32_t eval_forest_poly(const ForestPolyExpr& expr, const std::vector<uint32_t>& point,
                          const PrimeField& fp);

// Partitions replacing st when the active edge (u, v) is forced into the
// forest: the endpoint trees merge, so st's parts split accordingly. The
// result may contain repeats; callers combine coefficients. An empty result
// means the term dies.
std::vector<PartitionState> forest_assign_in(const PartitionState& st, uint32_t u, uint32_t v);

// Removes a vertex that lost its last active edge. Its tree is complete, so
// it must be a singleton part (dropped) or absorb a free part; otherwise the
// term dies and false is returned.
bool remove_isolated_vertex(PartitionState& st, uint32_t v);

// One assignment step: edge e leaves the host; when in_structure, each term's
// partition is transformed by forest_assign_in. Endpoints that become
// isolated are cleaned up by remove_isolated_vertex.
ForestPolyExpr assign_edge(const ForestPolyExpr& expr, uint32_t edge_id, bool in_structure,
                           const PrimeField& fp);

}  // namespace c2lab
