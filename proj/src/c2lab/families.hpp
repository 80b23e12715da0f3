#pragma once

#include <cstdint>
#include <vector>

#include "c2lab/graph.hpp"

namespace c2lab {

// Twisted torus grid on k columns and m rows: lattice points modulo the
// vectors (k, 0) and (l, m). Vertex (a, b) has id a + b*k. Per vertex in id
// order, the edge to (a+1 mod k, b) comes first, then the upward edge, which
// from the top row wraps to column (a - l) mod k.
LabeledGraph gen_toroidal_grid(uint32_t k, uint32_t l, uint32_t m);

// Circulant graph: vertices 0..n-1, an edge {i, i+g mod n} for every gap g.
// Edges are ordered by gap then by i, each unordered pair emitted once.
LabeledGraph gen_circulant(uint32_t n, const std::vector<uint32_t>& gaps);

// Vertex relabeling carrying gen_toroidal_grid(k, l, m) onto
// gen_circulant(k*m, {l, m}): (a, b) -> a*m + (m-b-1)*l mod km. Requires
// l > 0 and gcd(m, l) = 1; the returned map is verified edge-preserving.
std::vector<uint32_t> iso_skew_labeling(uint32_t k, uint32_t l, uint32_t m);

// Untwisted counterpart onto gen_circulant(k*m, {k, m}): (a, b) -> a*m + b*k
// mod km. Requires gcd(k, m) = 1; verified edge-preserving.
std::vector<uint32_t> iso_nonskew_labeling(uint32_t k, uint32_t m);

// Ladder of crossed squares on `size` vertices (size >= 8), 4-regular and
// simple. Vertices 2i and 2i+1 form pair i; consecutive pairs are joined by
// the four crossing edges {2i,2i+1} x {2i+2,2i+3} and never by parallel ones.
//
// capped: the outer pairs carry rungs 0-1 and (2s-2)-(2s-1) where s = size/2.
// Even size closes the ladder with the two wrap edges 0-(2s-1) and 1-(2s-2);
// odd size instead adds an apex vertex (id size-1) adjacent to both outer
// pairs. Decompleting at vertex 0 (an outer-rung vertex) yields the
// seven-vertex member's familiar form at size 8.
//
// symmetric (capped=false): even size only; the size/2 pairs close into a
// cycle of crossed squares, pair i joined to pair i+1 mod size/2. At size 8
// this is the complete bipartite graph on 4+4 vertices.
LabeledGraph gen_x_ladder(uint32_t size, bool capped);

// Capped ladders have non-isomorphic decompletions: outer-rung vertices give
// one graph, interior-pair vertices another. This returns the documented
// representative of the non-default class (vertex 2). Symmetric ladders are
// vertex-transitive, so the choice is vacuous and 0 is returned.
uint32_t x_ladder_special_vertex(uint32_t size, bool capped);

// Removes one vertex from a connected 4-regular graph. The result satisfies
// 2 + |E| = 2|V|.
LabeledGraph decomplete(const LabeledGraph& g, uint32_t v);

}  // namespace c2lab
