#include "c2lab/families.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "c2lab/errors.hpp"

namespace c2lab {

LabeledGraph gen_toroidal_grid(uint32_t k, uint32_t l, uint32_t m) {
  if (k < 3 || m < 3) throw PreconditionError("torus grid needs k >= 3 and m >= 3");
  LabeledGraph g{k * m, {}};
  auto id = [k](uint32_t a, uint32_t b) { return a + b * k; };
  for (uint32_t b = 0; b < m; ++b) {
    for (uint32_t a = 0; a < k; ++a) {
      g.edges.push_back({id(a, b), id((a + 1) % k, b)});
      if (b + 1 < m) {
        g.edges.push_back({id(a, b), id(a, b + 1)});
      } else {
        // (a, m) and (a - l, 0) are the same lattice point modulo (l, m)
        g.edges.push_back({id(a, b), id((a + k - l % k) % k, 0)});
      }
    }
  }
  check_graph(g);
  return g;
}

LabeledGraph gen_circulant(uint32_t n, const std::vector<uint32_t>& gaps) {
  if (n < 3) throw PreconditionError("circulant graph needs n >= 3");
  for (uint32_t g : gaps)
    if (g == 0 || g >= n) throw PreconditionError("circulant gap must satisfy 0 < gap < n");
  LabeledGraph g{n, {}};
  std::vector<std::vector<char>> seen(n, std::vector<char>(n, 0));
  for (uint32_t gap : gaps) {
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t j = (i + gap) % n;
      if (i == j) continue;
      uint32_t lo = std::min(i, j), hi = std::max(i, j);
      if (seen[lo][hi]) continue;
      seen[lo][hi] = 1;
      g.edges.push_back({i, j});
    }
  }
  check_graph(g);
  return g;
}

namespace {

// Verifies that map carries a's edge multiset onto b's, then returns it.
std::vector<uint32_t> verified(const LabeledGraph& a, const LabeledGraph& b,
                               std::vector<uint32_t> map, const char* what) {
  if (!is_graph_isomorphism(a, b, map))
    throw ValidationError(std::string(what) + " labeling failed the edge-preservation check");
  return map;
}

}  // namespace

std::vector<uint32_t> iso_skew_labeling(uint32_t k, uint32_t l, uint32_t m) {
  if (l == 0) throw PreconditionError("the twisted labeling needs l > 0");
  if (std::gcd(m, l) != 1)
    throw PreconditionError("the twisted labeling needs gcd(m, l) = 1");
  const uint32_t n = k * m;
  std::vector<uint32_t> map(n);
  for (uint32_t b = 0; b < m; ++b)
    for (uint32_t a = 0; a < k; ++a)
      map[a + b * k] = (a * m + (m - b - 1) * l) % n;
  return verified(gen_toroidal_grid(k, l, m), gen_circulant(n, {l % n, m}), std::move(map),
                  "twisted grid");
}

std::vector<uint32_t> iso_nonskew_labeling(uint32_t k, uint32_t m) {
  if (std::gcd(k, m) != 1)
    throw PreconditionError("the untwisted labeling needs gcd(k, m) = 1");
  const uint32_t n = k * m;
  std::vector<uint32_t> map(n);
  for (uint32_t b = 0; b < m; ++b)
    for (uint32_t a = 0; a < k; ++a)
      map[a + b * k] = (a * m + b * k) % n;
  return verified(gen_toroidal_grid(k, 0, m), gen_circulant(n, {k, m}), std::move(map),
                  "untwisted grid");
}

LabeledGraph gen_x_ladder(uint32_t size, bool capped) {
  if (size < 8) throw PreconditionError("x-ladder needs at least 8 vertices");
  if (!capped && size % 2 != 0)
    throw PreconditionError("symmetric x-ladder needs an even vertex count");
  LabeledGraph g{size, {}};
  const uint32_t s = size / 2;
  auto cross = [&g](uint32_t i, uint32_t j) {
    for (uint32_t u : {2 * i, 2 * i + 1})
      for (uint32_t w : {2 * j, 2 * j + 1}) g.edges.push_back({u, w});
  };
  if (!capped) {
    for (uint32_t i = 0; i < s; ++i) cross(i, (i + 1) % s);
    check_graph(g);
    return g;
  }
  for (uint32_t i = 0; i + 1 < s; ++i) cross(i, i + 1);
  g.edges.push_back({0, 1});
  g.edges.push_back({2 * s - 2, 2 * s - 1});
  if (size % 2 == 0) {
    g.edges.push_back({0, 2 * s - 1});
    g.edges.push_back({1, 2 * s - 2});
  } else {
    const uint32_t apex = size - 1;
    for (uint32_t u : {0u, 1u, 2 * s - 2, 2 * s - 1}) g.edges.push_back({u, apex});
  }
  check_graph(g);
  return g;
}

uint32_t x_ladder_special_vertex(uint32_t size, bool capped) {
  if (size < 8) throw PreconditionError("x-ladder needs at least 8 vertices");
  return capped ? 2 : 0;
}

LabeledGraph decomplete(const LabeledGraph& g, uint32_t v) {
  check_graph(g);
  if (v >= g.vertex_count) throw PreconditionError("decompletion vertex out of range");
  if (!is_k_regular(g, 4)) throw PreconditionError("decompletion needs a 4-regular graph");
  if (!is_connected(g)) throw PreconditionError("decompletion needs a connected graph");
  std::vector<uint32_t> keep;
  for (uint32_t u = 0; u < g.vertex_count; ++u)
    if (u != v) keep.push_back(u);
  LabeledGraph out = induced_subgraph(g, keep).graph;
  if (2 + out.edges.size() != 2 * size_t{out.vertex_count})
    throw ValidationError("decompletion must satisfy 2 + |E| = 2|V|");
  return out;
}

}  // namespace c2lab
