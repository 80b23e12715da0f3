#include "c2lab/polys.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>

namespace c2lab {

namespace {

constexpr size_t kNoPart = SIZE_MAX;

bool strictly_increasing(const std::vector<uint32_t>& v) {
  return std::adjacent_find(v.begin(), v.end(),
                            [](uint32_t a, uint32_t b) { return a >= b; }) == v.end();
}

std::vector<uint32_t> set_union(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  std::vector<uint32_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<uint32_t> set_difference(const std::vector<uint32_t>& a,
                                     const std::vector<uint32_t>& b) {
  std::vector<uint32_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<uint32_t> set_intersection(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
  std::vector<uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void check_dodgson_spec(const LabeledGraph& g, const DodgsonSpec& spec) {
  for (const auto* list : {&spec.I, &spec.J, &spec.K}) {
    if (!strictly_increasing(*list)) {
      throw PreconditionError("spec edge lists must be strictly increasing");
    }
    for (uint32_t e : *list) {
      if (e >= g.edges.size()) throw PreconditionError("spec edge id out of range");
    }
  }
  if (spec.I.size() != spec.J.size()) {
    throw PreconditionError("row and column edge lists must have equal size");
  }
  if (!set_intersection(spec.K, set_union(spec.I, spec.J)).empty()) {
    throw PreconditionError("zeroed edges must be disjoint from removed rows and columns");
  }
}

uint32_t dodgson_degree(const LabeledGraph& g, const DodgsonSpec& spec) {
  check_graph(g);
  check_dodgson_spec(g, spec);
  int64_t deg = static_cast<int64_t>(g.edges.size()) - g.vertex_count + 1 -
                static_cast<int64_t>(spec.I.size());
  if (deg < 0) throw PreconditionError("minor polynomial has negative formal degree");
  return static_cast<uint32_t>(deg);
}

PolyEvaluator::PolyEvaluator(const LabeledGraph& g, const DodgsonSpec& spec,
                             const PrimeField& fp)
    : edge_count_(static_cast<uint32_t>(g.edges.size())), fp_(fp) {
  check_graph(g);
  check_dodgson_spec(g, spec);
  uint32_t n = g.vertex_count;
  if (n == 0) throw PreconditionError("polynomial of empty graph");
  uint32_t m = edge_count_;
  std::vector<size_t> rowpos(m, kNoPart), colpos(m, kNoPart);
  {
    std::vector<char> in_i(m, 0), in_j(m, 0);
    for (uint32_t e : spec.I) in_i[e] = 1;
    for (uint32_t e : spec.J) in_j[e] = 1;
    size_t r = 0, c = 0;
    for (uint32_t e = 0; e < m; ++e) {
      if (!in_i[e]) rowpos[e] = r++;
      if (!in_j[e]) colpos[e] = c++;
    }
  }
  size_t edge_rows = m - spec.I.size();
  size_t edge_cols = m - spec.J.size();
  size_t total = edge_rows + n - 1;
  base_ = FpMatrix(total, total);
  FpMatrix inc = n > 1 ? signed_incidence(g, fp) : FpMatrix(0, m);
  for (size_t r = 0; r + 1 < n; ++r) {
    for (uint32_t e = 0; e < m; ++e) {
      uint32_t s = inc.at(r, e);
      if (s == 0) continue;
      if (rowpos[e] != kNoPart) base_.at(rowpos[e], edge_cols + r) = s;
      if (colpos[e] != kNoPart) base_.at(edge_rows + r, colpos[e]) = fp.neg(s);
    }
  }
  std::vector<char> in_k(m, 0);
  for (uint32_t e : spec.K) in_k[e] = 1;
  for (uint32_t e = 0; e < m; ++e) {
    if (rowpos[e] == kNoPart || colpos[e] == kNoPart) continue;
    if (in_k[e]) continue;
    slots_.push_back({{rowpos[e], colpos[e]}, e});
    active_edges_.push_back(e);
  }
}

uint32_t PolyEvaluator::eval(const std::vector<uint32_t>& point) {
  if (point.size() != edge_count_) throw PreconditionError("point size must match edge count");
  for (const auto& [pos, e] : slots_) {
    base_.at(pos.first, pos.second) = point[e] % fp_.modulus();
  }
  return base_.det(fp_);
}

uint32_t eval_kirchhoff(const LabeledGraph& g, const std::vector<uint32_t>& point,
                        const PrimeField& fp) {
  return PolyEvaluator(g, DodgsonSpec{}, fp).eval(point);
}

uint32_t eval_dodgson(const LabeledGraph& g, const DodgsonSpec& spec,
                      const std::vector<uint32_t>& point, const PrimeField& fp) {
  return PolyEvaluator(g, spec, fp).eval(point);
}

void PartitionState::canonicalize() {
  for (auto& p : parts) std::sort(p.begin(), p.end());
  std::sort(parts.begin(), parts.end());
}

size_t PartitionState::find_part(uint32_t v) const {
  for (size_t i = 0; i < parts.size(); ++i) {
    if (std::binary_search(parts[i].begin(), parts[i].end(), v)) return i;
  }
  return kNoPart;
}

size_t PartitionState::free_parts() const {
  return static_cast<size_t>(
      std::count_if(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); }));
}

ForestHost ForestHost::all_active(const LabeledGraph& g) {
  check_graph(g);
  ForestHost h;
  h.graph = g;
  h.vertex_active.assign(g.vertex_count, 1);
  h.edge_active.assign(g.edges.size(), 1);
  return h;
}

uint32_t ForestHost::active_degree(uint32_t v) const {
  uint32_t d = 0;
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    if (edge_active[e]) d += (graph.edges[e].first == v) + (graph.edges[e].second == v);
  }
  return d;
}

void canonical_combine(std::vector<ForestTerm>& terms, const PrimeField& fp) {
  for (auto& t : terms) {
    t.partition.canonicalize();
    t.coeff %= fp.modulus();
  }
  std::sort(terms.begin(), terms.end());
  std::vector<ForestTerm> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().partition == t.partition) {
      out.back().coeff = fp.add(out.back().coeff, t.coeff);
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const ForestTerm& t) { return t.coeff == 0; });
  terms = std::move(out);
}

namespace {

// Visits every partition of w (sorted) into exactly k nonempty blocks.
void enumerate_partitions(const std::vector<uint32_t>& w, size_t k, size_t idx,
                          std::vector<std::vector<uint32_t>>& parts,
                          const std::function<void(const std::vector<std::vector<uint32_t>>&)>& cb) {
  if (parts.size() + (w.size() - idx) < k) return;
  if (idx == w.size()) {
    if (parts.size() == k) cb(parts);
    return;
  }
  // Index-based: recursion below appends/removes blocks, which can reallocate.
  size_t open = parts.size();
  for (size_t i = 0; i < open; ++i) {
    parts[i].push_back(w[idx]);
    enumerate_partitions(w, k, idx + 1, parts, cb);
    parts[i].pop_back();
  }
  if (parts.size() < k) {
    parts.push_back({w[idx]});
    enumerate_partitions(w, k, idx + 1, parts, cb);
    parts.pop_back();
  }
}

// The edges of cut, viewed between the blocks of the partition, must form a
// spanning tree on the blocks.
bool cut_spans_tree(const std::vector<std::vector<uint32_t>>& parts,
                    const std::vector<std::pair<uint32_t, uint32_t>>& cut,
                    const std::vector<size_t>& part_of) {
  if (cut.size() + 1 != parts.size()) return false;
  std::vector<size_t> root(parts.size());
  std::iota(root.begin(), root.end(), 0);
  std::function<size_t(size_t)> find = [&](size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (const auto& [u, v] : cut) {
    size_t a = find(part_of[u]), b = find(part_of[v]);
    if (a == b) return false;
    root[a] = b;
  }
  return true;
}

}  // namespace

ForestPolyExpr dodgson_to_forest_mod2(const LabeledGraph& g, const DodgsonSpec& spec) {
  check_graph(g);
  check_dodgson_spec(g, spec);
  std::vector<uint32_t> ij = set_union(spec.I, spec.J);
  std::vector<uint32_t> removed = set_union(ij, spec.K);
  std::vector<uint32_t> both = set_intersection(spec.I, spec.J);
  std::vector<uint32_t> touched = set_difference(removed, both);
  std::vector<uint32_t> c1 = set_difference(set_union(spec.J, spec.K), spec.I);
  std::vector<uint32_t> c2 = set_difference(set_union(spec.I, spec.K), spec.J);

  ForestPolyExpr expr;
  expr.host = ForestHost::all_active(g);
  for (uint32_t e : removed) expr.host.edge_active[e] = 0;

  std::vector<uint32_t> w;
  for (uint32_t e : touched) {
    w.push_back(g.edges[e].first);
    w.push_back(g.edges[e].second);
  }
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());

  LabeledGraph arena = delete_edges(g, removed).graph;
  auto realizable = [&](const std::vector<std::vector<uint32_t>>& parts) {
    return for_each_spanning_forest(arena, parts,
                                    [](const std::vector<uint32_t>&) { return false; }) > 0;
  };

  if (w.empty()) {
    std::vector<std::vector<uint32_t>> free_slot{{}};
    if (realizable(free_slot)) {
      expr.terms.push_back({PartitionState{free_slot}, 1});
    }
    return expr;
  }

  auto c1_edges = [&] {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (uint32_t e : c1) out.push_back(g.edges[e]);
    return out;
  }();
  auto c2_edges = [&] {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (uint32_t e : c2) out.push_back(g.edges[e]);
    return out;
  }();
  size_t k = c1.size() + 1;

  std::vector<size_t> part_of(g.vertex_count, kNoPart);
  std::vector<std::vector<uint32_t>> parts;
  enumerate_partitions(w, k, 0, parts, [&](const std::vector<std::vector<uint32_t>>& p) {
    for (size_t i = 0; i < p.size(); ++i) {
      for (uint32_t v : p[i]) part_of[v] = i;
    }
    if (cut_spans_tree(p, c1_edges, part_of) && cut_spans_tree(p, c2_edges, part_of) &&
        realizable(p)) {
      PartitionState st{p};
      st.canonicalize();
      expr.terms.push_back({st, 1});
    }
  });
  std::sort(expr.terms.begin(), expr.terms.end());
  return expr;
}

uint32_t eval_forest_poly(const ForestPolyExpr& expr, const std::vector<uint32_t>& point,
                          const PrimeField& fp) {
  const ForestHost& host = expr.host;
  if (point.size() != host.graph.edges.size()) {
    throw PreconditionError("point size must match host edge count");
  }
  std::vector<uint32_t> new_id(host.graph.vertex_count, UINT32_MAX);
  LabeledGraph mat;
  for (uint32_t v = 0; v < host.graph.vertex_count; ++v) {
    if (host.vertex_active[v]) new_id[v] = mat.vertex_count++;
  }
  std::vector<uint32_t> orig_edge;
  for (size_t e = 0; e < host.graph.edges.size(); ++e) {
    if (!host.edge_active[e]) continue;
    auto [t, h] = host.graph.edges[e];
    if (new_id[t] == UINT32_MAX || new_id[h] == UINT32_MAX) {
      throw PreconditionError("active edge touches inactive vertex");
    }
    mat.edges.emplace_back(new_id[t], new_id[h]);
    orig_edge.push_back(static_cast<uint32_t>(e));
  }
  uint32_t acc = 0;
  for (const auto& term : expr.terms) {
    std::vector<std::vector<uint32_t>> blocks;
    for (const auto& part : term.partition.parts) {
      std::vector<uint32_t> block;
      for (uint32_t v : part) {
        if (new_id[v] == UINT32_MAX) throw PreconditionError("partition names inactive vertex");
        block.push_back(new_id[v]);
      }
      blocks.push_back(block);
    }
    uint32_t sum = 0;
    for_each_spanning_forest(mat, blocks, [&](const std::vector<uint32_t>& forest) {
      std::vector<char> in_forest(mat.edges.size(), 0);
      for (uint32_t e : forest) in_forest[e] = 1;
      uint32_t prod = 1 % fp.modulus();
      for (size_t e = 0; e < mat.edges.size(); ++e) {
        if (!in_forest[e]) prod = fp.mul(prod, point[orig_edge[e]] % fp.modulus());
      }
      sum = fp.add(sum, prod);
      return true;
    });
    acc = fp.add(acc, fp.mul(term.coeff, sum));
  }
  return acc;
}

std::vector<PartitionState> forest_assign_in(const PartitionState& st, uint32_t u, uint32_t v) {
  size_t pu = st.find_part(u), pv = st.find_part(v);
  std::vector<PartitionState> out;
  auto add_splits = [&](size_t part_idx, const std::vector<uint32_t>& rest) {
    size_t bits = rest.size();
    for (uint64_t mask = 0; mask < (1ull << bits); ++mask) {
      std::vector<uint32_t> p1{u}, p2{v};
      for (size_t i = 0; i < bits; ++i) {
        (mask >> i & 1 ? p1 : p2).push_back(rest[i]);
      }
      PartitionState next = st;
      next.parts.erase(next.parts.begin() + static_cast<ptrdiff_t>(part_idx));
      next.parts.push_back(std::move(p1));
      next.parts.push_back(std::move(p2));
      next.canonicalize();
      out.push_back(std::move(next));
    }
  };
  auto without = [](const std::vector<uint32_t>& part, uint32_t a, uint32_t b) {
    std::vector<uint32_t> rest;
    for (uint32_t x : part) {
      if (x != a && x != b) rest.push_back(x);
    }
    return rest;
  };
  if (pu != kNoPart && pv != kNoPart) {
    if (pu != pv) return out;
    add_splits(pu, without(st.parts[pu], u, v));
  } else if (pu != kNoPart) {
    add_splits(pu, without(st.parts[pu], u, u));
  } else if (pv != kNoPart) {
    add_splits(pv, without(st.parts[pv], v, v));
  } else {
    // Each forest realizes exactly one resulting partition, so equal parts
    // (several free slots) must be expanded only once.
    bool free_done = false;
    for (size_t i = 0; i < st.parts.size(); ++i) {
      if (st.parts[i].empty()) {
        if (free_done) continue;
        free_done = true;
      }
      add_splits(i, st.parts[i]);
    }
  }
  return out;
}

bool remove_isolated_vertex(PartitionState& st, uint32_t v) {
  size_t i = st.find_part(v);
  if (i != kNoPart) {
    if (st.parts[i].size() != 1) return false;
    st.parts.erase(st.parts.begin() + static_cast<ptrdiff_t>(i));
    return true;
  }
  for (size_t j = 0; j < st.parts.size(); ++j) {
    if (st.parts[j].empty()) {
      st.parts.erase(st.parts.begin() + static_cast<ptrdiff_t>(j));
      return true;
    }
  }
  return false;
}

ForestPolyExpr assign_edge(const ForestPolyExpr& expr, uint32_t edge_id, bool in_structure,
                           const PrimeField& fp) {
  if (edge_id >= expr.host.graph.edges.size() || !expr.host.edge_active[edge_id]) {
    throw PreconditionError("assignment needs an active edge");
  }
  ForestPolyExpr out;
  out.host = expr.host;
  out.host.edge_active[edge_id] = 0;
  auto [u, v] = expr.host.graph.edges[edge_id];
  if (in_structure) {
    for (const auto& term : expr.terms) {
      for (auto& st : forest_assign_in(term.partition, u, v)) {
        out.terms.push_back({std::move(st), term.coeff});
      }
    }
  } else {
    out.terms = expr.terms;
  }
  for (uint32_t w : {u, v}) {
    if (out.host.vertex_active[w] && out.host.active_degree(w) == 0) {
      std::vector<ForestTerm> kept;
      for (auto& term : out.terms) {
        if (remove_isolated_vertex(term.partition, w)) kept.push_back(std::move(term));
      }
      out.terms = std::move(kept);
      out.host.vertex_active[w] = 0;
    }
  }
  canonical_combine(out.terms, fp);
  return out;
}

}  // namespace c2lab
