#include "c2lab/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace c2lab {

void check_graph(const LabeledGraph& g) {
  for (const auto& [t, h] : g.edges) {
    if (t >= g.vertex_count || h >= g.vertex_count) {
      throw PreconditionError("edge endpoint out of range");
    }
    if (t == h) throw PreconditionError("self-loops are not supported");
  }
}

LabeledGraph parse_graph(const std::string& text) {
  LabeledGraph g;
  bool have_v = false;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    auto fail = [&](const std::string& msg) -> void {
      throw FormatError("line " + std::to_string(line_no) + ": " + msg);
    };
    if (tag == "v") {
      if (have_v) fail("duplicate vertex-count line");
      uint64_t n;
      std::string extra;
      if (!(ls >> n) || n > UINT32_MAX || (ls >> extra)) fail("expected 'v <count>'");
      g.vertex_count = static_cast<uint32_t>(n);
      have_v = true;
    } else if (tag == "e") {
      if (!have_v) fail("edge before vertex-count line");
      uint64_t t, h;
      std::string extra;
      if (!(ls >> t >> h) || (ls >> extra)) fail("expected 'e <tail> <head>'");
      if (t >= g.vertex_count || h >= g.vertex_count) fail("edge endpoint out of range");
      if (t == h) fail("self-loop");
      g.edges.emplace_back(static_cast<uint32_t>(t), static_cast<uint32_t>(h));
    } else {
      fail("unknown directive '" + tag + "'");
    }
  }
  if (!have_v) throw FormatError("missing vertex-count line");
  return g;
}

std::string emit_graph(const LabeledGraph& g) {
  std::string out = "v " + std::to_string(g.vertex_count) + "\n";
  for (const auto& [t, h] : g.edges) {
    out += "e " + std::to_string(t) + " " + std::to_string(h) + "\n";
  }
  return out;
}

LabeledGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_graph(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string canonical_text(const LabeledGraph& g) {
  std::vector<std::pair<uint32_t, uint32_t>> norm;
  norm.reserve(g.edges.size());
  for (const auto& [t, h] : g.edges) norm.emplace_back(std::min(t, h), std::max(t, h));
  std::sort(norm.begin(), norm.end());
  std::string out = "v " + std::to_string(g.vertex_count) + "\n";
  for (const auto& [t, h] : norm) {
    out += "e " + std::to_string(t) + " " + std::to_string(h) + "\n";
  }
  return out;
}

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string graph_hash(const LabeledGraph& g) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text(g))));
  return buf;
}

uint32_t degree(const LabeledGraph& g, uint32_t v) {
  uint32_t d = 0;
  for (const auto& [t, h] : g.edges) d += (t == v) + (h == v);
  return d;
}

bool is_connected(const LabeledGraph& g) {
  if (g.vertex_count == 0) return true;
  std::vector<std::vector<uint32_t>> adj(g.vertex_count);
  for (const auto& [t, h] : g.edges) {
    adj[t].push_back(h);
    adj[h].push_back(t);
  }
  std::vector<char> seen(g.vertex_count, 0);
  std::vector<uint32_t> stack{0};
  seen[0] = 1;
  uint32_t visited = 1;
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    for (uint32_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == g.vertex_count;
}

bool is_k_regular(const LabeledGraph& g, uint32_t k) {
  std::vector<uint32_t> deg(g.vertex_count, 0);
  for (const auto& [t, h] : g.edges) {
    ++deg[t];
    ++deg[h];
  }
  return std::all_of(deg.begin(), deg.end(), [k](uint32_t d) { return d == k; });
}

bool is_simple(const LabeledGraph& g) {
  std::vector<std::pair<uint32_t, uint32_t>> norm;
  norm.reserve(g.edges.size());
  for (const auto& [t, h] : g.edges) norm.emplace_back(std::min(t, h), std::max(t, h));
  std::sort(norm.begin(), norm.end());
  return std::adjacent_find(norm.begin(), norm.end()) == norm.end();
}

FpMatrix signed_incidence(const LabeledGraph& g, const PrimeField& fp,
                          uint32_t dropped_vertex) {
  check_graph(g);
  if (g.vertex_count == 0) throw PreconditionError("incidence of empty graph");
  if (dropped_vertex >= g.vertex_count) throw PreconditionError("dropped vertex out of range");
  FpMatrix m(g.vertex_count - 1, g.edges.size());
  auto row = [&](uint32_t v) { return v < dropped_vertex ? v : v - 1; };
  for (size_t e = 0; e < g.edges.size(); ++e) {
    auto [t, h] = g.edges[e];
    if (h != dropped_vertex) m.at(row(h), e) = 1;
    if (t != dropped_vertex) m.at(row(t), e) = fp.neg(1);
  }
  return m;
}

FpMatrix signed_incidence(const LabeledGraph& g, const PrimeField& fp) {
  if (g.vertex_count == 0) throw PreconditionError("incidence of empty graph");
  return signed_incidence(g, fp, g.vertex_count - 1);
}

namespace {

std::vector<char> edge_id_mask(const LabeledGraph& g, const std::vector<uint32_t>& edge_ids) {
  std::vector<char> mask(g.edges.size(), 0);
  for (uint32_t id : edge_ids) {
    if (id >= g.edges.size()) throw PreconditionError("edge id out of range");
    mask[id] = 1;
  }
  return mask;
}

}  // namespace

DeletionResult delete_edges(const LabeledGraph& g, const std::vector<uint32_t>& edge_ids) {
  check_graph(g);
  std::vector<char> drop = edge_id_mask(g, edge_ids);
  DeletionResult out;
  out.graph.vertex_count = g.vertex_count;
  for (uint32_t e = 0; e < g.edges.size(); ++e) {
    if (!drop[e]) {
      out.graph.edges.push_back(g.edges[e]);
      out.kept_edges.push_back(e);
    }
  }
  return out;
}

ContractionResult contract_edges(const LabeledGraph& g, const std::vector<uint32_t>& edge_ids) {
  check_graph(g);
  std::vector<char> contract = edge_id_mask(g, edge_ids);
  std::vector<uint32_t> root(g.vertex_count);
  std::iota(root.begin(), root.end(), 0);
  std::function<uint32_t(uint32_t)> find = [&](uint32_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (uint32_t e = 0; e < g.edges.size(); ++e) {
    if (!contract[e]) continue;
    uint32_t a = find(g.edges[e].first), b = find(g.edges[e].second);
    if (a == b) throw CycleCollapseError("contracted edge set contains a cycle");
    // Keep the smaller original label as the representative.
    if (a > b) std::swap(a, b);
    root[b] = a;
  }
  std::vector<uint32_t> reps;
  for (uint32_t v = 0; v < g.vertex_count; ++v) {
    if (find(v) == v) reps.push_back(v);
  }
  std::vector<uint32_t> new_id(g.vertex_count);
  for (uint32_t i = 0; i < reps.size(); ++i) new_id[reps[i]] = i;
  ContractionResult out;
  out.graph.vertex_count = static_cast<uint32_t>(reps.size());
  out.vertex_map.resize(g.vertex_count);
  for (uint32_t v = 0; v < g.vertex_count; ++v) out.vertex_map[v] = new_id[find(v)];
  for (uint32_t e = 0; e < g.edges.size(); ++e) {
    if (contract[e]) continue;
    uint32_t t = out.vertex_map[g.edges[e].first];
    uint32_t h = out.vertex_map[g.edges[e].second];
    if (t == h) {
      out.loop_edges.push_back(e);
    } else {
      out.graph.edges.emplace_back(t, h);
      out.kept_edges.push_back(e);
    }
  }
  return out;
}

SubgraphResult induced_subgraph(const LabeledGraph& g, const std::vector<uint32_t>& vertices) {
  check_graph(g);
  std::vector<uint32_t> new_id(g.vertex_count, UINT32_MAX);
  for (uint32_t i = 0; i < vertices.size(); ++i) {
    uint32_t v = vertices[i];
    if (v >= g.vertex_count) throw PreconditionError("vertex id out of range");
    if (new_id[v] != UINT32_MAX) throw PreconditionError("duplicate vertex in subgraph list");
    new_id[v] = i;
  }
  SubgraphResult out;
  out.graph.vertex_count = static_cast<uint32_t>(vertices.size());
  out.vertex_ids = vertices;
  for (uint32_t e = 0; e < g.edges.size(); ++e) {
    uint32_t t = new_id[g.edges[e].first], h = new_id[g.edges[e].second];
    if (t != UINT32_MAX && h != UINT32_MAX) {
      out.graph.edges.emplace_back(t, h);
      out.kept_edges.push_back(e);
    }
  }
  return out;
}

namespace {

// Union-find with rollback and per-component block marks (0 = unmarked).
// Components carrying different marks must never merge.
class ForestDsu {
 public:
  ForestDsu(uint32_t n, const std::vector<uint32_t>& marks)
      : parent_(n), size_(n, 1), mark_(marks), comps_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  uint32_t find(uint32_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  uint32_t comps() const { return comps_; }
  uint32_t mark(uint32_t root) const { return mark_[root]; }

  // Merges the components of the two roots; caller guarantees ra != rb and
  // mark compatibility.
  void unite_roots(uint32_t ra, uint32_t rb) {
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    log_.push_back({rb, ra, mark_[ra]});
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    if (mark_[ra] == 0) mark_[ra] = mark_[rb];
    --comps_;
  }

  void rollback() {
    auto [child, par, old_mark] = log_.back();
    log_.pop_back();
    parent_[child] = child;
    size_[par] -= size_[child];
    mark_[par] = old_mark;
    ++comps_;
  }

 private:
  struct Op {
    uint32_t child, parent, old_parent_mark;
  };
  std::vector<uint32_t> parent_, size_, mark_;
  std::vector<Op> log_;
  uint32_t comps_;
};

struct ForestSearch {
  const LabeledGraph& g;
  const std::vector<std::vector<uint32_t>>& blocks;
  const std::function<bool(const std::vector<uint32_t>&)>& cb;
  ForestDsu dsu;
  std::vector<uint32_t> chosen;
  uint64_t visited = 0;
  bool stopped = false;

  bool blocks_coherent() const {
    for (const auto& block : blocks) {
      if (block.size() < 2) continue;
      uint32_t r = dsu.find(block[0]);
      for (size_t i = 1; i < block.size(); ++i) {
        if (dsu.find(block[i]) != r) return false;
      }
    }
    return true;
  }

  void run(uint32_t i) {
    if (stopped) return;
    uint32_t target = static_cast<uint32_t>(blocks.size());
    if (dsu.comps() == target) {
      if (blocks_coherent()) {
        ++visited;
        if (!cb(chosen)) stopped = true;
      }
      return;
    }
    uint32_t m = static_cast<uint32_t>(g.edges.size());
    if (i == m || m - i < dsu.comps() - target) return;
    uint32_t ra = dsu.find(g.edges[i].first), rb = dsu.find(g.edges[i].second);
    if (ra != rb) {
      uint32_t ma = dsu.mark(ra), mb = dsu.mark(rb);
      if (ma == 0 || mb == 0 || ma == mb) {
        dsu.unite_roots(ra, rb);
        chosen.push_back(i);
        run(i + 1);
        chosen.pop_back();
        dsu.rollback();
        if (stopped) return;
      }
    }
    run(i + 1);
  }
};

}  // namespace

uint64_t for_each_spanning_forest(const LabeledGraph& g,
                                  const std::vector<std::vector<uint32_t>>& blocks,
                                  const std::function<bool(const std::vector<uint32_t>&)>& cb) {
  check_graph(g);
  if (blocks.empty()) {
    // Zero trees: only the empty graph has such a (trivial) spanning forest.
    if (g.vertex_count > 0) return 0;
    std::vector<uint32_t> none;
    cb(none);
    return 1;
  }
  std::vector<uint32_t> marks(g.vertex_count, 0);
  for (uint32_t b = 0; b < blocks.size(); ++b) {
    for (uint32_t v : blocks[b]) {
      if (v >= g.vertex_count) throw PreconditionError("block vertex out of range");
      if (marks[v] != 0) throw PreconditionError("blocks must be disjoint");
      marks[v] = b + 1;
    }
  }
  if (g.vertex_count < blocks.size()) return 0;
  ForestSearch search{g, blocks, cb, ForestDsu(g.vertex_count, marks), {}, 0, false};
  search.run(0);
  return search.visited;
}

uint64_t for_each_spanning_tree(const LabeledGraph& g,
                                const std::function<bool(const std::vector<uint32_t>&)>& cb) {
  return for_each_spanning_forest(g, {{}}, cb);
}

uint64_t count_spanning_trees(const LabeledGraph& g) {
  return for_each_spanning_tree(g, [](const std::vector<uint32_t>&) { return true; });
}

bool is_graph_isomorphism(const LabeledGraph& a, const LabeledGraph& b,
                          const std::vector<uint32_t>& vertex_map) {
  if (a.vertex_count != b.vertex_count || a.edges.size() != b.edges.size()) return false;
  if (vertex_map.size() != a.vertex_count) return false;
  std::vector<char> hit(b.vertex_count, 0);
  for (uint32_t v : vertex_map) {
    if (v >= b.vertex_count || hit[v]) return false;
    hit[v] = 1;
  }
  auto normalized = [](const LabeledGraph& g, const std::vector<uint32_t>* map) {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    out.reserve(g.edges.size());
    for (const auto& [t, h] : g.edges) {
      uint32_t mt = map ? (*map)[t] : t, mh = map ? (*map)[h] : h;
      out.emplace_back(std::min(mt, mh), std::max(mt, mh));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return normalized(a, &vertex_map) == normalized(b, nullptr);
}

}  // namespace c2lab
