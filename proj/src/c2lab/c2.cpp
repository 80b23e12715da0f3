#include "c2lab/c2.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <random>
#include <thread>

#include "c2lab/errors.hpp"

namespace c2lab {

namespace {

uint64_t checked_power(uint64_t base, size_t exp, uint64_t limit, const char* what) {
  uint64_t total = 1;
  for (size_t i = 0; i < exp; ++i) {
    if (total > limit / base)
      throw BudgetExceededError(std::string(what) + " needs more than the budgeted evaluations");
    total *= base;
  }
  if (total > limit)
    throw BudgetExceededError(std::string(what) + " needs more than the budgeted evaluations");
  return total;
}

// Counts zeros of f over the variable positions listed in vars, with the
// digits of `prefix` (base p) preassigned to the first `fixed` variables.
uint64_t count_chunk(const std::function<uint32_t(const std::vector<uint32_t>&)>& f,
                     const std::vector<uint32_t>& vars, size_t point_size, uint32_t p,
                     size_t fixed, uint64_t prefix) {
  std::vector<uint32_t> point(point_size, 0);
  uint64_t rest = prefix;
  for (size_t i = fixed; i-- > 0;) {
    point[vars[i]] = static_cast<uint32_t>(rest % p);
    rest /= p;
  }
  const size_t free_vars = vars.size() - fixed;
  uint64_t zeros = 0;
  while (true) {
    if (f(point) == 0) ++zeros;
    size_t i = 0;
    for (; i < free_vars; ++i) {
      uint32_t& digit = point[vars[fixed + i]];
      if (++digit < p) break;
      digit = 0;
    }
    if (i == free_vars) break;
  }
  return zeros;
}

}  // namespace

uint64_t count_zeros(
    const std::function<std::function<uint32_t(const std::vector<uint32_t>&)>()>& factory,
    const std::vector<uint32_t>& variables, size_t point_size, const PrimeField& fp,
    const C2Options& opts) {
  const uint32_t p = fp.modulus();
  checked_power(p, variables.size(), opts.budget, "point count");

  const size_t fixed = std::min<size_t>(variables.size(), 2);
  uint64_t chunks = 1;
  for (size_t i = 0; i < fixed; ++i) chunks *= p;

  const uint32_t threads = std::max<uint32_t>(1, opts.threads);
  if (threads == 1 || chunks == 1) {
    auto f = factory();
    uint64_t zeros = 0;
    for (uint64_t c = 0; c < chunks; ++c)
      zeros += count_chunk(f, variables, point_size, p, fixed, c);
    return zeros;
  }

  std::vector<uint64_t> partial(threads, 0);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  for (uint32_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t]() {
      try {
        auto f = factory();
        for (uint64_t c = t; c < chunks; c += threads)
          partial[t] += count_chunk(f, variables, point_size, p, fixed, c);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  uint64_t zeros = 0;
  for (uint64_t part : partial) zeros += part;
  return zeros;
}

C2Result c2_brute(const LabeledGraph& g, const PrimeField& fp, const C2Options& opts) {
  check_graph(g);
  if (g.vertex_count < 3)
    throw PreconditionError("the invariant needs at least 3 vertices");
  const uint32_t p = fp.modulus();

  std::vector<uint32_t> vars(g.edges.size());
  for (uint32_t e = 0; e < vars.size(); ++e) vars[e] = e;

  auto factory = [&g, &fp]() -> std::function<uint32_t(const std::vector<uint32_t>&)> {
    PolyEvaluator ev(g, DodgsonSpec{}, fp);
    return [ev](const std::vector<uint32_t>& point) mutable { return ev.eval(point); };
  };

  C2Result res;
  res.p = p;
  res.method = "brute";
  res.raw_count = count_zeros(factory, vars, g.edges.size(), fp, opts);
  res.work = checked_power(p, vars.size(), opts.budget, "point count");
  const uint64_t p2 = uint64_t{p} * p;
  res.divisible = res.raw_count % p2 == 0;
  res.value = static_cast<uint32_t>((res.raw_count / p2) % p);
  return res;
}

std::vector<DodgsonSpec> formula_factors(const LabeledGraph& g, uint32_t which,
                                         const std::vector<uint32_t>& edges) {
  if (which < 1 || which > 3) throw PreconditionError("formula variant must be 1, 2, or 3");
  if (edges.size() != which + 2)
    throw PreconditionError("formula variant " + std::to_string(which) + " takes " +
                            std::to_string(which + 2) + " edges");
  std::vector<uint32_t> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw PreconditionError("formula edges must be distinct");
  if (sorted.back() >= g.edges.size()) throw PreconditionError("formula edge id out of range");

  auto set_of = [](std::initializer_list<uint32_t> ids) {
    std::vector<uint32_t> v(ids);
    std::sort(v.begin(), v.end());
    return v;
  };

  std::vector<DodgsonSpec> specs;
  if (which == 1) {
    const uint32_t i = edges[0], j = edges[1], k = edges[2];
    specs.push_back({set_of({i}), set_of({j}), set_of({k})});
    specs.push_back({set_of({i, k}), set_of({j, k}), {}});
  } else if (which == 2) {
    const uint32_t i = edges[0], j = edges[1], k = edges[2], l = edges[3];
    specs.push_back({set_of({i, j}), set_of({k, l}), {}});
    specs.push_back({set_of({i, k}), set_of({j, l}), {}});
  } else {
    const uint32_t i = edges[0], j = edges[1], k = edges[2], l = edges[3], m = edges[4];
    specs.push_back({set_of({i, j}), set_of({k, l}), set_of({m})});
    specs.push_back({set_of({i, k, m}), set_of({j, l, m}), {}});
    specs.push_back({set_of({i, k}), set_of({j, l}), set_of({m})});
    specs.push_back({set_of({i, j, m}), set_of({k, l, m}), {}});
  }
  for (const auto& s : specs) check_dodgson_spec(g, s);
  return specs;
}

namespace {

void check_formula_graph(const LabeledGraph& g) {
  check_graph(g);
  if (g.vertex_count < 3)
    throw PreconditionError("the invariant needs at least 3 vertices");
  if (2 + g.edges.size() > 2 * size_t{g.vertex_count})
    throw PreconditionError("formula methods need 2 + |E| <= 2|V|");
}

bool probes_nonzero(const LabeledGraph& g, const DodgsonSpec& spec, const PrimeField& fp) {
  PolyEvaluator ev(g, spec, fp);
  const uint32_t p = fp.modulus();
  std::vector<uint32_t> point(g.edges.size(), 1);
  if (ev.eval(point) != 0) return true;
  std::mt19937 rng(0x51ab5eedu);
  for (int t = 0; t < 256; ++t) {
    for (uint32_t e : ev.active_edges()) point[e] = rng() % p;
    if (ev.eval(point) != 0) return true;
  }
  return false;
}

}  // namespace

std::vector<uint32_t> default_formula_edges(const LabeledGraph& g, uint32_t which,
                                            const PrimeField& fp) {
  check_formula_graph(g);
  const size_t need = which + 2;
  if (g.edges.size() < need)
    throw PreconditionError("not enough edges for formula variant " + std::to_string(which));

  std::vector<uint32_t> combo(need);
  for (size_t i = 0; i < need; ++i) combo[i] = static_cast<uint32_t>(i);
  while (true) {
    bool usable = true;
    for (const auto& spec : formula_factors(g, which, combo)) {
      if (!probes_nonzero(g, spec, fp)) {
        usable = false;
        break;
      }
    }
    if (usable) return combo;

    // next ascending combination
    size_t i = need;
    while (i-- > 0) {
      if (++combo[i] <= g.edges.size() - (need - i)) {
        for (size_t j = i + 1; j < need; ++j) combo[j] = combo[j - 1] + 1;
        break;
      }
      if (i == 0)
        throw PreconditionError("no edge combination gives nonzero formula factors");
    }
  }
}

C2Result c2_formula(const LabeledGraph& g, uint32_t which, std::vector<uint32_t> edges,
                    const PrimeField& fp, const C2Options& opts) {
  check_formula_graph(g);
  if (edges.empty()) edges = default_formula_edges(g, which, fp);
  const std::vector<DodgsonSpec> specs = formula_factors(g, which, edges);
  const uint32_t p = fp.modulus();

  std::vector<uint32_t> vars;
  std::vector<uint32_t> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  for (uint32_t e = 0; e < g.edges.size(); ++e)
    if (!std::binary_search(sorted.begin(), sorted.end(), e)) vars.push_back(e);

  auto factory = [&]() -> std::function<uint32_t(const std::vector<uint32_t>&)> {
    std::vector<PolyEvaluator> evs;
    for (const auto& spec : specs) evs.emplace_back(g, spec, fp);
    PrimeField f = fp;
    return [evs, f](const std::vector<uint32_t>& point) mutable -> uint32_t {
      uint32_t left = f.mul(evs[0].eval(point), evs[1].eval(point));
      if (evs.size() == 2) return left;
      return f.sub(left, f.mul(evs[2].eval(point), evs[3].eval(point)));
    };
  };

  C2Result res;
  res.p = p;
  res.method = "formula" + std::to_string(which);
  res.edges = edges;
  res.raw_count = count_zeros(factory, vars, g.edges.size(), fp, opts);
  res.work = checked_power(p, vars.size(), opts.budget, "point count");
  const uint32_t count_mod = static_cast<uint32_t>(res.raw_count % p);
  res.value = (which == 2) ? count_mod : fp.neg(count_mod);
  return res;
}

namespace {

// Number of structures of all terms, stopping once `cap` are seen.
uint64_t count_structures_capped(const LabeledGraph& host, const ForestPolyExpr& expr,
                                 uint64_t cap) {
  uint64_t total = 0;
  for (const auto& term : expr.terms) {
    for_each_spanning_forest(host, term.partition.parts, [&](const std::vector<uint32_t>&) {
      ++total;
      return total < cap;
    });
    if (total >= cap) break;
  }
  return total;
}

struct ComplementMatcher {
  const LabeledGraph& host;
  std::vector<char> in_forest;
  std::vector<uint32_t> root;

  explicit ComplementMatcher(const LabeledGraph& h)
      : host(h), in_forest(h.edges.size(), 0), root(h.vertex_count, 0) {}

  // Union-find over the complement of `forest`; false when it has a cycle.
  bool build(const std::vector<uint32_t>& forest, uint32_t& comps) {
    std::fill(in_forest.begin(), in_forest.end(), 0);
    for (uint32_t e : forest) in_forest[e] = 1;
    for (uint32_t v = 0; v < host.vertex_count; ++v) root[v] = v;
    comps = host.vertex_count;
    for (uint32_t e = 0; e < host.edges.size(); ++e) {
      if (in_forest[e]) continue;
      uint32_t a = find(host.edges[e].first);
      uint32_t b = find(host.edges[e].second);
      if (a == b) return false;
      root[a] = b;
      --comps;
    }
    return true;
  }

  uint32_t find(uint32_t v) {
    while (root[v] != v) {
      root[v] = root[root[v]];
      v = root[v];
    }
    return v;
  }

  bool realizes(const PartitionState& partition, uint32_t comps) {
    if (partition.parts.size() != comps) return false;
    std::vector<uint32_t> block_roots;
    for (const auto& part : partition.parts) {
      if (part.empty()) continue;
      uint32_t r = find(part[0]);
      for (size_t i = 1; i < part.size(); ++i)
        if (find(part[i]) != r) return false;
      block_roots.push_back(r);
    }
    std::sort(block_roots.begin(), block_roots.end());
    return std::adjacent_find(block_roots.begin(), block_roots.end()) == block_roots.end();
  }
};

// Parity of complementary structure pairs of one factor product on the host.
uint64_t product_pair_parity(const LabeledGraph& host, const ForestPolyExpr& a,
                             const ForestPolyExpr& b, const C2Options& opts, uint64_t& work) {
  // Enumerate the side with fewer structures; probe with escalating caps so a
  // lopsided pair never pays for the big side.
  const ForestPolyExpr* enumerated = &a;
  const ForestPolyExpr* matched = &b;
  for (uint64_t cap = 1 << 12;; cap *= 16) {
    uint64_t ca = count_structures_capped(host, a, cap);
    uint64_t cb = count_structures_capped(host, b, cap);
    work += std::min(ca, cap) + std::min(cb, cap);
    if (ca >= cap && cb >= cap && cap <= opts.budget) continue;
    if (cb < ca) {
      enumerated = &b;
      matched = &a;
    }
    if (std::min(ca, cb) > opts.budget)
      throw BudgetExceededError("structure pair count needs more than the budgeted evaluations");
    break;
  }

  ComplementMatcher cm(host);
  uint64_t parity = 0;
  for (const auto& term : enumerated->terms) {
    const uint64_t mult = term.coeff & 1;
    if (!mult) continue;
    work += for_each_spanning_forest(
        host, term.partition.parts, [&](const std::vector<uint32_t>& forest) {
          uint32_t comps = 0;
          if (!cm.build(forest, comps)) return true;
          for (const auto& other : matched->terms)
            if ((other.coeff & 1) && cm.realizes(other.partition, comps)) parity ^= 1;
          return true;
        });
  }
  return parity;
}

}  // namespace

C2Result c2_assign_mod2(const LabeledGraph& g, uint32_t which, std::vector<uint32_t> edges,
                        const C2Options& opts) {
  PrimeField fp(2);
  check_formula_graph(g);
  if (2 + g.edges.size() != 2 * size_t{g.vertex_count})
    throw PreconditionError("pair counting needs 2 + |E| == 2|V|");
  if (edges.empty()) edges = default_formula_edges(g, which, fp);
  const std::vector<DodgsonSpec> specs = formula_factors(g, which, edges);

  std::vector<ForestPolyExpr> exprs;
  for (const auto& spec : specs) exprs.push_back(dodgson_to_forest_mod2(g, spec));

  const LabeledGraph host = delete_edges(g, edges).graph;

  C2Result res;
  res.p = 2;
  res.method = "assign" + std::to_string(which);
  res.edges = edges;
  uint64_t parity = 0;
  for (size_t pair = 0; pair + 1 < exprs.size(); pair += 2)
    parity ^= product_pair_parity(host, exprs[pair], exprs[pair + 1], opts, res.work);
  res.raw_count = parity;
  res.value = static_cast<uint32_t>(parity);
  return res;
}

uint32_t eval_sparse(const SparsePoly& f, const std::vector<uint32_t>& point,
                     const PrimeField& fp) {
  uint32_t total = 0;
  for (const auto& [exps, coeff] : f.monomials) {
    uint32_t term = coeff;
    for (size_t i = 0; i < exps.size(); ++i) term = fp.mul(term, fp.pow(point[i], exps[i]));
    total = fp.add(total, term);
  }
  return total;
}

uint32_t full_monomial_coeff_of_power(const SparsePoly& f, uint32_t nvars,
                                      const PrimeField& fp) {
  const uint32_t p = fp.modulus();
  // Accumulate f^(p-1) in an exponent map, pruning exponents that overshoot
  // the per-variable target p-1.
  std::map<std::vector<uint8_t>, uint32_t> acc;
  acc[std::vector<uint8_t>(nvars, 0)] = 1;
  for (uint32_t step = 0; step + 1 < p; ++step) {
    std::map<std::vector<uint8_t>, uint32_t> next;
    for (const auto& [exps, coeff] : acc) {
      for (const auto& [mexps, mcoeff] : f.monomials) {
        std::vector<uint8_t> sum(nvars);
        bool keep = true;
        for (uint32_t i = 0; i < nvars; ++i) {
          sum[i] = static_cast<uint8_t>(exps[i] + mexps[i]);
          if (sum[i] > p - 1) {
            keep = false;
            break;
          }
        }
        if (!keep) continue;
        uint32_t& slot = next[sum];
        slot = fp.add(slot, fp.mul(coeff, mcoeff));
      }
    }
    acc = std::move(next);
  }
  auto it = acc.find(std::vector<uint8_t>(nvars, p - 1));
  return it == acc.end() ? 0 : it->second;
}

bool coeff_lemma_holds(const SparsePoly& f, uint32_t nvars, const PrimeField& fp) {
  const uint32_t p = fp.modulus();
  for (const auto& [exps, coeff] : f.monomials) {
    if (exps.size() != nvars) throw PreconditionError("monomial arity mismatch");
    uint32_t deg = 0;
    for (uint8_t e : exps) deg += e;
    if (coeff % p != 0 && deg != nvars)
      throw PreconditionError("the coefficient identity needs degree == variable count");
  }

  checked_power(p, nvars, 1u << 22, "coefficient identity check");
  std::vector<uint32_t> point(nvars, 0);
  uint64_t zeros = 0;
  while (true) {
    if (eval_sparse(f, point, fp) == 0) ++zeros;
    uint32_t i = 0;
    for (; i < nvars; ++i) {
      if (++point[i] < p) break;
      point[i] = 0;
    }
    if (i == nvars) break;
  }

  const uint32_t coeff = full_monomial_coeff_of_power(f, nvars, fp);
  const uint32_t expected = (nvars % 2 == 1) ? coeff : fp.neg(coeff);
  return static_cast<uint32_t>(zeros % p) == expected;
}

}  // namespace c2lab
