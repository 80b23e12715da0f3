// Acceptance battery: nine end-to-end checks over the released surface, one
// pass/fail line each. Run with the source directory as the only argument so
// the family specs and golden files resolve. Exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "c2lab/c2.hpp"
#include "c2lab/errors.hpp"
#include "c2lab/families.hpp"
#include "c2lab/fp.hpp"
#include "c2lab/graph.hpp"
#include "c2lab/polys.hpp"
#include "c2lab/recurrence.hpp"

using namespace c2lab;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw Failure(msg);
}

std::string g_src;  // source tree root, from argv[1]

uint32_t assign_value(const LabeledGraph& g) { return c2_assign_mod2(g, 2, {}).value; }

// ---- the graphs the numeric criteria run over ------------------------------

struct Named {
  std::string name;
  LabeledGraph g;
};

LabeledGraph torus_n3(uint32_t k) { return decomplete(gen_toroidal_grid(k, 0, 3), 0); }

LabeledGraph open_circulant13(uint32_t n) {
  return decomplete(gen_circulant(n, {1, 3}), n - 1);
}

LabeledGraph open_ladder(uint32_t size, bool capped) {
  return decomplete(gen_x_ladder(size, capped), 0);
}

// Everything criteria 1-4 compute on, regenerated for the cross-method sweep.
std::vector<Named> criteria_graph_pool() {
  std::vector<Named> pool;
  for (uint32_t k = 3; k <= 7; ++k)
    pool.push_back({"torus(" + std::to_string(k) + ",0,3)-v0", torus_n3(k)});
  for (auto [k, m] : {std::pair<uint32_t, uint32_t>{4, 4}, {3, 5}, {5, 4}})
    pool.push_back({"torus(" + std::to_string(k) + ",0," + std::to_string(m) + ")-v0",
                    decomplete(gen_toroidal_grid(k, 0, m), 0)});
  for (uint32_t n : {7u, 8u, 9u, 10u, 11u, 12u, 15u, 18u})
    pool.push_back({"circulant" + std::to_string(n) + "(1,3)-open", open_circulant13(n)});
  for (uint32_t size : {8u, 10u, 12u, 14u}) {
    pool.push_back({"capped" + std::to_string(size) + "-v0", open_ladder(size, true)});
    pool.push_back({"symmetric" + std::to_string(size) + "-v0", open_ladder(size, false)});
  }
  return pool;
}

// ---- criterion bodies ------------------------------------------------------

std::string criterion1() {
  for (uint32_t k = 3; k <= 7; ++k) {
    const LabeledGraph g = torus_n3(k);
    const uint32_t v = assign_value(g);
    require(v == 0, "assign gave " + std::to_string(v) + " at k=" + std::to_string(k));
  }
  const C2Result brute = c2_brute(torus_n3(3), PrimeField(2));
  require(brute.work == 1u << 14, "k=3 brute ran " + std::to_string(brute.work) + " points");
  require(brute.value == 0, "k=3 brute gave " + std::to_string(brute.value));
  return "k=3..7 all 0 by assign; k=3 brute (2^14 points) agrees";
}

std::string criterion2() {
  for (auto [k, m] : {std::pair<uint32_t, uint32_t>{4, 4}, {3, 5}, {5, 4}}) {
    const uint32_t v = assign_value(decomplete(gen_toroidal_grid(k, 0, m), 0));
    require(v == 0, "assign gave " + std::to_string(v) + " at (" + std::to_string(k) + "," +
                        std::to_string(m) + ")");
  }
  return "(4,4), (3,5), (5,4) all 0 by assign";
}

std::string criterion3() {
  for (uint32_t n : {9u, 12u, 15u, 18u, 7u, 8u, 10u, 11u}) {
    const uint32_t v = assign_value(open_circulant13(n));
    require(v == n % 2, "n=" + std::to_string(n) + " gave " + std::to_string(v) +
                            ", want " + std::to_string(n % 2));
  }
  return "n in {7,8,9,10,11,12,15,18}: value tracks n mod 2";
}

std::string criterion4() {
  for (uint32_t size : {8u, 10u, 12u, 14u}) {
    for (bool capped : {true, false}) {
      const uint32_t v = assign_value(open_ladder(size, capped));
      require(v == 0, std::string(capped ? "capped" : "symmetric") + " |V|=" +
                          std::to_string(size - 1) + " gave " + std::to_string(v));
    }
  }
  // The seven-vertex capped member is the census graph P_6,3; its adjacency
  // is frozen as a golden file, so a generator drift cannot pass silently.
  const LabeledGraph seven = open_ladder(8, true);
  const LabeledGraph frozen = load_graph_file(g_src + "/tests/golden/x_ladder_capped8_dec0.txt");
  require(canonical_text(seven) == canonical_text(frozen),
          "|V|=7 capped drifted from the documented P_6,3 adjacency");
  return "|V| = 7,9,11,13 both kinds all 0; |V|=7 capped flagged as P_6,3";
}

std::string criterion5() {
  const PrimeField f2(2), f3(3);
  size_t pairs2 = 0, graphs3 = 0;
  for (const Named& it : criteria_graph_pool()) {
    const size_t edges = it.g.edges.size();
    if (edges <= 16) {
      const uint32_t want = c2_brute(it.g, f2).value;
      for (uint32_t which : {1u, 2u, 3u}) {
        const uint32_t got = c2_formula(it.g, which, {}, f2).value;
        require(got == want, it.name + ": formula" + std::to_string(which) + " gave " +
                                 std::to_string(got) + ", brute " + std::to_string(want));
        ++pairs2;
      }
      const uint32_t got = c2_assign_mod2(it.g, 2, {}).value;
      require(got == want, it.name + ": assign gave " + std::to_string(got) + ", brute " +
                               std::to_string(want));
      ++pairs2;
    }
    if (edges <= 13) {
      const uint32_t want = c2_brute(it.g, f3).value;
      for (uint32_t which : {1u, 2u, 3u}) {
        const uint32_t got = c2_formula(it.g, which, {}, f3).value;
        require(got == want, it.name + ": p=3 formula" + std::to_string(which) + " gave " +
                                 std::to_string(got) + ", brute " + std::to_string(want));
      }
      ++graphs3;
    }
  }
  require(pairs2 >= 4 * 9, "p=2 sweep covered too few graphs");
  require(graphs3 >= 4, "p=3 sweep covered too few graphs");
  return std::to_string(pairs2) + " p=2 method pairs and " + std::to_string(graphs3) +
         " p=3 graphs agree with brute";
}

// Independent sides for the coefficient identity: a plain point loop with its
// own power evaluation, and an unpruned map product for the coefficient.
uint32_t plain_eval(const SparsePoly& f, const std::vector<uint32_t>& pt, uint32_t p) {
  uint64_t acc = 0;
  for (const auto& [exps, coeff] : f.monomials) {
    uint64_t term = coeff % p;
    for (size_t i = 0; i < exps.size(); ++i)
      for (uint8_t e = 0; e < exps[i]; ++e) term = term * pt[i] % p;
    acc = (acc + term) % p;
  }
  return static_cast<uint32_t>(acc);
}

uint32_t plain_full_coeff(const SparsePoly& f, uint32_t n, uint32_t p) {
  std::map<std::vector<uint8_t>, uint32_t> acc;
  acc[std::vector<uint8_t>(n, 0)] = 1;
  for (uint32_t step = 0; step + 1 < p; ++step) {
    std::map<std::vector<uint8_t>, uint32_t> next;
    for (const auto& [exps, c] : acc)
      for (const auto& [mexps, mc] : f.monomials) {
        std::vector<uint8_t> sum(n);
        for (uint32_t i = 0; i < n; ++i) sum[i] = static_cast<uint8_t>(exps[i] + mexps[i]);
        uint32_t& slot = next[sum];
        slot = static_cast<uint32_t>((slot + uint64_t(c) * mc) % p);
      }
    acc = std::move(next);
  }
  auto it = acc.find(std::vector<uint8_t>(n, static_cast<uint8_t>(p - 1)));
  return it == acc.end() ? 0 : it->second;
}

std::string criterion6() {
  std::mt19937 rng(0xacce97);
  int done = 0;
  while (done < 50) {
    const uint32_t p = (rng() % 2 == 0) ? 2 : 3;
    const uint32_t n = 1 + rng() % 5;
    const PrimeField fp(p);

    // random homogeneous polynomial of degree n in n variables
    SparsePoly f;
    std::vector<uint8_t> cur(n, 0);
    std::function<void(uint32_t, uint32_t)> walk = [&](uint32_t var, uint32_t left) {
      if (var + 1 == n) {
        cur[var] = static_cast<uint8_t>(left);
        const uint32_t coeff = rng() % p;
        if (coeff) f.monomials.push_back({cur, coeff});
        return;
      }
      for (uint32_t take = 0; take <= left; ++take) {
        cur[var] = static_cast<uint8_t>(take);
        walk(var + 1, left - take);
      }
    };
    walk(0, n);
    if (f.monomials.empty()) continue;

    uint64_t zeros = 0;
    std::vector<uint32_t> pt(n, 0);
    while (true) {
      if (plain_eval(f, pt, p) == 0) ++zeros;
      uint32_t i = 0;
      for (; i < n; ++i) {
        if (++pt[i] < p) break;
        pt[i] = 0;
      }
      if (i == n) break;
    }
    const uint32_t coeff = plain_full_coeff(f, n, p);
    const uint32_t want = (n % 2 == 1) ? coeff : (p - coeff) % p;
    require(static_cast<uint32_t>(zeros % p) == want,
            "independent enumeration broke the identity at instance " + std::to_string(done));
    require(coeff_lemma_holds(f, n, fp),
            "coeff_lemma_holds disagreed at instance " + std::to_string(done));
    ++done;
  }
  return "50 random polynomials (N <= 5, p in {2,3}) match the independent count";
}

std::string criterion7() {
  size_t skew = 0, nonskew = 0;
  for (uint32_t k = 3; 3 * k <= 60; ++k) {
    for (uint32_t m = 3; k * m <= 60; ++m) {
      const LabeledGraph grid0 = gen_toroidal_grid(k, 0, m);
      if (std::gcd(k, m) == 1) {
        const std::vector<uint32_t> map = iso_nonskew_labeling(k, m);
        std::vector<uint32_t> sorted = map;
        std::sort(sorted.begin(), sorted.end());
        for (uint32_t i = 0; i < k * m; ++i)
          require(sorted[i] == i, "nonskew map is not a bijection");
        require(is_graph_isomorphism(grid0, gen_circulant(k * m, {k, m}), map),
                "nonskew labeling failed at k=" + std::to_string(k) + " m=" + std::to_string(m));
        ++nonskew;
      }
      for (uint32_t l = 1; l < k; ++l) {
        if (std::gcd(m, l) != 1) continue;
        const std::vector<uint32_t> map = iso_skew_labeling(k, l, m);
        std::vector<uint32_t> sorted = map;
        std::sort(sorted.begin(), sorted.end());
        for (uint32_t i = 0; i < k * m; ++i)
          require(sorted[i] == i, "skew map is not a bijection");
        require(is_graph_isomorphism(gen_toroidal_grid(k, l, m), gen_circulant(k * m, {l, m}), map),
                "skew labeling failed at k=" + std::to_string(k) + " l=" + std::to_string(l) +
                    " m=" + std::to_string(m));
        ++skew;
      }
    }
  }
  require(nonskew > 0 && skew > 0, "hypothesis enumeration came up empty");
  return std::to_string(nonskew) + " untwisted and " + std::to_string(skew) +
         " twisted labelings verified (km <= 60)";
}

std::string criterion8() {
  const PrimeField f2(2);
  const auto grid = load_family_file(g_src + "/specs/nonskew3.c2fam");
  const auto skew = load_family_file(g_src + "/specs/skew13.c2fam");
  validate_family(grid);
  validate_family(skew);
  for (auto [file, code] :
       {std::pair<const char*, FamilyError::Code>{"bad_path.c2fam", FamilyError::Code::edge_count},
        {"bad_full3.c2fam", FamilyError::Code::edge_count},
        {"bad_cut.c2fam", FamilyError::Code::cut_unmatched}}) {
    try {
      validate_family(load_family_file(g_src + "/specs/" + file));
      throw Failure(std::string(file) + " was accepted");
    } catch (const FamilyError& e) {
      require(e.code == code, std::string(file) + " rejected with the wrong code: " + e.what());
    }
  }

  SolveOptions opts;
  opts.warmup = 4;
  size_t overlap = 0;
  for (auto [spec, period] :
       {std::pair<const RecursiveFamilySpec*, std::vector<uint32_t>>{&grid, {0}},
        {&skew, {1, 0}}}) {
    SolveDiagnostics diag;
    const RecurrenceSolution sol = solve_family(*spec, f2, opts, &diag);
    require(sol.preperiod.empty() && sol.period == period,
            spec->name + ": unexpected periodic form");
    // re-derive the overlap directly instead of trusting the solver's log
    for (uint32_t n = diag.recurrence_start; n <= spec->first + opts.warmup; ++n) {
      const uint32_t direct = assign_value(family_member(*spec, n));
      require(sol.at(n) == direct, spec->name + ": member " + std::to_string(n) +
                                       " recurrence " + std::to_string(sol.at(n)) +
                                       " vs direct " + std::to_string(direct));
      ++overlap;
    }
  }
  require(overlap >= 6, "overlap window too small");
  return "periods (0) and (1,0); " + std::to_string(overlap) +
         " overlap members re-checked; negatives rejected with their codes";
}

LabeledGraph random_connected(std::mt19937& rng, uint32_t n, uint32_t extra) {
  LabeledGraph g{n, {}};
  for (uint32_t v = 1; v < n; ++v) g.edges.emplace_back(static_cast<uint32_t>(rng() % v), v);
  for (uint32_t x = 0; x < extra; ++x) {
    uint32_t a = rng() % n, b = rng() % n;
    if (a != b) g.edges.emplace_back(a, b);
  }
  for (auto& [t, h] : g.edges)
    if (rng() & 1) std::swap(t, h);
  return g;
}

std::string criterion9() {
  std::mt19937 rng(0x0bacc1e);
  const uint32_t primes[3] = {2, 3, 5};
  for (int i = 0; i < 100; ++i) {
    const uint32_t p = primes[i % 3];
    const PrimeField fp(p);
    const uint32_t n = 3 + rng() % 4;
    const uint32_t cap = (p == 5) ? 7 : 10;  // keep the 5^|E| sweep affordable
    const uint32_t extra = rng() % (cap - (n - 1) + 1);
    const LabeledGraph g = random_connected(rng, n, extra);
    const size_t m = g.edges.size();

    std::vector<std::vector<uint32_t>> cotrees;
    for_each_spanning_tree(g, [&](const std::vector<uint32_t>& tree) {
      std::vector<char> in_tree(m, 0);
      for (uint32_t e : tree) in_tree[e] = 1;
      std::vector<uint32_t> co;
      for (uint32_t e = 0; e < m; ++e)
        if (!in_tree[e]) co.push_back(e);
      cotrees.push_back(std::move(co));
      return true;
    });

    std::vector<uint32_t> pt(m, 0);
    while (true) {
      uint32_t by_trees = 0;
      for (const auto& co : cotrees) {
        uint32_t prod = 1 % p;
        for (uint32_t e : co) prod = fp.mul(prod, pt[e]);
        by_trees = fp.add(by_trees, prod);
      }
      require(eval_kirchhoff(g, pt, fp) == by_trees,
              "determinant and tree sum split at graph " + std::to_string(i));
      uint32_t e = 0;
      for (; e < m; ++e) {
        if (++pt[e] < p) break;
        pt[e] = 0;
      }
      if (e == m) break;
    }
  }

  const PrimeField f2(2);
  for (int i = 0; i < 50; ++i) {
    const LabeledGraph g = random_connected(rng, 4 + rng() % 3, 2 + rng() % 3);
    const size_t m = g.edges.size();
    DodgsonSpec spec;
    {
      std::vector<uint32_t> pool(m);
      std::iota(pool.begin(), pool.end(), 0);
      const size_t rows = rng() % 3;
      std::shuffle(pool.begin(), pool.end(), rng);
      spec.I.assign(pool.begin(), pool.begin() + rows);
      std::shuffle(pool.begin(), pool.end(), rng);
      spec.J.assign(pool.begin(), pool.begin() + rows);
      std::sort(spec.I.begin(), spec.I.end());
      std::sort(spec.J.begin(), spec.J.end());
      std::vector<char> used(m, 0);
      for (uint32_t e : spec.I) used[e] = 1;
      for (uint32_t e : spec.J) used[e] = 1;
      std::vector<uint32_t> rest;
      for (uint32_t e = 0; e < m; ++e)
        if (!used[e]) rest.push_back(e);
      std::shuffle(rest.begin(), rest.end(), rng);
      spec.K.assign(rest.begin(), rest.begin() + std::min<size_t>(rng() % 2, rest.size()));
      std::sort(spec.K.begin(), spec.K.end());
    }
    const ForestPolyExpr expr = dodgson_to_forest_mod2(g, spec);
    std::vector<uint32_t> pt(m, 0);
    while (true) {
      require(eval_forest_poly(expr, pt, f2) == eval_dodgson(g, spec, pt, f2),
              "forest rewrite and determinant split at spec " + std::to_string(i));
      uint32_t e = 0;
      for (; e < m; ++e) {
        if (++pt[e] < 2) break;
        pt[e] = 0;
      }
      if (e == m) break;
    }
  }
  return "100 tree-sum graphs (p in {2,3,5}) and 50 mod-2 forest rewrites verified";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <source-dir>\n");
    return 2;
  }
  g_src = argv[1];

  struct Item {
    const char* label;
    std::string (*run)();
  };
  const Item items[] = {
      {"three-row grids vanish", criterion1},
      {"wider grids vanish", criterion2},
      {"skew chord parity", criterion3},
      {"x-ladders vanish", criterion4},
      {"cross-method agreement", criterion5},
      {"coefficient identity", criterion6},
      {"torus-circulant labelings", criterion7},
      {"recurrence engine soundness", criterion8},
      {"oracle battery", criterion9},
  };

  int failed = 0;
  for (size_t i = 0; i < std::size(items); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = items[i].run();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    std::printf("[%s] criterion %zu: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", i + 1,
                items[i].label, detail.c_str(), static_cast<double>(ms) / 1000.0);
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  std::printf("%d/9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
