#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "c2lab/c2.hpp"
#include "c2lab/errors.hpp"

using namespace c2lab;

namespace {

const LabeledGraph kTriangle{3, {{0, 1}, {1, 2}, {2, 0}}};
const LabeledGraph kK4{4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
// octahedron minus one vertex: K5 minus the edges (0,3) and (1,4)
const LabeledGraph kOct5{
    5, {{0, 1}, {0, 2}, {0, 4}, {1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}}};

std::function<std::function<uint32_t(const std::vector<uint32_t>&)>()> plain(
    uint32_t (*f)(const std::vector<uint32_t>&)) {
  return [f]() { return std::function<uint32_t(const std::vector<uint32_t>&)>(f); };
}

uint32_t product_xy(const std::vector<uint32_t>& pt) { return (pt[0] * pt[1]) % 3; }
uint32_t linear_sum(const std::vector<uint32_t>& pt) { return (pt[0] + pt[1] + pt[2]) % 5; }

}  // namespace

TEST_CASE("zero counting matches hand counts") {
  PrimeField f3(3);
  CHECK(count_zeros(plain(product_xy), {0, 1}, 2, f3, {}) == 5);

  PrimeField f5(5);
  CHECK(count_zeros(plain(linear_sum), {0, 1, 2}, 3, f5, {}) == 25);

  // no variables: the one empty point
  auto one = plain(+[](const std::vector<uint32_t>&) -> uint32_t { return 1; });
  auto zero = plain(+[](const std::vector<uint32_t>&) -> uint32_t { return 0; });
  CHECK(count_zeros(one, {}, 0, f3, {}) == 0);
  CHECK(count_zeros(zero, {}, 0, f3, {}) == 1);
}

TEST_CASE("zero counting leaves inactive positions at zero") {
  PrimeField f3(3);
  auto factory = plain(+[](const std::vector<uint32_t>& pt) -> uint32_t {
    REQUIRE(pt.size() == 4);
    REQUIRE(pt[1] == 0);
    REQUIRE(pt[3] == 0);
    return (pt[0] + 2 * pt[2]) % 3;
  });
  CHECK(count_zeros(factory, {0, 2}, 4, f3, {}) == 3);
}

TEST_CASE("zero counting is identical for any thread count") {
  PrimeField f3(3);
  auto factory = plain(+[](const std::vector<uint32_t>& pt) -> uint32_t {
    return (pt[0] * pt[1] + pt[2] * pt[2] + 2) % 3;
  });
  C2Options opts;
  const uint64_t base = count_zeros(factory, {0, 1, 2}, 3, f3, opts);
  for (uint32_t t : {2u, 3u, 7u}) {
    opts.threads = t;
    CHECK(count_zeros(factory, {0, 1, 2}, 3, f3, opts) == base);
  }
}

TEST_CASE("zero counting refuses to blow the budget") {
  PrimeField f3(3);
  std::vector<uint32_t> vars(20);
  for (uint32_t i = 0; i < 20; ++i) vars[i] = i;
  C2Options opts;
  opts.budget = 100;
  auto zero = plain(+[](const std::vector<uint32_t>&) -> uint32_t { return 0; });
  CHECK_THROWS_AS(count_zeros(zero, vars, 20, f3, opts), BudgetExceededError);
}

TEST_CASE("direct invariant of the triangle") {
  for (uint32_t p : {2u, 3u, 5u}) {
    PrimeField fp(p);
    C2Result res = c2_brute(kTriangle, fp);
    CHECK(res.p == p);
    CHECK(res.method == "brute");
    CHECK(res.raw_count == uint64_t{p} * p);
    CHECK(res.divisible);
    CHECK(res.value == 1);
  }
}

TEST_CASE("direct invariant of two 4-regular decompletions") {
  struct Expected {
    const LabeledGraph* g;
    uint32_t p;
    uint64_t raw;
    uint32_t value;
  };
  const Expected table[] = {
      {&kK4, 2, 36, 1},   {&kK4, 3, 261, 2},     {&kK4, 5, 3225, 4},
      {&kOct5, 2, 156, 1}, {&kOct5, 3, 2529, 2},
  };
  for (const auto& row : table) {
    PrimeField fp(row.p);
    C2Result res = c2_brute(*row.g, fp);
    CHECK(res.raw_count == row.raw);
    CHECK(res.divisible);
    CHECK(res.value == row.value);
  }
}

TEST_CASE("direct invariant rejects tiny graphs") {
  PrimeField f2(2);
  CHECK_THROWS_AS(c2_brute({2, {{0, 1}, {0, 1}}}, f2), PreconditionError);
}

TEST_CASE("formula factor specs") {
  auto specs = formula_factors(kK4, 1, {0, 1, 2});
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].I == std::vector<uint32_t>{0});
  CHECK(specs[0].J == std::vector<uint32_t>{1});
  CHECK(specs[0].K == std::vector<uint32_t>{2});
  CHECK(specs[1].I == std::vector<uint32_t>{0, 2});
  CHECK(specs[1].J == std::vector<uint32_t>{1, 2});
  CHECK(specs[1].K.empty());

  specs = formula_factors(kK4, 2, {0, 1, 2, 3});
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].I == std::vector<uint32_t>{0, 1});
  CHECK(specs[0].J == std::vector<uint32_t>{2, 3});
  CHECK(specs[1].I == std::vector<uint32_t>{0, 2});
  CHECK(specs[1].J == std::vector<uint32_t>{1, 3});

  specs = formula_factors(kK4, 3, {0, 1, 2, 3, 4});
  REQUIRE(specs.size() == 4);
  CHECK(specs[0].I == std::vector<uint32_t>{0, 1});
  CHECK(specs[0].J == std::vector<uint32_t>{2, 3});
  CHECK(specs[0].K == std::vector<uint32_t>{4});
  CHECK(specs[1].I == std::vector<uint32_t>{0, 2, 4});
  CHECK(specs[1].J == std::vector<uint32_t>{1, 3, 4});
  CHECK(specs[2].I == std::vector<uint32_t>{0, 2});
  CHECK(specs[2].J == std::vector<uint32_t>{1, 3});
  CHECK(specs[2].K == std::vector<uint32_t>{4});
  CHECK(specs[3].I == std::vector<uint32_t>{0, 1, 4});
  CHECK(specs[3].J == std::vector<uint32_t>{2, 3, 4});

  CHECK_THROWS_AS(formula_factors(kK4, 0, {0, 1}), PreconditionError);
  CHECK_THROWS_AS(formula_factors(kK4, 4, {0, 1, 2, 3, 4, 5}), PreconditionError);
  CHECK_THROWS_AS(formula_factors(kK4, 1, {0, 1}), PreconditionError);
  CHECK_THROWS_AS(formula_factors(kK4, 1, {0, 1, 1}), PreconditionError);
  CHECK_THROWS_AS(formula_factors(kK4, 1, {0, 1, 6}), PreconditionError);
}

TEST_CASE("default formula edges are deterministic") {
  PrimeField f2(2);
  for (uint32_t which : {1u, 2u, 3u}) {
    auto a = default_formula_edges(kOct5, which, f2);
    auto b = default_formula_edges(kOct5, which, f2);
    REQUIRE(a.size() == which + 2);
    CHECK(a == b);
    CHECK(std::is_sorted(a.begin(), a.end()));
  }
}

TEST_CASE("default edges refuse an all-degenerate choice") {
  // removing any 5 of K4's 6 edges leaves a degree-0 factor that is
  // identically zero, so no 5-edge combination survives probing
  for (uint32_t p : {2u, 3u}) {
    PrimeField fp(p);
    CHECK_THROWS_AS(default_formula_edges(kK4, 3, fp), PreconditionError);
  }
}

TEST_CASE("formula methods agree with the direct count") {
  for (uint32_t p : {2u, 3u, 5u}) {
    PrimeField fp(p);
    const uint32_t direct = c2_brute(kK4, fp).value;
    for (uint32_t which : {1u, 2u}) {
      C2Result res = c2_formula(kK4, which, {}, fp);
      CHECK(res.method == "formula" + std::to_string(which));
      CHECK(res.value == direct);
    }
    // the probing default rejects every 5-edge choice on K4, but the
    // identity itself still holds for an explicit one
    CHECK(c2_formula(kK4, 3, {0, 1, 2, 3, 4}, fp).value == direct);
  }
  for (uint32_t p : {2u, 3u}) {
    PrimeField fp(p);
    const uint32_t direct = c2_brute(kOct5, fp).value;
    for (uint32_t which : {1u, 2u, 3u})
      CHECK(c2_formula(kOct5, which, {}, fp).value == direct);
  }
}

TEST_CASE("formula methods accept explicit edge choices") {
  PrimeField f3(3);
  const uint32_t direct = c2_brute(kK4, f3).value;
  // several explicit phi-compatible triples; all must give the same value
  for (std::vector<uint32_t> edges :
       {std::vector<uint32_t>{0, 1, 2}, {0, 3, 1}, {1, 2, 0}, {3, 4, 5}}) {
    C2Result res = c2_formula(kK4, 1, edges, f3);
    CHECK(res.value == direct);
    CHECK(res.edges == edges);
  }
}

TEST_CASE("formula methods check their preconditions") {
  PrimeField f2(2);
  // 2 + |E| > 2|V|
  const LabeledGraph dense{3, {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {2, 0}}};
  CHECK_THROWS_AS(c2_formula(dense, 1, {0, 1, 2}, f2), PreconditionError);
  CHECK_THROWS_AS(default_formula_edges(dense, 1, f2), PreconditionError);
}

TEST_CASE("pair counting matches the formula methods mod 2") {
  PrimeField f2(2);
  for (uint32_t which : {1u, 2u, 3u}) {
    for (const LabeledGraph* g : {&kK4, &kOct5}) {
      const auto edges = (g == &kK4 && which == 3)
                             ? std::vector<uint32_t>{0, 1, 2, 3, 4}
                             : default_formula_edges(*g, which, f2);
      const uint32_t expect = c2_formula(*g, which, edges, f2).value;
      C2Result res = c2_assign_mod2(*g, which, edges);
      CHECK(res.p == 2);
      CHECK(res.method == "assign" + std::to_string(which));
      CHECK(res.value == expect);
      CHECK(res.work > 0);
    }
  }
}

TEST_CASE("pair counting needs an exactly balanced edge count") {
  // 2 + |E| < 2|V|: fine for the formulas, not for pair counting
  const LabeledGraph square{4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}};
  CHECK_THROWS_AS(c2_assign_mod2(square, 1, {0, 1, 2}), PreconditionError);
}

TEST_CASE("sparse evaluation and power coefficients") {
  PrimeField f3(3);
  SparsePoly xy{{{{1, 1}, 1}}};
  CHECK(eval_sparse(xy, {2, 2}, f3) == 1);
  CHECK(full_monomial_coeff_of_power(xy, 2, f3) == 1);  // (xy)^2 = x^2 y^2

  PrimeField f2(2);
  SparsePoly f{{{{2, 0}, 1}, {{1, 1}, 1}}};  // x^2 + xy
  CHECK(full_monomial_coeff_of_power(f, 2, f2) == 1);
  CHECK(coeff_lemma_holds(f, 2, f2));
}

TEST_CASE("coefficient identity rejects non-homogeneous input") {
  PrimeField f2(2);
  SparsePoly bad{{{{1, 0}, 1}, {{1, 1}, 1}}};
  CHECK_THROWS_AS(coeff_lemma_holds(bad, 2, f2), PreconditionError);
}

TEST_CASE("coefficient identity holds for random homogeneous polynomials") {
  std::mt19937 rng(0xc03ff5u);
  int done = 0;
  while (done < 60) {
    const uint32_t p = (rng() % 2 == 0) ? 2 : 3;
    const uint32_t n = 1 + rng() % 5;
    PrimeField fp(p);

    // all exponent vectors of total degree n
    std::vector<std::vector<uint8_t>> shapes;
    std::vector<uint8_t> cur(n, 0);
    std::function<void(uint32_t, uint32_t)> gen = [&](uint32_t var, uint32_t left) {
      if (var + 1 == n) {
        cur[var] = static_cast<uint8_t>(left);
        shapes.push_back(cur);
        return;
      }
      for (uint32_t take = 0; take <= left; ++take) {
        cur[var] = static_cast<uint8_t>(take);
        gen(var + 1, left - take);
      }
    };
    gen(0, n);

    SparsePoly f;
    for (const auto& shape : shapes) {
      const uint32_t coeff = rng() % p;
      if (coeff) f.monomials.push_back({shape, coeff});
    }
    if (f.monomials.empty()) continue;
    CHECK(coeff_lemma_holds(f, n, fp));
    ++done;
  }
}
