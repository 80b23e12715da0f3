#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "c2lab/polys.hpp"

namespace c2lab {

struct C2Options {
  uint64_t budget = 1ull << 26;  // maximum number of point evaluations
  uint32_t threads = 1;
};

// Number of zeros of f over the given variable positions of the point
// vector (all other positions stay 0). factory() must produce an independent
// evaluation closure per worker thread; results are identical for any thread
// count. Throws BudgetExceededError if p^|variables| exceeds the budget.
uint64_t count_zeros(
    const std::function<std::function<uint32_t(const std::vector<uint32_t>&)>()>& factory,
    const std::vector<uint32_t>& variables, size_t point_size, const PrimeField& fp,
    const C2Options& opts);

struct C2Result {
  uint32_t p = 0;
  std::string method;
  uint32_t value = 0;              // the invariant in F_p
  std::vector<uint32_t> edges;     // special edges used by the formula methods
  uint64_t work = 0;               // points evaluated / structures visited
  uint64_t raw_count = 0;          // zero count (point-count methods)
  bool divisible = true;           // p^2 | raw_count (direct method only)
};

// Direct definition: count the zeros of the tree polynomial over all edge
// variables, divide by p^2. Requires at least 3 vertices.
C2Result c2_brute(const LabeledGraph& g, const PrimeField& fp, const C2Options& opts = {});

// Minor specs of the factors for the product formulas. Variant 1 takes
// edges (i,j,k), variant 2 (i,j,k,l), variant 3 (i,j,k,l,m); variants 1 and 2
// yield one product (two specs), variant 3 two products (four specs) whose
// zero counts combine as a difference.
std::vector<DodgsonSpec> formula_factors(const LabeledGraph& g, uint32_t which,
                                         const std::vector<uint32_t>& edges);

// First edge combination (ascending) for which no factor minor probes as
// identically zero. Deterministic.
std::vector<uint32_t> default_formula_edges(const LabeledGraph& g, uint32_t which,
                                            const PrimeField& fp);

// Count-based evaluation of the product formulas over the non-special edge
// variables. Empty `edges` picks default_formula_edges.
C2Result c2_formula(const LabeledGraph& g, uint32_t which, std::vector<uint32_t> edges,
                    const PrimeField& fp, const C2Options& opts = {});

// Mod-2 evaluation by pair counting: rewrite both factors as forest sums and
// count complementary structure pairs on the host with the special edges
// removed. Enumerates whichever factor has fewer structures.
C2Result c2_assign_mod2(const LabeledGraph& g, uint32_t which, std::vector<uint32_t> edges,
                        const C2Options& opts = {});

// Sparse polynomial with explicit exponent vectors, for the coefficient-count
// identity check.
struct SparsePoly {
  std::vector<std::pair<std::vector<uint8_t>, uint32_t>> monomials;
};

uint32_t eval_sparse(const SparsePoly& f, const std::vector<uint32_t>& point,
                     const PrimeField& fp);

// Coefficient of the all-(p-1) monomial in f^(p-1).
uint32_t full_monomial_coeff_of_power(const SparsePoly& f, uint32_t nvars,
                                      const PrimeField& fp);

// For homogeneous f of degree nvars in nvars variables:
// #zeros == (-1)^(nvars+1) * (that coefficient) mod p.
bool coeff_lemma_holds(const SparsePoly& f, uint32_t nvars, const PrimeField& fp);

}  // namespace c2lab
