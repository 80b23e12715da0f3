#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "c2lab/c2.hpp"
#include "c2lab/fp.hpp"
#include "c2lab/graph.hpp"
#include "c2lab/polys.hpp"

namespace c2lab {

// Families built by repeatedly gluing a fixed gadget onto the previous
// member: each stage appends `width` vertices, adds the `grow` edges, and
// removes the `cut` entries, which must undo edges grown a bounded number of
// stages earlier. Members 0..r are given explicitly; the template applies
// from stage r+1 on, where r+1 is the number of base members.
//
// A slot reference names a vertex relative to the current stage: the fixed
// base block keeps absolute indices, and layer slots count `depth` stages
// back from the layer being added. Text forms: base:j, new:j, prev:j,
// prevK:j (K = 2..9).
struct SlotRef {
  bool in_base = false;
  uint32_t depth = 0;  // ignored for base refs; 0 = the newest layer
  uint32_t index = 0;
  auto operator<=>(const SlotRef&) const = default;
};

using SlotEdge = std::pair<SlotRef, SlotRef>;

struct RecursiveFamilySpec {
  std::string name;
  uint32_t stride = 1;  // native size units one layer stands for
  uint32_t first = 0;   // smallest member reported by solutions
  uint32_t width = 0;   // vertices per layer
  std::vector<LabeledGraph> base;  // members 0..r, as given
  std::vector<SlotEdge> grow;     // edges added with each layer
  std::vector<SlotEdge> cut;      // edges removed again, named at removal stage
  std::vector<SlotRef> boundary;  // declared window: base block, then layers old to new

  uint32_t lookback() const { return static_cast<uint32_t>(base.size()) - 1; }
  uint32_t base_width() const { return base.empty() ? 0 : base.front().vertex_count; }
};

// Text form:
//   format: 1            required first content line
//   name: ...            optional header lines before the sections
//   stride: K            optional, default 1
//   first: N             optional, default 0
//   [base]               `graph <path>` per base member, oldest first
//   [layer]              `width N`, then `edge REF REF` and `cut REF REF`
//   [boundary]           `vertex REF` naming the window slots in order
// Graph paths resolve against `dir`. Throws FormatError on bad syntax.
RecursiveFamilySpec parse_family(const std::string& text, const std::string& dir);
RecursiveFamilySpec load_family_file(const std::string& path);

// Validation and solving failures carry a code naming the first violated
// growth condition.
struct FamilyError : ValidationError {
  enum class Code {
    base_shape,        // base sizes or boundary list inconsistent with the template
    neighborhood,      // a growth edge reaches below the retained layers
    cut_unmatched,     // a cut entry undoes nothing recently grown
    window_drift,      // the induced window graph does not stabilize
    edge_count,        // 2|V| = |E| + 2 fails or stops persisting
    state_overflow,    // transfer closure exceeded the state cap
    seed_degenerate,   // every starting minor choice vanishes identically
    state_hygiene,     // a state mentions a vertex outside the window
    overlap_mismatch,  // recurrence and direct values disagree
  };
  Code code;
  FamilyError(Code c, const std::string& what) : ValidationError(what), code(c) {}
};

// Checks the growth conditions on a materialized prefix and returns its
// argument: base shapes and the declared boundary, static reach of the
// templates, cut resolution while building members r+1..r+3, stability of
// the induced window between the last two, and the vertex-edge count law
// (2|V| = |E| + 2 at member r+3 together with 2*width = |grow| - |cut|,
// which makes it persist). Throws FamilyError naming the first violation.
const RecursiveFamilySpec& validate_family(const RecursiveFamilySpec& spec);

// Member n: the base file for n <= r, otherwise grown from member r.
LabeledGraph family_member(const RecursiveFamilySpec& spec, uint32_t n);

// A product of 2(p-1) spanning-forest structures over the window slots, one
// partition per factor. Canonical form: factors canonicalized and sorted.
struct StateTuple {
  std::vector<PartitionState> factors;

  void canonicalize();
  auto operator<=>(const StateTuple&) const = default;
};

struct StateTerm {
  StateTuple state;
  uint32_t coeff = 1;
  auto operator<=>(const StateTerm&) const = default;
};
using StateCombo = std::vector<StateTerm>;

// Canonicalizes, sorts, merges coefficients mod p, and drops zero terms.
void combine_states(StateCombo& combo, const PrimeField& fp);

struct SolveOptions {
  uint64_t budget = 1ull << 26;    // work cap per direct member value
  uint64_t state_cap = 1'000'000;  // transfer closure size cap
  uint32_t warmup = 0;             // direct window; 0 means lookback + stride + 5
  bool experimental_odd = false;   // unlock p > 2 (decomposition signs unverified)
};

// One-layer image of a canonical state: each kept growth edge is assigned to
// exactly p-1 of the 2(p-1) factors in all ways, the finished layer retires,
// and the remaining slots shift one block older.
StateCombo transfer_state(const RecursiveFamilySpec& spec, const StateTuple& state,
                          const PrimeField& fp);

// The linear system a solved family reduces to: states reachable from the
// seed, the one-layer transfer, the seed coefficients as an output
// functional, and directly counted values at a small anchor member.
//   c2(member n) = functional . transfer^(n - seed_lag - base_level) . base_values
struct RecurrenceSystem {
  std::vector<StateTuple> states;    // sorted canonically
  FpMatrix transfer;                 // row i: one-layer expansion of state i
  std::vector<uint32_t> functional;  // seed coefficients over `states`
  std::vector<uint32_t> base_values; // assignment counts at member base_level
  uint32_t base_level = 0;
  uint32_t seed_lag = 0;    // layers consumed while seeding (0 or 1)
  uint32_t formula_arity = 0;  // starting edges removed by the seed
};

// The seed: c2 of a large member expressed as a combination of states, via a
// starting minor pair on 3..5 soon-to-be-cut edges and assignment of the
// leftovers. Throws FamilyError(seed_degenerate) when no starting edge
// choice gives factors that are not identically zero.
StateCombo seed_states(const RecursiveFamilySpec& spec, const PrimeField& fp,
                       const SolveOptions& opts = {});

FpMatrix transfer_matrix(const RecursiveFamilySpec& spec, const PrimeField& fp,
                         const SolveOptions& opts = {});

// Full system assembly; `seed_override` substitutes a handmade seed (lag 0).
RecurrenceSystem build_recurrence(const RecursiveFamilySpec& spec, const PrimeField& fp,
                                  const SolveOptions& opts = {},
                                  const StateCombo* seed_override = nullptr);

// Closed-form values: c2(member n) = preperiod[n - offset] while in range,
// then period repeating. The period is minimal and starts right after the
// preperiod.
struct RecurrenceSolution {
  uint32_t offset = 0;
  std::vector<uint32_t> preperiod;
  std::vector<uint32_t> period;

  uint32_t at(uint32_t n) const;
};

struct SolveDiagnostics {
  uint32_t states = 0;
  uint32_t orbit_preperiod = 0;
  uint32_t orbit_period = 0;
  uint32_t recurrence_start = 0;  // first member the recurrence covers
  std::vector<std::pair<uint32_t, uint32_t>> checked;  // (member, direct value)
};

// Solves the family at p: builds the system, iterates it to periodicity,
// computes members first..first+warmup directly (stopping at the work
// budget), and hard-fails unless both agree on at least 3 members.
RecurrenceSolution solve_family(const RecursiveFamilySpec& spec, const PrimeField& fp,
                                const SolveOptions& opts = {},
                                SolveDiagnostics* diag = nullptr);

}  // namespace c2lab
