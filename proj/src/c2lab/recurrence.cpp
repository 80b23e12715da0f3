#include "c2lab/recurrence.hpp"

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>

namespace c2lab {

namespace {

// ---------------------------------------------------------------- parsing

std::string strip_line(const std::string& raw) {
  std::string s = raw;
  if (auto h = s.find('#'); h != std::string::npos) s.erase(h);
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

uint32_t parse_number(const std::string& tok, size_t line_no, const char* what) {
  if (tok.empty() || tok.size() > 9 || tok.find_first_not_of("0123456789") != std::string::npos)
    throw FormatError("family file line " + std::to_string(line_no) + ": bad " + what + " `" +
                      tok + "`");
  return static_cast<uint32_t>(std::stoul(tok));
}

SlotRef parse_ref(const std::string& tok, size_t line_no) {
  auto fail = [&]() -> SlotRef {
    throw FormatError("family file line " + std::to_string(line_no) + ": bad slot reference `" +
                      tok + "`");
  };
  auto colon = tok.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) return fail();
  std::string name = tok.substr(0, colon);
  SlotRef ref;
  ref.index = parse_number(tok.substr(colon + 1), line_no, "slot index");
  if (name == "base") {
    ref.in_base = true;
  } else if (name == "new") {
    ref.depth = 0;
  } else if (name == "prev") {
    ref.depth = 1;
  } else if (name.size() == 5 && name.compare(0, 4, "prev") == 0 && name[4] >= '1' &&
             name[4] <= '9') {
    ref.depth = static_cast<uint32_t>(name[4] - '0');
  } else {
    return fail();
  }
  return ref;
}

std::string ref_text(const SlotRef& ref) {
  if (ref.in_base) return "base:" + std::to_string(ref.index);
  if (ref.depth == 0) return "new:" + std::to_string(ref.index);
  if (ref.depth == 1) return "prev:" + std::to_string(ref.index);
  return "prev" + std::to_string(ref.depth) + ":" + std::to_string(ref.index);
}

std::string edge_text(const SlotEdge& e) {
  return ref_text(e.first) + " " + ref_text(e.second);
}

// ---------------------------------------------------------------- geometry

struct Geometry {
  uint32_t w0;      // base block size
  uint32_t w;       // layer width
  uint32_t r;       // retained layers beyond the newest
  uint32_t window;  // slot universe size
};

Geometry geometry(const RecursiveFamilySpec& spec) {
  Geometry g;
  g.w0 = spec.base_width();
  g.w = spec.width;
  g.r = spec.lookback();
  g.window = g.w0 + (g.r + 1) * g.w;
  return g;
}

// Slot id in the current window: base block first, then layers old to new.
uint32_t slot_of(const Geometry& geo, const SlotRef& ref) {
  if (ref.in_base) return ref.index;
  return geo.w0 + (geo.r - ref.depth) * geo.w + ref.index;
}

// Concrete vertex id the reference names at stage n, or -1 when it reaches
// before the first grown layer. Layer t >= 1 occupies ids
// w0 + (t-1)*w .. w0 + t*w - 1.
int64_t concrete_at(const Geometry& geo, const SlotRef& ref, uint32_t n) {
  if (ref.in_base) return ref.index;
  int64_t t = static_cast<int64_t>(n) - ref.depth;
  if (t < 1) return -1;
  return geo.w0 + (t - 1) * static_cast<int64_t>(geo.w) + ref.index;
}

// Window slot of a concrete vertex at stage n, or -1 when outside.
int64_t slot_at_stage(const Geometry& geo, uint32_t vertex, uint32_t n) {
  if (vertex < geo.w0) return vertex;
  uint32_t t = (vertex - geo.w0) / geo.w + 1;
  uint32_t idx = (vertex - geo.w0) % geo.w;
  if (t + geo.r < n || t > n) return -1;
  return geo.w0 + (t - (n - geo.r)) * static_cast<int64_t>(geo.w) + idx;
}

std::pair<uint32_t, uint32_t> norm_pair(uint32_t a, uint32_t b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// ---------------------------------------------------------------- template analysis

// Matches every cut entry to a distinct grow position: a cut at shift i
// undoes the copy grown i stages earlier, so its layer depths drop by i.
// Smaller shifts are preferred, mirroring the latest-birth rule used when
// members are materialized. Returns which grow positions are claimed; the
// rest survive forever.
std::vector<char> claimed_grow_positions(const RecursiveFamilySpec& spec) {
  const uint32_t r = spec.lookback();
  std::vector<char> claimed(spec.grow.size(), 0);
  for (const SlotEdge& entry : spec.cut) {
    const SlotRef& a = entry.first;
    const SlotRef& b = entry.second;
    if (a.in_base && b.in_base)
      throw FamilyError(FamilyError::Code::cut_unmatched,
                        "cut " + edge_text(entry) + " names only base vertices");
    uint32_t lo = 1, hi = r;
    uint32_t max_depth = 0;
    for (const SlotRef* ref : {&a, &b}) {
      if (ref->in_base) continue;
      hi = std::min(hi, ref->depth);
      max_depth = std::max(max_depth, ref->depth);
    }
    if (max_depth > r) lo = std::max(lo, max_depth - r);
    bool matched = false;
    for (uint32_t i = lo; i <= hi && !matched; ++i) {
      SlotEdge shifted = entry;
      if (!shifted.first.in_base) shifted.first.depth -= i;
      if (!shifted.second.in_base) shifted.second.depth -= i;
      for (size_t q = 0; q < spec.grow.size(); ++q) {
        if (claimed[q]) continue;
        const SlotEdge& ge = spec.grow[q];
        bool same = (ge.first == shifted.first && ge.second == shifted.second) ||
                    (ge.first == shifted.second && ge.second == shifted.first);
        if (same) {
          claimed[q] = 1;
          matched = true;
          break;
        }
      }
    }
    if (!matched)
      throw FamilyError(FamilyError::Code::cut_unmatched,
                        "cut " + edge_text(entry) +
                            " undoes no grow entry at any shift; edges may only be removed "
                            "within " +
                            std::to_string(r) + " stage(s) of being grown");
  }
  return claimed;
}

// ---------------------------------------------------------------- materialization

// Edges of the last base member tagged with the stage that grew them,
// reconstructed by differencing the base members as pair multisets. Stage j
// removals drop the newest copies first, matching cut resolution.
std::vector<uint32_t> base_births(const RecursiveFamilySpec& spec) {
  std::map<std::pair<uint32_t, uint32_t>, std::vector<uint32_t>> hist;
  for (const auto& [u, v] : spec.base.front().edges) hist[norm_pair(u, v)].push_back(0);
  for (uint32_t j = 1; j < spec.base.size(); ++j) {
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> cnt;
    for (const auto& [u, v] : spec.base[j].edges) ++cnt[norm_pair(u, v)];
    for (auto& [pr, lst] : hist) {
      auto it = cnt.find(pr);
      size_t keep = it == cnt.end() ? 0 : it->second;
      while (lst.size() > keep) lst.pop_back();
    }
    for (const auto& [pr, c] : cnt) {
      auto& lst = hist[pr];
      while (lst.size() < c) lst.push_back(j);
    }
  }
  std::vector<uint32_t> births;
  births.reserve(spec.base.back().edges.size());
  std::map<std::pair<uint32_t, uint32_t>, size_t> used;
  for (const auto& [u, v] : spec.base.back().edges)
    births.push_back(hist[norm_pair(u, v)][used[norm_pair(u, v)]++]);
  return births;
}

struct Grown {
  LabeledGraph g;
  std::vector<uint32_t> birth;  // per edge: the stage that grew it
  uint32_t stage = 0;
};

Grown grown_base(const RecursiveFamilySpec& spec) {
  return Grown{spec.base.back(), base_births(spec), spec.lookback()};
}

// One stage: remove the cut copies, append a layer of vertices, add the
// growth edges. `origin` and `doomed` trace removals back to an earlier
// member's edge ids; `appended` receives the new ids in grow order.
void grow_one(const RecursiveFamilySpec& spec, Grown& cur, std::vector<int64_t>* origin,
              std::vector<uint32_t>* doomed, std::vector<uint32_t>* appended) {
  const Geometry geo = geometry(spec);
  const uint32_t n = cur.stage + 1;
  std::vector<uint32_t> removing;
  std::vector<char> used(cur.g.edges.size(), 0);
  for (const SlotEdge& entry : spec.cut) {
    int64_t ua = concrete_at(geo, entry.first, n);
    int64_t ub = concrete_at(geo, entry.second, n);
    auto reject = [&](const char* why) {
      throw FamilyError(FamilyError::Code::cut_unmatched,
                        "stage " + std::to_string(n) + ": cut " + edge_text(entry) + " " + why);
    };
    if (ua < 0 || ub < 0) reject("reaches before the first grown layer");
    auto want = norm_pair(static_cast<uint32_t>(ua), static_cast<uint32_t>(ub));
    int64_t best = -1;
    for (size_t i = 0; i < cur.g.edges.size(); ++i) {
      if (used[i]) continue;
      if (norm_pair(cur.g.edges[i].first, cur.g.edges[i].second) != want) continue;
      uint32_t b = cur.birth[i];
      if (b + geo.r < n || b >= n) continue;  // only copies grown in the last r stages
      if (best < 0 || cur.birth[best] < b) best = static_cast<int64_t>(i);
    }
    if (best < 0) reject("undoes no edge grown in the last lookback stage(s)");
    used[best] = 1;
    removing.push_back(static_cast<uint32_t>(best));
  }
  std::sort(removing.begin(), removing.end());
  if (doomed)
    for (uint32_t i : removing)
      if ((*origin)[i] >= 0) doomed->push_back(static_cast<uint32_t>((*origin)[i]));
  DeletionResult del = delete_edges(cur.g, removing);
  std::vector<uint32_t> birth2;
  std::vector<int64_t> origin2;
  birth2.reserve(del.kept_edges.size());
  for (uint32_t k : del.kept_edges) {
    birth2.push_back(cur.birth[k]);
    if (origin) origin2.push_back((*origin)[k]);
  }
  cur.g = std::move(del.graph);
  cur.birth = std::move(birth2);
  if (origin) *origin = std::move(origin2);
  cur.g.vertex_count += geo.w;
  for (const SlotEdge& entry : spec.grow) {
    int64_t ua = concrete_at(geo, entry.first, n);
    int64_t ub = concrete_at(geo, entry.second, n);
    if (appended) appended->push_back(static_cast<uint32_t>(cur.g.edges.size()));
    cur.g.edges.emplace_back(static_cast<uint32_t>(ua), static_cast<uint32_t>(ub));
    cur.birth.push_back(n);
    if (origin) origin->push_back(-1);
  }
  cur.stage = n;
}

Grown grow_to(const RecursiveFamilySpec& spec, uint32_t n) {
  Grown cur = grown_base(spec);
  while (cur.stage < n) grow_one(spec, cur, nullptr, nullptr, nullptr);
  return cur;
}

// Member n together with the ids of its edges that later stages remove and
// the ids of the stage-n growth edges in template order.
struct MemberCuts {
  Grown grown;
  std::vector<uint32_t> doomed;
  std::vector<uint32_t> last_appended;
};

MemberCuts member_with_cuts(const RecursiveFamilySpec& spec, uint32_t n) {
  MemberCuts mc;
  mc.grown = grown_base(spec);
  while (mc.grown.stage < n) {
    mc.last_appended.clear();
    grow_one(spec, mc.grown, nullptr, nullptr, &mc.last_appended);
  }
  Grown probe = mc.grown;
  std::vector<int64_t> origin(probe.g.edges.size());
  for (size_t i = 0; i < origin.size(); ++i) origin[i] = static_cast<int64_t>(i);
  for (uint32_t k = 0; k < spec.lookback(); ++k)
    grow_one(spec, probe, &origin, &mc.doomed, nullptr);
  std::sort(mc.doomed.begin(), mc.doomed.end());
  return mc;
}

// ---------------------------------------------------------------- state algebra

// The (p-1)-subsets of the 2(p-1) tuple positions: the ways one edge can be
// distributed so every variable ends up with multiplicity p-1.
std::vector<std::vector<uint32_t>> half_patterns(uint32_t p) {
  const uint32_t n = 2 * (p - 1), k = p - 1;
  std::vector<std::vector<uint32_t>> out;
  std::vector<uint32_t> comb(k);
  for (uint32_t i = 0; i < k; ++i) comb[i] = i;
  while (true) {
    out.push_back(comb);
    int32_t i = static_cast<int32_t>(k) - 1;
    while (i >= 0 && comb[i] == n - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (uint32_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

// Sends one host edge into exactly p-1 of the factors, in every way.
void branch_edge(StateCombo& combo, uint32_t u, uint32_t v,
                 const std::vector<std::vector<uint32_t>>& patterns, const PrimeField& fp) {
  StateCombo out;
  for (const StateTerm& term : combo) {
    for (const auto& pat : patterns) {
      std::vector<StateTuple> partial{term.state};
      for (uint32_t pos : pat) {
        std::vector<StateTuple> next;
        for (const StateTuple& t : partial) {
          auto repls = forest_assign_in(t.factors[pos], u, v);
          for (PartitionState& repl : repls) {
            StateTuple t2 = t;
            t2.factors[pos] = std::move(repl);
            next.push_back(std::move(t2));
          }
        }
        partial = std::move(next);
        if (partial.empty()) break;
      }
      for (StateTuple& t : partial) out.push_back(StateTerm{std::move(t), term.coeff});
    }
  }
  combo = std::move(out);
  combine_states(combo, fp);
}

// Retires a vertex that has no host edges left; terms that cannot absorb it
// die.
void retire_slot(StateCombo& combo, uint32_t v) {
  StateCombo out;
  for (StateTerm& term : combo) {
    bool alive = true;
    for (PartitionState& f : term.state.factors)
      if (!remove_isolated_vertex(f, v)) {
        alive = false;
        break;
      }
    if (alive) out.push_back(std::move(term));
  }
  combo = std::move(out);
}

// ---------------------------------------------------------------- transfer

struct LayerPlan {
  std::vector<std::pair<uint32_t, uint32_t>> edges;  // surviving growth edges, as slots
  uint32_t w0 = 0, w = 0;
  uint32_t retire_from = 0;  // newest block: [retire_from, retire_from + w)
  uint32_t window = 0;
};

LayerPlan layer_plan(const RecursiveFamilySpec& spec) {
  const Geometry geo = geometry(spec);
  std::vector<char> claimed = claimed_grow_positions(spec);
  LayerPlan plan;
  plan.w0 = geo.w0;
  plan.w = geo.w;
  plan.retire_from = geo.w0 + geo.r * geo.w;
  plan.window = geo.window;
  for (size_t q = 0; q < spec.grow.size(); ++q) {
    if (claimed[q]) continue;
    plan.edges.emplace_back(slot_of(geo, spec.grow[q].first), slot_of(geo, spec.grow[q].second));
  }
  return plan;
}

StateCombo transfer_state_impl(const LayerPlan& plan,
                               const std::vector<std::vector<uint32_t>>& patterns,
                               const StateTuple& state, const PrimeField& fp) {
  for (const PartitionState& f : state.factors)
    for (const auto& part : f.parts)
      for (uint32_t x : part)
        if (x >= plan.window)
          throw FamilyError(FamilyError::Code::state_hygiene,
                            "state mentions slot " + std::to_string(x) +
                                " beyond the window of " + std::to_string(plan.window));
  StateCombo combo{StateTerm{state, 1}};
  for (const auto& [u, v] : plan.edges) {
    branch_edge(combo, u, v, patterns, fp);
    if (combo.empty()) return combo;
  }
  for (uint32_t v = plan.retire_from; v < plan.retire_from + plan.w; ++v)
    retire_slot(combo, v);
  // everything left shifts one block older
  for (StateTerm& term : combo)
    for (PartitionState& f : term.state.factors)
      for (auto& part : f.parts)
        for (uint32_t& x : part) {
          if (x < plan.w0) continue;
          if (x >= plan.retire_from)
            throw FamilyError(FamilyError::Code::state_hygiene,
                              "state keeps retired slot " + std::to_string(x));
          x += plan.w;
        }
  combine_states(combo, fp);
  return combo;
}

// ---------------------------------------------------------------- seeding

bool minor_probes_nonzero(const LabeledGraph& g, const DodgsonSpec& spec,
                          const PrimeField& fp) {
  PolyEvaluator ev(g, spec, fp);
  std::vector<uint32_t> point(g.edges.size(), 1);
  if (ev.eval(point) != 0) return true;
  std::mt19937 rng(0xc21ab5eeu);
  for (int trial = 0; trial < 256; ++trial) {
    for (auto& x : point) x = rng() % fp.modulus();
    if (ev.eval(point) != 0) return true;
  }
  return false;
}

bool factors_usable(const LabeledGraph& g, uint32_t which, const std::vector<uint32_t>& edges,
                    const PrimeField& fp) {
  auto specs = formula_factors(g, which, edges);
  for (const auto& s : specs)
    if (!minor_probes_nonzero(g, s, fp)) return false;
  return true;
}

// First k-subset (lexicographic) accepted by fn, or empty.
std::vector<uint32_t> first_subset(const std::vector<uint32_t>& items, uint32_t k,
                                   const std::function<bool(const std::vector<uint32_t>&)>& fn) {
  if (k == 0 || k > items.size()) return {};
  std::vector<uint32_t> idx(k);
  for (uint32_t i = 0; i < k; ++i) idx[i] = i;
  const uint32_t n = static_cast<uint32_t>(items.size());
  while (true) {
    std::vector<uint32_t> sel(k);
    for (uint32_t i = 0; i < k; ++i) sel[i] = items[idx[i]];
    if (fn(sel)) return sel;
    int32_t i = static_cast<int32_t>(k) - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return {};
    ++idx[i];
    for (uint32_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

struct SeedBuild {
  StateCombo combo;
  uint32_t lag = 0;    // 1 when seeding consumed the newest layer
  uint32_t arity = 0;  // starting edges removed by the minor pair
};

// Appends the tuples realizing a product of minor decompositions: `counts`
// copies of each expression, coefficient-weighted, scaled by `scale`.
void product_tuples(const std::vector<ForestPolyExpr>& exprs,
                    const std::vector<uint32_t>& counts, uint32_t scale, const PrimeField& fp,
                    StateCombo& out) {
  std::vector<std::pair<StateTuple, uint32_t>> acc{{StateTuple{}, scale}};
  for (size_t f = 0; f < exprs.size(); ++f) {
    for (uint32_t c = 0; c < counts[f]; ++c) {
      std::vector<std::pair<StateTuple, uint32_t>> next;
      for (const auto& [tuple, coeff] : acc)
        for (const ForestTerm& term : exprs[f].terms) {
          StateTuple t2 = tuple;
          t2.factors.push_back(term.partition);
          next.emplace_back(std::move(t2), fp.mul(coeff, term.coeff));
        }
      acc = std::move(next);
      if (acc.empty()) return;
    }
  }
  for (auto& [tuple, coeff] : acc) out.push_back(StateTerm{std::move(tuple), coeff});
}

// Expresses c2 of member lookback+2 over window states: choose 3..5 starting
// edges among the copies later stages remove (padding from the newest layer's
// surviving growth edges when there are too few), rewrite the minor factors
// as forest sums, and send every other dying edge into the structures.
SeedBuild build_seed(const RecursiveFamilySpec& spec, const PrimeField& fp) {
  const Geometry geo = geometry(spec);
  const uint32_t m0 = geo.r + 2;
  MemberCuts mc = member_with_cuts(spec, m0);
  const LabeledGraph& g = mc.grown.g;
  std::vector<char> claimed = claimed_grow_positions(spec);
  std::vector<uint32_t> active;
  for (size_t q = 0; q < spec.grow.size(); ++q)
    if (!claimed[q]) active.push_back(mc.last_appended[q]);
  const std::vector<uint32_t>& doomed = mc.doomed;

  SeedBuild sb;
  uint32_t which = 0;
  std::vector<uint32_t> starting, assigned;
  if (doomed.size() >= 3) {
    const uint32_t need = static_cast<uint32_t>(std::min<size_t>(doomed.size(), 5));
    which = need - 2;
    starting = first_subset(doomed, need, [&](const std::vector<uint32_t>& sel) {
      return factors_usable(g, which, sel, fp);
    });
    if (starting.empty())
      throw FamilyError(FamilyError::Code::seed_degenerate,
                        "every choice of " + std::to_string(need) +
                            " starting edges among the retiring copies of member " +
                            std::to_string(m0) + " has an identically zero factor");
    for (uint32_t e : doomed)
      if (!std::binary_search(starting.begin(), starting.end(), e)) assigned.push_back(e);
  } else {
    which = 1;
    sb.lag = 1;
    const uint32_t need = 3 - static_cast<uint32_t>(doomed.size());
    auto pick = first_subset(active, need, [&](const std::vector<uint32_t>& sel) {
      std::vector<uint32_t> f = doomed;
      f.insert(f.end(), sel.begin(), sel.end());
      std::sort(f.begin(), f.end());
      return factors_usable(g, 1, f, fp);
    });
    if (pick.empty() && need > 0)
      throw FamilyError(FamilyError::Code::seed_degenerate,
                        "no padding of the retiring copies up to 3 starting edges avoids an "
                        "identically zero factor at member " +
                            std::to_string(m0));
    starting = doomed;
    starting.insert(starting.end(), pick.begin(), pick.end());
    std::sort(starting.begin(), starting.end());
    std::sort(pick.begin(), pick.end());
    for (uint32_t e : active)
      if (!std::binary_search(pick.begin(), pick.end(), e)) assigned.push_back(e);
  }
  sb.arity = which + 2;

  auto specs = formula_factors(g, which, starting);
  std::vector<ForestPolyExpr> exprs;
  exprs.reserve(specs.size());
  for (const auto& s : specs) exprs.push_back(dodgson_to_forest_mod2(g, s));

  const uint32_t pm1 = fp.modulus() - 1;
  if (specs.size() == 2) {
    product_tuples(exprs, {pm1, pm1}, 1, fp, sb.combo);
  } else {
    // difference of two products: expand the (p-1)-th power binomially
    uint32_t binom = 1;
    for (uint32_t k = 0; k <= pm1; ++k) {
      const uint32_t scale = k % 2 == 1 ? fp.neg(binom) : binom;
      product_tuples(exprs, {pm1 - k, pm1 - k, k, k}, scale, fp, sb.combo);
      if (k < pm1) binom = fp.mul(fp.mul(binom, pm1 - k), fp.inv(k + 1));
    }
  }
  combine_states(sb.combo, fp);

  auto patterns = half_patterns(fp.modulus());
  for (uint32_t e : assigned) {
    branch_edge(sb.combo, g.edges[e].first, g.edges[e].second, patterns, fp);
    if (sb.combo.empty()) break;
  }
  if (sb.lag == 1) {
    const uint32_t from = geo.w0 + (m0 - 1) * geo.w;
    for (uint32_t v = from; v < from + geo.w; ++v) retire_slot(sb.combo, v);
  }
  const uint32_t level = m0 - sb.lag;
  for (StateTerm& term : sb.combo)
    for (PartitionState& f : term.state.factors)
      for (auto& part : f.parts)
        for (uint32_t& x : part) {
          int64_t s = slot_at_stage(geo, x, level);
          if (s < 0)
            throw FamilyError(FamilyError::Code::state_hygiene,
                              "seed mentions vertex " + std::to_string(x) +
                                  " outside the window of member " + std::to_string(level));
          x = static_cast<uint32_t>(s);
        }
  combine_states(sb.combo, fp);
  return sb;
}

// ---------------------------------------------------------------- base values

// Counts the completions of each state on the fully materialized member
// lookback+1 (with its doomed copies removed) by assigning every edge,
// newest vertices first.
std::vector<uint32_t> peel_base_values(const RecursiveFamilySpec& spec,
                                       const std::vector<StateTuple>& states,
                                       const PrimeField& fp) {
  MemberCuts mc = member_with_cuts(spec, spec.lookback() + 1);
  LabeledGraph host = delete_edges(mc.grown.g, mc.doomed).graph;
  // at this member the window covers every vertex and slot ids coincide
  std::vector<uint32_t> order(host.edges.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<uint32_t>(i);
  auto key = [&](uint32_t e) {
    auto [u, v] = norm_pair(host.edges[e].first, host.edges[e].second);
    return std::make_tuple(v, u, e);
  };
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) { return key(a) > key(b); });
  std::vector<uint32_t> base_deg(host.vertex_count, 0);
  for (const auto& [u, v] : host.edges) {
    ++base_deg[u];
    ++base_deg[v];
  }
  auto patterns = half_patterns(fp.modulus());
  std::vector<uint32_t> out;
  out.reserve(states.size());
  for (const StateTuple& s : states) {
    StateCombo combo{StateTerm{s, 1}};
    std::vector<uint32_t> deg = base_deg;
    for (uint32_t v = 0; v < host.vertex_count; ++v)
      if (deg[v] == 0) retire_slot(combo, v);
    for (uint32_t e : order) {
      if (combo.empty()) break;
      auto [u, v] = host.edges[e];
      branch_edge(combo, u, v, patterns, fp);
      if (--deg[u] == 0) retire_slot(combo, u);
      if (--deg[v] == 0) retire_slot(combo, v);
    }
    uint32_t total = 0;
    for (const StateTerm& term : combo) {
      bool resolved = true;
      for (const PartitionState& f : term.state.factors)
        if (!f.parts.empty()) {
          resolved = false;
          break;
        }
      if (resolved) total = fp.add(total, term.coeff);
    }
    out.push_back(total);
  }
  return out;
}

uint32_t dot(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
             const PrimeField& fp) {
  uint32_t acc = 0;
  for (size_t i = 0; i < a.size(); ++i) acc = fp.add(acc, fp.mul(a[i], b[i]));
  return acc;
}

void require_prime_supported(const PrimeField& fp, const SolveOptions& opts) {
  if (fp.modulus() != 2 && !opts.experimental_odd)
    throw PreconditionError(
        "family solving at odd primes drops the decomposition signs and is experimental; set "
        "experimental_odd to proceed");
}

}  // namespace

// ---------------------------------------------------------------- public surface

RecursiveFamilySpec parse_family(const std::string& text, const std::string& dir) {
  RecursiveFamilySpec spec;
  std::istringstream in(text);
  std::string raw;
  size_t line_no = 0;
  enum class Sec { header, base, layer, boundary } sec = Sec::header;
  bool saw_format = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_line(raw);
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw FormatError("family file line " + std::to_string(line_no) + ": " + msg);
    };
    if (!saw_format) {
      if (line == "format: 1") {
        saw_format = true;
        continue;
      }
      fail("expected `format: 1`");
    }
    if (line == "[base]") {
      sec = Sec::base;
      continue;
    }
    if (line == "[layer]") {
      sec = Sec::layer;
      continue;
    }
    if (line == "[boundary]") {
      sec = Sec::boundary;
      continue;
    }
    if (line.front() == '[') fail("unknown section `" + line + "`");
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::vector<std::string> args;
    std::string tok;
    while (ls >> tok) args.push_back(tok);
    auto want_args = [&](size_t n) {
      if (args.size() != n)
        fail("`" + key + "` takes " + std::to_string(n) + " argument(s), got " +
             std::to_string(args.size()));
    };
    switch (sec) {
      case Sec::header:
        if (key == "name:") {
          size_t at = line.find(':');
          size_t b = line.find_first_not_of(" \t", at + 1);
          spec.name = b == std::string::npos ? "" : line.substr(b);
        } else if (key == "stride:") {
          want_args(1);
          spec.stride = parse_number(args[0], line_no, "stride");
        } else if (key == "first:") {
          want_args(1);
          spec.first = parse_number(args[0], line_no, "first member");
        } else {
          fail("unknown header line `" + key + "`");
        }
        break;
      case Sec::base:
        if (key != "graph") fail("expected `graph <path>` in [base]");
        want_args(1);
        spec.base.push_back(
            load_graph_file((std::filesystem::path(dir) / args[0]).string()));
        break;
      case Sec::layer:
        if (key == "width") {
          want_args(1);
          spec.width = parse_number(args[0], line_no, "width");
        } else if (key == "edge" || key == "cut") {
          want_args(2);
          SlotEdge e{parse_ref(args[0], line_no), parse_ref(args[1], line_no)};
          (key == "edge" ? spec.grow : spec.cut).push_back(e);
        } else {
          fail("expected `width`, `edge`, or `cut` in [layer]");
        }
        break;
      case Sec::boundary:
        if (key != "vertex") fail("expected `vertex <ref>` in [boundary]");
        want_args(1);
        spec.boundary.push_back(parse_ref(args[0], line_no));
        break;
    }
  }
  if (!saw_format) throw FormatError("family file is empty");
  return spec;
}

RecursiveFamilySpec load_family_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open family file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_family(ss.str(), std::filesystem::path(path).parent_path().string());
}

const RecursiveFamilySpec& validate_family(const RecursiveFamilySpec& spec) {
  auto shape = [&](const std::string& msg) {
    throw FamilyError(FamilyError::Code::base_shape, msg);
  };
  if (spec.base.empty()) shape("a family needs at least one base member");
  if (spec.width == 0) shape("layer width must be positive");
  if (spec.stride == 0) shape("stride must be positive");
  const Geometry geo = geometry(spec);
  if (geo.w0 == 0) shape("base member 0 has no vertices");
  for (uint32_t j = 0; j < spec.base.size(); ++j) {
    check_graph(spec.base[j]);
    const uint32_t want = geo.w0 + j * geo.w;
    if (spec.base[j].vertex_count != want)
      shape("base member " + std::to_string(j) + " has " +
            std::to_string(spec.base[j].vertex_count) + " vertices, expected " +
            std::to_string(want));
  }
  auto check_index = [&](const SlotRef& ref, const char* where) {
    const uint32_t limit = ref.in_base ? geo.w0 : geo.w;
    if (ref.index >= limit)
      shape(std::string(where) + " reference " + ref_text(ref) + " is out of range");
  };
  for (const SlotEdge& e : spec.grow) {
    check_index(e.first, "grow");
    check_index(e.second, "grow");
    for (const SlotRef* ref : {&e.first, &e.second})
      if (!ref->in_base && ref->depth > geo.r)
        throw FamilyError(FamilyError::Code::neighborhood,
                          "grow edge " + edge_text(e) + " reaches " +
                              std::to_string(ref->depth) +
                              " layers back; only " + std::to_string(geo.r) +
                              " are retained");
    if (e.first == e.second) shape("grow edge " + edge_text(e) + " is a self-loop");
  }
  for (const SlotEdge& e : spec.cut) {
    check_index(e.first, "cut");
    check_index(e.second, "cut");
  }
  const uint32_t window = geo.window;
  if (spec.boundary.size() != window)
    shape("boundary lists " + std::to_string(spec.boundary.size()) + " slots, expected " +
          std::to_string(window));
  for (uint32_t i = 0; i < window; ++i) {
    SlotRef want;
    if (i < geo.w0) {
      want.in_base = true;
      want.index = i;
    } else {
      want.depth = geo.r - (i - geo.w0) / geo.w;
      want.index = (i - geo.w0) % geo.w;
    }
    if (spec.boundary[i] != want)
      shape("boundary entry " + std::to_string(i) + " is " + ref_text(spec.boundary[i]) +
            ", expected " + ref_text(want));
  }
  claimed_grow_positions(spec);
  // materialize three stages past the base; cut entries must keep resolving
  Grown cur = grown_base(spec);
  auto window_graph = [&](const Grown& g) {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (const auto& [u, v] : g.g.edges) {
      int64_t su = slot_at_stage(geo, u, g.stage);
      int64_t sv = slot_at_stage(geo, v, g.stage);
      if (su < 0 || sv < 0) continue;
      out.push_back(norm_pair(static_cast<uint32_t>(su), static_cast<uint32_t>(sv)));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  while (cur.stage < geo.r + 2) grow_one(spec, cur, nullptr, nullptr, nullptr);
  auto settled = window_graph(cur);
  grow_one(spec, cur, nullptr, nullptr, nullptr);
  if (window_graph(cur) != settled)
    throw FamilyError(FamilyError::Code::window_drift,
                      "the window subgraph still changes between members " +
                          std::to_string(geo.r + 2) + " and " + std::to_string(geo.r + 3));
  const int64_t per_layer = static_cast<int64_t>(spec.grow.size()) -
                            static_cast<int64_t>(spec.cut.size());
  if (per_layer != 2 * static_cast<int64_t>(geo.w))
    throw FamilyError(FamilyError::Code::edge_count,
                      "each layer adds " + std::to_string(per_layer) +
                          " edges for " + std::to_string(geo.w) +
                          " vertices; the count 2|V| = |E| + 2 cannot persist");
  if (2 * static_cast<int64_t>(cur.g.vertex_count) !=
      static_cast<int64_t>(cur.g.edges.size()) + 2)
    throw FamilyError(FamilyError::Code::edge_count,
                      "member " + std::to_string(cur.stage) + " has " +
                          std::to_string(cur.g.vertex_count) + " vertices and " +
                          std::to_string(cur.g.edges.size()) +
                          " edges; 2|V| = |E| + 2 fails");
  return spec;
}

LabeledGraph family_member(const RecursiveFamilySpec& spec, uint32_t n) {
  validate_family(spec);
  if (n <= spec.lookback()) return spec.base[n];
  return grow_to(spec, n).g;
}

void StateTuple::canonicalize() {
  for (PartitionState& f : factors) f.canonicalize();
  std::sort(factors.begin(), factors.end());
}

void combine_states(StateCombo& combo, const PrimeField& fp) {
  for (StateTerm& t : combo) t.state.canonicalize();
  std::sort(combo.begin(), combo.end(),
            [](const StateTerm& a, const StateTerm& b) { return a.state < b.state; });
  StateCombo out;
  for (StateTerm& t : combo) {
    const uint32_t c = t.coeff % fp.modulus();
    if (!out.empty() && out.back().state == t.state)
      out.back().coeff = fp.add(out.back().coeff, c);
    else
      out.push_back(StateTerm{std::move(t.state), c});
  }
  std::erase_if(out, [](const StateTerm& t) { return t.coeff == 0; });
  combo = std::move(out);
}

StateCombo transfer_state(const RecursiveFamilySpec& spec, const StateTuple& state,
                          const PrimeField& fp) {
  validate_family(spec);
  return transfer_state_impl(layer_plan(spec), half_patterns(fp.modulus()), state, fp);
}

StateCombo seed_states(const RecursiveFamilySpec& spec, const PrimeField& fp,
                       const SolveOptions& opts) {
  validate_family(spec);
  require_prime_supported(fp, opts);
  return build_seed(spec, fp).combo;
}

RecurrenceSystem build_recurrence(const RecursiveFamilySpec& spec, const PrimeField& fp,
                                  const SolveOptions& opts, const StateCombo* seed_override) {
  validate_family(spec);
  require_prime_supported(fp, opts);
  SeedBuild sb;
  if (seed_override) {
    sb.combo = *seed_override;
    combine_states(sb.combo, fp);
  } else {
    sb = build_seed(spec, fp);
  }
  const LayerPlan plan = layer_plan(spec);
  const auto patterns = half_patterns(fp.modulus());
  std::map<StateTuple, uint32_t> index;
  std::vector<StateTuple> discovered;
  std::vector<StateCombo> images;
  auto intern = [&](const StateTuple& s) -> uint32_t {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    if (discovered.size() >= opts.state_cap)
      throw FamilyError(FamilyError::Code::state_overflow,
                        "transfer closure exceeded the state cap of " +
                            std::to_string(opts.state_cap));
    const uint32_t id = static_cast<uint32_t>(discovered.size());
    index.emplace(s, id);
    discovered.push_back(s);
    return id;
  };
  for (const StateTerm& t : sb.combo) intern(t.state);
  for (size_t i = 0; i < discovered.size(); ++i) {
    StateCombo img = transfer_state_impl(plan, patterns, discovered[i], fp);
    for (const StateTerm& t : img) intern(t.state);
    images.push_back(std::move(img));
  }
  const size_t dim = discovered.size();
  std::vector<uint32_t> perm(dim);
  for (size_t i = 0; i < dim; ++i) perm[i] = static_cast<uint32_t>(i);
  std::sort(perm.begin(), perm.end(),
            [&](uint32_t a, uint32_t b) { return discovered[a] < discovered[b]; });
  std::vector<uint32_t> rank(dim);
  for (size_t k = 0; k < dim; ++k) rank[perm[k]] = static_cast<uint32_t>(k);
  RecurrenceSystem sys;
  sys.states.reserve(dim);
  for (uint32_t i : perm) sys.states.push_back(discovered[i]);
  sys.transfer = FpMatrix(dim, dim);
  for (size_t i = 0; i < dim; ++i)
    for (const StateTerm& t : images[i])
      sys.transfer.at(rank[i], rank[index.at(t.state)]) = t.coeff;
  sys.functional.assign(dim, 0);
  for (const StateTerm& t : sb.combo) sys.functional[rank[index.at(t.state)]] = t.coeff;
  sys.base_values = peel_base_values(spec, sys.states, fp);
  sys.base_level = spec.lookback() + 1;
  sys.seed_lag = sb.lag;
  sys.formula_arity = sb.arity;
  return sys;
}

FpMatrix transfer_matrix(const RecursiveFamilySpec& spec, const PrimeField& fp,
                         const SolveOptions& opts) {
  return build_recurrence(spec, fp, opts).transfer;
}

uint32_t RecurrenceSolution::at(uint32_t n) const {
  if (n < offset) throw PreconditionError("member below the solved range");
  const uint64_t k = n - offset;
  if (k < preperiod.size()) return preperiod[k];
  return period[(k - preperiod.size()) % period.size()];
}

RecurrenceSolution solve_family(const RecursiveFamilySpec& spec, const PrimeField& fp,
                                const SolveOptions& opts, SolveDiagnostics* diag) {
  RecurrenceSystem sys = build_recurrence(spec, fp, opts);
  const uint32_t start = sys.base_level + sys.seed_lag;
  OrbitDecomposition orbit = iterate_until_periodic(sys.transfer, sys.base_values, fp);
  const size_t lam = orbit.preperiod.size(), rho = orbit.period.size();
  auto vec_at = [&](uint64_t j) -> const std::vector<uint32_t>& {
    return j < lam ? orbit.preperiod[j] : orbit.period[(j - lam) % rho];
  };
  const int64_t base_edges = static_cast<int64_t>(spec.base.back().edges.size());
  const int64_t per_layer =
      static_cast<int64_t>(spec.grow.size()) - static_cast<int64_t>(spec.cut.size());
  auto rec_value = [&](uint32_t n) {
    uint32_t d = dot(sys.functional, vec_at(n - sys.seed_lag - sys.base_level), fp);
    if (fp.modulus() != 2 && sys.formula_arity != 0) {
      const int64_t nvars = base_edges + per_layer * (n - spec.lookback()) - sys.formula_arity;
      bool negate = sys.formula_arity != 4;  // product variants 1 and 3 enter negated
      if (nvars % 2 == 0) negate = !negate;  // even variable count flips the count
      if (negate) d = fp.neg(d);
    }
    return d;
  };

  const uint32_t warm = opts.warmup ? opts.warmup : spec.lookback() + spec.stride + 5;
  C2Options copts;
  copts.budget = opts.budget;
  std::vector<std::pair<uint32_t, uint32_t>> direct;
  for (uint32_t n = spec.first; n <= spec.first + warm; ++n) {
    LabeledGraph g = family_member(spec, n);
    try {
      uint32_t val = fp.modulus() == 2 ? c2_assign_mod2(g, 2, {}, copts).value
                                       : c2_formula(g, 2, {}, fp, copts).value;
      direct.emplace_back(n, val);
    } catch (const BudgetExceededError&) {
      break;
    }
  }
  uint32_t agree = 0;
  for (const auto& [n, val] : direct) {
    if (n < start) continue;
    const uint32_t rec = rec_value(n);
    if (rec != val)
      throw FamilyError(FamilyError::Code::overlap_mismatch,
                        "member " + std::to_string(n) + ": recurrence gives " +
                            std::to_string(rec) + ", direct computation gives " +
                            std::to_string(val));
    ++agree;
  }
  if (agree < 3)
    throw FamilyError(FamilyError::Code::overlap_mismatch,
                      "only " + std::to_string(agree) +
                          " member(s) could be checked directly against the recurrence; need 3");

  // values from `first`; the sequence is periodic from pc with period rho
  const uint64_t pc = std::max<uint64_t>(start + lam, spec.first);
  const uint64_t horizon = pc + rho;
  std::vector<uint32_t> seq;
  seq.reserve(horizon - spec.first);
  for (uint64_t n = spec.first; n < horizon; ++n) {
    if (n >= start) {
      seq.push_back(rec_value(static_cast<uint32_t>(n)));
      continue;
    }
    auto it = std::find_if(direct.begin(), direct.end(),
                           [&](const auto& pr) { return pr.first == n; });
    if (it == direct.end())
      throw BudgetExceededError("direct value for member " + std::to_string(n) +
                                " is needed below the recurrence range");
    seq.push_back(it->second);
  }
  uint32_t period = static_cast<uint32_t>(rho);
  for (uint32_t cand = 1; cand <= rho; ++cand) {
    if (rho % cand) continue;
    bool ok = true;
    for (uint64_t n = pc; n + cand < horizon && ok; ++n)
      ok = seq[n - spec.first] == seq[n - spec.first + cand];
    if (ok) {
      period = cand;
      break;
    }
  }
  uint64_t s = pc;
  while (s > spec.first && seq[s - 1 - spec.first] == seq[s - 1 + period - spec.first]) --s;
  RecurrenceSolution sol;
  sol.offset = spec.first;
  sol.preperiod.assign(seq.begin(), seq.begin() + (s - spec.first));
  sol.period.assign(seq.begin() + (s - spec.first), seq.begin() + (s - spec.first) + period);
  if (diag) {
    diag->states = static_cast<uint32_t>(sys.states.size());
    diag->orbit_preperiod = static_cast<uint32_t>(lam);
    diag->orbit_period = static_cast<uint32_t>(rho);
    diag->recurrence_start = start;
    diag->checked = std::move(direct);
  }
  return sol;
}

}  // namespace c2lab
