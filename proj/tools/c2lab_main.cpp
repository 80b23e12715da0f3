#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "c2lab/c2.hpp"
#include "c2lab/errors.hpp"
#include "c2lab/families.hpp"
#include "c2lab/graph.hpp"
#include "c2lab/recurrence.hpp"
#include "c2lab/report.hpp"

using namespace c2lab;

namespace {

using Clock = std::chrono::steady_clock;
using ojson = nlohmann::ordered_json;

// argv echo without argv[0], so reports don't embed the binary's path.
std::string echo_command(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) out += ' ';
    out += argv[i];
  }
  return out;
}

uint64_t default_budget() {
  const char* s = std::getenv("C2LAB_BUDGET");
  if (!s || !*s) return C2Options{}.budget;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (!end || *end != '\0' || v == 0)
    throw PreconditionError("C2LAB_BUDGET must be a positive integer");
  return v;
}

LabeledGraph read_graph(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return parse_graph(ss.str());
  }
  return load_graph_file(path);
}

uint64_t elapsed_ms(Clock::time_point t0) {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count());
}

void deliver(const RunReport& rep, const std::string& json_dest) {
  if (json_dest.empty()) return;
  if (json_dest == "-") {
    std::cout << rep.render();
    return;
  }
  std::ofstream out(json_dest);
  if (!out) throw PreconditionError("cannot write " + json_dest);
  out << rep.render();
}

// Arity of the special-edge list each method wants; 0 = none.
size_t method_arity(const std::string& method) {
  if (method == "formula1") return 3;
  if (method == "formula2" || method == "assign") return 4;
  if (method == "formula3") return 5;
  return 0;
}

C2Result run_method(const std::string& method, const LabeledGraph& g, const PrimeField& fp,
                    const std::vector<uint32_t>& edges, const C2Options& opts) {
  // An edge list of the wrong arity is only an error for the method asked
  // for by name; cross-check quietly falls back to the default choice.
  const std::vector<uint32_t>& use =
      edges.size() == method_arity(method) ? edges : std::vector<uint32_t>{};
  if (method == "brute") return c2_brute(g, fp, opts);
  if (method == "formula1") return c2_formula(g, 1, use, fp, opts);
  if (method == "formula2") return c2_formula(g, 2, use, fp, opts);
  if (method == "formula3") return c2_formula(g, 3, use, fp, opts);
  if (method == "assign") {
    if (fp.modulus() != 2)
      throw PreconditionError("method assign requires p = 2, got p = " +
                              std::to_string(fp.modulus()));
    return c2_assign_mod2(g, 2, use, opts);
  }
  throw PreconditionError("unknown method " + method);
}

ojson result_json(const C2Result& r) {
  ojson j;
  j["value"] = r.value;
  j["p"] = r.p;
  j["method"] = r.method;
  j["edges"] = r.edges;
  j["work"] = r.work;
  j["raw_count"] = r.raw_count;
  j["divisible"] = r.divisible;
  return j;
}

const char* family_error_name(FamilyError::Code c) {
  switch (c) {
    case FamilyError::Code::base_shape: return "base_shape";
    case FamilyError::Code::neighborhood: return "neighborhood";
    case FamilyError::Code::cut_unmatched: return "cut_unmatched";
    case FamilyError::Code::window_drift: return "window_drift";
    case FamilyError::Code::edge_count: return "edge_count";
    case FamilyError::Code::state_overflow: return "state_overflow";
    case FamilyError::Code::seed_degenerate: return "seed_degenerate";
    case FamilyError::Code::state_hygiene: return "state_hygiene";
    case FamilyError::Code::overlap_mismatch: return "overlap_mismatch";
  }
  return "unknown";
}

// ---- gen ----------------------------------------------------------------

struct GenArgs {
  std::string family;
  std::vector<uint32_t> params;         // positional numbers after the family
  std::string kind = "capped";          // xladder only
  std::vector<std::string> decomplete;  // raw --decomplete tokens; "" = bare flag
  bool decomplete_given = false;
  std::string out;
};

uint32_t default_decompletion(const std::string& family, const LabeledGraph& g) {
  if (family == "circulant") return g.vertex_count - 1;
  return 0;
}

// The --decomplete option takes an optional vertex; bare means the family
// default. Returns the vertex to remove for this graph.
uint32_t decompletion_vertex(const std::vector<std::string>& tokens, const std::string& family,
                             const LabeledGraph& g) {
  if (tokens.empty() || tokens[0].empty()) return default_decompletion(family, g);
  try {
    size_t used = 0;
    unsigned long v = std::stoul(tokens[0], &used);
    if (used != tokens[0].size()) throw std::invalid_argument("junk");
    return static_cast<uint32_t>(v);
  } catch (const std::exception&) {
    throw PreconditionError("--decomplete expects a vertex id, got '" + tokens[0] + "'");
  }
}

bool explicit_decompletion(const std::vector<std::string>& tokens) {
  return !tokens.empty() && !tokens[0].empty();
}

LabeledGraph build_gen(const GenArgs& a) {
  if (a.family == "toroidal") {
    if (a.params.size() != 3)
      throw PreconditionError("gen toroidal expects three numbers: k l m");
    return gen_toroidal_grid(a.params[0], a.params[1], a.params[2]);
  }
  if (a.family == "circulant") {
    if (a.params.size() < 2)
      throw PreconditionError("gen circulant expects a size and at least one gap");
    return gen_circulant(a.params[0],
                         std::vector<uint32_t>(a.params.begin() + 1, a.params.end()));
  }
  if (a.family == "xladder") {
    if (a.params.size() != 1) throw PreconditionError("gen xladder expects one number: size");
    return gen_x_ladder(a.params[0], a.kind == "capped");
  }
  throw PreconditionError("unknown family " + a.family);
}

int cmd_gen(const GenArgs& a) {
  LabeledGraph g = build_gen(a);
  if (a.decomplete_given) g = decomplete(g, decompletion_vertex(a.decomplete, a.family, g));
  if (a.out.empty() || a.out == "-") {
    std::cout << emit_graph(g);
    return 0;
  }
  std::ofstream out(a.out);
  if (!out) throw PreconditionError("cannot write " + a.out);
  out << emit_graph(g);
  return 0;
}

// ---- c2 -----------------------------------------------------------------

struct C2Args {
  std::string graph;
  uint32_t p = 2;
  std::string method = "assign";
  std::vector<uint32_t> edges;
  bool cross_check = false;
  uint64_t budget = 0;
  uint32_t threads = 1;
  std::string json_dest;
  bool no_timing = false;
};

int cmd_c2(const C2Args& a, const std::string& command) {
  LabeledGraph g = read_graph(a.graph);
  check_graph(g);
  PrimeField fp(a.p);
  C2Options opts;
  opts.budget = a.budget;
  opts.threads = a.threads;
  const bool human = a.json_dest != "-";

  RunReport rep;
  rep.command = command;
  rep.inputs["graph"] = a.graph;
  rep.inputs["graph_hash"] = graph_hash(g);
  rep.inputs["vertices"] = g.vertex_count;
  rep.inputs["edges"] = g.edges.size();
  rep.inputs["p"] = a.p;
  rep.inputs["special_edges"] = a.edges;
  rep.inputs["budget"] = a.budget;
  rep.inputs["threads"] = a.threads;

  auto t0 = Clock::now();
  int rc = 0;
  if (a.cross_check) {
    std::vector<std::string> methods = {"brute", "formula1", "formula2", "formula3"};
    if (a.p == 2) methods.push_back("assign");
    ojson per = ojson::object();
    std::optional<uint32_t> value;
    bool agree = true;
    size_t ran = 0;
    for (const auto& m : methods) {
      try {
        C2Result r = run_method(m, g, fp, a.edges, opts);
        per[m] = result_json(r);
        ++ran;
        if (!value)
          value = r.value;
        else if (*value != r.value)
          agree = false;
      } catch (const std::exception& e) {
        per[m] = ojson{{"skipped", e.what()}};
      }
    }
    rep.method = "cross-check";
    rep.result["agree"] = agree;
    rep.result["methods_run"] = ran;
    if (value) rep.result["value"] = *value;
    rep.result["methods"] = per;
    rep.elapsed_ms = a.no_timing ? 0 : elapsed_ms(t0);
    if (human) {
      if (value && agree)
        std::cout << "c2 = " << *value << " (mod " << a.p << ")  [cross-check, " << ran
                  << " methods agree, " << rep.elapsed_ms << " ms]\n";
      else if (!agree)
        std::cout << "cross-check FAILED: methods disagree\n";
      else
        std::cout << "cross-check inconclusive: no method completed\n";
      for (auto& [m, r] : per.items()) {
        if (r.contains("skipped"))
          std::cout << "  " << m << ": skipped (" << r["skipped"].get<std::string>() << ")\n";
        else
          std::cout << "  " << m << ": " << r["value"] << " (work " << r["work"] << ")\n";
      }
    }
    if (!agree || ran == 0) rc = 1;
  } else {
    C2Result r = run_method(a.method, g, fp, a.edges, opts);
    rep.method = r.method;
    rep.result = result_json(r);
    rep.elapsed_ms = a.no_timing ? 0 : elapsed_ms(t0);
    if (human)
      std::cout << "c2 = " << r.value << " (mod " << a.p << ")  [" << r.method << ", work "
                << r.work << ", " << rep.elapsed_ms << " ms]\n";
  }
  deliver(rep, a.json_dest);
  return rc;
}

// ---- scan ---------------------------------------------------------------

struct ScanArgs {
  std::string family;
  uint32_t l = 0, m = 0;             // toroidal
  std::vector<uint32_t> gaps;        // circulant
  std::string kind = "capped";          // xladder
  std::string n_range;
  uint32_t n_step = 1;
  std::vector<std::string> decomplete;  // as in gen
  bool decomplete_given = false;
  uint32_t p = 2;
  std::string method = "assign";
  uint64_t budget = 0;
  uint32_t threads = 1;
  std::string json_dest;
  bool no_timing = false;
};

std::pair<uint32_t, uint32_t> parse_range(const std::string& s) {
  auto c = s.find(':');
  size_t used = 0;
  try {
    if (c == std::string::npos) throw std::invalid_argument("no colon");
    unsigned long a = std::stoul(s.substr(0, c), &used);
    if (used != c) throw std::invalid_argument("junk");
    std::string tail = s.substr(c + 1);
    unsigned long b = std::stoul(tail, &used);
    if (used != tail.size() || a > b) throw std::invalid_argument("junk");
    return {static_cast<uint32_t>(a), static_cast<uint32_t>(b)};
  } catch (const std::exception&) {
    throw PreconditionError("--n-range expects A:B with A <= B, got '" + s + "'");
  }
}

LabeledGraph build_scan_member(const ScanArgs& a, uint32_t n) {
  if (a.family == "toroidal") {
    if (a.m == 0) throw PreconditionError("scan toroidal needs --m");
    return gen_toroidal_grid(n, a.l, a.m);
  }
  if (a.family == "circulant") {
    if (a.gaps.empty()) throw PreconditionError("scan circulant needs --gaps");
    return gen_circulant(n, a.gaps);
  }
  if (a.family == "xladder") return gen_x_ladder(n, a.kind == "capped");
  throw PreconditionError("unknown family " + a.family);
}

int cmd_scan(const ScanArgs& a, const std::string& command) {
  auto [lo, hi] = parse_range(a.n_range);
  PrimeField fp(a.p);
  C2Options opts;
  opts.budget = a.budget;
  opts.threads = a.threads;
  const bool human = a.json_dest != "-";

  RunReport rep;
  rep.command = command;
  rep.method = a.method;
  rep.inputs["family"] = a.family;
  if (a.family == "toroidal") {
    rep.inputs["l"] = a.l;
    rep.inputs["m"] = a.m;
  } else if (a.family == "circulant") {
    rep.inputs["gaps"] = a.gaps;
  } else {
    rep.inputs["kind"] = a.kind;
  }
  rep.inputs["n_range"] = std::vector<uint32_t>{lo, hi};
  rep.inputs["n_step"] = a.n_step;
  if (!a.decomplete_given)
    rep.inputs["decomplete"] = nullptr;
  else if (explicit_decompletion(a.decomplete))
    rep.inputs["decomplete"] = decompletion_vertex(a.decomplete, a.family, LabeledGraph{1, {}});
  else
    rep.inputs["decomplete"] = "default";
  rep.inputs["p"] = a.p;
  rep.inputs["budget"] = a.budget;
  rep.inputs["threads"] = a.threads;

  auto t0 = Clock::now();
  ojson rows = ojson::array();
  bool any_error = false;
  if (human)
    std::cout << std::setw(4) << "n" << std::setw(10) << "vertices" << std::setw(8) << "edges"
              << std::setw(7) << "value" << std::setw(12) << "work" << std::setw(8) << "ms"
              << "  note\n";
  for (uint32_t n = lo; n <= hi; n += a.n_step) {
    ojson row;
    row["n"] = n;
    auto r0 = Clock::now();
    try {
      LabeledGraph g = build_scan_member(a, n);
      if (a.decomplete_given) g = decomplete(g, decompletion_vertex(a.decomplete, a.family, g));
      C2Result r = run_method(a.method, g, fp, {}, opts);
      uint64_t ms = a.no_timing ? 0 : elapsed_ms(r0);
      row["vertices"] = g.vertex_count;
      row["edges"] = g.edges.size();
      row["graph_hash"] = graph_hash(g);
      row["value"] = r.value;
      row["work"] = r.work;
      row["elapsed_ms"] = ms;
      if (human)
        std::cout << std::setw(4) << n << std::setw(10) << g.vertex_count << std::setw(8)
                  << g.edges.size() << std::setw(7) << r.value << std::setw(12) << r.work
                  << std::setw(8) << ms << "\n";
    } catch (const std::exception& e) {
      any_error = true;
      row["error"] = e.what();
      if (human)
        std::cout << std::setw(4) << n << std::setw(10) << "-" << std::setw(8) << "-"
                  << std::setw(7) << "-" << std::setw(12) << "-" << std::setw(8) << "-"
                  << "  " << e.what() << "\n";
    }
    rows.push_back(std::move(row));
  }
  rep.result["rows"] = std::move(rows);
  rep.result["errors"] = any_error;
  rep.elapsed_ms = a.no_timing ? 0 : elapsed_ms(t0);
  deliver(rep, a.json_dest);
  return any_error ? 1 : 0;
}

// ---- recur --------------------------------------------------------------

struct RecurArgs {
  std::string spec_path;
  uint32_t p = 2;
  uint64_t budget = 0;
  uint64_t state_cap = 0;
  uint32_t warmup = 0;
  bool experimental_odd = false;
  std::string json_dest;
  bool no_timing = false;
};

int cmd_recur(const RecurArgs& a, const std::string& command) {
  RecursiveFamilySpec spec = load_family_file(a.spec_path);
  PrimeField fp(a.p);
  SolveOptions opts;
  opts.budget = a.budget;
  if (a.state_cap) opts.state_cap = a.state_cap;
  opts.warmup = a.warmup;
  opts.experimental_odd = a.experimental_odd;
  const bool human = a.json_dest != "-";

  RunReport rep;
  rep.command = command;
  rep.method = "recurrence";
  rep.inputs["spec"] = a.spec_path;
  rep.inputs["family"] = spec.name;
  rep.inputs["stride"] = spec.stride;
  rep.inputs["first"] = spec.first;
  rep.inputs["p"] = a.p;
  rep.inputs["budget"] = a.budget;
  rep.inputs["warmup"] = opts.warmup;
  rep.inputs["state_cap"] = opts.state_cap;

  auto t0 = Clock::now();
  SolveDiagnostics diag;
  RecurrenceSolution sol = solve_family(spec, fp, opts, &diag);
  rep.elapsed_ms = a.no_timing ? 0 : elapsed_ms(t0);

  ojson overlap = ojson::array();
  for (auto [n, v] : diag.checked)
    if (n >= diag.recurrence_start) overlap.push_back(std::vector<uint32_t>{n, v});
  rep.result["offset"] = sol.offset;
  rep.result["preperiod"] = sol.preperiod;
  rep.result["period"] = sol.period;
  rep.result["states"] = diag.states;
  rep.result["orbit_preperiod"] = diag.orbit_preperiod;
  rep.result["orbit_period"] = diag.orbit_period;
  rep.result["recurrence_start"] = diag.recurrence_start;
  rep.result["overlap"] = std::move(overlap);

  if (human) {
    auto print_tuple = [](const std::vector<uint32_t>& v) {
      std::ostringstream ss;
      ss << "(";
      for (size_t i = 0; i < v.size(); ++i) ss << (i ? "," : "") << v[i];
      ss << ")";
      return ss.str();
    };
    std::cout << "family: " << spec.name << "\n";
    std::cout << "p=" << a.p << ": preperiod " << print_tuple(sol.preperiod) << " period "
              << print_tuple(sol.period) << "  [" << diag.states << " states, "
              << rep.elapsed_ms << " ms]\n";
    size_t checked = 0;
    for (auto [n, v] : diag.checked)
      if (n >= diag.recurrence_start) ++checked;
    std::cout << "overlap verified: " << checked << " members directly recounted (from member "
              << diag.recurrence_start << ")\n";
    std::cout << "values:";
    for (uint32_t n = sol.offset; n < sol.offset + 8; ++n)
      std::cout << " " << sol.at(n);
    std::cout << " ...\n";
  }
  deliver(rep, a.json_dest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  CLI::App app{"exact c2 invariants over small prime fields, and recurrences for layered graph families"};
  app.require_subcommand(1);
  const std::string command = echo_command(argc, argv);
  int rc = 0;

  try {
    const uint64_t budget0 = default_budget();

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "write a generated graph in the text format");
    gen->add_option("family", ga.family, "toroidal | circulant | xladder")
        ->required()
        ->check(CLI::IsMember({"toroidal", "circulant", "xladder"}));
    gen->add_option("params", ga.params,
                    "toroidal: k l m; circulant: n gaps...; xladder: size");
    gen->add_option("--kind", ga.kind, "xladder flavor")
        ->check(CLI::IsMember({"capped", "symmetric"}));
    auto* gd = gen->add_option("--decomplete", ga.decomplete,
                               "remove a vertex (bare flag = family default)")
                   ->expected(0, 1);
    gen->add_option("-o,--output", ga.out, "output path (default stdout)");
    gen->callback([&] {
      ga.decomplete_given = gd->count() > 0;
      rc = cmd_gen(ga);
    });

    C2Args ca;
    ca.budget = budget0;
    auto* c2 = app.add_subcommand("c2", "compute the invariant of one graph");
    c2->add_option("graph", ca.graph, "graph file ('-' = stdin)")->required();
    c2->add_option("--p", ca.p, "prime modulus")->default_val(2);
    c2->add_option("--method", ca.method, "brute | formula1 | formula2 | formula3 | assign")
        ->default_val("assign")
        ->check(CLI::IsMember({"brute", "formula1", "formula2", "formula3", "assign"}));
    c2->add_option("--edges", ca.edges, "special edge ids for the formula methods")
        ->delimiter(',');
    c2->add_flag("--cross-check", ca.cross_check,
                 "run every feasible method and require agreement");
    c2->add_option("--budget", ca.budget, "work cap (default: C2LAB_BUDGET or 2^26)");
    c2->add_option("--threads", ca.threads, "worker thread cap")->check(CLI::PositiveNumber);
    c2->add_option("--json", ca.json_dest, "write the JSON report here ('-' = stdout only)");
    c2->add_flag("--no-timing", ca.no_timing, "zero the timing fields (reproducible output)");
    c2->callback([&] { rc = cmd_c2(ca, command); });

    ScanArgs sa;
    sa.budget = budget0;
    auto* scan = app.add_subcommand("scan", "sweep a family parameter, one row per member");
    scan->add_option("family", sa.family, "toroidal | circulant | xladder")
        ->required()
        ->check(CLI::IsMember({"toroidal", "circulant", "xladder"}));
    scan->add_option("--l", sa.l, "toroidal twist");
    scan->add_option("--m", sa.m, "toroidal rows");
    scan->add_option("--gaps", sa.gaps, "circulant gaps")->delimiter(',');
    scan->add_option("--kind", sa.kind, "xladder flavor")
        ->check(CLI::IsMember({"capped", "symmetric"}));
    scan->add_option("--n-range", sa.n_range, "size range A:B (toroidal: k)")->required();
    scan->add_option("--n-step", sa.n_step, "range step")->check(CLI::PositiveNumber);
    auto* sd = scan->add_option("--decomplete", sa.decomplete,
                                "remove a vertex per member (bare flag = family default)")
                   ->expected(0, 1);
    scan->add_option("--p", sa.p, "prime modulus")->default_val(2);
    scan->add_option("--method", sa.method, "brute | formula1 | formula2 | formula3 | assign")
        ->default_val("assign")
        ->check(CLI::IsMember({"brute", "formula1", "formula2", "formula3", "assign"}));
    scan->add_option("--budget", sa.budget, "work cap per row");
    scan->add_option("--threads", sa.threads, "worker thread cap")->check(CLI::PositiveNumber);
    scan->add_option("--json", sa.json_dest, "write the JSON report here ('-' = stdout only)");
    scan->add_flag("--no-timing", sa.no_timing, "zero the timing fields");
    scan->callback([&] {
      sa.decomplete_given = sd->count() > 0;
      rc = cmd_scan(sa, command);
    });

    RecurArgs ra;
    ra.budget = budget0;
    auto* recur = app.add_subcommand("recur", "solve a recursive family from a spec file");
    recur->add_option("spec", ra.spec_path, "family spec file (.c2fam)")->required();
    recur->add_option("--p", ra.p, "prime modulus")->default_val(2);
    recur->add_option("--budget", ra.budget, "work cap per direct member");
    recur->add_option("--state-cap", ra.state_cap, "transfer closure size cap");
    recur->add_option("--warmup", ra.warmup, "direct members to recount (0 = default)");
    recur->add_flag("--experimental-odd", ra.experimental_odd, "unlock p > 2 (unverified signs)");
    recur->add_option("--json", ra.json_dest, "write the JSON report here ('-' = stdout only)");
    recur->add_flag("--no-timing", ra.no_timing, "zero the timing fields");
    recur->callback([&] { rc = cmd_recur(ra, command); });

    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const FamilyError& e) {
    std::cerr << "error [" << family_error_name(e.code) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
