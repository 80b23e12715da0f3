// Exercises the installed CLI binary end to end: golden byte-exact reports,
// exit codes, env mirroring, and the report round-trip. Invoked as
//   test_cli_formats <path-to-c2lab> <source-dir>
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "c2lab/errors.hpp"
#include "c2lab/report.hpp"

namespace {

std::string g_cli, g_src;

struct RunOut {
  int rc = -1;
  std::string out;
};

// Runs the CLI from the source directory so relative paths (and the command
// echo inside reports) are stable.
RunOut run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = "cd '" + g_src + "' && " + (env.empty() ? "" : env + " ") + "'" + g_cli +
                    "' " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  std::string out;
  char buf[4096];
  size_t k;
  while ((k = fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, k);
  int st = pclose(f);
  RunOut r;
  r.rc = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = std::move(out);
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden(const char* name) { return g_src + "/tests/golden/" + name; }

}  // namespace

TEST_CASE("report round-trip is lossless and byte-stable") {
  c2lab::RunReport rep;
  rep.command = "c2 foo.txt --p 2";
  rep.method = "assign2";
  rep.inputs["graph"] = "foo.txt";
  rep.inputs["p"] = 2;
  rep.result["value"] = 1;
  rep.elapsed_ms = 42;
  const std::string text = rep.render();
  c2lab::RunReport back = c2lab::RunReport::parse(text);
  CHECK(back.command == rep.command);
  CHECK(back.method == rep.method);
  CHECK(back.inputs == rep.inputs);
  CHECK(back.result == rep.result);
  CHECK(back.elapsed_ms == rep.elapsed_ms);
  CHECK(back.render() == text);

  CHECK_THROWS_AS(c2lab::RunReport::parse("not json"), c2lab::FormatError);
  CHECK_THROWS_AS(c2lab::RunReport::parse("[1,2]"), c2lab::FormatError);
  CHECK_THROWS_AS(c2lab::RunReport::parse(R"({"format_version": 2})"), c2lab::FormatError);
  CHECK_THROWS_AS(c2lab::RunReport::parse(R"({"format_version": 1, "command": "x"})"),
                  c2lab::FormatError);
}

TEST_CASE("gen output matches the golden graph") {
  auto r = run_cli("gen toroidal 3 0 3 --decomplete 0");
  CHECK(r.rc == 0);
  CHECK(r.out == slurp(golden("toroidal_3_0_3_dec0.txt")));

  // full torus: 9 vertices, 18 edges
  auto full = run_cli("gen toroidal 3 0 3");
  CHECK(full.rc == 0);
  CHECK(full.out.find("v 9") == 0);
  CHECK(std::count(full.out.begin(), full.out.end(), '\n') == 19);
}

TEST_CASE("c2 report is byte-exact against the golden") {
  const std::string args =
      "c2 tests/golden/x_ladder_capped8_dec0.txt --json - --no-timing";
  auto r = run_cli(args);
  CHECK(r.rc == 0);
  CHECK(r.out == slurp(golden("report_c2_xl8.json")));

  // determinism: a second run produces identical bytes
  CHECK(run_cli(args).out == r.out);

  c2lab::RunReport rep = c2lab::RunReport::parse(r.out);
  CHECK(rep.result["value"] == 0);
  CHECK(rep.elapsed_ms == 0);
  CHECK(rep.inputs["graph_hash"].get<std::string>().size() == 16);
}

TEST_CASE("scan report is byte-exact against the golden") {
  auto r = run_cli(
      "scan circulant --gaps 1,3 --n-range 7:10 --decomplete --json - --no-timing");
  CHECK(r.rc == 0);
  CHECK(r.out == slurp(golden("report_scan_skew.json")));
  c2lab::RunReport rep = c2lab::RunReport::parse(r.out);
  const auto& rows = rep.result["rows"];
  REQUIRE(rows.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(rows[i]["n"] == 7 + i);
    CHECK(rows[i]["value"] == (7 + i) % 2);  // the alternating skew column
  }
}

TEST_CASE("recur report is byte-exact against the golden") {
  auto r = run_cli("recur specs/nonskew3.c2fam --warmup 4 --json - --no-timing");
  CHECK(r.rc == 0);
  CHECK(r.out == slurp(golden("report_recur_grid.json")));
  c2lab::RunReport rep = c2lab::RunReport::parse(r.out);
  CHECK(rep.result["period"] == nlohmann::ordered_json::array({0}));
  CHECK(rep.result["overlap"].size() == 3);
}

TEST_CASE("reports carry the documented envelope") {
  // The schema ships in-repo and the goldens satisfy its required fields.
  auto schema = nlohmann::json::parse(slurp(g_src + "/docs/report-schema.json"));
  CHECK(schema["properties"]["format_version"]["const"] == 1);
  for (const char* name :
       {"report_c2_xl8.json", "report_scan_skew.json", "report_recur_grid.json"}) {
    auto doc = nlohmann::json::parse(slurp(golden(name)));
    for (const auto& key : schema["required"])
      CHECK_MESSAGE(doc.contains(key.get<std::string>()),
                    name << " missing " << key.get<std::string>());
    CHECK(doc["format_version"] == 1);
  }
}

TEST_CASE("exit codes and env mirroring") {
  // a failed row makes scan exit nonzero but not stop
  auto r = run_cli(
      "scan xladder --kind symmetric --n-range 8:9 --decomplete --json - --no-timing");
  CHECK(r.rc == 1);
  c2lab::RunReport rep = c2lab::RunReport::parse(r.out);
  REQUIRE(rep.result["rows"].size() == 2);
  CHECK(rep.result["rows"][0].contains("value"));   // size 8 works
  CHECK(rep.result["rows"][1].contains("error"));   // odd symmetric size cannot exist
  CHECK(rep.result["errors"] == true);

  // C2LAB_BUDGET mirrors --budget; the flag wins
  auto env_only = run_cli("c2 tests/golden/x_ladder_capped8_dec0.txt --json - --no-timing",
                          "C2LAB_BUDGET=12345");
  CHECK(c2lab::RunReport::parse(env_only.out).inputs["budget"] == 12345);
  auto both = run_cli(
      "c2 tests/golden/x_ladder_capped8_dec0.txt --budget 777 --json - --no-timing",
      "C2LAB_BUDGET=12345");
  CHECK(c2lab::RunReport::parse(both.out).inputs["budget"] == 777);

  // an unpayable budget is an error, not an approximation
  auto starved =
      run_cli("c2 tests/golden/x_ladder_capped8_dec0.txt --method brute", "C2LAB_BUDGET=50");
  CHECK(starved.rc == 1);

  // bad family spec surfaces the validation code
  auto bad = run_cli("recur specs/bad_cut.c2fam");
  CHECK(bad.rc == 1);
}

TEST_CASE("cross-check agrees on a stdin graph") {
  auto r = run_cli("c2 - --method brute --json - --no-timing <tests/golden/triangle.txt");
  CHECK(r.rc == 0);
  c2lab::RunReport rep = c2lab::RunReport::parse(r.out);
  CHECK(rep.result["value"] == 1);  // c2 of the triangle at p = 2

  auto x = run_cli("c2 tests/golden/x_ladder_capped8_dec0.txt --cross-check --json - --no-timing");
  CHECK(x.rc == 0);
  c2lab::RunReport xr = c2lab::RunReport::parse(x.out);
  CHECK(xr.result["agree"] == true);
  CHECK(xr.result["methods_run"] == 5);
  CHECK(xr.result["value"] == 0);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: test_cli_formats <c2lab-binary> <source-dir>\n");
    return 1;
  }
  g_cli = argv[argc - 2];
  g_src = argv[argc - 1];
  doctest::Context ctx;
  ctx.applyCommandLine(1, argv);
  return ctx.run();
}
