#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sumset/report.hpp"

using namespace sumset;

#ifndef SUMSET_CLI_PATH
#error "SUMSET_CLI_PATH must point at the CLI binary"
#endif

namespace {

namespace fs = std::filesystem;

fs::path out_dir() {
  static fs::path p = [] {
    fs::path d = fs::temp_directory_path() / ("sumset_reports_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return p;
}

std::string out_file(const std::string& name) { return (out_dir() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(SUMSET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("density report embeds the manifest and analytic value", "[reports]") {
  RunManifest m;
  m.command = "density";
  m.expr_dsl = "cong(3,0)";
  m.config["schedule"] = "linear(4)";
  DensityEstimate est = density_along(parse("cong(3,0)"), schedule_linear(4));
  Json j = density_report(m, est);
  CHECK(j["manifest"]["command"] == "density");
  CHECK(j["manifest"]["version"] == std::string(kVersion));
  CHECK(j["manifest"]["timestamp"] == "");
  CHECK(j["expr"] == "cong(3,0)");
  CHECK(j["schedule"]["windows"].size() == 4);
  CHECK(j["counts"].is_array());
  CHECK(j["ratios"][2] == "1/3");
  CHECK(j["analytic"] == "1/3");

  std::string once = report_text(j);
  std::string twice = report_text(density_report(m, est));
  CHECK(once == twice);
  CHECK(once.back() == '\n');
}

TEST_CASE("search report embeds witness and stats", "[reports]") {
  RunManifest m;
  m.command = "search";
  m.expr_dsl = "cong(2,0)";
  m.config["mode"] = "exact";
  SearchConfig cfg;
  cfg.horizon = 20;
  SearchResult r = max_witness(parse("cong(2,0)"), cfg);
  Json j = search_report(m, r);
  CHECK(j["witness"]["B"] == Json::array({1, 3, 5, 7, 9}));
  CHECK(j["witness"]["size"] == 5);
  CHECK(j["witness"]["verified"] == true);
  CHECK(j["stats"]["complete"] == true);
  CHECK(j["stats"]["elapsed_ms"] == 0);  // timing off by default
  CHECK(j["mode"] == "exact");
  CHECK(j["N"] == 20);

  std::string csv = search_csv(r);
  CHECK(csv.rfind("i,b\n", 0) == 0);
  CHECK(csv.find("1,1\n") != std::string::npos);
  CHECK(csv.find("5,9\n") != std::string::npos);
}

TEST_CASE("verify report aggregates claim outcomes", "[reports]") {
  NamedConstruction c = get_builtin("P42_A");
  std::vector<ClaimResult> results{{"demo", true, "fine"}, {"broken_one", false, "nope"}};
  RunManifest m;
  m.command = "verify";
  m.builtin = "P42_A";
  m.expr_dsl = render(c.expr);
  Json j = verify_report(m, c, results);
  CHECK(j["manifest"]["builtin"] == "P42_A");
  CHECK(j["builtin"] == "P42_A");
  CHECK(j["analytic_densities"]["natural"] == "1/2");
  REQUIRE(j["claims"].size() == 2);
  CHECK(j["claims"][0]["name"] == "demo");
  CHECK(j["claims"][1]["pass"] == false);
  CHECK(j["pass"] == false);

  std::string csv = verify_csv(results);
  CHECK(csv.rfind("claim,pass,details\n", 0) == 0);
  CHECK(csv.find("broken_one,false,nope\n") != std::string::npos);
}

TEST_CASE("coloring report carries the audit and per-class blocks", "[reports]") {
  std::vector<std::pair<std::string, SetExpr>> classes{
      {"even", SetExpr::congruence(2, 0)}, {"odd", SetExpr::congruence(2, 1)}};
  ColoringAuditOptions opt;
  opt.witnesses = false;
  ColoringReport r = check_coloring(classes, 1024, opt);
  RunManifest m;
  m.command = "coloring";
  Json j = coloring_report(m, r);
  CHECK(j["partition"] == true);
  CHECK(j["audit"]["slack"] == "1/2");
  REQUIRE(j["classes"].size() == 2);
  CHECK(j["classes"][0]["label"] == "even");
  CHECK(j["classes"][0]["gap"]["gap"] == 1);
  CHECK(j["classes"][0]["density_sum"] == "1");

  std::string csv = coloring_csv(r);
  CHECK(csv.rfind("label,count,empty,gap,head_gap,internal_gap,tail_gap,", 0) == 0);
  CHECK(csv.find("even,512,false,1,1,1,0,") != std::string::npos);
}

TEST_CASE("correspondence report lists the three inequalities", "[reports]") {
  FcpReport r = check_fcp(SetExpr::congruence(2, 0), 100);
  RunManifest m;
  m.command = "correspondence";
  Json j = correspondence_report(m, r);
  CHECK(j["N_k"] == 100);
  CHECK(j["N_half"] == 50);
  CHECK(j["prefix_density"] == "1/2");
  CHECK(j["frequencies"]["freq_SigmaE"] == "1/2");
  CHECK(j["frequencies"]["freq_ESigma"] == "1");
  CHECK(j["frequencies"]["freq_SinvE"] == "0");
  REQUIRE(j["inequalities"].size() == 3);
  for (const auto& q : j["inequalities"]) CHECK(q["pass"] == true);
  CHECK(j["identity"]["pass"] == true);
  CHECK(j["pass"] == true);

  std::string csv = correspondence_csv(r);
  CHECK(csv.rfind("name,lhs,rhs,slack,margin,pass\n", 0) == 0);
}

TEST_CASE("probe report flattens rows and cells", "[reports]") {
  std::vector<std::pair<std::string, SetExpr>> instances{{"evens", SetExpr::congruence(2, 0)}};
  auto rows = probe_threshold(instances, {0}, 64, 5, SearchMode::Greedy);
  RunManifest m;
  m.command = "probe";
  Json j = probe_report(m, rows);
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["rows"][0]["label"] == "evens");
  CHECK(j["rows"][0]["cells"][0]["witness_size"] == 5);
  CHECK(j["rows"][0]["cells"][0]["target_reached"] == true);

  std::string csv = probe_csv(rows);
  CHECK(csv.rfind("label,upper_est,lower_est,t,witness_size,complete,target_reached\n", 0) == 0);
  CHECK(csv.find("evens,1/2,1/2,0,5,true,true\n") != std::string::npos);
}

TEST_CASE("obstruction blocks serialize in full", "[reports]") {
  ObstructionReport r = verify_ratio_obstruction("P41_A", 0, 16, 512);
  Json j = obstruction_json(r);
  CHECK(j["key"] == "P41_A");
  CHECK(j["bprime"] == 16);
  CHECK(j["cutoff_b0"] == 128);
  CHECK(j["violations"].is_array());
  CHECK(j["pass"] == true);
}

TEST_CASE("csv fields quote separators and quotes", "[reports]") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("cli: density succeeds and reruns are byte-identical", "[reports][cli]") {
  std::string f1 = out_file("density1.json");
  std::string f2 = out_file("density2.json");
  REQUIRE(run_cli("density --set \"cong(3,0)\" --schedule \"linear(6)\" --out " + f1) == 0);
  REQUIRE(run_cli("density --set \"cong(3,0)\" --schedule \"linear(6)\" --out " + f2) == 0);
  std::string body1 = slurp(f1);
  CHECK(body1 == slurp(f2));
  Json j = Json::parse(body1);
  CHECK(j["manifest"]["command"] == "density");
  CHECK(j["analytic"] == "1/3");
  CHECK(j["manifest"]["timestamp"] == "");
}

TEST_CASE("cli: csv format writes the flat table", "[reports][cli]") {
  std::string f = out_file("density.csv");
  REQUIRE(run_cli("density --set \"cong(2,0)\" --schedule \"linear(4)\" --format csv --out " +
                  f) == 0);
  std::string body = slurp(f);
  CHECK(body.rfind("k,window,count,ratio\n", 0) == 0);
  CHECK(body.find("4,4,2,1/2\n") != std::string::npos);
}

TEST_CASE("cli: parse and usage failures exit 1", "[reports][cli]") {
  CHECK(run_cli("density --set \"gecko(\"") == 1);
  CHECK(run_cli("density --set \"cong(2,0)\" --schedule \"fib(3)\"") == 1);
  CHECK(run_cli("verify --N 100") == 1);          // verify needs --builtin
  CHECK(run_cli("verify --builtin NOPE") == 1);   // not in the key list
  CHECK(run_cli("search --set \"cong(2,0)\"") == 1);  // --N is required
}

TEST_CASE("cli: search exit codes track witness goals and budgets", "[reports][cli]") {
  std::string f = out_file("search_small.json");
  REQUIRE(run_cli("search --set \"cong(2,0)\" --N 20 --min-size 6 --out " + f) == 3);
  Json j = Json::parse(slurp(f));
  CHECK(j["witness"]["size"] == 5);
  CHECK(j["stats"]["complete"] == true);

  CHECK(run_cli("search --set \"cong(2,0)\" --N 20 --min-size 5") == 0);
  CHECK(run_cli("search --set \"cong(1,0)\" --N 200 --min-size 50") == 0);

  std::string g = out_file("search_budget.json");
  REQUIRE(run_cli("search --set \"intervals(n>=1; 4^n, (2-1/n)*4^n)\" --N 4096 "
                  "--node-budget 1 --out " +
                  g) == 2);
  Json jb = Json::parse(slurp(g));
  CHECK(jb["stats"]["complete"] == false);
  CHECK(jb["witness"]["size"] >= 1);
}

TEST_CASE("cli: residue filters reach the report", "[reports][cli]") {
  std::string f = out_file("search_residue.json");
  REQUIRE(run_cli("search --set \"cong(4,0)\" --N 64 --residue 2,0 --out " + f) == 0);
  Json j = Json::parse(slurp(f));
  REQUIRE(j.contains("residue_filter"));
  CHECK(j["residue_filter"]["m"] == 2);
  CHECK(j["residue_filter"]["r"] == 0);
  CHECK(j["witness"]["B"] == Json::array({2, 6, 10, 14, 18, 22, 26, 30}));
}

TEST_CASE("cli: verify splits pass and failure exit codes", "[reports][cli]") {
  std::string f = out_file("verify_pass.json");
  std::string f2 = out_file("verify_pass2.json");
  REQUIRE(run_cli("verify --builtin P42_A --out " + f) == 0);
  REQUIRE(run_cli("verify --builtin P42_A --out " + f2) == 0);
  std::string body = slurp(f);
  CHECK(body == slurp(f2));
  Json j = Json::parse(body);
  CHECK(j["pass"] == true);
  for (const auto& cl : j["claims"]) CHECK(cl["pass"] == true);

  std::string g = out_file("verify_fail.json");
  REQUIRE(run_cli("verify --builtin P51_A --N 100000 --samples 1 --out " + g) == 3);
  Json jf = Json::parse(slurp(g));
  CHECK(jf["pass"] == false);
  bool gap_failed = false;
  for (const auto& cl : jf["claims"])
    if (cl["name"].get<std::string>().rfind("gap_bound", 0) == 0) {
      gap_failed = (cl["pass"] == false);
    }
  CHECK(gap_failed);
}

TEST_CASE("cli: coloring and correspondence and probe succeed", "[reports][cli]") {
  std::string f = out_file("coloring.json");
  REQUIRE(run_cli("coloring --builtin COLOR3 --N 1024 --no-witnesses --out " + f) == 0);
  Json j = Json::parse(slurp(f));
  CHECK(j["partition"] == true);
  CHECK(j["classes"].size() == 3);

  std::string g = out_file("fcp.json");
  REQUIRE(run_cli("correspondence --set \"cong(2,0)\" --N 1000 --out " + g) == 0);
  CHECK(Json::parse(slurp(g))["pass"] == true);

  std::string h = out_file("probe.json");
  REQUIRE(run_cli("probe --set \"cong(1,0)\" --N 64 --min-size 40 --out " + h) == 0);
  Json jp = Json::parse(slurp(h));
  REQUIRE(jp["rows"].size() == 1);
  CHECK(jp["rows"][0]["cells"].size() == 2);  // default t list is 0,1

  std::string i = out_file("probe_budget.json");
  REQUIRE(run_cli("probe --set \"intervals(n>=1; 4^n, (2-1/n)*4^n)\" --N 4096 "
                  "--min-size 4096 --mode exact --node-budget 1 --t 0 --out " +
                  i) == 2);
  Json jq = Json::parse(slurp(i));
  CHECK(jq["rows"][0]["cells"][0]["complete"] == false);
}
