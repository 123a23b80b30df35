// Command-line front end: reproducible experiments with machine-readable
// reports. Subcommands: density, search, verify, coloring, correspondence,
// probe. Exit codes: 0 success, 1 usage/parse error, 2 incomplete (budget or
// resource limit), 3 claim-check failure.

#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sumset/constructions.hpp"
#include "sumset/correspondence.hpp"
#include "sumset/density.hpp"
#include "sumset/dsl.hpp"
#include "sumset/report.hpp"
#include "sumset/schedule.hpp"
#include "sumset/search.hpp"
#include "sumset/set_expr.hpp"
#include "sumset/version.hpp"

namespace {

using namespace sumset;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIncomplete = 2;
constexpr int kExitClaimFailed = 3;

std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  return std::strtoull(v, nullptr, 10);
}

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  return std::strtod(v, nullptr);
}

struct CommonOpts {
  std::string out;
  std::string format = "json";
  bool timing = false;
  bool stamp = false;
  std::uint64_t bitmap_cap = env_u64("SUMSET_BITMAP_CAP", EvalLimits{}.bitmap_cap);
  std::uint64_t node_budget = env_u64("SUMSET_NODE_BUDGET", 100'000'000);
  double time_budget_s = env_double("SUMSET_TIME_BUDGET_S", 60.0);
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--out", o.out, "Write the report to this path instead of stdout");
  sub->add_option("--format", o.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_flag("--timing", o.timing,
                "Record measured elapsed times in the report (off by default so reruns are "
                "byte-identical)");
  sub->add_flag("--stamp", o.stamp,
                "Stamp the manifest with the current UTC time (off by default so reruns are "
                "byte-identical)");
  sub->add_option("--bitmap-cap", o.bitmap_cap,
                  "Largest bitmap, in bits (env SUMSET_BITMAP_CAP)")
      ->capture_default_str();
  sub->add_option("--node-budget", o.node_budget,
                  "Search node budget (env SUMSET_NODE_BUDGET)")
      ->capture_default_str();
  sub->add_option("--time-budget", o.time_budget_s,
                  "Search time budget in seconds (env SUMSET_TIME_BUDGET_S)")
      ->capture_default_str();
}

EvalLimits limits_from(const CommonOpts& o) {
  EvalLimits lim;
  lim.bitmap_cap = o.bitmap_cap;
  return lim;
}

std::string now_utc_iso() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(const std::string& command, const std::string& expr_dsl,
                          const std::string& builtin, Json config, std::uint64_t seed,
                          const CommonOpts& o) {
  RunManifest m;
  m.command = command;
  m.expr_dsl = expr_dsl;
  m.builtin = builtin;
  m.config = std::move(config);
  m.seed = seed;
  m.timestamp = o.stamp ? now_utc_iso() : "";
  m.budgets["node_budget"] = o.node_budget;
  m.budgets["time_budget_s"] = o.time_budget_s;
  m.budgets["bitmap_cap"] = o.bitmap_cap;
  m.timing = o.timing;
  return m;
}

int emit(const CommonOpts& o, const Json& report, const std::string& csv) {
  std::string text = o.format == "csv" ? csv : report_text(report);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot open output file " << o.out << "\n";
      return kExitUsage;
    }
    f << text;
  }
  return kExitOk;
}

Rational parse_rational_arg(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(BigInt(text));
  return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
}

// Source of the set under study: either a DSL text or a builtin key.
struct ExprOpts {
  std::string set_dsl;
  std::string builtin;
  std::string eps = "1/24";
};

void add_expr_opts(CLI::App* sub, ExprOpts& e, bool builtin_only = false) {
  if (!builtin_only) sub->add_option("--set", e.set_dsl, "Set expression in the DSL");
  auto* b = sub->add_option("--builtin", e.builtin, "Named construction key")
                ->check(CLI::IsMember(builtin_keys()));
  sub->add_option("--eps", e.eps,
                  "Arc overlap for the log-fractional builtins, as a rational")
      ->capture_default_str();
  if (!builtin_only) b->excludes("--set");
}

SetExpr resolve_expr(const ExprOpts& e) {
  if (!e.builtin.empty() && !e.set_dsl.empty())
    throw Error("give either --set or --builtin, not both");
  if (!e.builtin.empty()) return get_builtin(e.builtin, parse_rational_arg(e.eps)).expr;
  if (!e.set_dsl.empty()) return parse(e.set_dsl);
  throw Error("one of --set or --builtin is required");
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos);
    auto dots = tok.find("..");
    if (dots != std::string::npos) {
      std::uint64_t lo = std::strtoull(tok.substr(0, dots).c_str(), nullptr, 10);
      std::uint64_t hi = std::strtoull(tok.substr(dots + 2).c_str(), nullptr, 10);
      if (hi < lo) throw Error("range must be ascending: " + tok);
      for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
    } else if (!tok.empty()) {
      out.push_back(std::strtoull(tok.c_str(), nullptr, 10));
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw Error("empty numeric list");
  return out;
}

std::optional<ResidueFilter> parse_residue_arg(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto comma = text.find(',');
  if (comma == std::string::npos) throw Error("--residue expects m,r");
  ResidueFilter f;
  f.m = std::strtoull(text.substr(0, comma).c_str(), nullptr, 10);
  f.r = std::strtoull(text.substr(comma + 1).c_str(), nullptr, 10);
  if (f.m == 0 || f.r >= f.m) throw Error("--residue expects r < m, m >= 1");
  return f;
}

// Substitute the standalone parameter token M in a family template.
std::string subst_param(const std::string& tmpl, std::uint64_t m) {
  std::string out;
  auto wordish = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    char c = tmpl[i];
    bool prev_ok = out.empty() || !wordish(out.back());
    bool next_ok = i + 1 >= tmpl.size() || !wordish(tmpl[i + 1]);
    if (c == 'M' && prev_ok && next_ok)
      out += std::to_string(m);
    else
      out += c;
  }
  return out;
}

// ---------------------------------------------------------------------------

int run_density(const ExprOpts& eo, const CommonOpts& co, const std::string& schedule_text,
                std::uint64_t tail_start) {
  SetExpr expr = resolve_expr(eo);
  Schedule sched = parse_schedule(schedule_text);
  EvalLimits lim = limits_from(co);
  DensityEstimate est = density_along(expr, sched, std::nullopt, tail_start, lim);

  Json cfg;
  cfg["schedule"] = schedule_text;
  cfg["tail_start"] = tail_start;
  if (!eo.builtin.empty()) cfg["eps"] = eo.eps;
  RunManifest m = make_manifest("density", render(expr), eo.builtin, cfg, 0, co);
  return emit(co, density_report(m, est), density_csv(est));
}

int run_search(const ExprOpts& eo, const CommonOpts& co, std::uint64_t t, std::uint64_t N,
               const std::string& mode, const std::string& residue_text,
               std::uint64_t min_size, bool cross_sums_only) {
  SetExpr expr = resolve_expr(eo);
  SearchConfig cfg;
  cfg.mode = mode == "greedy" ? SearchMode::Greedy : SearchMode::Exact;
  cfg.t = t;
  cfg.horizon = N;
  cfg.residue = parse_residue_arg(residue_text);
  cfg.cross_sums_only = cross_sums_only;
  cfg.node_budget = co.node_budget;
  cfg.time_budget_s = co.time_budget_s;
  if (min_size > 0) cfg.target_size = min_size;
  EvalLimits lim = limits_from(co);
  SearchResult r = max_witness(expr, cfg, lim);

  Json c;
  c["t"] = t;
  c["N"] = N;
  c["mode"] = mode;
  if (cfg.residue) c["residue"] = {{"m", cfg.residue->m}, {"r", cfg.residue->r}};
  if (min_size > 0) c["min_size_target"] = min_size;
  if (cross_sums_only) c["cross_sums_only"] = true;
  if (!eo.builtin.empty()) c["eps"] = eo.eps;
  RunManifest m = make_manifest("search", render(expr), eo.builtin, c, 0, co);
  int rc = emit(co, search_report(m, r), search_csv(r));
  if (rc != kExitOk) return rc;
  if (min_size > 0 && r.witness.size() >= min_size) return kExitOk;
  if (!r.stats.complete) return kExitIncomplete;
  if (min_size > 0 && r.witness.size() < min_size) return kExitClaimFailed;
  return kExitOk;
}

int run_verify(const ExprOpts& eo, const CommonOpts& co, std::optional<std::uint64_t> N,
               std::uint64_t samples, std::uint64_t seed) {
  if (eo.builtin.empty()) throw Error("verify needs --builtin");
  Rational eps = parse_rational_arg(eo.eps);
  NamedConstruction c = get_builtin(eo.builtin, eps, N);

  // Extra obstruction probes with sampled offsets b'. Seeded so identical
  // manifests replay identical samples.
  std::vector<std::string> obstruction_keys;
  if (eo.builtin == "P41_A") obstruction_keys = {"P41_A"};
  if (eo.builtin == "P42_A1") obstruction_keys = {"P42_A1"};
  if (eo.builtin == "P42_A2") obstruction_keys = {"P42_A2"};
  if (eo.builtin == "P51_A") obstruction_keys = {"P51_U0", "P51_U1", "P51_U2"};
  if (!obstruction_keys.empty() && samples > 0) {
    std::mt19937_64 rng(seed);
    bool logkey = eo.builtin == "P51_A";
    for (std::uint64_t s = 0; s < samples; ++s) {
      std::uint64_t bprime = logkey ? 8 + rng() % 57 : 50 + rng() % 351;
      std::uint64_t t = rng() % 2;
      for (const auto& k : obstruction_keys)
        c.claims.push_back(
            construction_detail::obstruction_claim(k, t, bprime, 1 << 15, eps));
    }
  }

  EvalLimits lim = limits_from(co);
  std::vector<ClaimResult> results;
  for (const auto& claim : c.claims) results.push_back(claim.run(lim));

  Json cfg;
  if (N) cfg["N"] = *N;
  cfg["eps"] = eo.eps;
  cfg["samples"] = samples;
  RunManifest m = make_manifest("verify", render(c.expr), eo.builtin, cfg, seed, co);
  int rc = emit(co, verify_report(m, c, results), verify_csv(results));
  if (rc != kExitOk) return rc;
  for (const auto& r : results)
    if (!r.pass) return kExitClaimFailed;
  return kExitOk;
}

int run_coloring(const ExprOpts& eo, const CommonOpts& co,
                 const std::vector<std::string>& class_dsls, std::uint64_t N,
                 bool no_witnesses, const std::string& mode) {
  std::vector<std::pair<std::string, SetExpr>> classes;
  if (!eo.builtin.empty()) {
    NamedConstruction c = get_builtin(eo.builtin, parse_rational_arg(eo.eps));
    if (c.coloring.empty()) throw Error("builtin " + eo.builtin + " is not a coloring");
    classes = c.coloring;
  } else {
    if (class_dsls.size() < 2) throw Error("coloring needs --builtin or at least two --classes");
    for (std::size_t i = 0; i < class_dsls.size(); ++i)
      classes.emplace_back("C" + std::to_string(i + 1), parse(class_dsls[i]));
  }

  ColoringAuditOptions opt;
  opt.witnesses = !no_witnesses;
  opt.witness_mode = mode == "exact" ? SearchMode::Exact : SearchMode::Greedy;
  opt.node_budget = co.node_budget;
  opt.time_budget_s = co.time_budget_s;
  EvalLimits lim = limits_from(co);
  ColoringReport rep = check_coloring(classes, N, opt, lim);

  Json cfg;
  cfg["N"] = N;
  cfg["witnesses"] = !no_witnesses;
  cfg["mode"] = mode;
  Json cls = Json::array();
  for (const auto& [label, expr] : classes) cls.push_back(render(expr));
  cfg["classes"] = cls;
  if (!eo.builtin.empty()) cfg["eps"] = eo.eps;
  RunManifest m = make_manifest("coloring", "", eo.builtin, cfg, 0, co);
  return emit(co, coloring_report(m, rep), coloring_csv(rep));
}

int run_correspondence(const ExprOpts& eo, const CommonOpts& co, std::uint64_t N,
                       std::uint64_t k, const std::string& k_schedule) {
  SetExpr expr = resolve_expr(eo);
  std::uint64_t horizon = N;
  if (k > 0) {
    Schedule s = parse_schedule(k_schedule + "(" + std::to_string(k) + ")");
    horizon = s.windows.back();
  }
  if (horizon == 0) throw Error("correspondence needs --N or --k");
  EvalLimits lim = limits_from(co);
  FcpReport r = check_fcp(expr, horizon, lim);

  Json cfg;
  cfg["N"] = horizon;
  if (k > 0) {
    cfg["k"] = k;
    cfg["k_schedule"] = k_schedule;
  }
  if (!eo.builtin.empty()) cfg["eps"] = eo.eps;
  RunManifest m = make_manifest("correspondence", render(expr), eo.builtin, cfg, 0, co);
  int rc = emit(co, correspondence_report(m, r), correspondence_csv(r));
  if (rc != kExitOk) return rc;
  return r.pass ? kExitOk : kExitClaimFailed;
}

int run_probe(const ExprOpts& eo, const CommonOpts& co, const std::string& family,
              const std::string& m_list, const std::string& t_list, std::uint64_t N,
              std::uint64_t min_size, const std::string& mode) {
  std::vector<std::pair<std::string, SetExpr>> instances;
  if (!family.empty()) {
    if (m_list.empty()) throw Error("--family needs --M values to substitute");
    for (std::uint64_t mv : parse_u64_list(m_list)) {
      std::string text = subst_param(family, mv);
      instances.emplace_back(text, parse(text));
    }
  } else {
    SetExpr expr = resolve_expr(eo);
    instances.emplace_back(render(expr), expr);
  }
  std::vector<std::uint64_t> ts = parse_u64_list(t_list);
  EvalLimits lim = limits_from(co);
  std::vector<ProbeRow> rows =
      probe_threshold(instances, ts, N, min_size, mode == "exact" ? SearchMode::Exact
                                                                  : SearchMode::Greedy,
                      co.node_budget, co.time_budget_s, lim);

  Json cfg;
  if (!family.empty()) {
    cfg["family"] = family;
    cfg["M"] = m_list;
  }
  cfg["t_set"] = t_list;
  cfg["N"] = N;
  cfg["min_size_target"] = min_size;
  cfg["mode"] = mode;
  RunManifest m = make_manifest("probe", family.empty() ? instances[0].first : family,
                                eo.builtin, cfg, 0, co);
  int rc = emit(co, probe_report(m, rows), probe_csv(rows));
  if (rc != kExitOk) return rc;
  for (const auto& row : rows)
    for (const auto& cell : row.cells)
      if (!cell.complete) return kExitIncomplete;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sumset: finite-scale exploration of shifted sumsets B+B+t inside integer sets"};
  app.require_subcommand(1);

  // density
  auto* d = app.add_subcommand("density", "Count members along a window schedule");
  ExprOpts d_expr;
  CommonOpts d_common;
  std::string d_schedule = "powers4(8)";
  std::uint64_t d_tail = 0;
  add_expr_opts(d, d_expr);
  d->add_option("--schedule", d_schedule,
                "linear(K) | powers4(K) | prop41(K) | comma list of windows")
      ->capture_default_str();
  d->add_option("--tail-start", d_tail, "First window index used for estimates (0 = auto)");
  add_common(d, d_common);

  // search
  auto* s = app.add_subcommand("search", "Max-witness search for B+B+t inside the set");
  ExprOpts s_expr;
  CommonOpts s_common;
  std::uint64_t s_t = 0, s_N = 0, s_min = 0;
  std::string s_mode = "exact", s_residue;
  bool s_cross = false;
  add_expr_opts(s, s_expr);
  s->add_option("--t", s_t, "Shift t in B+B+t")->capture_default_str();
  s->add_option("--N", s_N, "Horizon: members and sums live in [1, N]")->required();
  s->add_option("--mode", s_mode, "exact | greedy")
      ->check(CLI::IsMember({"exact", "greedy"}))
      ->capture_default_str();
  s->add_option("--residue", s_residue, "Restrict witness elements to b = r (mod m); format m,r");
  s->add_option("--min-size", s_min, "Stop early once a witness of this size is found");
  s->add_flag("--cross-sums-only", s_cross,
              "Drop the diagonal requirement 2b+t in A (exploratory)");
  add_common(s, s_common);

  // verify
  auto* v = app.add_subcommand("verify", "Run every machine-checkable claim of a builtin");
  ExprOpts v_expr;
  CommonOpts v_common;
  std::uint64_t v_samples = 2, v_seed = 0;
  std::uint64_t v_N_raw = 0;
  add_expr_opts(v, v_expr, /*builtin_only=*/true);
  v->add_option("--N", v_N_raw, "Override the claim horizons (default: per-claim values)");
  v->add_option("--samples", v_samples, "Extra sampled obstruction offsets b' per shift")
      ->capture_default_str();
  v->add_option("--seed", v_seed, "Seed for sampled obstruction offsets")->capture_default_str();
  add_common(v, v_common);

  // coloring
  auto* c = app.add_subcommand("coloring", "Partition and density audit of a coloring");
  ExprOpts c_expr;
  CommonOpts c_common;
  std::vector<std::string> c_classes;
  std::uint64_t c_N = 100000;
  bool c_nowit = false;
  std::string c_mode = "greedy";
  add_expr_opts(c, c_expr, /*builtin_only=*/true);
  c->add_option("--classes", c_classes, "Class expressions in the DSL (two or more)")
      ->expected(-1);
  c->add_option("--N", c_N, "Audit horizon")->capture_default_str();
  c->add_flag("--no-witnesses", c_nowit, "Skip per-class witness searches");
  c->add_option("--mode", c_mode, "Witness search mode: greedy | exact")
      ->check(CLI::IsMember({"exact", "greedy"}))
      ->capture_default_str();
  add_common(c, c_common);

  // correspondence
  auto* f = app.add_subcommand("correspondence",
                               "Finite correspondence frequencies and inequalities");
  ExprOpts f_expr;
  CommonOpts f_common;
  std::uint64_t f_N = 0, f_k = 0;
  std::string f_ksched = "prop41";
  add_expr_opts(f, f_expr);
  f->add_option("--N", f_N, "Window size N_k");
  f->add_option("--k", f_k, "Take N_k as window k of --k-schedule");
  f->add_option("--k-schedule", f_ksched, "Schedule backing --k: prop41 | powers4 | linear")
      ->check(CLI::IsMember({"prop41", "powers4", "linear"}))
      ->capture_default_str();
  add_common(f, f_common);

  // probe
  auto* p = app.add_subcommand("probe", "Density vs achievable witness size, as a table");
  ExprOpts p_expr;
  CommonOpts p_common;
  std::string p_family, p_M, p_t = "0,1", p_mode = "greedy";
  std::uint64_t p_N = 0, p_min = 0;
  add_expr_opts(p, p_expr);
  p->add_option("--family", p_family, "DSL template with parameter token M");
  p->add_option("--M", p_M, "Values for M: list (4,6,8) and/or range (4..12)");
  p->add_option("--t", p_t, "Shifts to probe, comma separated")->capture_default_str();
  p->add_option("--N", p_N, "Horizon")->required();
  p->add_option("--min-size", p_min, "Target witness size per cell");
  p->add_option("--mode", p_mode, "exact | greedy")
      ->check(CLI::IsMember({"exact", "greedy"}))
      ->capture_default_str();
  add_common(p, p_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (d->parsed()) return run_density(d_expr, d_common, d_schedule, d_tail);
    if (s->parsed())
      return run_search(s_expr, s_common, s_t, s_N, s_mode, s_residue, s_min, s_cross);
    if (v->parsed())
      return run_verify(v_expr, v_common,
                        v_N_raw ? std::optional<std::uint64_t>(v_N_raw) : std::nullopt,
                        v_samples, v_seed);
    if (c->parsed()) return run_coloring(c_expr, c_common, c_classes, c_N, c_nowit, c_mode);
    if (f->parsed()) return run_correspondence(f_expr, f_common, f_N, f_k, f_ksched);
    if (p->parsed()) return run_probe(p_expr, p_common, p_family, p_M, p_t, p_N, p_min, p_mode);
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitIncomplete;
  } catch (const AmbiguousBoundary& e) {
    std::cerr << "ambiguous boundary: " << e.what() << "\n";
    return kExitIncomplete;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
