#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sumset/constructions.hpp"
#include "sumset/correspondence.hpp"
#include "sumset/density.hpp"
#include "sumset/dsl.hpp"
#include "sumset/rational.hpp"
#include "sumset/search.hpp"
#include "sumset/version.hpp"

namespace sumset {

using Json = nlohmann::ordered_json;

// Everything that went into a run. Reports embed their manifest; identical
// manifests at the same version must produce byte-identical reports, so the
// timestamp stays empty unless stamping is requested explicitly and elapsed
// times are zeroed unless timing is requested explicitly.
struct RunManifest {
  std::string command;
  std::string version = kVersion;
  std::string expr_dsl;
  std::string builtin;           // empty when the expression came from --set
  Json config = Json::object();  // command-specific flag echo
  std::uint64_t seed = 0;
  std::string timestamp;         // empty by default
  Json budgets = Json::object();
  bool timing = false;           // include measured elapsed_ms in reports
};

inline Json manifest_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["version"] = m.version;
  j["expr"] = m.expr_dsl;
  if (!m.builtin.empty()) j["builtin"] = m.builtin;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["timestamp"] = m.timestamp;
  j["budgets"] = m.budgets;
  return j;
}

inline Json rationals_json(const std::vector<Rational>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(to_string(x));
  return a;
}

// --------------------------------------------------------------------------
// JSON report builders, one per subcommand.
// --------------------------------------------------------------------------

inline Json density_report(const RunManifest& m, const DensityEstimate& est) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["expr"] = m.expr_dsl;
  Json sched;
  sched["name"] = est.prof.schedule.name;
  sched["windows"] = est.prof.schedule.windows;
  j["schedule"] = sched;
  j["counts"] = est.prof.counts;
  j["ratios"] = rationals_json(est.prof.ratios);
  j["tail_start"] = est.tail_start;
  j["upper_est"] = to_string(est.upper_est);
  j["lower_est"] = to_string(est.lower_est);
  if (est.analytic) j["analytic"] = to_string(*est.analytic);
  return j;
}

inline Json search_report(const RunManifest& m, const SearchResult& r) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["expr"] = m.expr_dsl;
  j["t"] = r.witness.t;
  j["N"] = r.witness.horizon;
  j["mode"] = m.config.value("mode", "exact");
  if (m.config.contains("residue")) j["residue_filter"] = m.config["residue"];
  Json w;
  w["B"] = r.witness.b;
  w["size"] = r.witness.size();
  w["verified"] = r.witness.verified;
  j["witness"] = w;
  Json s;
  s["nodes"] = r.stats.nodes;
  s["prunes"] = r.stats.bound_prunes;
  s["vertex_count"] = r.stats.vertex_count;
  s["elapsed_ms"] = m.timing ? r.stats.elapsed_ms : 0;
  s["complete"] = r.stats.complete;
  j["stats"] = s;
  return j;
}

inline Json claim_json(const ClaimResult& c) {
  Json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["details"] = c.details;
  return j;
}

inline Json verify_report(const RunManifest& m, const NamedConstruction& c,
                          const std::vector<ClaimResult>& results) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["builtin"] = c.key;
  j["summary"] = c.summary;
  j["expr"] = render(c.expr);
  Json d = Json::object();
  if (c.densities.upper) d["upper"] = to_string(*c.densities.upper);
  if (c.densities.lower) d["lower"] = to_string(*c.densities.lower);
  if (c.densities.natural) d["natural"] = to_string(*c.densities.natural);
  j["analytic_densities"] = d;
  Json cl = Json::array();
  bool pass = true;
  for (const auto& r : results) {
    cl.push_back(claim_json(r));
    pass = pass && r.pass;
  }
  j["claims"] = cl;
  j["pass"] = pass;
  return j;
}

inline Json gap_json(const GapReport& g) {
  Json j;
  j["horizon"] = g.horizon;
  j["count"] = g.count;
  j["first"] = g.first;
  j["last"] = g.last;
  j["head_gap"] = g.head_gap;
  j["internal_gap"] = g.internal_gap;
  j["tail_gap"] = g.tail_gap;
  j["gap"] = g.gap;
  return j;
}

inline Json coloring_report(const RunManifest& m, const ColoringReport& r) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["horizon"] = r.horizon;
  j["covers"] = r.covers;
  j["disjoint"] = r.disjoint;
  j["all_nonempty"] = r.all_nonempty;
  j["partition"] = r.partition();
  if (!r.covers) j["first_uncovered"] = r.first_uncovered;
  if (!r.disjoint) j["first_doubled"] = r.first_doubled;
  Json audit;
  audit["schedule"] = r.audit_schedule.name;
  audit["slack"] = to_string(r.audit_slack);
  j["audit"] = audit;
  Json cls = Json::array();
  for (const auto& a : r.classes) {
    Json c;
    c["label"] = a.label;
    c["count"] = a.count;
    c["empty"] = a.empty;
    c["gap"] = gap_json(a.gaps);
    c["upper_est"] = to_string(a.upper_est);
    c["lower_est"] = to_string(a.lower_est);
    c["density_sum"] = to_string(a.density_sum);
    c["flagged"] = a.flagged;
    c["witness_size_t0"] = a.witness_size_t0;
    c["witness_size_t1"] = a.witness_size_t1;
    c["witness_complete"] = a.witness_complete;
    cls.push_back(c);
  }
  j["classes"] = cls;
  return j;
}

inline Json correspondence_report(const RunManifest& m, const FcpReport& r) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["N_k"] = r.N;
  j["N_half"] = r.n_half;
  j["prefix_density"] = to_string(r.density);
  Json f;
  f["freq_SigmaE"] = to_string(r.freq_sigma_e);
  f["freq_ESigma"] = to_string(r.freq_e_sigma);
  f["freq_SinvE"] = to_string(r.freq_sinv_e);
  j["frequencies"] = f;
  Json ineqs = Json::array();
  auto row = [](const char* name, const Rational& lhs, const Rational& rhs, const Rational& slack,
                bool pass) {
    Json q;
    q["name"] = name;
    q["lhs"] = to_string(lhs);
    q["rhs"] = to_string(rhs);
    q["slack"] = to_string(slack);
    q["margin"] = to_string(lhs - rhs);
    q["pass"] = pass;
    return q;
  };
  ineqs.push_back(row("freq_SigmaE >= 2d-1-eps", r.freq_sigma_e, r.bound_sigma_e, r.eps,
                      r.ok_sigma_e));
  ineqs.push_back(row("freq_ESigma >= 2d-4/N-1-eps", r.freq_e_sigma, r.bound_e_sigma, r.eps,
                      r.ok_e_sigma));
  ineqs.push_back(row("freq_ESigma+freq_SinvE >= 2d-2/N-eps",
                      r.freq_e_sigma + r.freq_sinv_e, r.bound_sum, r.eps, r.ok_sum));
  j["inequalities"] = ineqs;
  Json ident;
  ident["name"] = "freq_ESigma+freq_SinvE == |A cap [2,2N'+1]|/N'";
  ident["pass"] = r.identity_ok;
  j["identity"] = ident;
  j["pass"] = r.pass;
  return j;
}

inline Json probe_report(const RunManifest& m, const std::vector<ProbeRow>& rows) {
  Json j;
  j["manifest"] = manifest_json(m);
  Json rs = Json::array();
  for (const auto& row : rows) {
    Json q;
    q["label"] = row.label;
    q["upper_est"] = to_string(row.upper_est);
    q["lower_est"] = to_string(row.lower_est);
    Json cells = Json::array();
    for (const auto& c : row.cells) {
      Json cj;
      cj["t"] = c.t;
      cj["witness_size"] = c.witness_size;
      cj["complete"] = c.complete;
      cj["target_reached"] = c.target_reached;
      cells.push_back(cj);
    }
    q["cells"] = cells;
    rs.push_back(q);
  }
  j["rows"] = rs;
  return j;
}

inline Json obstruction_json(const ObstructionReport& r) {
  Json j;
  j["key"] = r.key;
  j["t"] = r.t;
  j["bprime"] = r.bprime;
  j["scan_to"] = r.scan_to;
  j["cutoff_b0"] = r.cutoff_b0;
  j["cutoff_reason"] = r.cutoff_reason;
  j["hits_below_cutoff"] = r.hits_below_cutoff;
  j["violations"] = r.violations;
  j["pass"] = r.pass;
  return j;
}

// --------------------------------------------------------------------------
// CSV: one flat table per command, the thing a user would plot. The JSON
// report stays the full record.
// --------------------------------------------------------------------------

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += "\"";
  return out;
}

inline std::string density_csv(const DensityEstimate& est) {
  std::ostringstream o;
  o << "k,window,count,ratio\n";
  for (std::size_t k = 0; k < est.prof.schedule.windows.size(); ++k)
    o << (k + 1) << ',' << est.prof.schedule.windows[k] << ',' << est.prof.counts[k] << ','
      << to_string(est.prof.ratios[k]) << '\n';
  return o.str();
}

inline std::string search_csv(const SearchResult& r) {
  std::ostringstream o;
  o << "i,b\n";
  for (std::size_t i = 0; i < r.witness.b.size(); ++i)
    o << (i + 1) << ',' << r.witness.b[i] << '\n';
  return o.str();
}

inline std::string verify_csv(const std::vector<ClaimResult>& results) {
  std::ostringstream o;
  o << "claim,pass,details\n";
  for (const auto& c : results)
    o << csv_field(c.name) << ',' << (c.pass ? "true" : "false") << ',' << csv_field(c.details)
      << '\n';
  return o.str();
}

inline std::string coloring_csv(const ColoringReport& r) {
  std::ostringstream o;
  o << "label,count,empty,gap,head_gap,internal_gap,tail_gap,upper_est,lower_est,density_sum,"
       "flagged,witness_size_t0,witness_size_t1,witness_complete\n";
  for (const auto& a : r.classes)
    o << csv_field(a.label) << ',' << a.count << ',' << (a.empty ? "true" : "false") << ','
      << a.gaps.gap << ',' << a.gaps.head_gap << ',' << a.gaps.internal_gap << ','
      << a.gaps.tail_gap << ',' << to_string(a.upper_est) << ',' << to_string(a.lower_est) << ','
      << to_string(a.density_sum) << ',' << (a.flagged ? "true" : "false") << ','
      << a.witness_size_t0 << ',' << a.witness_size_t1 << ','
      << (a.witness_complete ? "true" : "false") << '\n';
  return o.str();
}

inline std::string correspondence_csv(const FcpReport& r) {
  std::ostringstream o;
  o << "name,lhs,rhs,slack,margin,pass\n";
  auto row = [&](const char* name, const Rational& lhs, const Rational& rhs, bool pass) {
    o << csv_field(name) << ',' << to_string(lhs) << ',' << to_string(rhs) << ','
      << to_string(r.eps) << ',' << to_string(lhs - rhs) << ',' << (pass ? "true" : "false")
      << '\n';
  };
  row("freq_SigmaE >= 2d-1-eps", r.freq_sigma_e, r.bound_sigma_e, r.ok_sigma_e);
  row("freq_ESigma >= 2d-4/N-1-eps", r.freq_e_sigma, r.bound_e_sigma, r.ok_e_sigma);
  row("freq_ESigma+freq_SinvE >= 2d-2/N-eps", r.freq_e_sigma + r.freq_sinv_e, r.bound_sum,
      r.ok_sum);
  return o.str();
}

inline std::string probe_csv(const std::vector<ProbeRow>& rows) {
  std::ostringstream o;
  o << "label,upper_est,lower_est,t,witness_size,complete,target_reached\n";
  for (const auto& row : rows)
    for (const auto& c : row.cells)
      o << csv_field(row.label) << ',' << to_string(row.upper_est) << ','
        << to_string(row.lower_est) << ',' << c.t << ',' << c.witness_size << ','
        << (c.complete ? "true" : "false") << ',' << (c.target_reached ? "true" : "false")
        << '\n';
  return o.str();
}

inline std::string report_text(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace sumset
