#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sumset/bitvec.hpp"
#include "sumset/density.hpp"
#include "sumset/errors.hpp"
#include "sumset/set_expr.hpp"

namespace sumset {

// A finite certificate: every pairwise sum b_i + b_j + t (i <= j, diagonal
// included) lands in the target set, with all sums bounded by the horizon.
struct SumsetWitness {
  std::vector<std::uint64_t> b;  // strictly increasing
  std::uint64_t t = 0;
  std::uint64_t horizon = 0;
  bool verified = false;

  std::size_t size() const { return b.size(); }
};

enum class SearchMode { Exact, Greedy };

struct ResidueFilter {
  std::uint64_t m = 1, r = 0;
};

struct SearchConfig {
  SearchMode mode = SearchMode::Exact;
  std::uint64_t t = 0;
  std::uint64_t horizon = 0;
  std::optional<ResidueFilter> residue;
  // Drop the diagonal requirement 2b+t ∈ A and explore pure cross sums.
  // Exploratory only; results are not witnesses in the B+B+t sense.
  bool cross_sums_only = false;
  std::uint64_t node_budget = 100'000'000;
  double time_budget_s = 60.0;
  std::uint64_t exact_vertex_cap = 16384;
  // Optional goal size: the search may stop as soon as it is reached.
  std::optional<std::uint64_t> target_size;
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t bound_prunes = 0;
  std::uint64_t vertex_count = 0;
  bool complete = false;
  std::uint64_t elapsed_ms = 0;
};

struct SearchResult {
  SumsetWitness witness;
  SearchStats stats;
};

// Checks the full witness condition against the set. Never truncates: a sum
// beyond the horizon is an error, not a silent pass.
inline bool verify_witness(const SetExpr& A, const SumsetWitness& w,
                           const EvalLimits& lim = {}) {
  if (w.b.empty()) throw Error("witness must contain at least one element");
  for (std::size_t i = 0; i + 1 < w.b.size(); ++i)
    if (w.b[i] >= w.b[i + 1]) throw Error("witness elements must be strictly increasing");
  std::uint64_t top = 2 * w.b.back() + w.t;
  if (top > w.horizon)
    throw HorizonExceeded("witness sum " + std::to_string(top) + " exceeds horizon " +
                          std::to_string(w.horizon));
  if (w.horizon <= lim.bitmap_cap) {
    BitVec bm = A.bitmap(w.horizon, lim);
    for (std::size_t i = 0; i < w.b.size(); ++i)
      for (std::size_t j = i; j < w.b.size(); ++j)
        if (!bm.contains(w.b[i] + w.b[j] + w.t)) return false;
    return true;
  }
  for (std::size_t i = 0; i < w.b.size(); ++i)
    for (std::size_t j = i; j < w.b.size(); ++j)
      if (!A.member(w.b[i] + w.b[j] + w.t, lim)) return false;
  return true;
}

namespace search_detail {

struct BudgetExhausted {};

// Branch-and-bound maximum clique over an explicit adjacency matrix, with a
// greedy-coloring upper bound at every node and smallest-index branching.
// Deterministic by construction: vertex order is fixed, no randomness.
class CliqueSearcher {
 public:
  CliqueSearcher(const std::vector<BitVec>& adj, std::uint64_t node_budget,
                 double time_budget_s)
      : adj_(adj),
        V_(adj.size()),
        node_budget_(node_budget),
        time_budget_s_(time_budget_s),
        start_(std::chrono::steady_clock::now()) {
    // expand() keeps references into the pools across recursion; reserving up
    // front (depth never exceeds V_+1) keeps emplace_back from reallocating
    // under those references. The handles are small; bits allocate lazily.
    pool_child_.reserve(V_ + 2);
    pool_uncolored_.reserve(V_ + 2);
    pool_canjoin_.reserve(V_ + 2);
  }

  std::uint64_t nodes = 0;
  std::uint64_t prunes = 0;
  bool exhausted = false;
  bool early_stopped = false;

  // Largest clique; best-so-far survives budget exhaustion. A nonzero stop_at
  // ends the search as soon as a clique that large is found.
  std::vector<std::size_t> maximum(const std::vector<std::size_t>& seed,
                                   std::uint64_t stop_at = 0) {
    best_ = seed;
    target_ = 0;
    stop_at_ = stop_at;
    cur_.clear();
    if (stop_at_ && best_.size() >= stop_at_) {
      early_stopped = true;
      return best_;
    }
    BitVec P(V_);
    P.fill_all();
    try {
      expand(0, P);
    } catch (const BudgetExhausted&) {
      exhausted = true;
    } catch (const EarlyStop&) {
      early_stopped = true;
    }
    return best_;
  }

  // Does P contain a clique of size >= need? Shares the budget.
  bool feasible(const BitVec& P, std::uint64_t need) {
    if (need == 0) return true;
    // Greedy chain first: succeeds instantly on dense candidate sets and costs
    // a few intersections, versus a colored descent.
    {
      BitVec cand = P;
      std::uint64_t len = 0;
      std::size_t v = cand.find_first();
      while (v != BitVec::npos && len < need) {
        ++len;
        cand.and_with(adj_[v]);
        v = cand.find_first();
      }
      if (len >= need) return true;
    }
    target_ = need;
    stop_at_ = 0;
    found_ = false;
    cur_.clear();
    best_.clear();
    BitVec work = P;
    try {
      expand(0, work);
    } catch (const BudgetExhausted&) {
      exhausted = true;
    }
    return found_;
  }

 private:
  void tick() {
    if (++nodes > node_budget_) throw BudgetExhausted{};
    if ((nodes & 8191) == 0) {
      auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
      if (dt.count() > time_budget_s_) throw BudgetExhausted{};
    }
  }

  // Greedy proper coloring of the candidate subgraph; the class count bounds
  // any clique inside it.
  std::uint64_t color_bound(const BitVec& P, std::size_t depth) {
    grow_pool(depth);
    BitVec& uncolored = pool_uncolored_[depth];
    BitVec& can_join = pool_canjoin_[depth];
    uncolored = P;
    std::uint64_t colors = 0;
    while (uncolored.any()) {
      ++colors;
      can_join = uncolored;
      std::size_t v = can_join.find_first();
      while (v != BitVec::npos) {
        uncolored.reset_bit(v);
        can_join.reset_bit(v);
        can_join.andnot_with(adj_[v]);
        v = can_join.find_next(v + 1);
      }
    }
    return colors;
  }

  struct EarlyStop {};

  void expand(std::size_t depth, BitVec& P) {
    tick();
    if (target_ == 0) {
      if (cur_.size() > best_.size()) best_ = cur_;
      if (stop_at_ && best_.size() >= stop_at_) throw EarlyStop{};
    } else if (cur_.size() >= target_) {
      found_ = true;
      return;
    }
    while (P.any()) {
      if (found_) return;
      std::uint64_t cb = color_bound(P, depth);
      if (target_ == 0 ? cur_.size() + cb <= best_.size() : cur_.size() + cb < target_) {
        ++prunes;
        return;
      }
      std::size_t v = P.find_first();
      grow_pool(depth);
      BitVec& child = pool_child_[depth];
      child.assign_and(P, adj_[v]);
      cur_.push_back(v);
      expand(depth + 1, child);
      cur_.pop_back();
      P.reset_bit(v);
    }
  }

  void grow_pool(std::size_t depth) {
    while (pool_child_.size() <= depth) {
      pool_child_.emplace_back(V_);
      pool_uncolored_.emplace_back(V_);
      pool_canjoin_.emplace_back(V_);
    }
  }

  const std::vector<BitVec>& adj_;
  std::size_t V_;
  std::uint64_t node_budget_;
  double time_budget_s_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::size_t> cur_, best_;
  std::uint64_t target_ = 0;
  std::uint64_t stop_at_ = 0;
  bool found_ = false;
  std::vector<BitVec> pool_child_, pool_uncolored_, pool_canjoin_;
};

}  // namespace search_detail

// Maximum (or greedily grown) witness for B+B+t ⊂ A with sums bounded by the
// horizon. Exact mode reports the lexicographically smallest maximum witness;
// greedy mode repeatedly adds the smallest compatible candidate. Budget
// exhaustion returns the best witness found, flagged incomplete.
inline SearchResult max_witness(const SetExpr& A, const SearchConfig& cfg,
                                const EvalLimits& lim = {}) {
  if (cfg.horizon < 1) throw Error("search horizon must be >= 1");
  auto t0 = std::chrono::steady_clock::now();
  BitVec bm = A.bitmap(cfg.horizon, lim);

  std::vector<std::uint64_t> verts;
  for (std::uint64_t b = 1; 2 * b + cfg.t <= cfg.horizon; ++b) {
    if (cfg.residue && b % cfg.residue->m != cfg.residue->r) continue;
    if (!cfg.cross_sums_only && !bm.contains(2 * b + cfg.t)) continue;
    verts.push_back(b);
  }

  SearchResult res;
  res.witness.t = cfg.t;
  res.witness.horizon = cfg.horizon;
  res.stats.vertex_count = verts.size();

  auto finish = [&](bool complete) {
    res.stats.complete = complete;
    auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - t0);
    res.stats.elapsed_ms = static_cast<std::uint64_t>(dt.count());
    if (!res.witness.b.empty()) {
      bool full_ok = true;
      for (std::size_t i = 0; i < res.witness.b.size() && full_ok; ++i)
        for (std::size_t j = i; j < res.witness.b.size(); ++j)
          if (!bm.contains(res.witness.b[i] + res.witness.b[j] + cfg.t)) {
            full_ok = false;
            break;
          }
      res.witness.verified = full_ok;
    }
    return res;
  };

  if (verts.empty()) return finish(true);

  if (cfg.mode == SearchMode::Greedy) {
    std::vector<std::uint64_t>& B = res.witness.b;
    for (std::uint64_t v : verts) {
      ++res.stats.nodes;
      bool ok = true;
      for (std::uint64_t u : B)
        if (!bm.contains(u + v + cfg.t)) {
          ok = false;
          break;
        }
      if (ok) {
        B.push_back(v);
        if (cfg.target_size && B.size() >= *cfg.target_size) break;
      }
    }
    return finish(true);
  }

  if (verts.size() > cfg.exact_vertex_cap)
    throw ResourceLimit("exact search needs " + std::to_string(verts.size()) +
                        " vertices, above the cap " + std::to_string(cfg.exact_vertex_cap) +
                        "; use greedy mode or a residue filter");

  std::size_t V = verts.size();
  std::vector<BitVec> adj(V, BitVec(V));
  for (std::size_t i = 0; i < V; ++i)
    for (std::size_t j = i + 1; j < V; ++j)
      if (bm.contains(verts[i] + verts[j] + cfg.t)) {
        adj[i].set_bit(j);
        adj[j].set_bit(i);
      }

  search_detail::CliqueSearcher searcher(adj, cfg.node_budget, cfg.time_budget_s);

  // Greedy chain seeds the bound.
  std::vector<std::size_t> seed;
  {
    BitVec cand(V);
    cand.fill_all();
    std::size_t v = cand.find_first();
    while (v != BitVec::npos) {
      seed.push_back(v);
      cand.and_with(adj[v]);
      v = cand.find_first();
    }
  }

  std::vector<std::size_t> bestIdx =
      searcher.maximum(seed, cfg.target_size ? *cfg.target_size : 0);
  bool complete = !searcher.exhausted;

  if (complete && !searcher.early_stopped && !bestIdx.empty()) {
    // Lexicographic extraction: commit the smallest vertex that still allows a
    // maximum-size completion, then recurse into its neighborhood.
    std::size_t want = bestIdx.size();
    std::vector<std::size_t> prefix;
    BitVec cand(V);
    cand.fill_all();
    bool aborted = false;
    while (prefix.size() < want && !aborted) {
      std::size_t v = cand.find_first();
      bool committed = false;
      while (v != BitVec::npos) {
        BitVec next(V);
        next.assign_and(cand, adj[v]);
        for (std::size_t k = 0; k <= v; ++k) next.reset_bit(k);
        std::uint64_t need = want - prefix.size() - 1;
        if (searcher.feasible(next, need)) {
          prefix.push_back(v);
          cand = next;
          committed = true;
          break;
        }
        if (searcher.exhausted) break;
        v = cand.find_next(v + 1);
      }
      if (!committed) aborted = true;  // budget ran dry mid-extraction
    }
    if (!aborted && prefix.size() == want) bestIdx = prefix;
  }

  res.stats.nodes = searcher.nodes;
  res.stats.bound_prunes = searcher.prunes;
  for (std::size_t i : bestIdx) res.witness.b.push_back(verts[i]);
  std::sort(res.witness.b.begin(), res.witness.b.end());
  return finish(complete);
}

// Split a witness by residue class of its elements mod m. Sub-witnesses of a
// verified witness stay verified.
inline std::vector<SumsetWitness> residue_split(const SumsetWitness& w, std::uint64_t m) {
  if (m < 1) throw Error("residue_split needs m >= 1");
  std::vector<SumsetWitness> parts(m);
  for (std::uint64_t r = 0; r < m; ++r) {
    parts[r].t = w.t;
    parts[r].horizon = w.horizon;
    parts[r].verified = w.verified;
  }
  for (std::uint64_t b : w.b) parts[b % m].b.push_back(b);
  return parts;
}

// The dyadic reduction: members of A divisible by 2^(n+1) after removing the
// offset 2l, together with the same set shifted up by 2^n. Witnesses inside
// the reduced set lift back to the original via b -> 2^n b + l (checked by the
// tests, not assumed here).
inline SetExpr reduce_2n(const SetExpr& A, std::uint64_t n, std::uint64_t l) {
  if (n < 1 || n >= 62) throw Error("reduce_2n level must lie in [1, 61]");
  if (l >= (std::uint64_t{1} << (n - 1))) throw Error("reduce_2n offset must satisfy l < 2^(n-1)");
  std::uint64_t two_np1 = std::uint64_t{1} << (n + 1);
  SetExpr core = SetExpr::intersection(
      SetExpr::shift(A, -static_cast<std::int64_t>(2 * l)),
      SetExpr::congruence(two_np1, 0));
  return SetExpr::set_union(core, SetExpr::shift(core, std::int64_t{1} << n));
}

struct ProbeCell {
  std::uint64_t t = 0;
  std::uint64_t witness_size = 0;
  bool complete = false;
  bool target_reached = false;
};

struct ProbeRow {
  std::string label;
  Rational upper_est, lower_est;
  std::vector<ProbeCell> cells;
};

// Sweep a list of labeled sets: density estimates on an 8-window ladder up to
// N, plus a witness search for every shift in ts. Exploratory instrument for
// threshold hunting; budget exhaustion is reported per cell, never hidden.
inline std::vector<ProbeRow> probe_threshold(
    const std::vector<std::pair<std::string, SetExpr>>& instances,
    const std::vector<std::uint64_t>& ts, std::uint64_t N, std::uint64_t target_size,
    SearchMode mode, std::uint64_t node_budget = 100'000'000, double time_budget_s = 60.0,
    const EvalLimits& lim = {}) {
  if (N < 8) throw Error("probe horizon too small");
  std::vector<std::uint64_t> ladder;
  for (std::uint64_t j = 1; j <= 8; ++j) ladder.push_back(N / 8 * j);
  Schedule sched = schedule_explicit(ladder, "eighths(" + std::to_string(N) + ")");

  std::vector<ProbeRow> rows;
  for (const auto& [label, expr] : instances) {
    ProbeRow row;
    row.label = label;
    DensityEstimate d = density_along(expr, sched, std::nullopt, 0, lim);
    row.upper_est = d.upper_est;
    row.lower_est = d.lower_est;
    for (std::uint64_t t : ts) {
      SearchConfig cfg;
      cfg.mode = mode;
      cfg.t = t;
      cfg.horizon = N;
      cfg.node_budget = node_budget;
      cfg.time_budget_s = time_budget_s;
      cfg.target_size = target_size;
      SearchResult r = max_witness(expr, cfg, lim);
      ProbeCell cell;
      cell.t = t;
      cell.witness_size = r.witness.size();
      cell.complete = r.stats.complete;
      cell.target_reached = r.witness.size() >= target_size;
      row.cells.push_back(cell);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sumset
