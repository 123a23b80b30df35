#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sumset/dsl.hpp"
#include "sumset/errors.hpp"
#include "sumset/rational.hpp"
#include "sumset/schedule.hpp"
#include "sumset/set_expr.hpp"

namespace sumset {

// |expr ∩ [1, N_j]| for every window of the schedule, computing the cell
// decomposition (or one bitmap) once for the largest window.
inline std::vector<std::uint64_t> counts_for_windows(const SetExpr& expr,
                                                     const std::vector<std::uint64_t>& windows,
                                                     const EvalLimits& lim = {}) {
  std::vector<std::uint64_t> counts;
  counts.reserve(windows.size());
  if (windows.empty()) return counts;
  std::uint64_t top = windows.back();
  if (auto cs = expr.cells(top, lim)) {
    for (std::uint64_t w : windows) {
      std::uint64_t c = 0;
      for (const Cell& cell : *cs) c += detail::cell_count_leq(cell, w);
      counts.push_back(c);
    }
    return counts;
  }
  BitVec bm = expr.bitmap(top, lim);
  for (std::uint64_t w : windows) counts.push_back(bm.count_prefix(w));
  return counts;
}

struct DensityProfile {
  Schedule schedule;
  std::vector<std::uint64_t> counts;
  std::vector<Rational> ratios;  // counts[j] / N_j
};

inline DensityProfile profile(const SetExpr& expr, const Schedule& sched,
                              const EvalLimits& lim = {}) {
  DensityProfile p{sched, counts_for_windows(expr, sched.windows, lim), {}};
  p.ratios.reserve(sched.windows.size());
  for (std::size_t j = 0; j < sched.windows.size(); ++j)
    p.ratios.emplace_back(BigInt(p.counts[j]), BigInt(sched.windows[j]));
  return p;
}

struct DensityEstimate {
  Rational upper_est, lower_est;
  std::size_t tail_start;  // 1-based window index the extrema are taken over
  std::optional<Rational> analytic;
  DensityProfile prof;
};

// Upper/lower density estimates: extrema of the window ratios over the tail of
// the schedule (default tail: last quarter). The estimates say nothing beyond
// the sampled windows; analytic values ride along only for known sets.
inline DensityEstimate density_along(const SetExpr& expr, const Schedule& sched,
                                     std::optional<Rational> analytic = std::nullopt,
                                     std::size_t tail_start = 0,
                                     const EvalLimits& lim = {}) {
  if (sched.windows.empty()) throw UnknownSchedule("empty schedule");
  DensityProfile p = profile(expr, sched, lim);
  std::size_t K = sched.windows.size();
  if (tail_start == 0) tail_start = (3 * K + 3) / 4;  // ceil(3K/4)
  if (tail_start > K) tail_start = K;
  Rational hi = p.ratios[tail_start - 1], lo = hi;
  for (std::size_t j = tail_start; j <= K; ++j) {
    const Rational& r = p.ratios[j - 1];
    if (r > hi) hi = r;
    if (r < lo) lo = r;
  }
  if (!analytic) {
    // Trivial cases fill themselves in.
    if (expr.kind() == SetExpr::Kind::Congruence)
      analytic = Rational(1, expr.cong_mod());
    else if (expr.kind() == SetExpr::Kind::FiniteSet)
      analytic = Rational(0);
  }
  return DensityEstimate{hi, lo, tail_start, std::move(analytic), std::move(p)};
}

// Sliding-window counts: extrema of |expr ∩ (s, s+L]| over 0 <= s <= N-L.
// Experimental probe only; carries no analytic claims about limit densities.
struct WindowExtrema {
  std::uint64_t L = 0, N = 0;
  std::uint64_t max_count = 0, min_count = 0;
  std::uint64_t argmax_start = 0, argmin_start = 0;  // window is (start, start+L]
  Rational upper() const { return Rational(max_count, L); }
  Rational lower() const { return Rational(min_count, L); }
};

inline WindowExtrema banach_window(const SetExpr& expr, std::uint64_t L, std::uint64_t N,
                                   const EvalLimits& lim = {}) {
  if (L < 1 || L > N) throw Error("banach_window needs 1 <= L <= N");
  BitVec bm = expr.bitmap(N, lim);
  WindowExtrema w{L, N, 0, 0, 0, 0};
  std::uint64_t cur = bm.count_prefix(L);
  w.max_count = w.min_count = cur;
  for (std::uint64_t s = 1; s + L <= N; ++s) {
    cur += bm.contains(s + L) ? 1 : 0;
    cur -= bm.contains(s) ? 1 : 0;
    if (cur > w.max_count) {
      w.max_count = cur;
      w.argmax_start = s;
    }
    if (cur < w.min_count) {
      w.min_count = cur;
      w.argmin_start = s;
    }
  }
  return w;
}

struct CalculusReport {
  std::uint64_t horizon = 0;
  bool additive_ok = false;        // count(e1 ∪ e2, m) = count(e1,m)+count(e2,m) for all m <= M
  bool closed_vs_enum_ok = false;  // closed-form counts agree with bitmap popcounts
  std::optional<std::int64_t> shift_t;   // set when e2 = shift(e1, t)
  std::optional<bool> shift_bound_ok;    // |count(e1 ∪ (e1+t), m) - 2*count(e1,m)| <= t
  std::uint64_t max_shift_defect = 0;
};

// Finite sanity checks behind the density calculus: exact additivity of counts
// for disjoint operands, and the two-sided shift bound that makes
// d(A ∪ (A+t)) = 2 d(A) for suitable windows. Throws DisjointnessViolated when
// the operands share an element in [1, M].
inline CalculusReport check_density_calculus(const SetExpr& e1, const SetExpr& e2,
                                             std::uint64_t M, const EvalLimits& lim = {}) {
  CalculusReport rep;
  rep.horizon = M;
  BitVec b1 = e1.bitmap(M, lim);
  BitVec b2 = e2.bitmap(M, lim);
  if (b1.intersects(b2)) {
    BitVec common = b1;
    common.and_with(b2);
    std::uint64_t first = common.find_first() + 1;
    throw DisjointnessViolated(first, "operands share element " + std::to_string(first) +
                                          "; exact additivity needs disjoint sets");
  }
  SetExpr u = SetExpr::set_union(e1, e2);
  BitVec bu = u.bitmap(M, lim);
  BitVec both = b1;
  both.or_with(b2);
  rep.additive_ok = (bu == both);

  rep.closed_vs_enum_ok = e1.count_leq(M, lim) == b1.count() &&
                          e2.count_leq(M, lim) == b2.count() &&
                          u.count_leq(M, lim) == bu.count();

  if (e2.kind() == SetExpr::Kind::Shift && e2.shift_t() >= 1 &&
      render(e2.children()[0]) == render(e1)) {
    std::int64_t t = e2.shift_t();
    rep.shift_t = t;
    std::uint64_t c1 = 0, cu = 0, worst = 0;
    bool ok = true;
    for (std::uint64_t m = 1; m <= M; ++m) {
      c1 += b1.contains(m) ? 1 : 0;
      cu += bu.contains(m) ? 1 : 0;
      std::uint64_t defect = cu >= 2 * c1 ? cu - 2 * c1 : 2 * c1 - cu;
      if (defect > worst) worst = defect;
      if (defect > static_cast<std::uint64_t>(t)) ok = false;
    }
    rep.shift_bound_ok = ok;
    rep.max_shift_defect = worst;
  }
  return rep;
}

// S_N = sum_{n=1}^{N} (1/n) * 4^(n-N), exactly. The vanishing of this tail is
// what lets block families ignore all but the top block in a window.
inline Rational tail_sum(std::uint64_t N) {
  if (N < 1) throw Error("tail_sum needs N >= 1");
  Rational s(0);
  for (std::uint64_t n = 1; n <= N; ++n)
    s += Rational(1, n) * pow_rat(Rational(4), BigInt(n) - BigInt(N));
  return s;
}

struct TailSumReport {
  std::uint64_t N;
  Rational value;
  bool monotone_from_2;  // S_k > S_{k+1} for all 2 <= k < N
};

inline TailSumReport tail_sum_check(std::uint64_t N) {
  TailSumReport r{N, tail_sum(N), true};
  Rational prev = tail_sum(2);
  for (std::uint64_t k = 3; k <= N; ++k) {
    Rational cur = tail_sum(k);
    if (cur >= prev) r.monotone_from_2 = false;
    prev = cur;
  }
  return r;
}

}  // namespace sumset
