#pragma once

#include <algorithm>
#include <cstdint>

#include "sumset/bitvec.hpp"
#include "sumset/errors.hpp"
#include "sumset/rational.hpp"
#include "sumset/set_expr.hpp"

namespace sumset {

// Finite correspondence check. The set A on [1, N] is compared against the
// three frequency functionals of its doubling system on N' = floor(N/2)
// points:
//
//   freq_sigma_e  = |A ∩ [1, N']| / N'            (truncation)
//   freq_e_sigma  = |{k <= N' : 2k   in A}| / N'  (even fiber)
//   freq_sinv_e   = |{k <= N' : 2k+1 in A}| / N'  (odd fiber)
//
// Each is bounded below in terms of d = |A ∩ [1, N]| / N with an O(1/N)
// defect; the slack eps = 4/N absorbs every boundary effect, so the three
// inequalities hold for every A and every N >= 8. A failure means the
// counting machinery is broken, not the set. The exact identity
// freq_e_sigma + freq_sinv_e = |A ∩ [2, 2N'+1]| / N' is checked as well.
struct FcpReport {
  std::uint64_t N = 0;
  std::uint64_t n_half = 0;  // N'
  Rational density;          // d
  Rational eps;              // 4/N
  Rational freq_sigma_e, freq_e_sigma, freq_sinv_e;
  Rational bound_sigma_e, bound_e_sigma, bound_sum;
  bool ok_sigma_e = false, ok_e_sigma = false, ok_sum = false;
  bool identity_ok = false;
  bool pass = false;
};

inline FcpReport check_fcp(const SetExpr& expr, std::uint64_t N, const EvalLimits& lim = {}) {
  if (N < 8) throw Error("correspondence check needs N >= 8");
  FcpReport r;
  r.N = N;
  r.n_half = N / 2;
  std::uint64_t M = std::max(N, 2 * r.n_half + 1);
  BitVec bm = expr.bitmap(M, lim);

  std::uint64_t cN = bm.count_prefix(N);
  r.density = Rational(cN, N);
  r.eps = Rational(4, N);

  std::uint64_t c_half = bm.count_prefix(r.n_half);
  std::uint64_t c_even = 0, c_odd = 0;
  for (std::uint64_t k = 1; k <= r.n_half; ++k) {
    if (bm.contains(2 * k)) ++c_even;
    if (bm.contains(2 * k + 1)) ++c_odd;
  }
  r.freq_sigma_e = Rational(c_half, r.n_half);
  r.freq_e_sigma = Rational(c_even, r.n_half);
  r.freq_sinv_e = Rational(c_odd, r.n_half);

  Rational two_d = 2 * r.density;
  r.bound_sigma_e = two_d - 1 - r.eps;
  r.bound_e_sigma = two_d - Rational(4, N) - 1 - r.eps;
  r.bound_sum = two_d - Rational(2, N) - r.eps;

  r.ok_sigma_e = r.freq_sigma_e >= r.bound_sigma_e;
  r.ok_e_sigma = r.freq_e_sigma >= r.bound_e_sigma;
  r.ok_sum = r.freq_e_sigma + r.freq_sinv_e >= r.bound_sum;

  // Evens 2..2N' and odds 3..2N'+1 tile [2, 2N'+1] exactly.
  std::uint64_t c_tail = bm.count_prefix(2 * r.n_half + 1) - (bm.contains(1) ? 1 : 0);
  r.identity_ok = (c_even + c_odd == c_tail);

  r.pass = r.ok_sigma_e && r.ok_e_sigma && r.ok_sum && r.identity_ok;
  return r;
}

}  // namespace sumset
