#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sumset/bitvec.hpp"
#include "sumset/errors.hpp"
#include "sumset/rational.hpp"
#include "sumset/term.hpp"

namespace sumset {

// Half-open subinterval [a, b) of the unit interval.
struct UnitInterval {
  Rational a, b;
};

// Caps for materialization and closed-form counting. All overruns surface as
// ResourceLimit; nothing truncates silently.
struct EvalLimits {
  std::uint64_t bitmap_cap = std::uint64_t{1} << 27;
  std::uint64_t cell_cap = 8192;
  std::uint64_t family_index_cap = 16384;
  std::uint64_t crt_modulus_cap = std::uint64_t{1} << 31;
};

// One arithmetic-progression segment: {n in [lo, hi) : n ≡ res (mod mod)}.
// The closed-form counting engine decomposes an expression over a horizon into
// pairwise disjoint cells; every count is then a per-cell closed form.
struct Cell {
  std::uint64_t lo, hi, mod, res;
};
using CellSet = std::vector<Cell>;

namespace detail {

// Thrown inside cell construction when a cap is hit; callers turn it into a
// fallback to enumeration rather than an error.
struct CellBudget {};

inline std::uint64_t cell_count_leq(const Cell& c, std::uint64_t m) {
  std::uint64_t hi = std::min(c.hi, m + 1);
  if (hi <= c.lo) return 0;
  std::uint64_t first = c.lo + ((c.res + c.mod - c.lo % c.mod) % c.mod);
  if (first >= hi) return 0;
  return (hi - 1 - first) / c.mod + 1;
}

inline std::optional<Cell> cell_intersect(const Cell& a, const Cell& b,
                                          const EvalLimits& lim) {
  Cell out;
  out.lo = std::max(a.lo, b.lo);
  out.hi = std::min(a.hi, b.hi);
  if (out.lo >= out.hi) return std::nullopt;
  std::uint64_t g = std::gcd(a.mod, b.mod);
  std::uint64_t ra = a.res % g, rb = b.res % g;
  if (ra != rb) return std::nullopt;
  BigInt L = BigInt(a.mod) / g * b.mod;
  if (L > lim.crt_modulus_cap) throw CellBudget{};
  // CRT: x ≡ a.res (mod a.mod), x ≡ b.res (mod b.mod).
  BigInt m1(a.mod), m2(b.mod), r1(a.res), r2(b.res);
  // Solve r1 + m1*k ≡ r2 (mod m2)  =>  k ≡ (r2-r1)/g * inv(m1/g) (mod m2/g).
  BigInt m2g = m2 / g;
  BigInt diff = ((r2 - r1) / g) % m2g;
  if (diff < 0) diff += m2g;
  // Modular inverse of (m1/g) mod (m2/g) by extended Euclid.
  BigInt a0 = m1 / g % m2g, b0 = m2g, x0 = 1, x1 = 0;
  while (b0 != 0) {
    BigInt q = a0 / b0;
    BigInt t = a0 - q * b0;
    a0 = b0;
    b0 = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
  }
  BigInt inv = x0 % m2g;
  if (inv < 0) inv += m2g;
  BigInt k = diff * inv % m2g;
  BigInt res = (r1 + m1 * k) % L;
  out.mod = to_u64(L, "crt modulus");
  out.res = to_u64(res, "crt residue");
  return out;
}

// Pieces of a that are not in b. Preserves pairwise disjointness.
inline void cell_subtract(const Cell& a, const Cell& b, CellSet& out,
                          const EvalLimits& lim) {
  std::uint64_t mid_lo = std::max(a.lo, b.lo), mid_hi = std::min(a.hi, b.hi);
  if (mid_lo >= mid_hi) {
    out.push_back(a);
    return;
  }
  if (a.lo < mid_lo) out.push_back({a.lo, mid_lo, a.mod, a.res});
  if (mid_hi < a.hi) out.push_back({mid_hi, a.hi, a.mod, a.res});
  Cell mid{mid_lo, mid_hi, a.mod, a.res};
  auto common = cell_intersect(mid, Cell{mid_lo, mid_hi, b.mod, b.res}, lim);
  if (!common) {
    out.push_back(mid);
    return;
  }
  std::uint64_t L = common->mod;
  if (L / a.mod > lim.cell_cap) throw CellBudget{};
  for (std::uint64_t k = 0; k * a.mod < L; ++k) {
    std::uint64_t rho = a.res + k * a.mod;
    if (rho != common->res) out.push_back({mid_lo, mid_hi, L, rho});
  }
}

inline void cells_subtract_all(CellSet& acc, const CellSet& minus,
                               const EvalLimits& lim) {
  for (const Cell& b : minus) {
    CellSet next;
    for (const Cell& a : acc) cell_subtract(a, b, next, lim);
    if (next.size() > lim.cell_cap) throw CellBudget{};
    acc = std::move(next);
  }
}

// acc := acc ∪ add, keeping cells pairwise disjoint.
inline void cells_union_into(CellSet& acc, const CellSet& add, const EvalLimits& lim) {
  CellSet fresh = add;
  cells_subtract_all(fresh, acc, lim);
  if (acc.size() + fresh.size() > lim.cell_cap) throw CellBudget{};
  acc.insert(acc.end(), fresh.begin(), fresh.end());
}

}  // namespace detail

// Lazy description of a subset of the naturals {1, 2, ...}. Values are
// immutable and cheap to copy; membership is decidable for every variant.
class SetExpr {
 public:
  enum class Kind : std::uint8_t {
    IntervalFamily,
    Congruence,
    LogFractional,
    FiniteSet,
    Union,
    Intersection,
    Difference,
    Complement,
    Shift,
  };

  SetExpr() = default;

  // ⋃_{n≥1} [lo(n), hi(n)) ∩ Z, with [x, y) ∩ Z = {ceil(x), ..., ceil(y)-1}.
  // mono_from is the caller's witness: lo must be strictly increasing for
  // n >= mono_from. Checked on a sample window at construction; membership
  // relies on it to stop scanning family indices.
  static SetExpr interval_family(Term lo, Term hi, std::uint64_t mono_from = 1) {
    auto n = std::make_shared<Node>(Kind::IntervalFamily);
    n->lo = std::move(lo);
    n->hi = std::move(hi);
    n->mono_from = std::max<std::uint64_t>(1, mono_from);
    validate_family(*n);
    return SetExpr(std::move(n));
  }

  // {n >= 1 : n ≡ r (mod m)}. Note r = 0 gives {m, 2m, ...}.
  static SetExpr congruence(std::uint64_t m, std::uint64_t r) {
    if (m < 1) throw Error("congruence modulus must be >= 1");
    if (r >= m) throw Error("congruence residue must satisfy 0 <= r < m");
    auto n = std::make_shared<Node>(Kind::Congruence);
    n->m = m;
    n->r = r;
    return SetExpr(std::move(n));
  }

  // {m >= 1 : frac(theta * log2(m)) ∈ U}. U is normalized (sorted, merged).
  static SetExpr log_fractional(Rational theta, std::vector<UnitInterval> u) {
    if (theta <= 0) throw Error("log-fractional theta must be positive");
    if (u.empty()) throw Error("log-fractional needs at least one interval");
    for (const auto& iv : u)
      if (iv.a < 0 || iv.a >= iv.b || iv.b > 1)
        throw Error("log-fractional intervals must satisfy 0 <= a < b <= 1");
    std::sort(u.begin(), u.end(),
              [](const UnitInterval& x, const UnitInterval& y) { return x.a < y.a; });
    std::vector<UnitInterval> merged;
    for (auto& iv : u) {
      if (!merged.empty() && iv.a <= merged.back().b) {
        if (iv.b > merged.back().b) merged.back().b = iv.b;
      } else {
        merged.push_back(iv);
      }
    }
    auto n = std::make_shared<Node>(Kind::LogFractional);
    n->theta = std::move(theta);
    n->u = std::move(merged);
    return SetExpr(std::move(n));
  }

  static SetExpr finite(std::vector<std::uint64_t> elems) {
    for (auto e : elems)
      if (e < 1) throw Error("finite sets contain naturals >= 1");
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    auto n = std::make_shared<Node>(Kind::FiniteSet);
    n->elems = std::move(elems);
    return SetExpr(std::move(n));
  }

  // Nested unions are flattened; this is the only structural simplification.
  static SetExpr set_union(std::vector<SetExpr> children) {
    if (children.size() < 2) throw Error("union needs at least two operands");
    auto n = std::make_shared<Node>(Kind::Union);
    for (auto& c : children) {
      if (c.kind() == Kind::Union)
        for (const auto& g : c.node_->children) n->children.push_back(g);
      else
        n->children.push_back(std::move(c));
    }
    return SetExpr(std::move(n));
  }
  static SetExpr set_union(SetExpr a, SetExpr b) {
    std::vector<SetExpr> v;
    v.push_back(std::move(a));
    v.push_back(std::move(b));
    return set_union(std::move(v));
  }

  static SetExpr intersection(SetExpr a, SetExpr b) {
    auto n = std::make_shared<Node>(Kind::Intersection);
    n->children = {std::move(a), std::move(b)};
    return SetExpr(std::move(n));
  }

  static SetExpr difference(SetExpr a, SetExpr b) {
    auto n = std::make_shared<Node>(Kind::Difference);
    n->children = {std::move(a), std::move(b)};
    return SetExpr(std::move(n));
  }

  static SetExpr complement(SetExpr a) {
    auto n = std::make_shared<Node>(Kind::Complement);
    n->children = {std::move(a)};
    return SetExpr(std::move(n));
  }

  // (child + t) ∩ N. t may be negative.
  static SetExpr shift(SetExpr a, std::int64_t t) {
    auto n = std::make_shared<Node>(Kind::Shift);
    n->children = {std::move(a)};
    n->t = t;
    return SetExpr(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  const std::vector<SetExpr>& children() const { return node_->children; }
  std::uint64_t cong_mod() const { return node_->m; }
  std::uint64_t cong_res() const { return node_->r; }
  const Term& family_lo() const { return node_->lo; }
  const Term& family_hi() const { return node_->hi; }
  std::uint64_t family_mono_from() const { return node_->mono_from; }
  const Rational& lf_theta() const { return node_->theta; }
  const std::vector<UnitInterval>& lf_intervals() const { return node_->u; }
  const std::vector<std::uint64_t>& finite_elems() const { return node_->elems; }
  std::int64_t shift_t() const { return node_->t; }

  bool member(std::uint64_t x, const EvalLimits& lim = {}) const {
    if (x < 1) return false;
    switch (kind()) {
      case Kind::Congruence:
        return x % node_->m == node_->r;
      case Kind::FiniteSet:
        return std::binary_search(node_->elems.begin(), node_->elems.end(), x);
      case Kind::IntervalFamily:
        return family_member(x, lim);
      case Kind::LogFractional:
        return lf_member(x);
      case Kind::Union:
        for (const auto& c : node_->children)
          if (c.member(x, lim)) return true;
        return false;
      case Kind::Intersection:
        return node_->children[0].member(x, lim) && node_->children[1].member(x, lim);
      case Kind::Difference:
        return node_->children[0].member(x, lim) && !node_->children[1].member(x, lim);
      case Kind::Complement:
        return !node_->children[0].member(x, lim);
      case Kind::Shift: {
        std::int64_t src = static_cast<std::int64_t>(x) - node_->t;
        return src >= 1 && node_->children[0].member(static_cast<std::uint64_t>(src), lim);
      }
    }
    return false;
  }

  // Characteristic bit vector of the set restricted to [1, N].
  BitVec bitmap(std::uint64_t N, const EvalLimits& lim = {}) const {
    if (N > lim.bitmap_cap)
      throw ResourceLimit("bitmap length " + std::to_string(N) + " exceeds cap " +
                          std::to_string(lim.bitmap_cap));
    BitVec out(N);
    fill_bitmap(out, N, lim);
    return out;
  }

  // Disjoint-cell decomposition of the set restricted to [1, horizon], when
  // every subtree admits one within the caps. LogFractional does not.
  std::optional<CellSet> cells(std::uint64_t horizon, const EvalLimits& lim = {}) const {
    try {
      return cells_impl(horizon, lim);
    } catch (const detail::CellBudget&) {
      return std::nullopt;
    }
  }

  // |expr ∩ [1, M]|. Closed form via cells when possible, else a bitmap count.
  std::uint64_t count_leq(std::uint64_t M, const EvalLimits& lim = {}) const {
    if (auto cs = cells(M, lim)) {
      std::uint64_t total = 0;
      for (const Cell& c : *cs) total += detail::cell_count_leq(c, M);
      return total;
    }
    return bitmap(M, lim).count();
  }

 private:
  struct Node {
    Kind kind;
    Term lo, hi;
    std::uint64_t mono_from = 1;
    std::uint64_t m = 0, r = 0;
    Rational theta;
    std::vector<UnitInterval> u;
    std::vector<std::uint64_t> elems;
    std::int64_t t = 0;
    std::vector<SetExpr> children;
    explicit Node(Kind k) : kind(k) {}
  };

  explicit SetExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static void validate_family(const Node& n) {
    // Sample window: lo(k) < hi(k+1) ordering, and strict growth of lo beyond
    // the declared witness. Cheap sanity net for the decidability contract.
    std::uint64_t w0 = n.mono_from;
    for (std::uint64_t k = 1; k <= 32; ++k) {
      if (n.lo.eval(k) >= n.hi.eval(k + 1))
        throw Error("interval family violates lo(n) < hi(n+1) at n=" + std::to_string(k));
    }
    for (std::uint64_t k = w0; k < w0 + 32; ++k) {
      if (n.lo.eval(k) >= n.lo.eval(k + 1))
        throw Error("interval family lo not strictly increasing at declared witness n=" +
                    std::to_string(k));
    }
  }

  bool family_member(std::uint64_t x, const EvalLimits& lim) const {
    const Node& nd = *node_;
    Rational rx(x);
    for (std::uint64_t k = 1;; ++k) {
      if (k > lim.family_index_cap)
        throw ResourceLimit("family index cap exceeded in membership query");
      Rational lo = nd.lo.eval(static_cast<std::int64_t>(k));
      // Monotone stop: beyond the witness, lo only grows, so once lo(k) > x no
      // later interval can contain x.
      if (k >= nd.mono_from && lo > rx) return false;
      Rational hi = nd.hi.eval(static_cast<std::int64_t>(k));
      if (ceil_rat(lo) <= BigInt(x) && BigInt(x) < ceil_rat(hi)) return true;
    }
  }

  // Fractional part of theta*log2(m) and membership in U, with a guard band
  // around interval endpoints. Powers of two take the exact rational path;
  // otherwise precision escalates double -> 50 -> 100 digits and a residual
  // ambiguity inside the final band (1e-30) is reported, never guessed.
  bool lf_member(std::uint64_t x) const {
    const Node& nd = *node_;
    if ((x & (x - 1)) == 0) {
      // x = 2^e exactly: frac(theta*e) is rational.
      unsigned e = 0;
      for (std::uint64_t v = x; v > 1; v >>= 1) ++e;
      Rational fx = frac_part(nd.theta * e);
      for (const auto& iv : nd.u)
        if (fx >= iv.a && fx < iv.b) return true;
      return false;
    }
    {
      double th = static_cast<double>(numerator(nd.theta)) /
                  static_cast<double>(denominator(nd.theta));
      double v = th * std::log2(static_cast<double>(x));
      double fx = v - std::floor(v);
      if (lf_safe(fx, 1e-12)) return lf_in(fx);
    }
    {
      Float50 th = Float50(numerator(nd.theta)) / Float50(denominator(nd.theta));
      Float50 v = th * log(Float50(x)) / log(Float50(2));
      Float50 fx = v - floor(v);
      if (lf_safe_hi(fx, Float50("1e-30"))) return lf_in_hi(fx);
    }
    {
      Float100 th = Float100(numerator(nd.theta)) / Float100(denominator(nd.theta));
      Float100 v = th * log(Float100(x)) / log(Float100(2));
      Float100 fx = v - floor(v);
      if (lf_safe_hi(fx, Float100("1e-30"))) return lf_in_hi(fx);
    }
    throw AmbiguousBoundary("log-fractional value for m=" + std::to_string(x) +
                            " within 1e-30 of an interval endpoint at maximum precision");
  }

  bool lf_in(double fx) const {
    for (const auto& iv : node_->u) {
      double a = static_cast<double>(numerator(iv.a)) / static_cast<double>(denominator(iv.a));
      double b = static_cast<double>(numerator(iv.b)) / static_cast<double>(denominator(iv.b));
      if (fx >= a && fx < b) return true;
    }
    return false;
  }

  template <typename F>
  bool lf_in_hi(const F& fx) const {
    for (const auto& iv : node_->u) {
      F a = F(numerator(iv.a)) / F(denominator(iv.a));
      F b = F(numerator(iv.b)) / F(denominator(iv.b));
      if (fx >= a && fx < b) return true;
    }
    return false;
  }

  bool lf_safe(double fx, double delta) const {
    for (const auto& iv : node_->u) {
      for (const Rational* ep : {&iv.a, &iv.b}) {
        double e = static_cast<double>(numerator(*ep)) / static_cast<double>(denominator(*ep));
        double d = std::fabs(fx - e);
        d = std::min(d, 1.0 - d);  // circular distance
        if (d < delta) return false;
      }
    }
    return true;
  }

  template <typename F>
  bool lf_safe_hi(const F& fx, const F& delta) const {
    for (const auto& iv : node_->u) {
      for (const Rational* ep : {&iv.a, &iv.b}) {
        F e = F(numerator(*ep)) / F(denominator(*ep));
        F d = abs(fx - e);
        if (F(1) - d < d) d = F(1) - d;
        if (d < delta) return false;
      }
    }
    return true;
  }

  // Enumerate the family's intervals clipped to [1, H], as (lo, hi) pairs.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> family_segments(
      std::uint64_t H, const EvalLimits& lim) const {
    const Node& nd = *node_;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> segs;
    BigInt horizon(H);
    for (std::uint64_t k = 1;; ++k) {
      if (k > lim.family_index_cap)
        throw ResourceLimit("family index cap exceeded while enumerating intervals");
      Rational lo = nd.lo.eval(static_cast<std::int64_t>(k));
      BigInt ilo = ceil_rat(lo);
      if (k >= nd.mono_from && ilo > horizon) break;
      BigInt ihi = ceil_rat(nd.hi.eval(static_cast<std::int64_t>(k)));
      if (ihi > horizon + 1) ihi = horizon + 1;
      if (ilo < 1) ilo = 1;
      if (ilo < ihi)
        segs.emplace_back(to_u64(ilo, "interval lo"), to_u64(ihi, "interval hi"));
    }
    return segs;
  }

  CellSet cells_impl(std::uint64_t H, const EvalLimits& lim) const {
    const Node& nd = *node_;
    CellSet out;
    if (H == 0) return out;
    switch (kind()) {
      case Kind::Congruence:
        out.push_back({1, H + 1, nd.m, nd.r});
        return out;
      case Kind::FiniteSet:
        for (auto e : nd.elems) {
          if (e > H) break;
          out.push_back({e, e + 1, 1, 0});
        }
        return out;
      case Kind::IntervalFamily: {
        for (auto [lo, hi] : family_segments(H, lim))
          detail::cells_union_into(out, {{lo, hi, 1, 0}}, lim);
        return out;
      }
      case Kind::LogFractional:
        throw detail::CellBudget{};
      case Kind::Union: {
        for (const auto& c : nd.children)
          detail::cells_union_into(out, c.cells_impl(H, lim), lim);
        return out;
      }
      case Kind::Intersection: {
        CellSet a = nd.children[0].cells_impl(H, lim);
        CellSet b = nd.children[1].cells_impl(H, lim);
        for (const Cell& ca : a)
          for (const Cell& cb : b)
            if (auto c = detail::cell_intersect(ca, cb, lim)) out.push_back(*c);
        if (out.size() > lim.cell_cap) throw detail::CellBudget{};
        return out;
      }
      case Kind::Difference: {
        out = nd.children[0].cells_impl(H, lim);
        detail::cells_subtract_all(out, nd.children[1].cells_impl(H, lim), lim);
        return out;
      }
      case Kind::Complement: {
        out.push_back({1, H + 1, 1, 0});
        detail::cells_subtract_all(out, nd.children[0].cells_impl(H, lim), lim);
        return out;
      }
      case Kind::Shift: {
        if (nd.t >= 0) {
          std::uint64_t t = static_cast<std::uint64_t>(nd.t);
          if (t >= H) return out;
          CellSet base = nd.children[0].cells_impl(H - t, lim);
          for (Cell c : base) {
            c.lo += t;
            c.hi += t;
            c.res = (c.res + t) % c.mod;
            out.push_back(c);
          }
        } else {
          std::uint64_t s = static_cast<std::uint64_t>(-nd.t);
          CellSet base = nd.children[0].cells_impl(H + s, lim);
          for (Cell c : base) {
            if (c.hi <= s + 1) continue;  // shifted entirely below 1
            c.lo = c.lo > s + 1 ? c.lo - s : 1;
            c.hi -= s;
            c.res = (c.res + c.mod - s % c.mod) % c.mod;
            out.push_back(c);
          }
        }
        return out;
      }
    }
    return out;
  }

  void fill_bitmap(BitVec& out, std::uint64_t N, const EvalLimits& lim) const {
    const Node& nd = *node_;
    switch (kind()) {
      case Kind::Congruence:
        out.fill_range(1, N + 1, nd.m, nd.r);
        return;
      case Kind::FiniteSet:
        for (auto e : nd.elems) {
          if (e > N) break;
          out.insert(e);
        }
        return;
      case Kind::IntervalFamily:
        for (auto [lo, hi] : family_segments(N, lim)) out.fill_range(lo, hi);
        return;
      case Kind::LogFractional:
        for (std::uint64_t x = 1; x <= N; ++x)
          if (lf_member(x)) out.insert(x);
        return;
      case Kind::Union: {
        BitVec tmp(N);
        for (const auto& c : nd.children) {
          tmp.clear();
          c.fill_bitmap(tmp, N, lim);
          out.or_with(tmp);
        }
        return;
      }
      case Kind::Intersection: {
        nd.children[0].fill_bitmap(out, N, lim);
        BitVec tmp(N);
        nd.children[1].fill_bitmap(tmp, N, lim);
        out.and_with(tmp);
        return;
      }
      case Kind::Difference: {
        nd.children[0].fill_bitmap(out, N, lim);
        BitVec tmp(N);
        nd.children[1].fill_bitmap(tmp, N, lim);
        out.andnot_with(tmp);
        return;
      }
      case Kind::Complement:
        nd.children[0].fill_bitmap(out, N, lim);
        out.flip_all();
        return;
      case Kind::Shift: {
        if (nd.t <= 0) {
          // Child members up to N+|t| matter; build the larger map and shift.
          std::uint64_t s = static_cast<std::uint64_t>(-nd.t);
          if (N + s > lim.bitmap_cap)
            throw ResourceLimit("bitmap cap exceeded under negative shift");
          BitVec big = nd.children[0].bitmap(N + s, lim);
          big.shift_members(nd.t);
          for (std::size_t k = 0; k < out.word_count(); ++k)
            out.words()[k] = big.words()[k];
          std::size_t rem = N & 63;
          if (rem) out.words()[out.word_count() - 1] &= (std::uint64_t{1} << rem) - 1;
        } else {
          nd.children[0].fill_bitmap(out, N, lim);
          out.shift_members(nd.t);
        }
        return;
      }
    }
  }

  std::shared_ptr<const Node> node_;
};

}  // namespace sumset
