#include <catch2/catch_amalgamated.hpp>

#include "sumset/constructions.hpp"
#include "sumset/density.hpp"
#include "sumset/dsl.hpp"
#include "sumset/schedule.hpp"
#include "support/random_expr.hpp"

using namespace sumset;

TEST_CASE("schedule constructors and parser", "[density][schedule]") {
  CHECK(schedule_linear(5).windows == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
  CHECK(schedule_powers4(3).windows == std::vector<std::uint64_t>{4, 16, 64});
  CHECK(schedule_prop41(5).windows == std::vector<std::uint64_t>{3, 23, 106, 447, 1843});
  CHECK(parse_schedule("linear(4)").windows.size() == 4);
  CHECK(parse_schedule("3,10,20").windows == std::vector<std::uint64_t>{3, 10, 20});
  CHECK_THROWS_AS(parse_schedule("fib(5)"), UnknownSchedule);
  CHECK_THROWS_AS(parse_schedule("10,5"), UnknownSchedule);
  CHECK_THROWS_AS(parse_schedule(""), UnknownSchedule);
  CHECK_THROWS_AS(schedule_prop41(31), UnknownSchedule);
  CHECK_THROWS_AS(schedule_linear(0), UnknownSchedule);
}

TEST_CASE("block family counts on the block-top windows", "[density]") {
  // Pinned by closed-form summation of ceil((2-1/n)4^n) - 4^n over full blocks
  // plus the partial top block; first computed by hand for k <= 5.
  DensityProfile p = profile(make_block_family_low(), schedule_prop41(5));
  CHECK(p.counts == std::vector<std::uint64_t>{0, 8, 51, 243, 1063});
  CHECK(p.ratios[1] == Rational(8, 23));
  CHECK(p.ratios[4] == Rational(1063, 1843));
}

TEST_CASE("block family ratios increase toward 2/3 along the block tops", "[density]") {
  DensityProfile p = profile(make_block_family_low(), schedule_prop41(10));
  for (std::size_t k = 2; k < p.ratios.size(); ++k) {
    CAPTURE(k);
    CHECK(p.ratios[k] > p.ratios[k - 1]);
    CHECK(p.ratios[k] < Rational(2, 3));
  }
}

TEST_CASE("profile invariants on random expressions", "[density][property]") {
  testsupport::ExprGen gen(99);
  Schedule sched = schedule_explicit({10, 50, 200, 1000, 5000});
  for (int it = 0; it < 25; ++it) {
    SetExpr e = gen.gen();
    DensityProfile p = profile(e, sched);
    CAPTURE(render(e));
    for (std::size_t j = 0; j < sched.windows.size(); ++j) {
      CHECK(p.counts[j] <= sched.windows[j]);
      CHECK(p.ratios[j] >= 0);
      CHECK(p.ratios[j] <= 1);
      if (j > 0) {
        CHECK(p.counts[j] >= p.counts[j - 1]);
        CHECK(p.counts[j] - p.counts[j - 1] <= sched.windows[j] - sched.windows[j - 1]);
      }
    }
  }
}

TEST_CASE("density_along fills analytic values for trivial kinds", "[density]") {
  DensityEstimate c = density_along(SetExpr::congruence(7, 3), schedule_linear(100));
  REQUIRE(c.analytic.has_value());
  CHECK(*c.analytic == Rational(1, 7));
  DensityEstimate f = density_along(SetExpr::finite({2, 4}), schedule_linear(50));
  REQUIRE(f.analytic.has_value());
  CHECK(*f.analytic == Rational(0));
  DensityEstimate u = density_along(parse("union(cong(2,0), cong(2,1))"), schedule_linear(10));
  CHECK_FALSE(u.analytic.has_value());
}

TEST_CASE("tail extrema are the frozen prop41 ratios", "[density]") {
  // K = 8 windows, auto tail_start = ceil(3K/4) = 6; ratios increase along the
  // tail, so the extrema are windows 6 and 8.
  DensityEstimate e = density_along(make_block_family_low(), schedule_prop41(8));
  CHECK(e.tail_start == 6);
  CHECK(e.lower_est == Rational(4477, 7509));
  CHECK(e.upper_est == Rational(75865, 122879));
  CHECK(e.lower_est <= e.upper_est);
}

TEST_CASE("upper estimate is nonincreasing as the tail start grows", "[density][property]") {
  SetExpr e = make_block_family_low();
  Schedule sched = schedule_prop41(8);
  Rational prev_hi;
  for (std::size_t ts = 1; ts <= 8; ++ts) {
    DensityEstimate d = density_along(e, sched, std::nullopt, ts);
    if (ts > 1) {
      CHECK(d.upper_est <= prev_hi);
    }
    CHECK(d.lower_est <= d.upper_est);
    prev_hi = d.upper_est;
  }
}

TEST_CASE("estimates converge onto an existing natural density", "[density]") {
  // The half-density construction: estimate spread shrinks as the schedule
  // grows, and both ends approach 1/2.
  SetExpr a = get_builtin("P42_A").expr;
  DensityEstimate short_s = density_along(a, schedule_powers4(6));
  DensityEstimate long_s = density_along(a, schedule_powers4(10));
  auto dev = [](const Rational& x) {
    Rational d = x - Rational(1, 2);
    return d < 0 ? -d : d;
  };
  CHECK(long_s.upper_est - long_s.lower_est <= short_s.upper_est - short_s.lower_est);
  CHECK(dev(long_s.upper_est) <= dev(short_s.upper_est));
  CHECK(long_s.upper_est - long_s.lower_est <= Rational(2, 10));
}

TEST_CASE("lower <= upper across random expressions", "[density][property]") {
  testsupport::ExprGen gen(5150);
  for (int it = 0; it < 25; ++it) {
    SetExpr e = gen.gen();
    DensityEstimate d = density_along(e, schedule_linear(64));
    CAPTURE(render(e));
    CHECK(d.lower_est <= d.upper_est);
  }
}

TEST_CASE("empty schedule is rejected", "[density]") {
  Schedule empty{"", {}};
  CHECK_THROWS_AS(density_along(SetExpr::congruence(2, 0), empty), UnknownSchedule);
}

TEST_CASE("density calculus: exact additivity for disjoint operands", "[density]") {
  CalculusReport r =
      check_density_calculus(SetExpr::congruence(2, 0), SetExpr::congruence(2, 1), 5000);
  CHECK(r.additive_ok);
  CHECK(r.closed_vs_enum_ok);
  CHECK_FALSE(r.shift_t.has_value());
}

TEST_CASE("density calculus: overlap is an error naming the first element", "[density]") {
  try {
    check_density_calculus(SetExpr::congruence(2, 0), SetExpr::congruence(3, 0), 100);
    FAIL("expected DisjointnessViolated");
  } catch (const DisjointnessViolated& e) {
    CHECK(e.first_common == 6);
  }
}

TEST_CASE("density calculus: shift defect bounded by the shift", "[density]") {
  // e1 lives in one residue class mod 4, so e1 and e1+2 are disjoint.
  SetExpr e1 = SetExpr::congruence(4, 1);
  SetExpr e2 = SetExpr::shift(e1, 2);
  CalculusReport r = check_density_calculus(e1, e2, 10000);
  CHECK(r.additive_ok);
  REQUIRE(r.shift_t.has_value());
  CHECK(*r.shift_t == 2);
  REQUIRE(r.shift_bound_ok.has_value());
  CHECK(*r.shift_bound_ok);
  CHECK(r.max_shift_defect <= 2);
}

TEST_CASE("banach window extrema on a periodic set", "[density]") {
  WindowExtrema w = banach_window(SetExpr::congruence(2, 0), 10, 200);
  CHECK(w.max_count == 5);
  CHECK(w.min_count == 5);
  CHECK(w.upper() == Rational(1, 2));
  CHECK(w.lower() == Rational(1, 2));
  // A clumped set has spread extrema.
  WindowExtrema c = banach_window(parse("intervals(n>=1; 4^n, (2-1/n)*4^n)"), 16, 200);
  CHECK(c.max_count == 16);  // inside block 2 = [16,24) joined with [64,...
  CHECK(c.min_count == 0);
  CHECK_THROWS_AS(banach_window(SetExpr::congruence(2, 0), 0, 10), Error);
  CHECK_THROWS_AS(banach_window(SetExpr::congruence(2, 0), 20, 10), Error);
}

TEST_CASE("tail sums: exact values, monotone decay, vanishing", "[density]") {
  CHECK(tail_sum(1) == Rational(1));
  CHECK(tail_sum(2) == Rational(3, 4));
  CHECK(tail_sum(3) == Rational(25, 48));
  TailSumReport r = tail_sum_check(30);
  CHECK(r.monotone_from_2);
  CHECK(r.value < Rational(1, 20));
  CHECK_THROWS_AS(tail_sum(0), Error);
}
