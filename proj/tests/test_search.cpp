#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "sumset/constructions.hpp"
#include "sumset/dsl.hpp"
#include "sumset/search.hpp"
#include "support/random_expr.hpp"

using namespace sumset;
using sumset::testsupport::BruteForceResult;
using sumset::testsupport::ExprGen;

TEST_CASE("exact search on the naturals fills the half-interval", "[search]") {
  SearchConfig cfg;
  cfg.horizon = 20;
  SearchResult r = max_witness(parse("cong(1,0)"), cfg);
  CHECK(r.stats.complete);
  CHECK(r.stats.vertex_count == 10);
  CHECK(r.witness.b == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(r.witness.verified);
  CHECK(verify_witness(parse("cong(1,0)"), r.witness));
}

TEST_CASE("ties break toward the lexicographically smallest witness", "[search]") {
  // Two maximum witnesses in the evens at N=20: the odds and the evens up to
  // 10. The reported one must be the lex-min.
  SearchConfig cfg;
  cfg.horizon = 20;
  SearchResult r = max_witness(SetExpr::congruence(2, 0), cfg);
  CHECK(r.stats.complete);
  CHECK(r.witness.b == std::vector<std::uint64_t>{1, 3, 5, 7, 9});
  CHECK(r.witness.verified);
}

TEST_CASE("exact search equals the subset oracle", "[search][property]") {
  ExprGen gen(424242);
  int compared = 0;
  for (int it = 0; it < 200 && compared < 60; ++it) {
    SetExpr e = gen.gen();
    std::uint64_t N = gen.uniform(20, 60);
    std::uint64_t t = gen.uniform(0, 1);
    BruteForceResult oracle = testsupport::brute_force_max_witness(e, t, N);
    if (oracle.skipped) continue;
    ++compared;
    SearchConfig cfg;
    cfg.t = t;
    cfg.horizon = N;
    SearchResult r = max_witness(e, cfg);
    CAPTURE(render(e), N, t);
    REQUIRE(r.stats.complete);
    CHECK(r.stats.vertex_count == oracle.vertex_count);
    CHECK(r.witness.b == oracle.b);
    if (!r.witness.b.empty()) CHECK(r.witness.verified);
  }
  CHECK(compared >= 30);
}

TEST_CASE("greedy result never beats the exact maximum", "[search][property]") {
  ExprGen gen(777);
  for (int it = 0; it < 40; ++it) {
    SetExpr e = gen.gen();
    std::uint64_t N = gen.uniform(30, 80);
    std::uint64_t t = gen.uniform(0, 1);
    SearchConfig cfg;
    cfg.t = t;
    cfg.horizon = N;
    cfg.mode = SearchMode::Greedy;
    SearchResult g = max_witness(e, cfg);
    cfg.mode = SearchMode::Exact;
    SearchResult x = max_witness(e, cfg);
    CAPTURE(render(e), N, t);
    REQUIRE(x.stats.complete);
    CHECK(g.witness.size() <= x.witness.size());
    if (!g.witness.b.empty()) CHECK(g.witness.verified);
  }
}

TEST_CASE("identical configurations produce identical witnesses", "[search]") {
  ExprGen gen(31337);
  for (int it = 0; it < 10; ++it) {
    SetExpr e = gen.gen();
    SearchConfig cfg;
    cfg.horizon = gen.uniform(50, 150);
    cfg.t = gen.uniform(0, 1);
    SearchResult a = max_witness(e, cfg);
    SearchResult b = max_witness(e, cfg);
    CAPTURE(render(e));
    CHECK(a.witness.b == b.witness.b);
    CHECK(a.stats.nodes == b.stats.nodes);
  }
}

TEST_CASE("witness verification accepts and rejects", "[search]") {
  SetExpr A = make_block_family_low();
  SumsetWitness w;
  w.t = 0;
  w.horizon = 1024;
  w.b = {8};
  CHECK(verify_witness(A, w));  // 16 lands inside the second block
  w.b = {8, 12};
  CHECK_FALSE(verify_witness(A, w));  // 24 sits just past the block top
  w.b = {600};
  CHECK_THROWS_AS(verify_witness(A, w), HorizonExceeded);
  w.b = {};
  CHECK_THROWS_AS(verify_witness(A, w), Error);
  w.b = {5, 5};
  CHECK_THROWS_AS(verify_witness(A, w), Error);

  SumsetWitness nat{{1, 2, 3}, 0, 10, false};
  CHECK(verify_witness(parse("cong(1,0)"), nat));
  SumsetWitness ev{{1, 2}, 0, 10, false};
  CHECK_FALSE(verify_witness(SetExpr::congruence(2, 0), ev));
}

TEST_CASE("witnesses are downward closed", "[search][property]") {
  ExprGen gen(909090);
  int exercised = 0;
  for (int it = 0; it < 60 && exercised < 10; ++it) {
    SetExpr e = gen.gen();
    SearchConfig cfg;
    cfg.horizon = gen.uniform(40, 100);
    cfg.mode = SearchMode::Greedy;
    SearchResult r = max_witness(e, cfg);
    if (r.witness.size() < 3) continue;
    ++exercised;
    REQUIRE(r.witness.verified);
    for (int rep = 0; rep < 3; ++rep) {
      SumsetWitness sub = r.witness;
      sub.b.erase(sub.b.begin() +
                  static_cast<std::ptrdiff_t>(gen.uniform(0, sub.b.size() - 1)));
      CAPTURE(render(e));
      CHECK(verify_witness(e, sub));
    }
  }
  CHECK(exercised >= 5);
}

TEST_CASE("residue split partitions a witness by congruence class", "[search]") {
  SumsetWitness w{{1, 3, 5, 8}, 0, 100, true};
  auto parts = residue_split(w, 2);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].b == std::vector<std::uint64_t>{8});
  CHECK(parts[1].b == std::vector<std::uint64_t>{1, 3, 5});
  CHECK(parts[1].t == 0);
  CHECK(parts[1].horizon == 100);
  CHECK(parts[1].verified);

  SumsetWitness v{{4, 8, 12}, 1, 100, false};
  auto four = residue_split(v, 4);
  REQUIRE(four.size() == 4);
  CHECK(four[0].b == std::vector<std::uint64_t>{4, 8, 12});
  CHECK(four[1].b.empty());
  CHECK(four[2].b.empty());
  CHECK(four[3].b.empty());

  auto same = residue_split(w, 1);
  REQUIRE(same.size() == 1);
  CHECK(same[0].b == w.b);
  CHECK_THROWS_AS(residue_split(w, 0), Error);
}

TEST_CASE("parity routes pairwise sums into fixed residues", "[search][property]") {
  ExprGen gen(1234);
  for (int it = 0; it < 20; ++it) {
    std::uint64_t j = gen.uniform(0, 3);
    std::vector<std::uint64_t> B;
    std::uint64_t cur = (j == 0) ? 4 : j;
    for (int k = 0; k < 8; ++k) {
      B.push_back(cur);
      cur += 4 * gen.uniform(1, 5);
    }
    SumsetWitness w{B, 0, 2 * B.back(), false};
    CAPTURE(j, B.front(), B.back());
    CHECK(verify_witness(SetExpr::congruence(2, 0), w));
    if (j % 2 == 0)
      CHECK(verify_witness(SetExpr::congruence(4, 0), w));
    else
      CHECK(verify_witness(SetExpr::congruence(4, 2), w));
  }
}

TEST_CASE("dyadic reduction matches its defining formula", "[search]") {
  std::uint64_t N = 400;
  BitVec r1 = reduce_2n(SetExpr::congruence(4, 0), 1, 0).bitmap(N);
  CHECK(r1 == parse("union(cong(4,0), shift(cong(4,0),2))").bitmap(N));
  CHECK(r1 == parse("diff(cong(2,0), finite{2})").bitmap(N));

  BitVec r2 = reduce_2n(SetExpr::congruence(8, 0), 2, 0).bitmap(N);
  CHECK(r2 == parse("diff(cong(4,0), finite{4})").bitmap(N));
}

TEST_CASE("dyadic reduction of the block family against a hand predicate", "[search]") {
  SetExpr A = make_block_family_low();
  SetExpr R = reduce_2n(A, 1, 0);
  std::uint64_t N = 300;
  BitVec bmA = A.bitmap(N);
  BitVec bmR = R.bitmap(N);
  for (std::uint64_t m = 1; m <= N; ++m) {
    bool core = m % 4 == 0 && bmA.contains(m);
    bool lifted = m > 2 && (m - 2) % 4 == 0 && bmA.contains(m - 2);
    CAPTURE(m);
    CHECK(bmR.contains(m) == (core || lifted));
    if (bmR.contains(m)) CHECK(m % 2 == 0);
  }
}

TEST_CASE("dyadic reduction rejects out-of-range parameters", "[search]") {
  SetExpr A = SetExpr::congruence(2, 0);
  CHECK_THROWS_AS(reduce_2n(A, 0, 0), Error);
  CHECK_THROWS_AS(reduce_2n(A, 1, 1), Error);
  CHECK_THROWS_AS(reduce_2n(A, 3, 4), Error);
  CHECK_THROWS_AS(reduce_2n(A, 62, 0), Error);
  CHECK_NOTHROW(reduce_2n(A, 3, 3));
}

TEST_CASE("budget exhaustion returns the best-so-far, flagged incomplete", "[search]") {
  SearchConfig cfg;
  cfg.horizon = 4096;
  cfg.node_budget = 1;
  SearchResult r = max_witness(make_block_family_low(), cfg);
  CHECK_FALSE(r.stats.complete);
  CHECK(r.witness.size() >= 1);
  CHECK(r.witness.verified);
}

TEST_CASE("exact vertex cap raises a resource limit", "[search]") {
  SearchConfig cfg;
  cfg.horizon = 100;
  cfg.exact_vertex_cap = 4;
  CHECK_THROWS_AS(max_witness(parse("cong(1,0)"), cfg), ResourceLimit);
}

TEST_CASE("target size stops the search early", "[search]") {
  SearchConfig cfg;
  cfg.horizon = 100;
  cfg.target_size = 3;
  SearchResult x = max_witness(parse("cong(1,0)"), cfg);
  CHECK(x.stats.complete);
  CHECK(x.witness.size() >= 3);
  CHECK(x.witness.verified);

  cfg.mode = SearchMode::Greedy;
  SearchResult g = max_witness(parse("cong(1,0)"), cfg);
  CHECK(g.witness.size() == 3);
  CHECK(g.witness.verified);
}

TEST_CASE("cross-sums mode drops the diagonal requirement", "[search]") {
  SetExpr odds = SetExpr::congruence(2, 1);
  SearchConfig cfg;
  cfg.horizon = 20;
  SearchResult strict = max_witness(odds, cfg);
  CHECK(strict.stats.vertex_count == 0);  // 2b is never odd
  CHECK(strict.witness.b.empty());

  cfg.cross_sums_only = true;
  SearchResult cross = max_witness(odds, cfg);
  CHECK(cross.stats.vertex_count == 10);
  CHECK(cross.witness.b == std::vector<std::uint64_t>{1, 2});
  // Not a witness in the B+B+t sense: the diagonal sum 1+1 is even.
  CHECK_FALSE(cross.witness.verified);
}

TEST_CASE("probe rows carry density ladders and per-shift witness sizes", "[search]") {
  std::vector<std::pair<std::string, SetExpr>> instances{
      {"naturals", parse("cong(1,0)")}, {"evens", SetExpr::congruence(2, 0)}};
  auto rows = probe_threshold(instances, {0, 1}, 64, 40, SearchMode::Greedy);
  REQUIRE(rows.size() == 2);

  CHECK(rows[0].label == "naturals");
  CHECK(rows[0].upper_est == Rational(1));
  CHECK(rows[0].lower_est == Rational(1));
  REQUIRE(rows[0].cells.size() == 2);
  CHECK(rows[0].cells[0].witness_size == 32);  // floor((N - t) / 2) at t = 0
  CHECK(rows[0].cells[1].witness_size == 31);  // and at t = 1
  CHECK_FALSE(rows[0].cells[0].target_reached);
  CHECK(rows[0].cells[0].complete);

  CHECK(rows[1].label == "evens");
  CHECK(rows[1].upper_est == Rational(1, 2));
  CHECK(rows[1].cells[0].witness_size == 16);  // odds up to 31
  CHECK(rows[1].cells[1].witness_size == 0);   // 2b+1 is never even

  CHECK_THROWS_AS(probe_threshold(instances, {0}, 7, 1, SearchMode::Greedy), Error);
}

TEST_CASE("search horizon must be positive", "[search]") {
  SearchConfig cfg;
  CHECK_THROWS_AS(max_witness(parse("cong(1,0)"), cfg), Error);
}
