#include <doctest.h>

#include <algorithm>

#include "slalom/errors.hpp"
#include "slalom/forcing.hpp"
#include "slalom/random.hpp"

using namespace slalom;

namespace {

const ForcingSpace P = forcing_example_space();

// first k with mass(n) >= M for every n >= k, by scanning a generous range
Index scan_threshold(const Rational& M) {
  Index k = 0;
  for (Index n = 0; n < 80; ++n)
    if (P.mass(n) < M) k = n + 1;
  return k;
}

std::vector<Point> pts(std::uint64_t seed, Index k) {
  std::vector<Point> out;
  for (Index i = 0; i < k; ++i) out.push_back(Point::random(seed * 1000 + i));
  return out;
}

bool same_points(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a)
    if (std::none_of(b.begin(), b.end(), [&](const Point& y) { return y.same_as(x); })) return false;
  return true;
}

std::vector<BlockSet> stub(Index length) {
  std::vector<BlockSet> s;
  for (Index n = 0; n < length; ++n) s.push_back(BlockSet::of({0}));
  return s;
}

}  // namespace

TEST_CASE("example space mass and threshold") {
  for (Index n = 0; n < 20; ++n) {
    CHECK(P.I.length(n) == 2 * (n + 1));
    CHECK(P.mass(n) == Rational(pow2(n + 1)));
  }
  CHECK(P.threshold(1) == 0);
  CHECK(P.threshold(2) == 0);
  CHECK(P.threshold(3) == 1);
  CHECK(P.threshold(8) == 2);
  CHECK(P.threshold(9) == 3);
  for (Index M = 1; M < 300; ++M) CHECK(P.threshold(M) == scan_threshold(M));
}

TEST_CASE("cond_validate examples") {
  ForcingCondition empty;
  CHECK(cond_validate(P, empty).is_holds());
  ForcingCondition one{{}, 1, {Point::zeros()}};
  CHECK(cond_validate(P, one).is_holds());
  ForcingCondition heavy{stub(3), 1u << 10, {Point::zeros()}};
  auto v = cond_validate(P, heavy);
  REQUIRE(v.is_fails());
  CHECK(v.witness().front() == 3);
  // long enough s makes the same N valid: 2^{n+1} >= 2^10 from n = 9
  heavy.s = stub(9);
  CHECK(cond_validate(P, heavy).is_holds());
  heavy.s = stub(8);
  CHECK(cond_validate(P, heavy).is_fails());
  ForcingCondition zero_n{{}, 0, {}};
  CHECK(cond_validate(P, zero_n).is_fails());
  ForcingCondition twice{{}, 1, {Point::ones(), Point::ones()}};
  CHECK(cond_validate(P, twice).is_fails());
  ForcingCondition wide{{BlockSet::of({4})}, 1, {}};  // block 0 has 2 bits
  CHECK(cond_validate(P, wide).is_fails());
}

TEST_CASE("cond_leq is a preorder") {
  Rng rng(17);
  for (int t = 0; t < 40; ++t) {
    ForcingCondition c{{}, rng.between(1, 3), pts(t + 1, rng.between(0, 2))};
    c = extend_condition(P, c, P.threshold(Rational(big(c.N * c.F.size()))) + rng.between(0, 2));
    REQUIRE(cond_validate(P, c).is_holds());
    CHECK(cond_leq(P, c, c));
    ForcingCondition d = dense_add_point(P, c, Point::random(7000 + t));
    ForcingCondition e = raise_level(P, d, d.N + rng.between(0, 2));
    e = extend_condition(P, e, e.length() + rng.between(0, 3));
    CHECK(cond_validate(P, d).is_holds());
    CHECK(cond_validate(P, e).is_holds());
    CHECK(cond_leq(P, d, c));
    CHECK(cond_leq(P, e, d));
    CHECK(cond_leq(P, e, c));
    if (!c.F.empty()) {
      ForcingCondition dropped = e;
      dropped.F.erase(dropped.F.begin());
      auto l = cond_leq(P, dropped, c);
      CHECK_FALSE(l);
      CHECK(l.reason.find("F not inside H") != std::string::npos);
    }
    // a weaker condition is not below a strictly stronger one with more points
    CHECK_FALSE(cond_leq(P, c, d));
  }
}

TEST_CASE("cond_leq rejects the failure modes") {
  ForcingCondition s{{BlockSet::of({1})}, 2, {}};
  ForcingCondition t = s;
  t.N = 1;
  CHECK_FALSE(cond_leq(P, t, s));
  t = s;
  t.s[0] = BlockSet::of({2});
  CHECK_FALSE(cond_leq(P, t, s));
  t = s;
  t.s.clear();
  CHECK_FALSE(cond_leq(P, t, s));
  // a new block must hold the weaker condition's points
  ForcingCondition w{{}, 1, {Point::ones()}};
  ForcingCondition u{{BlockSet::of({0})}, 1, {Point::ones()}};
  CHECK_FALSE(cond_leq(P, u, w));
  u.s[0] = BlockSet::of({3});
  CHECK(cond_leq(P, u, w));
  // and stay within N|t(n)| <= mass(n): block 0 has mass 2
  w.N = 2;
  u.N = 2;
  u.s[0] = BlockSet::of({0, 3});
  CHECK_FALSE(cond_leq(P, u, w));
}

TEST_CASE("dense_add_point") {
  ForcingCondition empty;
  Point x = Point::random(3);
  auto d = dense_add_point(P, empty, x);
  REQUIRE(d.F.size() == 1);
  CHECK(d.F[0].same_as(x));
  CHECK(d.length() == 0);
  CHECK_THROWS_AS(dense_add_point(P, d, x), PreconditionError);
  // three more points at N = 3 need 2^{n+1} >= 12, so s reaches length 3
  d.N = 3;
  std::vector<Index> joined{0};
  for (std::uint64_t i = 4; i < 7; ++i) {
    d = dense_add_point(P, d, Point::random(i));
    joined.push_back(d.length());
  }
  CHECK(d.F.size() == 4);
  CHECK(joined == std::vector<Index>{0, 2, 3, 3});
  CHECK(cond_validate(P, d).is_holds());
  // each point sits in every block laid down after it joined
  d = extend_condition(P, d, 6);
  for (Index j = 0; j < 4; ++j)
    for (Index n = joined[j]; n < d.length(); ++n) CHECK(d.s[n].contains(restrict(d.F[j], P.I, n).code));
  // the first point joined at 0 but s was empty then, so block 0 only came with the second
  CHECK(d.s[0].size() == 1);
}

TEST_CASE("d_limit under a principal oracle") {
  const Index W = 10;
  LinkedCellKey cell{stub(P.threshold(6)), 2, 3};
  std::vector<ForcingCondition> fam;
  for (Index i = 0; i < W; ++i) fam.push_back({cell.s, 2, pts(i + 1, i % 4)});
  auto o = UltrafilterOracle::principal(5, W);
  auto lim = d_limit(P, cell, fam, *o);
  CHECK(same_points(lim.F, fam[5].F));
  CHECK(lim.N == 2);
  CHECK(cell.contains(lim));
  CHECK(all_pass(o->check_log()));
  CHECK_THROWS_AS(UltrafilterOracle::principal(W, W), PreconditionError);
  fam[3].N = 1;
  CHECK_THROWS_AS(d_limit(P, cell, fam, *o), PreconditionError);
}

TEST_CASE("d_limit of a constant family is the constant") {
  const Index W = 9;
  LinkedCellKey cell{stub(2), 1, 2};
  ForcingCondition p{cell.s, 1, pts(42, 2)};
  std::vector<ForcingCondition> fam(W, p);
  for (Index start : {0, 1, 3}) {
    auto o = UltrafilterOracle::pattern(start, 3, 0, W);
    auto lim = d_limit(P, cell, fam, *o);
    CHECK(same_points(lim.F, p.F));
    CHECK(all_pass(o->check_log()));
  }
}

TEST_CASE("d_limit under a pattern oracle") {
  const Index W = 12;
  LinkedCellKey cell{stub(2), 1, 2};
  ForcingCondition even{cell.s, 1, pts(1, 2)}, odd{cell.s, 1, pts(2, 1)};
  std::vector<ForcingCondition> fam;
  for (Index i = 0; i < W; ++i) fam.push_back(i % 2 == 0 ? even : odd);
  auto evens = UltrafilterOracle::pattern(0, 2, 0, W);
  CHECK(same_points(d_limit(P, cell, fam, *evens).F, even.F));
  auto odds = UltrafilterOracle::pattern(0, 2, 1, W);
  CHECK(same_points(d_limit(P, cell, fam, *odds).F, odd.F));
  // representatives split across sizes: no unique large level
  auto thirds = UltrafilterOracle::pattern(0, 3, 0, W);
  CHECK_THROWS_AS(d_limit(P, cell, fam, *thirds), OracleInconsistency);

  // the representatives all read 0, so the limit does too
  std::vector<ForcingCondition> mixed;
  for (Index i = 0; i < W; ++i)
    mixed.push_back({cell.s, 1, {i % 2 == 0 ? Point::constant(std::vector<bool>(i, false), false)
                                            : Point::random(900 + i)}});
  auto lim = d_limit(P, cell, mixed, *evens);
  REQUIRE(lim.F.size() == 1);
  for (Index p = 0; p < 64; ++p) CHECK_FALSE(lim.F[0].bit(p));
  CHECK(all_pass(evens->check_log()));
}

TEST_CASE("oracle largeness") {
  auto o = UltrafilterOracle::pattern(2, 3, 2, 20);
  CHECK(o->representatives() == std::set<Index>{2, 5, 8, 11, 14, 17});
  CHECK(o->large({2, 5, 8, 11, 14, 17, 0}));
  CHECK_FALSE(o->large({2, 5, 8}));
  CHECK(o->decide({{0, 1}, {2, 5, 8, 11, 14, 17}, {3}}) == 1);
  CHECK_THROWS_AS(o->decide({{2, 5}, {8, 11, 14, 17}}), OracleInconsistency);
  CHECK(all_pass(o->check_log()));
  auto p = UltrafilterOracle::principal(4, 8);
  CHECK(p->large({4}));
  CHECK_FALSE(p->large({0, 1, 2, 3, 5, 6, 7}));
  CHECK(all_pass(p->check_log()));
}

TEST_CASE("amalgamate two limits") {
  const Index W = 8;
  const std::uint64_t N = 1;
  auto o = UltrafilterOracle::pattern(0, 2, 0, W);
  const auto s0 = stub(P.threshold(Rational(2 * 4)));
  std::vector<LimitFamily> limits;
  std::vector<Point> all;
  for (Index k = 0; k < 2; ++k) {
    const auto shared = pts(10 + k, 2);
    std::vector<ForcingCondition> fam;
    for (Index n = 0; n < W; ++n) fam.push_back({s0, N, n % 2 == 0 ? shared : pts(100 + 10 * k + n, 1)});
    auto q = d_limit(P, {s0, N, 2}, fam, *o);
    CHECK(same_points(q.F, shared));
    for (const auto& x : q.F) all.push_back(x);
    limits.push_back({q, fam});
  }
  ForcingCondition q = extend_condition(P, {s0, N, all}, s0.size() + 2);
  auto res = amalgamate(P, q, limits, *o, o->representatives());
  CHECK(all_pass(res.facts));
  CHECK(res.n == 0);
  CHECK(res.q.F.size() == 4);  // the shared points are already in q
  CHECK(cond_leq(P, res.q, q));
  for (const auto& L : limits) CHECK(cond_leq(P, res.q, L.family[res.n]));
  // every b_k contains the even indices
  for (const auto& bk : res.b)
    for (Index n = 0; n < W; n += 2) CHECK(bk.count(n));
  // an index set missing the b_k runs out
  CHECK_THROWS_AS(amalgamate(P, q, limits, *o, {}), WindowExhausted);
  // q must be below each limit
  ForcingCondition weak{s0, N, {}};
  CHECK_THROWS_AS(amalgamate(P, weak, limits, *o, o->representatives()), PreconditionError);
  CHECK(all_pass(o->check_log()));
}

TEST_CASE("session replay") {
  ForcingSession s(P);
  s.add_point(Point::random(1));
  s.extend(3);
  s.add_point(Point::random(2));
  s.raise(3);
  s.add_point(Point::periodic({}, {true, false}));
  s.extend(s.current().length() + 4);
  CHECK(s.joins().size() == 3);
  CHECK(s.current().N == 3);
  CHECK(all_pass(s.replay_facts()));
  auto again = ForcingSession::replay(P, s.transcript());
  CHECK(again.current().to_json() == s.current().to_json());
  for (std::size_t i = 1; i < s.history().size(); ++i) CHECK(cond_leq(P, s.history()[i], s.history()[i - 1]));
  // the generic prefix holds each point from its join on
  for (const auto& [x, join] : s.joins())
    for (Index n = join; n < s.current().length(); ++n)
      CHECK(s.current().s[n].contains(restrict(x, P.I, n).code));
  json bad = json::array({{{"op", "teleport"}}});
  CHECK_THROWS_AS(ForcingSession::replay(P, bad), PreconditionError);
}

TEST_CASE("condition json roundtrip") {
  ForcingCondition c{{BlockSet::of({1, 2})}, 4, {Point::ones(), Point::random(8)}};
  auto back = ForcingCondition::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.has_point(Point::random(8)));
  CHECK_FALSE(back.has_point(Point::zeros()));
}
