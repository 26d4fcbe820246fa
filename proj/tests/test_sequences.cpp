#include <doctest.h>

#include "slalom/errors.hpp"
#include "slalom/random.hpp"
#include "slalom/sequences.hpp"

using namespace slalom;

namespace {

Rational half_pow(Index n) { return Rational(1, 1) / Rational(pow2(n)); }

// sum_{j in [a,b)} of an explicit term function, summed by hand
Rational plain_sum(const std::function<Rational(Index)>& f, Index a, Index b) {
  Rational s = 0;
  for (Index j = a; j < b; ++j) s += f(j);
  return s;
}

}  // namespace

TEST_CASE("rational helpers are exact") {
  CHECK(pow2q(-3) == Rational(1, 8));
  CHECK(pow2q(4) == 16);
  CHECK(ratio(6, 4) == Rational(3, 2));
  CHECK(ratio(6, 4).get_den() == 2);
  CHECK(to_string(ratio(6, 4)) == "3/2");
  CHECK(to_string(Rational(5)) == "5/1");
  CHECK(parse_rational("10/4") == Rational(5, 2));
  CHECK(parse_rational("7") == 7);
  CHECK(floor_of(ratio(7, 2)) == 3);
  CHECK(ceil_of(ratio(7, 2)) == 4);
  CHECK(floor_of(Rational(-7, 2)) == -4);
  CHECK(bit_length(BigInt(0)) == 0);
  CHECK(bit_length(BigInt(8)) == 4);
  CHECK(floor_log2(BigInt(8)) == 3);
  CHECK(ceil_log2(BigInt(9)) == 4);
  CHECK(ceil_log2(BigInt(1)) == 0);
}

TEST_CASE("partial sums") {
  auto g = TailBoundedSeq::geometric(1, ratio(1, 2));
  CHECK(partial_sum(g, 5, 5) == 0);
  CHECK(partial_sum(g, 0, 4) == Rational(15, 8));
  CHECK(partial_sum(g, 2, 6) <= g.tail_bound(2));
  CHECK(partial_sum(g, 2, 6) == plain_sum(half_pow, 2, 6));
  CHECK_THROWS(partial_sum(g, 6, 2));
}

TEST_CASE("geometric family") {
  auto g = TailBoundedSeq::geometric(1, ratio(1, 2));
  for (Index k = 0; k < 30; ++k) {
    CHECK(g.term(k) == half_pow(k));
    CHECK(g.tail_bound(k) == pow2q(1 - std::int64_t(k)));
  }
  auto k = g.shrink(ratio(1, 1000));
  REQUIRE(k);
  CHECK(g.tail_bound(*k) < ratio(1, 1000));
  CHECK(g.first_below(ratio(1, 8)) == 5);
  CHECK(g.decreasing());
}

TEST_CASE("tail bounds dominate exact partial sums on every family") {
  std::vector<TailBoundedSeq> fams = {
      TailBoundedSeq::geometric(ratio(3, 2), ratio(2, 3)),
      TailBoundedSeq::p_series(1, 2),
      TailBoundedSeq::p_series(ratio(5, 3), 4),
      TailBoundedSeq::linear_geometric(1, ratio(1, 2)).with_prefix({ratio(1, 4)}),
      TailBoundedSeq::sum({TailBoundedSeq::p_series(1, 2), TailBoundedSeq::linear_geometric(1, ratio(1, 2))})
          .with_prefix({1}),
      TailBoundedSeq::geometric(1, ratio(1, 3)).with_prefix({5, 7, ratio(1, 9)}),
  };
  for (const auto& e : fams) {
    CAPTURE(e.to_json().dump());
    for (Index k = 0; k < 25; ++k) {
      CHECK(e.term(k) > 0);
      CHECK(e.tail_bound(k + 1) <= e.tail_bound(k));
      for (Index m = k; m < 40; m += 7) CHECK(partial_sum(e, k, m + 1) <= e.tail_bound(k));
    }
    for (Index d = 1; d < 200; d *= 3) {
      Rational r = Rational(1, 1) / Rational(big(d));
      auto k = e.shrink(r);
      REQUIRE(k);
      CHECK(e.tail_bound(*k) < r);
    }
    CHECK(all_pass(e.validate(40)));
  }
}

TEST_CASE("p-series closed form") {
  auto e = TailBoundedSeq::p_series(2, 3);
  for (Index n = 0; n < 10; ++n) CHECK(e.term(n) == Rational(2) / Rational(big((n + 1) * (n + 1) * (n + 1))));
  CHECK_THROWS_AS(TailBoundedSeq::p_series(1, 1), PreconditionError);
}

TEST_CASE("zero sequence is nonnegative only") {
  auto z = TailBoundedSeq::zero();
  CHECK(z.term(3) == 0);
  CHECK(z.tail_bound(0) == 0);
  CHECK(z.sign() == TailBoundedSeq::Sign::NonNegative);
}

TEST_CASE("json roundtrip keeps terms and prefix") {
  auto e = TailBoundedSeq::geometric(ratio(3, 4), ratio(1, 2)).with_prefix({ratio(2, 3), ratio(1, 7)});
  json j = e.to_json();
  CHECK(j["family"] == "geometric");
  CHECK(j["prefix"][0] == "2/3");
  auto back = TailBoundedSeq::from_json(j);
  for (Index n = 0; n < 12; ++n) {
    CHECK(back.term(n) == e.term(n));
    CHECK(back.tail_bound(n) == e.tail_bound(n));
  }
}

TEST_CASE("build_delta on 2^-n matches brute-force minimization") {
  auto g = TailBoundedSeq::geometric(1, ratio(1, 2));
  DeltaWitness d = build_delta(g);
  CHECK(d.s_bound() == 2);
  // brute force: n_i = least k > n_{i-1} with 2^{1-k} < 2/4^i
  std::vector<Index> expect = {0};
  for (Index i = 1; i < 12; ++i) {
    Index k = expect.back() + 1;
    while (!(pow2q(1 - std::int64_t(k)) < Rational(2) / Rational(pow2(2 * i)))) ++k;
    expect.push_back(k);
  }
  CHECK(d.breakpoints(12) == expect);
  for (Index i = 1; i < 12; ++i) CHECK(expect[i] == 2 * i + 1);
  std::vector<int> first = {1, 1, 1, 2, 2, 4, 4, 8};
  for (Index j = 0; j < first.size(); ++j) CHECK(d.value(j) == first[j]);
}

TEST_CASE("delta invariants over random sequences") {
  Rng rng(7);
  for (int inst = 0; inst < 20; ++inst) {
    TailBoundedSeq e = inst % 2 ? TailBoundedSeq::p_series(ratio(rng.between(1, 9), rng.between(1, 9)), 3)
                                : TailBoundedSeq::geometric(ratio(rng.between(1, 9), 1), ratio(rng.between(1, 8), 9));
    DeltaWitness d = build_delta(e);
    auto bps = d.breakpoints(10);
    CHECK(bps[0] == 0);
    Rational acc = 0;
    Index j = 0;
    for (Index i = 0; i < bps.size(); ++i) {
      CHECK(d.value(bps[i]) == pow2(i));
      for (; j < bps[i]; ++j) {
        acc += Rational(d.value(j)) * e.term(j);
        if (j) CHECK(d.value(j) >= d.value(j - 1));
      }
      CHECK(acc < 2 * d.s_bound());
      if (i) CHECK(bps[i] > bps[i - 1]);
    }
  }
}

TEST_CASE("malformed shrink is rejected") {
  TailBoundedSeq::Generator g;
  g.family = "stuck";
  g.term = [](Index n) -> Rational { return pow2q(-std::int64_t(n) - 1); };
  g.tail_bound = [](Index) -> Rational { return 1; };
  g.shrink = [](const Rational&) -> std::optional<Index> { return std::nullopt; };
  auto e = TailBoundedSeq::custom(g);
  CHECK_THROWS_AS(e.first_below(ratio(1, 2)), CertificateError);
  CHECK_THROWS_AS(build_delta(e).breakpoints(3), CertificateError);
}
