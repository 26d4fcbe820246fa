#include <doctest.h>

#include "slalom/errors.hpp"
#include "slalom/random.hpp"
#include "slalom/twosmall.hpp"

using namespace slalom;

namespace {

const TailBoundedSeq kHalf = TailBoundedSeq::geometric(1, Rational(1, 2));

// least j > base with 2^base * 2^{1-j} < target, by plain scanning
Index scan_split(Index base, const Rational& target) {
  for (Index j = base + 1;; ++j)
    if (Rational(pow2(base)) * Rational(2) / Rational(pow2(j)) < target) return j;
}

NullApprox single_word(Index i, BigInt t) {
  return {"single", [i, t](Index n) { return n == i ? std::vector<BigInt>{t} : std::vector<BigInt>{}; }, kHalf};
}

}  // namespace

TEST_CASE("derive_even_odd on unit blocks") {
  auto eo = derive_even_odd(IntervalPartition::unit());
  for (Index k = 0; k < 30; ++k) {
    CHECK(eo.I.block(k).begin == 2 * k);
    CHECK(eo.I.block(k).end == 2 * k + 2);
    CHECK(eo.I_prime.block(k).begin == 2 * k + 1);
    CHECK(eo.I_prime.block(k).end == 2 * k + 3);
  }
}

TEST_CASE("derive_even_odd on blocks of length 2") {
  auto eo = derive_even_odd(IntervalPartition::arithmetic(0, 2));
  for (Index k = 0; k < 30; ++k) {
    CHECK(eo.I.length(k) == 4);
    CHECK(eo.I_prime.length(k) == 4);
    CHECK(eo.I_prime.block(k).begin == eo.I.block(k).begin + 2);
  }
}

TEST_CASE("derive_even_odd interleaves back to L") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    std::vector<Index> ends{0};
    for (int i = 0; i < 80; ++i) ends.push_back(ends.back() + rng.between(1, 6));
    auto L = IntervalPartition::from_endpoints("random", json::object(),
                                               [ends](Index e) { return ends.at(e); });
    auto eo = derive_even_odd(L);
    for (Index k = 0; k < 35; ++k) {
      CHECK(eo.I.endpoint(k) == ends[2 * k]);
      CHECK(eo.I_prime.block(k).begin == ends[2 * k + 1]);
      CHECK(eo.I_prime.block(k).end == ends[2 * k + 3]);
    }
  }
}

TEST_CASE("split with one word per level") {
  auto s = u2small_split(NullApprox::along(Point::zeros()), kHalf);
  CHECK(s.n(1) == 0);
  CHECK(s.target(1) == Rational(1, 2));
  CHECK(s.m(1) == 3);
  for (Index k = 1; k < 15; ++k) {
    CHECK(s.m(k) == scan_split(s.n(k), s.target(k)));
    CHECK(s.n(k + 1) == scan_split(s.m(k), s.target(k)));
    CHECK(all_pass(s.minimality(k)));
  }
  CHECK_THROWS_AS(s.target(0), PreconditionError);
}

TEST_CASE("empty approximation gives unit steps and empty slaloms") {
  auto c = u2small_coding(NullApprox::empty(), kHalf);
  for (Index k = 1; k < 20; ++k) {
    CHECK(c.split.m(k) == c.split.n(k) + 1);
    CHECK(c.split.n(k + 1) == c.split.m(k) + 1);
    CHECK(c.phi.at(k - 1).size() == 0);
    CHECK(c.psi.at(k - 1).size() == 0);
  }
  CHECK(all_pass(u2small_chain_facts(c, 15)));
}

TEST_CASE("a single word yields one cylinder") {
  // the split depends only on the ratio bound, so a probe fixes it
  auto probe = u2small_split(single_word(0, 0), kHalf);
  const Index k = 3;
  const Index nk = probe.n(k), mk = probe.m(k), nk1 = probe.n(k + 1);
  REQUIRE(mk < nk1);
  Rng rng(9);
  for (Index i = mk; i < nk1; ++i) {
    BigInt t = rng.code(i);
    auto c = u2small_coding(single_word(i, t), kHalf);
    REQUIRE(c.split.n(k) == nk);
    const Index len = c.I.length(k - 1);
    CHECK(len == nk1 - nk);
    CHECK(c.phi.at(k - 1).size() == pow2(len - (i - nk)));
    // membership: exactly the codes extending t restricted to the block
    BigInt low;
    mpz_fdiv_q_2exp(low.get_mpz_t(), t.get_mpz_t(), nk);
    if (len <= 12) {
      BigInt count = 0;
      for (BigInt code = 0; code < pow2(len); ++code) {
        BigInt r;
        mpz_fdiv_r_2exp(r.get_mpz_t(), code.get_mpz_t(), i - nk);
        bool expect = r == low;
        CHECK(c.phi.at(k - 1).contains(code) == expect);
        if (expect) ++count;
      }
      CHECK(count == c.phi.at(k - 1).size());
    }
    for (Index j = 1; j < 6; ++j)
      if (j != k) CHECK(c.phi.at(j - 1).size() == 0);
  }
}

TEST_CASE("chain inequalities hold for k up to 30") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto fa = NullApprox::seeded(Point::random(seed), seed, 2);
    CHECK(all_pass(fa.validate(20)));
    auto c = u2small_coding(fa, kHalf);
    auto facts = u2small_chain_facts(c, 30);
    CHECK(facts.size() > 30);
    auto bad = first_failure(facts);
    CHECK_MESSAGE(!bad, (bad ? bad->check + " at " + std::to_string(bad->index) : std::string()));
  }
  auto c = u2small_coding(NullApprox::along(Point::ones()), TailBoundedSeq::p_series(1, 2));
  CHECK(all_pass(u2small_chain_facts(c, 30)));
}

TEST_CASE("every hit past m_1 lands in phi or psi") {
  for (std::uint64_t seed : {4u, 5u}) {
    Point x = Point::random(seed);
    auto c = u2small_coding(NullApprox::along(x), kHalf);
    auto cov = classify_coverage(c, x, 12);
    CHECK(all_pass(cov.facts));
    CHECK(cov.approx_hits.size() == c.split.n(13));
    CHECK(cov.unclassified.size() == c.split.m(1));
    CHECK(cov.phi_blocks.size() == 12);
    CHECK(cov.psi_blocks.size() >= 11);
    CHECK(cov.approx_hits.size() == cov.unclassified.size() + cov.facts.size());
  }
  // a point off the approximation never hits
  auto c = u2small_coding(NullApprox::along(Point::zeros()), kHalf);
  auto cov = classify_coverage(c, Point::ones(), 10);
  CHECK(cov.approx_hits.size() == 1);  // the empty word at n = 0
  CHECK(cov.phi_blocks.empty());
  CHECK(cov.psi_blocks.empty());
}

TEST_CASE("witness json lists the split") {
  auto c = u2small_coding(NullApprox::along(Point::zeros()), kHalf);
  json w = u2small_witness(c, 5);
  CHECK(w["blocks"].size() == 5);
  CHECK(w["blocks"][0]["m_k"] == 3);
}
