#include <doctest.h>

#include <algorithm>

#include "slalom/errors.hpp"
#include "slalom/random.hpp"
#include "slalom/tukey.hpp"

using namespace slalom;

namespace {

std::vector<BigInt> random_subset(Rng& rng, Index len) {
  std::vector<BigInt> out;
  unsigned p = rng.between(0, 100);
  for (Index c = 0; c < (Index(1) << len); ++c)
    if (rng.percent(p)) out.push_back(big(c));
  return out;
}

// Mixed-radix rank computed the slow way: sum of digit * product of later radices.
BigInt rank_by_hand(const IntervalPartition& I, Index lo, const BlockTuple& t) {
  BigInt r = 0;
  for (Index i = 0; i < t.size(); ++i) {
    BigInt digit = 0;
    for (const auto& c : t[i]) digit += pow2(to_index(c));
    BigInt weight = 1;
    for (Index j = i + 1; j < t.size(); ++j) weight *= pow2(pow2(I.length(lo + j)).get_ui());
    r += digit * weight;
  }
  return r;
}

}  // namespace

TEST_CASE("subset indexing is the bitmask over codes") {
  CHECK(lambda(1) == 4);
  CHECK(lambda(2) == 16);
  CHECK(lambda(4) == 65536);
  // all four subsets of 2^1 in bitmask order
  std::vector<std::vector<BigInt>> subsets = {{}, {0}, {1}, {0, 1}};
  for (Index k = 0; k < 4; ++k) {
    CHECK(subset_index(subsets[k], 1) == k);
    CHECK(subset_from_index(big(k), 1) == subsets[k]);
  }
  CHECK_THROWS(subset_index({BigInt(4)}, 2));
  CHECK_THROWS(subset_from_index(BigInt(16), 2));
}

TEST_CASE("coding examples") {
  auto U = IntervalPartition::unit();
  auto a = [](Index n) { return n; };
  auto empty = code_phi(U, a, [](Index) { return BlockTuple{{}}; }, 3);
  CHECK(empty == std::vector<BigInt>{0, 0, 0});
  auto one = code_phi(U, a, [](Index) { return BlockTuple{{BigInt(1)}}; }, 1);
  CHECK(one == std::vector<BigInt>{2});
  auto I = IntervalPartition::arithmetic(1, 1);
  CHECK(kappa(I, 0, 3) == lambda(1) * lambda(2) * lambda(3));
}

TEST_CASE("coding roundtrip and range") {
  Rng rng(12);
  for (int t = 0; t < 300; ++t) {
    auto I = IntervalPartition::from_lengths("r", json::object(), [s = rng.next()](Index n) {
      return 1 + splitmix64(s ^ n) % kMaxCodedBits;
    });
    std::vector<Index> ends{rng.between(0, 3)};
    Index count = rng.between(1, 3);
    for (Index n = 0; n < count; ++n) ends.push_back(ends.back() + rng.between(1, 3));
    auto a = [ends](Index n) { return ends.at(n); };
    std::vector<BlockTuple> f(count);
    for (Index n = 0; n < count; ++n)
      for (Index i = ends[n]; i < ends[n + 1]; ++i) f[n].push_back(random_subset(rng, I.length(i)));
    auto codes = code_phi(I, a, [&f](Index n) { return f[n]; }, count);
    CHECK(decode_phi(I, a, codes) == f);
    for (Index n = 0; n < count; ++n) {
      CHECK(codes[n] >= 0);
      CHECK(codes[n] < kappa(I, ends[n], ends[n + 1]));
      CHECK(codes[n] == rank_by_hand(I, ends[n], f[n]));
    }
  }
}

TEST_CASE("coding refuses long blocks") {
  auto I = IntervalPartition::arithmetic(0, kMaxCodedBits + 1);
  CHECK_THROWS(kappa(I, 0, 1));
}

TEST_CASE("alc_params") {
  auto I = IntervalPartition::arithmetic(2, 2);
  auto eps = TailBoundedSeq::geometric(1, ratio(1, 2));
  auto p = alc_params(I, eps, 30);
  CHECK(all_pass(p.facts));
  for (Index n = 0; n < 30; ++n) {
    CHECK(p.b(n) == pow2(2 * n + 2));
    CHECK(p.h(n) == pow2(n + 2));
  }
  Rng rng(6);
  std::vector<BigInt> s;
  for (Index n = 0; n < 20; ++n) s.push_back(rng.code(I.length(n)));
  Point x = concat(I, s);
  for (Index n = 0; n < 20; ++n) CHECK(restrict(x, I, n).code == s[n]);
  CHECK(restrict(x, I, 25).code == 0);
}

TEST_CASE("trim respects the width past threshold(1)") {
  auto I = IntervalPartition::arithmetic(2, 2);
  auto eps = TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2));
  // |phi(n)| = 2^n, mass 2^{n+1}: N 2^n < 2^{n+1} only for N = 1
  auto phi = BlockSlalom(I, [](Index n) { return BlockSet::initial(pow2(n)); }, "half")
                 .with_certificate({"from 3", [](std::uint64_t N) { return N == 1 ? Index(3) : Index(1) << 40; }});
  auto w = trim(phi, eps);
  for (Index n = 0; n < 20; ++n) {
    BlockSet s = w.at(n);
    if (n < 3) {
      CHECK(s.empty());
      continue;
    }
    CHECK(s.size() <= floor_of(Rational(pow2(I.length(n))) * eps.term(n)));
    CHECK(s.size() <= w.width(n));
    CHECK(*w.base(n) == pow2(I.length(n)));
  }
  CHECK_THROWS_AS(trim(BlockSlalom(I, [](Index) { return BlockSet(); }), eps), PreconditionError);
}

TEST_CASE("partition_from_b") {
  // b(0) = 10: |I_0| = 3, b'(0) = 8 <= 10 < 16
  auto r = partition_from_b([](Index n) -> BigInt { return 10 * pow2(n); }, [](Index) { return BigInt(1); },
                            TailBoundedSeq::geometric(ratio(1, 10), ratio(1, 2)), 20);
  CHECK(all_pass(r.facts));
  for (Index n = 0; n < 20; ++n) {
    CHECK(r.I.length(n) == n + 3);
    CHECK(r.b_prime(n) == pow2(n + 3));
  }
  auto pw = partition_from_b([](Index n) { return pow2(n + 1); }, [](Index) { return BigInt(1); },
                             TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2)), 20);
  CHECK(all_pass(pw.facts));
  for (Index n = 0; n < 20; ++n) CHECK(pw.b_prime(n) == pow2(n + 1));
  CHECK_THROWS_AS(partition_from_b([](Index) { return BigInt(1); }, [](Index) { return BigInt(1); },
                                   TailBoundedSeq::geometric(1, ratio(1, 2)), 4),
                  PreconditionError);
}

TEST_CASE("partition_from_b over random b") {
  Rng rng(19);
  for (int t = 0; t < 20; ++t) {
    std::uint64_t seed = rng.next();
    auto b = [seed](Index n) -> BigInt { return pow2(n + 3) + BigInt(splitmix64(seed ^ n) % (Index(1) << std::min<Index>(n + 3, 62))); };
    auto h = [seed](Index n) -> BigInt { return big(1 + splitmix64(seed + n) % 3); };
    auto r = partition_from_b(b, h, TailBoundedSeq::geometric(ratio(3, 8), ratio(1, 2)), 40);
    CHECK(all_pass(r.facts));
    Rational sum_b = 0, sum_bp = 0;
    for (Index n = 0; n < 40; ++n) {
      CHECK(r.b_prime(n) <= b(n));
      CHECK(b(n) < 2 * r.b_prime(n));
      CHECK(r.b_prime(n) == pow2(r.I.length(n)));
      CHECK(Rational(h(n)) / Rational(r.b_prime(n)) <= 2 * Rational(h(n)) / Rational(b(n)));
      sum_b += Rational(h(n)) / Rational(b(n));
      sum_bp += Rational(h(n)) / Rational(r.b_prime(n));
      CHECK(r.eps.term(n) == Rational(h(n)) / Rational(r.b_prime(n)) * Rational(r.delta.value(n)));
    }
    CHECK(sum_bp <= 2 * sum_b);
  }
}

TEST_CASE("lc_alc_eval") {
  auto x = [](Index n) { return big(n % 3); };
  WidthSlalom full;
  full.kind = WidthSlalom::Kind::Full;
  CHECK(lc_alc_eval(x, full, LcMode::EverywhereTail, 20).is_holds());
  WidthSlalom none;
  none.kind = WidthSlalom::Kind::Empty;
  CHECK(lc_alc_eval(x, none, LcMode::InfinitelyOften, 20).is_fails());
  auto generic = WidthSlalom::from_columns("cols", [](Index) { return BigInt(1); },
                                           {{0}, {1}, {2}, {0}, {1}, {2}, {1}, {1}, {2}, {0}});
  CHECK(all_pass(check_width(generic, 10)));
  auto io = lc_alc_eval(x, generic, LcMode::InfinitelyOften, 10);
  CHECK(io.is_unknown());
  CHECK(lc_alc_eval(x, generic, LcMode::EverywhereTail, 10).is_fails());
}

TEST_CASE("hardtukey pipeline connection") {
  auto I = IntervalPartition::arithmetic(0, 2);
  auto eps = TailBoundedSeq::geometric(Rational(pow2(24)), ratio(1, 2));
  const Index E = 26;
  std::vector<BlockSet> blocks(E, BlockSet::of({1}));
  auto phi = BlockSlalom::from_blocks(I, blocks);
  // mass at n is 2^{26-n}: N < 2^{26-n} holds for n < 26 - log2 N, and phi is empty after E
  phi = phi.with_certificate({"tail", [E](std::uint64_t N) {
                                Index n0 = E;
                                while (n0 > 0 && Rational(big(N)) < Rational(pow2(2)) * pow2q(24 - std::int64_t(n0 - 1))) --n0;
                                return n0;
                              }});
  CHECK(sigma_member(phi, eps, 40).is_holds());
  const Index groups = 4;
  std::vector<Index> kx;
  for (Index n = 0; n <= groups; ++n) {
    Index t = phi.certificate()->threshold((n + 1) * (n + 1) * (n + 1));
    kx.push_back(n == 0 ? t : std::max(kx.back() + 1, t));
  }
  auto b = [kx](Index n) { return kx.at(n); };
  std::vector<std::vector<BigInt>> cols;
  for (Index n = 0; n < groups; ++n) {
    BlockTuple own;
    for (Index j = kx[n]; j < kx[n + 1]; ++j) own.push_back(phi.at(j).members(2));
    cols.push_back({code_tuple(I, kx[n], own)});
  }
  auto S = WidthSlalom::from_columns("exact", [](Index n) { return big((n + 1) * (n + 1)); }, cols);
  auto p = hardtukey_pipeline(phi, eps, b, S, groups);
  CHECK(all_pass(p.facts));
  CHECK_FALSE(p.vacuous());
  for (Index j = kx[0]; j < kx[groups]; ++j) {
    for (const auto& c : phi.at(j).members(2)) CHECK(p.psi.at(j).contains(c));
  }
  for (Index n = 0; n < groups; ++n)
    for (Index j = kx[n]; j < kx[n + 1]; ++j)
      CHECK(Rational(p.psi.at(j).size()) / 4 < eps.term(j) / Rational(big(n + 1)));
  CHECK(p.trace()["columns"].size() == groups);

  // drop the true code: the connection becomes vacuous, never a containment failure
  std::vector<std::vector<BigInt>> wrong(groups);
  auto T = WidthSlalom::from_columns("missing", [](Index n) { return big((n + 1) * (n + 1)); }, wrong);
  auto q = hardtukey_pipeline(phi, eps, b, T, groups);
  CHECK(q.vacuous());
  CHECK_FALSE(q.vacuous_reason.empty());
  CHECK(all_pass(q.facts));
}

TEST_CASE("hardtukey drops codes failing the filter") {
  auto I = IntervalPartition::arithmetic(0, 2);
  auto eps = TailBoundedSeq::geometric(Rational(pow2(24)), ratio(1, 2));
  auto phi = BlockSlalom::empty(I).with_certificate({"empty", [](std::uint64_t) { return Index(0); }});
  const Index groups = 3;
  auto b = [](Index n) { return 30 + 2 * n; };
  std::vector<std::vector<BigInt>> cols;
  for (Index n = 0; n < groups; ++n) cols.push_back({code_tuple(I, b(n), {{0, 1, 2, 3}, {0, 1, 2, 3}})});
  auto S = WidthSlalom::from_columns("full tuples", [](Index n) { return big((n + 1) * (n + 1)); }, cols);
  auto p = hardtukey_pipeline(phi, eps, b, S, groups);
  CHECK(all_pass(p.facts));
  for (Index j = b(0); j < b(groups); ++j) CHECK(p.psi.at(j).empty());
  for (const auto& g : p.groups) {
    CHECK(g.kept.empty());
    CHECK(g.dropped.size() == 1);
  }
}

TEST_CASE("na_witness_check") {
  auto I = IntervalPartition::from_lengths("na", json::object(), na_block_length);
  auto phi = BlockSlalom(I, [I](Index n) { return BlockSet::initial(std::min(big(n), pow2(I.length(n)))); }, "first-n");
  auto ok = na_witness_check(phi, {{Point::zeros(), MembershipCertificate{"0 in phi(n) for n >= 1", 1}}}, 30);
  CHECK(ok.overall.is_holds());
  auto none = na_witness_check(BlockSlalom::empty(I), {{Point::zeros(), {}}, {Point::ones(), {}}, {Point::random(1), {}}}, 30);
  CHECK(none.overall.is_fails());
  CHECK(none.overall.witness().size() == 3);
  auto sparse = BlockSlalom::random_sparse(I, 3, 0, 1);
  auto u = na_witness_check(sparse, {{Point::random(9), {}}}, 30);
  CHECK_FALSE(u.overall.is_holds());
  auto wide = BlockSlalom(I, [](Index n) { return BlockSet::initial(big(n + 1)); }, "too-wide");
  CHECK_THROWS_AS(na_witness_check(wide, {}, 10), PreconditionError);
}

TEST_CASE("na_to_E_params") {
  auto p = na_to_E_params(40);
  CHECK(all_pass(p.facts));
  CHECK(p.I.length(4) == 8);
  CHECK(Rational(4) / block_mass(p.I, p.eps, 4) == ratio(1, 4));
  for (Index n = 1; n < 40; ++n) {
    CHECK(pow2(p.I.length(n)) >= big(n) * big(n) * pow2(n));
    CHECK(Rational(1) / block_mass(p.I, p.eps, n) <= Rational(1, n * n));
  }
  auto x = Point::random(5);
  CHECK(psi_minus(x).same_as(x));
}
