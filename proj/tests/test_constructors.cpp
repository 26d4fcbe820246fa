#include <doctest.h>

#include <algorithm>

#include "slalom/certificates.hpp"
#include "slalom/constructors.hpp"
#include "slalom/errors.hpp"
#include "slalom/random.hpp"

using namespace slalom;

namespace {

Index log_threshold(const Rational& M) {
  Index k = 0;
  while (Rational(pow2(k + 1)) < M) ++k;
  return k;
}

// |I_n| = 2(n+1), eps_n = 2^-(n+1): mass 2^{n+1}
struct Space {
  IntervalPartition I = IntervalPartition::arithmetic(2, 2);
  TailBoundedSeq eps = TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2));
  DivergenceCertificate div{"log", log_threshold, {}};
};

BlockSlalom constant_slalom(const IntervalPartition& I, std::vector<BigInt> codes) {
  BlockSet s = BlockSet::of(std::move(codes));
  return BlockSlalom(I, [s](Index) { return s; }, "constant");
}

// Bits [off, off+len) of code, read bit by bit.
BigInt slice(const BigInt& code, Index off, Index len) {
  BigInt out = 0;
  for (Index b = 0; b < len; ++b)
    if (mpz_tstbit(code.get_mpz_t(), off + b)) out += pow2(b);
  return out;
}

// Enumerate J_n and test every sub-block against phi directly.
std::pair<BigInt, BigInt> enumerate_transfer(const BlockSlalom& phi, const IntervalPartition& J, Index n) {
  const IntervalPartition& I = phi.partition();
  Block b = J.block(n);
  std::vector<std::pair<Index, Block>> inner;
  for (Index k = 0; I.endpoint(k) < b.end; ++k)
    if (I.endpoint(k) >= b.begin && I.endpoint(k + 1) <= b.end) inner.push_back({k, I.block(k)});
  BigInt all = 0, any = 0;
  for (BigInt c = 0; c < pow2(b.length()); ++c) {
    bool every = true, some = false;
    for (auto& [k, blk] : inner) {
      bool in = phi.at(k).contains(slice(c, blk.begin - b.begin, blk.length()));
      every = every && in;
      some = some || in;
    }
    if (every) ++all;
    if (some) ++any;
  }
  return {all, any};
}

}  // namespace

TEST_CASE("extract_bits agrees with bit reads") {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    BigInt c = rng.code(90);
    Index off = rng.between(0, 80), len = rng.between(0, 30);
    CHECK(extract_bits(c, off, len) == slice(c, off, len));
  }
}

TEST_CASE("merge of a single slalom") {
  Space S;
  auto phi = constant_slalom(S.I, {3}).with_certificate(vanishing_from_size_bound(1, S.div));
  auto m = merge_slaloms({phi}, S.eps, 60);
  CHECK(all_pass(m.facts));
  for (Index j = m.group_start(1); j < 60; ++j) CHECK(m.phi.at(j) == phi.at(j));
}

TEST_CASE("merge of two disjoint singleton slaloms") {
  Space S;
  auto a = constant_slalom(S.I, {0}).with_certificate(vanishing_from_size_bound(1, S.div));
  auto b = constant_slalom(S.I, {1}).with_certificate(vanishing_from_size_bound(1, S.div));
  auto m = merge_slaloms({a, b}, S.eps, 80);
  CHECK(all_pass(m.facts));
  Index n = 0;
  for (Index j = 0; j < 80; ++j) {
    while (m.group_start(n + 1) <= j) ++n;
    BlockSet s = m.phi.at(j);
    CHECK(s.size() <= 2);
    if (n == 0) continue;
    CHECK(Rational(s.size()) / Rational(pow2(S.I.length(j))) < S.eps.term(j) / Rational(big(n)));
    if (j >= m.group_start(1)) CHECK(s.contains(0));
    if (j >= m.group_start(2)) CHECK(s.contains(1));
  }
}

TEST_CASE("merge rejects uncertified input") {
  Space S;
  CHECK_THROWS_AS(merge_slaloms({constant_slalom(S.I, {0})}, S.eps, 10), PreconditionError);
  CHECK_THROWS_AS(merge_slaloms({}, S.eps, 10), PreconditionError);
}

TEST_CASE("merge over random families") {
  Space S;
  Rng rng(13);
  for (int t = 0; t < 6; ++t) {
    std::vector<BlockSlalom> phis;
    Index count = rng.between(1, 8);
    for (Index i = 0; i < count; ++i) {
      Index c = rng.between(1, 3);
      phis.push_back(BlockSlalom::random_sparse(S.I, rng.next(), 0, c).with_certificate(vanishing_from_size_bound(c, S.div)));
    }
    auto m = merge_slaloms(phis, S.eps, 120);
    CHECK(all_pass(m.facts));
    for (Index i = 0; i < count; ++i)
      for (Index j = m.group_start(i + 1); j < 120; ++j)
        for (const auto& c : phis[i].at(j).members(S.I.length(j))) CHECK(m.phi.at(j).contains(c));
  }
}

TEST_CASE("eps_from_summable with ratio 2^-n") {
  auto I = IntervalPartition::arithmetic(1, 1);
  auto phi = constant_slalom(I, {0, 1});
  auto r = eps_from_summable(phi, TailBoundedSeq::geometric(1, ratio(1, 2)), 40);
  CHECK(all_pass(r.facts));
  // tail 2^{1-k} < 2/4^i gives n_i = 2i+1, so delta_j = 2^{floor((j-1)/2)} for j >= 1
  for (Index j = 0; j < 40; ++j) {
    Index level = j == 0 ? 0 : (j - 1) / 2;
    CHECK(r.eps.term(j) == Rational(pow2(level)) * pow2q(-std::int64_t(j)));
  }
  Rational total = 0;
  for (Index j = 0; j < 40; ++j) total += r.eps.term(j);
  CHECK(total < 2 * Rational(2));
  for (Index k = 0; k < 30; ++k) CHECK(partial_sum(r.eps, k, 60) <= r.eps.tail_bound(k));
  // certificate: ratio/eps = 1/delta
  for (Index j = 0; j < 40; ++j) CHECK(relative_size(r.phi, r.eps, j) == Rational(1) / Rational(r.delta.value(j)));
  CHECK(sigma_member(r.phi, r.eps, 40).is_holds());
}

TEST_CASE("eps_from_summable guards empty blocks") {
  auto I = IntervalPartition::arithmetic(1, 1);
  auto r = eps_from_summable(BlockSlalom::empty(I), TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2)), 30);
  for (Index j = 0; j < 30; ++j) {
    CHECK(r.eps.term(j) > 0);
    CHECK(r.eps.term(j) == Rational(r.delta.value(j)) / Rational(pow2(I.length(j))));
  }
  CHECK_THROWS_AS(eps_from_summable(constant_slalom(I, {0, 1, 2}), TailBoundedSeq::geometric(1, ratio(1, 2)), 10),
                  CertificateError);
}

TEST_CASE("complete_nonempty") {
  Space S;
  auto r = complete_nonempty(BlockSlalom::empty(S.I), S.eps, S.div, 40);
  CHECK(all_pass(r.facts));
  for (Index n = 0; n < 40; ++n) CHECK(r.phi.at(n) == BlockSet::of({0}));
  for (std::uint64_t N : {1u, 3u, 10u, 100u})
    for (Index n = log_threshold(Rational(big(N)) + 1); n < 40; ++n)
      CHECK(Rational(1) / Rational(pow2(S.I.length(n))) < S.eps.term(n) / Rational(big(N)));
  auto full = constant_slalom(S.I, {5, 6}).with_certificate(vanishing_from_size_bound(2, S.div));
  auto same = complete_nonempty(full, S.eps, S.div, 30);
  for (Index n = 0; n < 30; ++n) CHECK(same.phi.at(n) == full.at(n));
  auto alt = BlockSlalom(S.I, [](Index n) { return n % 2 ? BlockSet::of({7}) : BlockSet(); }, "alt")
                 .with_certificate(vanishing_from_size_bound(1, S.div));
  auto mix = complete_nonempty(alt, S.eps, S.div, 30);
  CHECK(all_pass(mix.facts));
  for (Index n = 0; n < 30; ++n) {
    CHECK(mix.phi.at(n) == (n % 2 ? BlockSet::of({7}) : BlockSet::of({0})));
    CHECK(Rational(mix.phi.at(n).size()) / Rational(pow2(S.I.length(n))) <= S.eps.term(n));
  }
  DivergenceCertificate sub{"sub", log_threshold, [](Index j) { return 2 * j; }};
  CHECK_THROWS_AS(complete_nonempty(BlockSlalom::empty(S.I), S.eps, sub, 10), PreconditionError);
}

TEST_CASE("pad_to_eps on the worked block") {
  auto I = IntervalPartition::arithmetic(0, 4);
  auto eps = TailBoundedSeq::geometric(ratio(1, 64), ratio(1, 2)).with_prefix(std::vector<Rational>(6, ratio(3, 16)));
  auto r = pad_to_eps(constant_slalom(I, {0}), eps, 6);
  CHECK(all_pass(r.facts));
  for (Index n = 0; n < 6; ++n) {
    BlockSet s = r.phi.at(n);
    CHECK(s.size() == 3);
    CHECK(s.contains(0));
    Rational q = Rational(s.size()) / 16;
    CHECK(q >= ratio(3, 16));
    CHECK(q < ratio(4, 16));
  }
  CHECK(r.qualifying.size() == 6);
}

TEST_CASE("pad_to_eps leaves full-target blocks outside the qualifying set") {
  auto I = IntervalPartition::arithmetic(0, 4);
  auto eps = TailBoundedSeq::geometric(ratio(1, 64), ratio(1, 2)).with_prefix({ratio(3, 16), ratio(3, 16)});
  auto phi = BlockSlalom::from_blocks(I, {BlockSet::of({0, 1, 2}), BlockSet::of({4, 9})});
  auto r = pad_to_eps(phi, eps, 2);
  CHECK_FALSE(pad_qualifies(phi, eps, 0));
  CHECK(r.phi.at(0).empty());
  // one short of target: exactly one code added, the smallest unused
  CHECK(r.phi.at(1) == BlockSet::of({0, 4, 9}));
}

TEST_CASE("pad sandwich over random instances") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    auto I = IntervalPartition::arithmetic(1, rng.between(1, 3));
    auto eps = TailBoundedSeq::geometric(ratio(rng.between(1, 9), 10), ratio(rng.between(1, 3), 4));
    auto phi = BlockSlalom::random_sparse(I, rng.next(), 0, 4);
    auto r = pad_to_eps(phi, eps, 40);
    CHECK(all_pass(r.facts));
    for (Index n = 0; n < 40; ++n) {
      Rational cap = Rational(pow2(I.length(n)));
      Rational e = eps.term(n);
      bool q = 1 / cap <= e && Rational(phi.at(n).size()) / cap < e && e < 1;
      CHECK(q == pad_qualifies(phi, eps, n));
      BlockSet s = r.phi.at(n);
      if (!q) {
        CHECK(s.empty());
        continue;
      }
      Rational ratio_n = Rational(s.size()) / cap;
      CHECK(e <= ratio_n);
      CHECK(ratio_n < e + 1 / cap);
      CHECK(ratio_n < 2 * e);
      for (const auto& c : phi.at(n).members(I.length(n))) CHECK(s.contains(c));
    }
  }
}

TEST_CASE("s_not_e_witness") {
  auto I = IntervalPartition::arithmetic(0, 3);
  auto eps = TailBoundedSeq::geometric(1, ratio(1, 2));
  IndexSet evens{"evens", [](Index n) { return n % 2 == 0; }};
  auto r = s_not_e_witness(I, eps, evens, BlockSlalom::empty(I), 20);
  CHECK(all_pass(r.facts));
  for (Index n = 0; n < 20; ++n) CHECK(restrict(r.x, I, n).code == 0);
  CHECK(r.escapes.size() == 10);
  auto z = s_not_e_witness(I, eps, evens, constant_slalom(I, {0}), 20);
  CHECK(all_pass(z.facts));
  for (Index n = 0; n < 20; ++n) CHECK(restrict(z.x, I, n).code == (n % 2 ? 1 : 0));
  CHECK(z.hits.size() == 10);
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    auto psi = BlockSlalom::random_sparse(I, rng.next(), 0, 7);
    auto w = s_not_e_witness(I, eps, evens, psi, 20);
    CHECK(all_pass(w.facts));
    for (Index n : w.escapes) CHECK_FALSE(psi.at(n).contains(restrict(w.x, I, n).code));
  }
  auto full = constant_slalom(I, {0, 1, 2, 3, 4, 5, 6, 7});
  CHECK_THROWS_AS(s_not_e_witness(I, eps, evens, full, 20), CertificateError);
}

TEST_CASE("interleave refuter") {
  auto U = IntervalPartition::unit();
  auto even_phi = BlockSlalom(U, [](Index n) { return n % 2 ? BlockSet() : BlockSet::of({0}); }, "evens");
  auto none = TailBoundedSeq::geometric(1, ratio(1, 2));
  auto e = s_not_in_Efsigma_refuter(even_phi, BlockSlalom::empty(U), none, 40);
  CHECK(e.empty_case);
  CHECK(all_pass(e.facts));

  // ratio of psi is 4^-(n+1)
  auto J = IntervalPartition::arithmetic(2, 2);
  auto phi = constant_slalom(U, {1});
  auto psi = constant_slalom(J, {0});
  auto r = s_not_in_Efsigma_refuter(phi, psi, TailBoundedSeq::geometric(ratio(1, 4), ratio(1, 4)), 200);
  CHECK(all_pass(r.facts));
  REQUIRE(r.k.size() >= 5);
  for (Index k : r.k) CHECK(restrict(r.x, U, k).code == 1);
  for (Index j : r.j) CHECK(restrict(r.x, J, j).code != 0);
  // alternation: each landing block lies before the next escape block
  for (Index i = 0; i < r.j.size(); ++i) CHECK(U.endpoint(r.k[i] + 1) <= J.endpoint(r.j[i]));
  CHECK_THROWS_AS(s_not_in_Efsigma_refuter(BlockSlalom::empty(U), psi, none, 20), PreconditionError);
}

TEST_CASE("transfer_E examples") {
  auto I = IntervalPartition::arithmetic(0, 2);
  auto eps = TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2));
  auto phi = BlockSlalom::random_sparse(I, 99, 1, 3);
  auto same = transfer_E(phi, I, eps, 10);
  CHECK(all_pass(same.checks));
  for (Index n = 0; n < 10; ++n) {
    CHECK(same.psi.at(n).size() == phi.at(n).size());
    for (BigInt c = 0; c < 4; ++c) CHECK(same.psi.at(n).contains(c) == phi.at(n).contains(c));
  }
  auto single = constant_slalom(I, {2});
  auto J = IntervalPartition::coarsen(I, 2);
  auto m = transfer_E(single, J, eps, 6);
  CHECK(all_pass(m.checks));
  for (Index n = 0; n < 6; ++n) {
    CHECK(m.psi.at(n).size() == 1);
    CHECK(m.psi.at(n).contains(2 + 4 * 2));
  }
  // a full factor drops out of the product
  auto mixed = BlockSlalom(I, [](Index k) { return k % 2 ? BlockSet::full(2) : BlockSet::of({1}); }, "mixed");
  auto f = transfer_E(mixed, J, eps, 6);
  for (Index n = 0; n < 6; ++n) CHECK(Rational(f.psi.at(n).size()) / 16 == ratio(1, 4));
}

TEST_CASE("transfer sizes against enumeration") {
  Rng rng(31);
  auto eps = TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2));
  int blocks = 0;
  for (int t = 0; t < 12; ++t) {
    auto I = IntervalPartition::arithmetic(0, rng.between(1, 3));
    auto J = IntervalPartition::coarsen(I, rng.between(1, 4), rng.between(0, 2));
    auto phi = BlockSlalom::random_sparse(I, rng.next(), 0, 3);
    auto E = transfer_E(phi, J, eps, 8);
    auto S = transfer_S(phi, J, eps, 8);
    CHECK(all_pass(E.checks));
    CHECK(all_pass(S.checks));
    for (Index n = 0; n < 8; ++n) {
      if (J.length(n) > 12) continue;
      auto [all, any] = enumerate_transfer(phi, J, n);
      CHECK(E.psi.at(n).size() == all);
      CHECK(S.psi.at(n).size() == any);
      CHECK(union_of_cylinders_size(phi, J, n) == any);
      ++blocks;
    }
  }
  CHECK(blocks > 40);
}

TEST_CASE("transfer_S examples") {
  auto I = IntervalPartition::arithmetic(0, 3);
  auto eps = TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2));
  auto phi = BlockSlalom::random_sparse(I, 5, 1, 4);
  auto one = transfer_S(phi, I, eps, 10);
  for (Index n = 0; n < 10; ++n)
    CHECK(Rational(one.psi.at(n).size()) / 8 == Rational(phi.at(n).size()) / 8);
  auto J = IntervalPartition::coarsen(I, 2);
  auto two = transfer_S(constant_slalom(I, {3}), J, eps, 6);
  for (Index n = 0; n < 6; ++n) {
    // 2 * 2^{6-3} - 1 * 2^{6-6}
    CHECK(two.psi.at(n).size() == 2 * 8 - 1);
    Rational bound = 2 * ratio(1, 8);
    CHECK(Rational(two.psi.at(n).size()) / 64 <= bound);
  }
  auto empty = transfer_S(BlockSlalom::empty(I), J, eps, 6);
  for (Index n = 0; n < 6; ++n) CHECK(empty.psi.at(n).empty());
}

TEST_CASE("transfer preconditions are reported") {
  auto I = IntervalPartition::arithmetic(0, 2);
  auto shifted = IntervalPartition::from_endpoints("shifted", json::object(), [](Index n) { return n == 0 ? Index(0) : 2 * n + 1; });
  auto eps = TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2));
  auto r = transfer_S(constant_slalom(I, {1}), shifted, eps, 20);
  CHECK_FALSE(r.preconditions_hold());
}

TEST_CASE("xi and the integer threshold") {
  for (Index n = 0; n < 6; ++n)
    for (Index len = 1; len < 40; ++len) {
      // largest m with m (n+1)^2 < 2^len, by direct search downward
      const BigInt m = xi(n, len), d2 = big((n + 1) * (n + 1));
      CHECK(m * d2 < pow2(len));
      CHECK((m + 1) * d2 >= pow2(len));
      BigInt q = pow2(len), d = big((n + 1) * (n + 1));
      BigInt ceil_q = (q + d - 1) / d;
      CHECK(xi(n, len) == ceil_q - 1);
    }
  for (Index K = 1; K < 6; ++K) {
    Index n = distinguish_threshold(K, 0);
    auto ok = [K](Index m) { return pow2(m) * big(m + 1 >= K ? m - K + 1 : 0) >= big((m + 1) * (m + 1) * (m + 1)) && m + 1 >= K; };
    for (Index m = n; m < n + 200; ++m) CHECK(ok(m));
    if (n > 0) CHECK_FALSE(ok(n - 1));
  }
}

TEST_CASE("distinguish_eps_example") {
  auto I = IntervalPartition::polynomial({0, 0, 0, 1});
  auto r = distinguish_eps_example(I, 14);
  CHECK(all_pass(r.facts));
  CHECK(r.member_eps.is_holds());
  CHECK(r.member_eps_prime.is_fails());
  REQUIRE(r.n_K.size() >= 2);
  for (Index K = 1; K <= r.n_K.size(); ++K) {
    Index lo = r.n_K[K - 1];
    Index hi = K < r.n_K.size() ? r.n_K[K] : 14;
    for (Index i = lo; i < hi; ++i) {
      BigInt size = r.phi.at(i).size();
      BigInt x = xi(i, I.length(i));
      CHECK(size == (x + big(K) - 1) / big(K));
      Rational q = Rational(size) / Rational(pow2(I.length(i)));
      CHECK(q >= Rational(1, (i + 1) * (i + 1) * (i + 1)));
      CHECK(q <= Rational(1) / Rational(big((i + 1) * (i + 1) * K)) + Rational(big(i)) / Rational(pow2(i) * big(K)));
      CHECK(r.eps.term(i) == Rational(1, (i + 1) * (i + 1)) + Rational(big(i)) / Rational(pow2(i)));
      CHECK(r.eps_prime.term(i) == Rational(1, (i + 1) * (i + 1) * (i + 1)));
    }
  }
  CHECK_THROWS_AS(distinguish_eps_example(IntervalPartition::arithmetic(1, 1), 5), PreconditionError);
}
