#include "slalom/twosmall.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "slalom/errors.hpp"
#include "slalom/random.hpp"

namespace slalom {

BigInt prefix_word(const Point& x, Index n) { return restrict_code(x, Block{0, n}); }

NullApprox NullApprox::empty() {
  return {"empty", [](Index) { return std::vector<BigInt>{}; }, TailBoundedSeq::zero()};
}

NullApprox NullApprox::along(const Point& x) {
  return {"along:" + x.key(), [x](Index n) { return std::vector<BigInt>{prefix_word(x, n)}; },
          TailBoundedSeq::geometric(1, Rational(1, 2))};
}

NullApprox NullApprox::seeded(const Point& x, std::uint64_t seed, Index extra) {
  auto F = [x, seed, extra](Index n) {
    std::set<BigInt> words{prefix_word(x, n)};
    const BigInt cap = pow2(n);
    Rng rng(seed, n);
    for (Index i = 0; i < extra && big(words.size()) < cap; ++i) words.insert(rng.code(n));
    return std::vector<BigInt>(words.begin(), words.end());
  };
  return {"seeded:" + std::to_string(seed) + ":" + x.key(), F,
          TailBoundedSeq::geometric(Rational(big(extra + 1)), Rational(1, 2))};
}

std::vector<Fact> NullApprox::validate(Index window) const {
  std::vector<Fact> out;
  for (Index n = 0; n < window; ++n) {
    auto words = F(n);
    bool fits = true;
    for (const auto& w : words) fits = fits && w >= 0 && w < pow2(n);
    out.push_back(Fact::claim("words of F_n have length n", n, fits));
    out.push_back(Fact::compare("|F_n|/2^n within the certified ratios", n,
                                Rational(big(words.size())) / Rational(pow2(n)), Relation::LessEq, ratios.term(n)));
  }
  return out;
}

EvenOdd derive_even_odd(const IntervalPartition& L) {
  return {IntervalPartition::coarsen(L, 2, 0), IntervalPartition::coarsen(L, 2, 1)};
}

U2Split::U2Split(NullApprox fa, TailBoundedSeq eps)
    : fa_(std::move(fa)), eps_(std::move(eps)), state_(std::make_shared<State>()) {
  if (!eps_.decreasing()) throw PreconditionError("the split needs a decreasing eps");
  state_->ends.push_back(0);
}

Rational U2Split::target(Index k) const {
  if (k == 0) throw PreconditionError("the split criterion starts at k = 1");
  return eps_.term(k) / Rational(big(k));
}

Index U2Split::endpoint(Index e) const {
  std::lock_guard<std::mutex> lock(state_->mu);
  auto& ends = state_->ends;
  while (ends.size() <= e) {
    // ends[2(k-1)] = n_k, ends[2(k-1)+1] = m_k
    const Index idx = ends.size();
    const Index k = idx / 2 + 1 - (idx % 2 == 0 ? 1 : 0);
    const Index prev = ends.back();
    const Rational r = target(k) / Rational(pow2(prev));
    try {
      ends.push_back(fa_.ratios.first_below(r, prev + 1));
    } catch (const CertificateError& err) {
      throw CertificateError(std::string("split: shrink cannot reach the target: ") + err.what());
    }
  }
  return ends[e];
}

Index U2Split::n(Index k) const {
  if (k == 0) throw PreconditionError("n_k is indexed from 1");
  return endpoint(2 * (k - 1));
}

Index U2Split::m(Index k) const {
  if (k == 0) throw PreconditionError("m_k is indexed from 1");
  return endpoint(2 * (k - 1) + 1);
}

std::vector<Fact> U2Split::minimality(Index k) const {
  std::vector<Fact> out;
  auto check = [&](const std::string& what, Index base, Index j) {
    const Rational t = target(k);
    out.push_back(Fact::compare(what + ": criterion at j", j, Rational(pow2(base)) * fa_.ratios.tail_bound(j),
                                Relation::Less, t));
    if (j - 1 > base)
      out.push_back(Fact::compare(what + ": criterion fails at j-1", j - 1,
                                  Rational(pow2(base)) * fa_.ratios.tail_bound(j - 1), Relation::GreaterEq, t));
  };
  check("m_" + std::to_string(k), n(k), m(k));
  check("n_" + std::to_string(k + 1), m(k), n(k + 1));
  return out;
}

IntervalPartition U2Split::partition() const {
  U2Split self = *this;
  return IntervalPartition::from_endpoints("u2small", {{"approx", fa_.name}, {"eps", eps_.to_json()}},
                                           [self](Index e) { return self.endpoint(e); });
}

U2Split u2small_split(const NullApprox& fa, const TailBoundedSeq& eps) { return U2Split(fa, eps); }

BigInt PrefixCylinders::size() const {
  BigInt s = 0;
  for (const auto& [len, w] : words) s += pow2(block_len - len);
  return s;
}

bool PrefixCylinders::contains(const BigInt& code) const {
  for (const auto& [len, w] : words) {
    BigInt low;
    mpz_fdiv_r_2exp(low.get_mpz_t(), code.get_mpz_t(), len);
    if (low == w) return true;
  }
  return false;
}

PrefixCylinders u2small_cylinders(const U2Split& s, Index k, bool prime) {
  // phi: block [n_k, n_{k+1}), words from i in [m_k, n_{k+1})
  // psi: block [m_k, m_{k+1}), words from i in [n_{k+1}, m_{k+1})
  const Index begin = prime ? s.m(k) : s.n(k);
  const Index end = prime ? s.m(k + 1) : s.n(k + 1);
  const Index ilo = prime ? s.n(k + 1) : s.m(k);
  const Index ihi = prime ? s.m(k + 1) : s.n(k + 1);
  PrefixCylinders c;
  c.block_len = end - begin;
  std::map<Index, std::set<BigInt>> by_len;
  for (Index i = ilo; i < ihi; ++i)
    for (const auto& t : s.approx().F(i)) {
      BigInt shifted;
      mpz_fdiv_q_2exp(shifted.get_mpz_t(), t.get_mpz_t(), begin);
      by_len[i - begin].insert(shifted);
    }
  // Keep an antichain: drop words extending a shorter kept word.
  std::map<Index, std::set<BigInt>> kept;
  for (const auto& [len, ws] : by_len)
    for (const auto& w : ws) {
      bool covered = false;
      for (const auto& [l2, ws2] : kept) {
        BigInt low;
        mpz_fdiv_r_2exp(low.get_mpz_t(), w.get_mpz_t(), l2);
        if (ws2.count(low)) {
          covered = true;
          break;
        }
      }
      if (!covered) kept[len].insert(w);
    }
  for (const auto& [len, ws] : kept)
    for (const auto& w : ws) c.words.emplace_back(len, w);
  return c;
}

TwoSmallCoding u2small_coding(const NullApprox& fa, const TailBoundedSeq& eps) {
  U2Split split(fa, eps);
  IntervalPartition L = split.partition();
  EvenOdd eo = derive_even_odd(L);
  auto make = [split](bool prime, const IntervalPartition& P, const std::string& name) {
    BlockSlalom s(
        P,
        [split, prime](Index b) {
          auto cyl = std::make_shared<const PrefixCylinders>(u2small_cylinders(split, b + 1, prime));
          return BlockSet::predicate(cyl->size(), [cyl](const BigInt& c) { return cyl->contains(c); },
                                     std::string(prime ? "psi" : "phi") + ":" + std::to_string(b));
        },
        name);
    return s.with_certificate({"eps_k/k with k = b+1", [](std::uint64_t N) { return Index(N == 0 ? 0 : N - 1); }});
  };
  BlockSlalom phi = make(false, eo.I, "u2small_phi");
  BlockSlalom psi = make(true, eo.I_prime, "u2small_psi");
  return {split, L, eo.I, eo.I_prime, phi, psi};
}

std::vector<Fact> u2small_chain_facts(const TwoSmallCoding& c, Index kmax) {
  std::vector<Fact> out;
  const U2Split& s = c.split;
  const auto& ratios = s.approx().ratios;
  for (Index k = 1; k <= kmax; ++k) {
    auto more = s.minimality(k);
    out.insert(out.end(), more.begin(), more.end());
    for (bool prime : {false, true}) {
      const std::string tag = prime ? "psi" : "phi";
      const BlockSlalom& sl = prime ? c.psi : c.phi;
      const Index base = prime ? s.m(k) : s.n(k);
      const Index ilo = prime ? s.n(k + 1) : s.m(k);
      const Index ihi = prime ? s.m(k + 1) : s.n(k + 1);
      const Index len = sl.block_length(k - 1);
      out.push_back(Fact::compare(tag + ": block spans the split", k, Rational(big(len)), Relation::Equal,
                                  Rational(big((prime ? s.m(k + 1) : s.n(k + 1)) - base))));
      Rational mass_sum = 0;
      for (Index i = ilo; i < ihi; ++i) mass_sum += Rational(big(s.approx().F(i).size())) / Rational(pow2(i));
      const Rational lhs = Rational(sl.at(k - 1).size()) / Rational(pow2(len));
      const Rational mid = Rational(pow2(base)) * mass_sum;
      const Rational tail = Rational(pow2(base)) * ratios.tail_bound(ilo);
      out.push_back(Fact::compare(tag + ": ratio <= 2^base * sum |F_i|/2^i", k, lhs, Relation::LessEq, mid));
      out.push_back(Fact::compare(tag + ": 2^base * sum <= 2^base * tail", k, mid, Relation::LessEq, tail));
      out.push_back(Fact::compare(tag + ": 2^base * tail < eps_k/k", k, tail, Relation::Less, s.target(k)));
      if (len <= 12)
        out.push_back(Fact::compare(tag + ": size equals enumeration", k, Rational(sl.at(k - 1).size()),
                                    Relation::Equal, Rational(brute_force_count(sl.at(k - 1), len))));
    }
  }
  return out;
}

Coverage classify_coverage(const TwoSmallCoding& c, const Point& x, Index kmax) {
  Coverage cov;
  const U2Split& s = c.split;
  const Index top = s.n(kmax + 1);
  std::set<Index> phi_k, psi_k;
  for (Index n = 0; n < top; ++n) {
    auto words = s.approx().F(n);
    if (std::find(words.begin(), words.end(), prefix_word(x, n)) == words.end()) continue;
    cov.approx_hits.push_back(n);
    if (n < s.m(1)) {
      cov.unclassified.push_back(n);
      continue;
    }
    Index k = 1;
    while (s.m(k + 1) <= n) ++k;
    // now m_k <= n < m_{k+1}
    if (n < s.n(k + 1)) {
      phi_k.insert(k);
      cov.facts.push_back(Fact::claim("hit in [m_k, n_{k+1}) gives a phi hit", k,
                                      c.phi.at(k - 1).contains(restrict(x, c.I, k - 1).code)));
    } else {
      psi_k.insert(k);
      cov.facts.push_back(Fact::claim("hit in [n_{k+1}, m_{k+1}) gives a psi hit", k,
                                      c.psi.at(k - 1).contains(restrict(x, c.I_prime, k - 1).code)));
    }
  }
  cov.phi_blocks.assign(phi_k.begin(), phi_k.end());
  cov.psi_blocks.assign(psi_k.begin(), psi_k.end());
  return cov;
}

json u2small_witness(const TwoSmallCoding& c, Index kmax) {
  json ks = json::array();
  for (Index k = 1; k <= kmax; ++k)
    ks.push_back({{"k", k},
                  {"n_k", c.split.n(k)},
                  {"m_k", c.split.m(k)},
                  {"phi_size", to_string(c.phi.at(k - 1).size())},
                  {"psi_size", to_string(c.psi.at(k - 1).size())}});
  return {{"approx", c.split.approx().name}, {"blocks", ks}};
}

}  // namespace slalom
