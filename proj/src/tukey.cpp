#include "slalom/tukey.hpp"

#include <algorithm>
#include <map>

#include "slalom/errors.hpp"

namespace slalom {

WidthSlalom WidthSlalom::from_columns(std::string name, std::function<BigInt(Index)> width,
                                      std::vector<std::vector<BigInt>> columns) {
  auto cols = std::make_shared<const std::vector<std::vector<BigInt>>>(std::move(columns));
  WidthSlalom s;
  s.name = std::move(name);
  s.base = [](Index) -> std::optional<BigInt> { return std::nullopt; };
  s.width = std::move(width);
  s.at = [cols](Index n) { return n < cols->size() ? BlockSet::of((*cols)[n]) : BlockSet(); };
  return s;
}

std::vector<Fact> check_width(const WidthSlalom& s, Index window) {
  std::vector<Fact> out;
  for (Index n = 0; n < window; ++n) {
    BlockSet col = s.at(n);
    out.push_back(Fact::compare("width respected", n, Rational(col.size()), Relation::LessEq, Rational(s.width(n))));
    if (auto b = s.base(n); b && col.code_bound())
      out.push_back(Fact::compare("column values below b(n)", n, Rational(*col.code_bound()), Relation::LessEq,
                                  Rational(*b)));
  }
  return out;
}

BigInt lambda(Index len) {
  if (len > kMaxCodedBits) throw PreconditionError("coding refuses blocks of more than 4 bits");
  return pow2(Index(1) << len);
}

BigInt subset_index(const std::vector<BigInt>& codes, Index len) {
  if (len > kMaxCodedBits) throw PreconditionError("coding refuses blocks of more than 4 bits");
  BigInt mask = 0;
  for (const auto& c : codes) {
    if (c < 0 || c >= pow2(len)) throw PreconditionError("code " + to_string(c) + " outside its block");
    mpz_setbit(mask.get_mpz_t(), c.get_ui());
  }
  return mask;
}

std::vector<BigInt> subset_from_index(const BigInt& index, Index len) {
  if (index < 0 || index >= lambda(len)) throw PreconditionError("subset index out of range");
  std::vector<BigInt> out;
  for (Index c = 0; c < (Index(1) << len); ++c)
    if (mpz_tstbit(index.get_mpz_t(), c)) out.push_back(big(c));
  return out;
}

BigInt kappa(const IntervalPartition& I, Index lo, Index hi) {
  BigInt k = 1;
  for (Index i = lo; i < hi; ++i) k *= lambda(I.length(i));
  return k;
}

BigInt code_tuple(const IntervalPartition& I, Index lo, const BlockTuple& t) {
  BigInt K = 0;
  for (Index i = 0; i < t.size(); ++i) {
    const Index len = I.length(lo + i);
    K = K * lambda(len) + subset_index(t[i], len);
  }
  return K;
}

BlockTuple decode_tuple(const IntervalPartition& I, Index lo, Index hi, const BigInt& K) {
  if (K < 0 || K >= kappa(I, lo, hi)) throw PreconditionError("code outside kappa");
  BlockTuple out(hi - lo);
  BigInt rest = K;
  for (Index i = hi; i-- > lo;) {
    const BigInt l = lambda(I.length(i));
    BigInt digit = rest % l;
    rest /= l;
    out[i - lo] = subset_from_index(digit, I.length(i));
  }
  return out;
}

std::vector<BigInt> code_phi(const IntervalPartition& I, const std::function<Index(Index)>& a,
                             const std::function<BlockTuple(Index)>& f, Index count) {
  std::vector<BigInt> out;
  for (Index n = 0; n < count; ++n) {
    BlockTuple t = f(n);
    if (t.size() != a(n + 1) - a(n)) throw PreconditionError("tuple length disagrees with the grouping");
    out.push_back(code_tuple(I, a(n), t));
  }
  return out;
}

std::vector<BlockTuple> decode_phi(const IntervalPartition& I, const std::function<Index(Index)>& a,
                                   const std::vector<BigInt>& codes) {
  std::vector<BlockTuple> out;
  for (Index n = 0; n < codes.size(); ++n) out.push_back(decode_tuple(I, a(n), a(n + 1), codes[n]));
  return out;
}

AlcParams alc_params(const IntervalPartition& I, const TailBoundedSeq& eps, Index window) {
  AlcParams p;
  p.b = [I](Index n) { return pow2(I.length(n)); };
  p.h = [I, eps](Index n) { return floor_of(Rational(pow2(I.length(n))) * eps.term(n)); };
  for (Index n = 0; n < window; ++n)
    p.facts.push_back(Fact::compare("h(n)/b(n) <= eps_n", n, Rational(p.h(n)) / Rational(p.b(n)), Relation::LessEq,
                                    eps.term(n)));
  return p;
}

Point concat(const IntervalPartition& I, const std::vector<BigInt>& s) {
  PointBuilder pb;
  for (Index n = 0; n < s.size(); ++n) {
    if (s[n] < 0 || s[n] >= pow2(I.length(n))) throw PreconditionError("entry outside its column");
    pb.set_block(I.block(n), s[n]);
  }
  return pb.build();
}

WidthSlalom trim(const BlockSlalom& phi, const TailBoundedSeq& eps) {
  if (!phi.certificate()) throw PreconditionError("trim needs a vanishing certificate");
  const Index start = phi.certificate()->threshold(1);
  WidthSlalom s;
  s.name = "trim(" + phi.name() + ")";
  s.base = [phi](Index n) -> std::optional<BigInt> { return pow2(phi.block_length(n)); };
  s.width = [phi, eps](Index n) { return floor_of(Rational(pow2(phi.block_length(n))) * eps.term(n)); };
  s.at = [phi, start](Index n) { return n < start ? BlockSet() : phi.at(n); };
  return s;
}

PartitionFromB partition_from_b(std::function<BigInt(Index)> b, std::function<BigInt(Index)> h,
                                const TailBoundedSeq& ratios, Index window) {
  auto len = [b](Index n) {
    BigInt bn = b(n);
    if (bn < 2) throw PreconditionError("b(" + std::to_string(n) + ") < 2");
    return floor_log2(bn);
  };
  IntervalPartition I = IntervalPartition::from_lengths("log2_of_b", json::object(), len);
  auto b_prime = [len](Index n) { return pow2(len(n)); };

  // h/b' <= 2 h/b, so twice the given certificate covers it.
  TailBoundedSeq::Generator g;
  g.family = "twice:" + ratios.family();
  g.term = [ratios, h, b_prime](Index n) -> Rational { return Rational(h(n)) / Rational(b_prime(n)); };
  g.tail_bound = [ratios](Index k) -> Rational { return 2 * ratios.tail_bound(k); };
  g.shrink = [ratios](const Rational& r) { return ratios.shrink(r / 2); };
  g.positive_from = 0;
  TailBoundedSeq scaled = TailBoundedSeq::custom(std::move(g));
  DeltaWitness delta = build_delta(scaled);

  TailBoundedSeq::Generator e;
  e.family = "delta_times_h_over_b";
  e.term = [h, b_prime, delta](Index n) -> Rational {
    BigInt hn = h(n);
    if (hn < 1) throw PreconditionError("h(" + std::to_string(n) + ") < 1 would make eps vanish");
    return Rational(hn) / Rational(b_prime(n)) * Rational(delta.value(n));
  };
  const Rational s_bound = delta.s_bound();
  e.tail_bound = [delta, s_bound](Index k) -> Rational { return s_bound * pow2q(1 - std::int64_t(delta.level(k))); };
  e.shrink = [delta, s_bound](const Rational& r) -> std::optional<Index> {
    if (r <= 0) return std::nullopt;
    Index i = 0;
    while (s_bound * pow2q(1 - std::int64_t(i)) >= r) ++i;
    return delta.breakpoint(i);
  };
  e.positive_from = 0;
  TailBoundedSeq eps = TailBoundedSeq::custom(std::move(e));

  VanishingCertificate cert{"width h: 1/delta_n",
                            [delta](std::uint64_t N) { return delta.breakpoint(ceil_log2(big(N + 1))); }};
  PartitionFromB out{I, eps, b_prime, delta, cert, {}};
  for (Index n = 0; n < window; ++n) {
    const BigInt bn = b(n), bp = b_prime(n);
    out.facts.push_back(Fact::compare("b'(n) <= b(n)", n, Rational(bp), Relation::LessEq, Rational(bn)));
    out.facts.push_back(Fact::compare("b(n) < 2 b'(n)", n, Rational(bn), Relation::Less, Rational(2 * bp)));
    out.facts.push_back(Fact::compare("h/b' <= 2 h/b", n, Rational(h(n)) / Rational(bp), Relation::LessEq,
                                      2 * Rational(h(n)) / Rational(bn)));
    out.facts.push_back(Fact::compare("h/b within the certified ratios", n, Rational(h(n)) / Rational(bn),
                                      Relation::LessEq, ratios.term(n)));
    out.facts.push_back(Fact::compare("h(n)/(b'(n) eps_n) = 1/delta_n", n,
                                      Rational(h(n)) / (Rational(bp) * eps.term(n)), Relation::Equal,
                                      Rational(1) / Rational(delta.value(n))));
  }
  return out;
}

Verdict lc_alc_eval(const std::function<BigInt(Index)>& x, const WidthSlalom& phi, LcMode mode, Index horizon) {
  if (phi.kind == WidthSlalom::Kind::Full) return Verdict::holds("full columns");
  if (phi.kind == WidthSlalom::Kind::Empty) return Verdict::fails({0}, "empty columns");
  std::vector<Index> hit, miss;
  for (Index n = 0; n < horizon; ++n) (phi.at(n).contains(x(n)) ? hit : miss).push_back(n);
  const std::string stats = std::to_string(hit.size()) + " hits, " + std::to_string(miss.size()) + " misses";
  std::vector<Index> late;
  const auto& tail_src = mode == LcMode::EverywhereTail ? miss : hit;
  for (Index n : tail_src)
    if (n >= horizon / 2) late.push_back(n);
  if (mode == LcMode::EverywhereTail && !late.empty())
    return Verdict::fails(late, "misses in the upper half of the window; " + stats);
  if (mode == LcMode::InfinitelyOften && late.empty() && horizon > 0)
    return Verdict::fails({horizon / 2}, "no hit in the upper half of the window; " + stats);
  return Verdict::unknown(horizon, "consistent up to horizon; " + stats);
}

json PipelineResult::trace() const {
  json cols = json::array();
  for (const auto& g : groups) {
    json kept = json::array(), dropped = json::array();
    for (const auto& c : g.kept) kept.push_back(to_string(c));
    for (const auto& c : g.dropped) dropped.push_back(to_string(c));
    cols.push_back({{"n", g.n}, {"blocks", {g.lo, g.hi}}, {"code", to_string(g.code)}, {"k", g.k},
                    {"code_in_S", g.code_in_s}, {"kept", kept}, {"dropped", dropped}});
  }
  return {{"columns", cols}, {"dominated", dominated}, {"captured", captured},
          {"vacuous", vacuous()}, {"reason", vacuous_reason}};
}

PipelineResult hardtukey_pipeline(const BlockSlalom& phi, const TailBoundedSeq& eps,
                                  const std::function<Index(Index)>& b, const WidthSlalom& S, Index groups) {
  if (!phi.certificate()) throw PreconditionError("pipeline needs a vanishing certificate for phi");
  const IntervalPartition& I = phi.partition();
  const auto& cert = *phi.certificate();
  auto blocks = std::make_shared<std::map<Index, BlockSet>>();
  PipelineResult r{BlockSlalom::empty(I), {}, true, true, {}, {}};
  Index k = 0;
  std::vector<std::string> reasons;
  for (Index n = 0; n < groups; ++n) {
    PipelineGroup g;
    g.n = n;
    g.lo = b(n);
    g.hi = b(n + 1);
    if (g.hi <= g.lo) throw PreconditionError("b must be increasing");
    const BigInt cube = big(n + 1) * big(n + 1) * big(n + 1);
    const std::uint64_t level = (n + 1) * (n + 1) * (n + 1);
    g.k = k = n == 0 ? cert.threshold(level) : std::max(k + 1, cert.threshold(level));
    BlockTuple own;
    for (Index j = g.lo; j < g.hi; ++j) own.push_back(phi.at(j).members(I.length(j)));
    g.code = code_tuple(I, g.lo, own);
    const BigInt kap = kappa(I, g.lo, g.hi);
    const BlockSet col = S.at(n);
    g.code_in_s = col.contains(g.code);
    if (g.k > g.lo && r.dominated) {
      r.dominated = false;
      reasons.push_back("k^X_" + std::to_string(n) + " = " + std::to_string(g.k) + " > b(n) = " + std::to_string(g.lo));
    }
    if (!g.code_in_s && r.captured) {
      r.captured = false;
      reasons.push_back("code of F^X(b)(" + std::to_string(n) + ") not in S(n)");
    }
    std::vector<BlockSet> unions(g.hi - g.lo);
    for (const auto& K : col.members(kEnumerableBits)) {
      if (K >= kap) {
        g.dropped.push_back(K);
        continue;
      }
      BlockTuple t = decode_tuple(I, g.lo, g.hi, K);
      bool small = true;
      for (Index j = g.lo; j < g.hi && small; ++j)
        small = Rational(cube * big(t[j - g.lo].size())) < block_mass(I, eps, j);
      if (!small) {
        g.dropped.push_back(K);
        continue;
      }
      g.kept.push_back(K);
      for (Index j = g.lo; j < g.hi; ++j)
        unions[j - g.lo] = unite(unions[j - g.lo], BlockSet::of(t[j - g.lo]), I.length(j));
    }
    for (Index j = g.lo; j < g.hi; ++j) {
      const BlockSet& u = unions[j - g.lo];
      (*blocks)[j] = u;
      const Rational ratio = Rational(u.size()) / Rational(pow2(I.length(j)));
      const Rational e = eps.term(j);
      r.facts.push_back(Fact::compare("|psi(j)|/2^|I_j| < eps_j/(n+1)", j, ratio, Relation::Less, e / Rational(big(n + 1))));
      if (!g.kept.empty())
        r.facts.push_back(Fact::compare("|psi(j)|/2^|I_j| < |Sbar(n)| eps_j/(n+1)^3", j, ratio, Relation::Less,
                                        Rational(big(g.kept.size())) * e / Rational(cube)));
      r.facts.push_back(Fact::compare("|Sbar(n)| <= |S(n)|", j, Rational(big(g.kept.size())), Relation::LessEq,
                                      Rational(col.size())));
      r.facts.push_back(Fact::compare("|S(n)| <= (n+1)^2", j, Rational(col.size()), Relation::LessEq,
                                      Rational(big(n + 1) * big(n + 1))));
      r.facts.push_back(Fact::compare("(n+1)^2 eps_j/(n+1)^3 <= eps_j/(n+1)", j,
                                      Rational(big(n + 1) * big(n + 1)) * e / Rational(cube), Relation::LessEq,
                                      e / Rational(big(n + 1))));
    }
    r.groups.push_back(std::move(g));
  }
  r.vacuous_reason = reasons.empty() ? "" : reasons.front();
  r.psi = BlockSlalom(
      I,
      [blocks](Index j) {
        auto it = blocks->find(j);
        return it == blocks->end() ? BlockSet() : it->second;
      },
      "psi_{b,S}");
  if (!r.vacuous()) {
    for (const auto& g : r.groups)
      for (Index j = g.lo; j < g.hi; ++j)
        r.facts.push_back(Fact::claim("phi(j) inside psi_{b,S}(j)", j,
                                      !member_outside(phi.at(j), r.psi.at(j), I.length(j))));
  }
  return r;
}

NaReport na_witness_check(const BlockSlalom& phi, const std::vector<NaSample>& samples, Index horizon) {
  for (Index n = 0; n < horizon; ++n)
    if (phi.at(n).size() > big(n))
      throw PreconditionError("width violation: |phi(" + std::to_string(n) + ")| = " + to_string(phi.at(n).size()) +
                              " > " + std::to_string(n));
  NaReport rep;
  bool all_hold = true;
  std::vector<Index> failing;
  for (Index i = 0; i < samples.size(); ++i) {
    Verdict v = ae_verdict(samples[i].x, phi, horizon, samples[i].cert);
    all_hold = all_hold && v.is_holds();
    if (v.is_fails()) failing.push_back(i);
    rep.per_point.push_back(std::move(v));
  }
  if (!failing.empty())
    rep.overall = Verdict::fails(failing, "sample points escaping phi in the upper half of the window");
  else if (all_hold && !samples.empty())
    rep.overall = Verdict::holds("every sample certified");
  else
    rep.overall = Verdict::unknown(horizon, "consistent up to horizon");
  return rep;
}

Index na_block_length(Index n) {
  if (n == 0) return 1;
  return n + ceil_log2(big(n) * big(n));
}

NaParams na_to_E_params(Index horizon) {
  IntervalPartition I = IntervalPartition::from_lengths("na_lengths", json::object(), na_block_length);
  TailBoundedSeq eps = TailBoundedSeq::geometric(1, Rational(1, 2));
  DivergenceCertificate div{"ceil(sqrt M)", [](const Rational& M) -> Index {
                              BigInt m = ceil_of(M), r;
                              if (m < 1) return 1;
                              mpz_sqrt(r.get_mpz_t(), m.get_mpz_t());
                              if (r * r < m) ++r;
                              return std::max<Index>(1, to_index(r));
                            }, {}};
  NaParams p{I, eps, div, {}};
  for (Index n = 1; n < horizon; ++n) {
    const Rational mass = block_mass(I, eps, n);
    p.facts.push_back(Fact::compare("2^|I_n| >= n^2 2^n", n, Rational(pow2(I.length(n))), Relation::GreaterEq,
                                    Rational(big(n) * big(n) * pow2(n))));
    p.facts.push_back(Fact::compare("1/(2^|I_n| eps_n) <= 1/n^2", n, Rational(1) / mass, Relation::LessEq,
                                    Rational(1, n * n)));
    p.facts.push_back(Fact::compare("width-n chain n/(2^|I_n| eps_n) <= 1/n", n, Rational(big(n)) / mass,
                                    Relation::LessEq, Rational(1, n)));
  }
  auto check = check_divergence(I, eps, div, 16);
  p.facts.insert(p.facts.end(), check.facts.begin(), check.facts.end());
  return p;
}

}  // namespace slalom
