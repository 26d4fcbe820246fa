#include <algorithm>

#include "slalom/errors.hpp"
#include "slalom/random.hpp"
#include "slalom/suites.hpp"
#include "slalom/tukey.hpp"
#include "slalom/twosmall.hpp"

namespace slalom {

namespace {

IntervalPartition short_blocks(std::uint64_t seed) {
  return IntervalPartition::from_lengths("seeded-lengths", {{"seed", seed}, {"lo", 1}, {"hi", kMaxCodedBits}},
                                         [seed](Index n) { return 1 + splitmix64(seed ^ (n * 0x9e37)) % kMaxCodedBits; });
}

std::vector<BigInt> random_subset(Rng& rng, Index len, unsigned percent) {
  std::vector<BigInt> out;
  for (Index c = 0; c < (Index(1) << len); ++c)
    if (rng.percent(percent)) out.push_back(big(c));
  return out;
}

void coding(const SuiteSpec& spec, Report& r) {
  Index roundtrips = 0, below = 0;
  for (Index inst = 0; inst < spec.instances; ++inst) {
    Rng rng(spec.seed, inst);
    IntervalPartition I = short_blocks(rng.next());
    const Index count = rng.between(1, 3);
    std::vector<Index> ends{rng.between(0, 3)};
    for (Index n = 0; n < count; ++n) ends.push_back(ends.back() + rng.between(1, 3));
    auto a = [ends](Index n) { return ends.at(n); };
    std::vector<BlockTuple> f(count);
    for (Index n = 0; n < count; ++n)
      for (Index i = ends[n]; i < ends[n + 1]; ++i) f[n].push_back(random_subset(rng, I.length(i), rng.between(0, 100)));
    std::vector<BigInt> codes = code_phi(I, a, [&f](Index n) { return f[n]; }, count);
    std::vector<BlockTuple> back = decode_phi(I, a, codes);
    bool same = back == f;
    bool in_range = true;
    for (Index n = 0; n < count; ++n) in_range = in_range && codes[n] >= 0 && codes[n] < kappa(I, ends[n], ends[n + 1]);
    roundtrips += same;
    below += in_range;
    // only failures get their own line; 10^4 identical passes say nothing
    if (!same || !in_range) {
      r.instance("coding#" + std::to_string(inst));
      r.fact(Fact::claim("decode(code(f)) = f", inst, same));
      r.fact(Fact::claim("codes below kappa", inst, in_range));
    }
  }
  r.instance("all");
  r.fact(Fact::compare("roundtrips", spec.instances, Rational(big(roundtrips)), Relation::Equal,
                       Rational(big(spec.instances))));
  r.fact(Fact::compare("codes below kappa", spec.instances, Rational(big(below)), Relation::Equal,
                       Rational(big(spec.instances))));
  r.count("coded functions", spec.instances);
}

// Least n0 with N|phi(n)| < mass(n) for every n >= n0, for phi empty from E on.
VanishingCertificate scanned_certificate(const BlockSlalom& phi, const TailBoundedSeq& eps, Index E) {
  return {"scanned tail", [phi, eps, E](std::uint64_t N) {
            Index n0 = E;
            while (n0 > 0 && Rational(big(N) * phi.at(n0 - 1).size()) < block_mass(phi.partition(), eps, n0 - 1)) --n0;
            return n0;
          }};
}

void hardtukey(const SuiteSpec& spec, Report& r) {
  const Index groups = spec.horizon;
  const Index E = 28;
  TailBoundedSeq eps = TailBoundedSeq::geometric(Rational(pow2(24)), ratio(1, 2));
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("pipeline#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    IntervalPartition I = short_blocks(rng.next());
    std::vector<BlockSet> blocks;
    for (Index n = 0; n < E; ++n) {
      std::vector<BigInt> codes = random_subset(rng, I.length(n), 30);
      if (codes.size() > 3) codes.resize(3);
      blocks.push_back(BlockSet::of(codes));
    }
    BlockSlalom phi = BlockSlalom::from_blocks(I, blocks);
    phi = phi.with_certificate(scanned_certificate(phi, eps, E));
    const auto& cert = *phi.certificate();

    std::vector<Index> kx;
    for (Index n = 0; n <= groups; ++n) {
      const Index t = cert.threshold((n + 1) * (n + 1) * (n + 1));
      kx.push_back(n == 0 ? t : std::max(kx.back() + 1, t));
    }
    const unsigned variant = inst % 4;  // 0, 3: hypotheses hold; 1: code missing; 2: b too small
    std::vector<Index> bv;
    for (Index n = 0; n <= groups; ++n) {
      Index v = variant == 2 ? n : kx[n];
      if (!bv.empty()) v = std::max(v, bv.back() + 1);
      bv.push_back(v + (variant == 2 ? 0 : rng.between(0, 1)));
    }
    auto b = [bv](Index n) { return bv.at(n); };
    std::vector<std::vector<BigInt>> columns;
    for (Index n = 0; n < groups; ++n) {
      BlockTuple own;
      for (Index j = bv[n]; j < bv[n + 1]; ++j) own.push_back(phi.at(j).members(I.length(j)));
      std::vector<BigInt> col;
      if (variant != 1) col.push_back(code_tuple(I, bv[n], own));
      const BigInt kap = kappa(I, bv[n], bv[n + 1]);
      const Index extra = rng.between(0, (n + 1) * (n + 1) - 1);
      for (Index e = 0; e < extra && col.size() < (n + 1) * (n + 1); ++e) {
        BigInt K = rng.below(kap);
        if (std::find(col.begin(), col.end(), K) == col.end()) col.push_back(K);
      }
      if (variant == 1) {
        BigInt own_code = code_tuple(I, bv[n], own);
        col.erase(std::remove(col.begin(), col.end(), own_code), col.end());
      }
      std::sort(col.begin(), col.end());
      columns.push_back(col);
    }
    WidthSlalom S = WidthSlalom::from_columns("S", [](Index n) -> BigInt { return big(n + 1) * big(n + 1); }, columns);
    r.facts(check_width(S, groups));
    PipelineResult p = hardtukey_pipeline(phi, eps, b, S, groups);
    r.facts(p.facts);
    const bool built_valid = variant == 0 || variant == 3;
    if (built_valid) r.fact(Fact::claim("hypotheses hold on the built instance", inst, !p.vacuous(), p.vacuous_reason));
    else r.count("vacuous", p.vacuous());
    r.count(p.vacuous() ? "vacuous instances" : "connected instances");
    r.note({{"variant", variant}, {"vacuous", p.vacuous()}, {"reason", p.vacuous_reason}, {"b", bv}, {"k^X", kx}});
  }
}

void alc(const SuiteSpec& spec, Report& r) {
  IntervalPartition I = IntervalPartition::arithmetic(2, 2);
  TailBoundedSeq eps = TailBoundedSeq::geometric(1, ratio(1, 2));
  DivergenceCertificate div = divergence_from_lower_bound("2^{n+2}", [](Index n) { return Rational(pow2(n + 2)); });
  const Index h = spec.horizon;
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("alc#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    AlcParams p = alc_params(I, eps, h);
    r.facts(p.facts);
    const Index c = rng.between(1, 3);
    BlockSlalom phi = BlockSlalom::random_sparse(I, rng.next(), 1, c).with_certificate(vanishing_from_size_bound(c, div));
    WidthSlalom t = trim(phi, eps);
    r.facts(check_width(t, h));
    std::vector<BigInt> s;
    for (Index n = 0; n < h; ++n) {
      if (n % 2 == 0) s.push_back(*phi.at(n).first_member(I.length(n)));
      else s.push_back(rng.code(I.length(n)));
    }
    Point x = concat(I, s);
    const Index start = phi.certificate()->threshold(1);
    bool inverse = true, contract = true;
    for (Index n = 0; n < h; ++n) {
      inverse = inverse && restrict(x, I, n).code == s[n];
      if (n >= start) contract = contract && phi.at(n).contains(restrict(x, I, n).code) == t.at(n).contains(s[n]);
    }
    r.fact(Fact::claim("restrict(concat(s), I, n) = s(n)", inst, inverse));
    r.fact(Fact::claim("x hits phi exactly where s hits trim(phi)", inst, contract));
    auto sx = [s](Index n) { return n < s.size() ? s[n] : BigInt(0); };
    r.verdict("s in^inf trim(phi)", inst, lc_alc_eval(sx, t, LcMode::InfinitelyOften, h), Truth::Unknown);
  }
}

void partition_b(const SuiteSpec& spec, Report& r) {
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("partition-from-b#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    const std::uint64_t seed = rng.next();
    auto b = [seed](Index n) -> BigInt { return pow2(n + 3) + BigInt(splitmix64(seed ^ n) % (Index(1) << std::min<Index>(n + 3, 62))); };
    auto h = [seed](Index n) { return big(1 + splitmix64(seed + n) % 3); };
    PartitionFromB p = partition_from_b(b, h, TailBoundedSeq::geometric(ratio(3, 8), ratio(1, 2)), spec.horizon);
    r.facts(p.facts);
    BlockSlalom phi(
        p.I, [h, seed, I = p.I](Index n) {
          Rng g(seed, n);
          std::vector<BigInt> codes;
          const Index k = to_index(h(n));
          while (codes.size() < k) {
            BigInt c = g.code(I.length(n));
            if (std::find(codes.begin(), codes.end(), c) == codes.end()) codes.push_back(c);
          }
          std::sort(codes.begin(), codes.end());
          return BlockSet::of(codes);
        },
        "width h");
    r.facts(check_vanishing(phi, p.eps, p.width_certificate, 8, spec.horizon).facts);
  }
}

void na_params(const SuiteSpec& spec, Report& r) {
  const Index h = spec.horizon;
  r.instance("params");
  NaParams p = na_to_E_params(h);
  r.facts(p.facts);
  r.fact(Fact::claim("psi_minus is the identity", 0, psi_minus(Point::random(spec.seed)).same_as(Point::random(spec.seed))));

  r.instance("na-witness");
  IntervalPartition I = p.I;
  BlockSlalom first(I, [I](Index n) { return BlockSet::initial(std::min(big(n), pow2(I.length(n)))); }, "first n codes");
  NaReport zeros = na_witness_check(first, {{Point::zeros(), MembershipCertificate{"0 in phi(n) for n >= 1", 1}}}, h);
  r.verdict("zeros stay in the first n codes", 0, zeros.overall, Truth::Holds);
  NaReport none = na_witness_check(BlockSlalom::empty(I), {{Point::zeros(), {}}, {Point::random(spec.seed), {}}}, h);
  r.verdict("empty phi catches nothing", 0, none.overall, Truth::Fails);
  for (Index inst = 0; inst < spec.instances; ++inst) {
    Rng rng(spec.seed, inst);
    BlockSlalom phi(I, [seed = rng.next(), I](Index n) {
      Rng g(seed, n);
      std::vector<BigInt> codes;
      for (Index k = 0; k < n / 2; ++k) codes.push_back(g.code(I.length(n)));
      std::sort(codes.begin(), codes.end());
      codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
      return BlockSet::of(codes);
    }, "random sparse");
    NaReport rep = na_witness_check(phi, {{Point::random(rng.next()), {}}}, h);
    r.fact(Fact::claim("random sample is not certified", inst, !rep.overall.is_holds(), rep.overall.to_json().dump()));
  }
}

void u2small(const SuiteSpec& spec, Report& r) {
  const Index kmax = spec.horizon;
  TailBoundedSeq eps = TailBoundedSeq::geometric(1, ratio(1, 2));
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("u2small#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    Point x = Point::random(rng.next());
    NullApprox fa = NullApprox::seeded(x, rng.next(), rng.between(0, 3));
    TwoSmallCoding c = u2small_coding(fa, eps);
    r.facts(fa.validate(64));
    r.facts(u2small_chain_facts(c, kmax));
    Coverage cov = classify_coverage(c, x, kmax);
    r.facts(cov.facts);
    bool classified = true;
    for (Index n : cov.unclassified) classified = classified && n < c.split.m(1);
    r.fact(Fact::claim("every hit past m_1 classified", inst, classified));
    r.fact(Fact::claim("x lands in phi or psi on the window", inst, !cov.phi_blocks.empty() || !cov.psi_blocks.empty()));
    const bool phi_side = cov.phi_blocks.size() >= cov.psi_blocks.size();
    r.note({{"n_{kmax+1}", c.split.n(kmax + 1)}, {"approx hits", cov.approx_hits.size()},
            {"phi blocks", cov.phi_blocks.size()}, {"psi blocks", cov.psi_blocks.size()},
            {"side", phi_side ? "[phi]_inf" : "[psi]_inf"}});
    Point y = Point::random(rng.next());
    Coverage other = classify_coverage(c, y, kmax);
    r.facts(other.facts);
  }
}

}  // namespace

void register_tukey_suites(std::map<std::string, SuiteInfo>& reg) {
  reg["coding"] = {"coding of block-function tuples: roundtrip and range", 0, 10000, coding};
  reg["hardtukey"] = {"the psi_{b,S} pipeline with adversarial instances", 6, 40, hardtukey};
  reg["alc"] = {"b, h, concat and trim", 24, 10, alc};
  reg["partition-from-b"] = {"partition and eps from (b, h)", 24, 20, partition_b};
  reg["na-params"] = {"null-additive parameters and witness checks", 32, 10, na_params};
  reg["u2small"] = {"2-small coding of one null approximation", 30, 10, u2small};
}

}  // namespace slalom
