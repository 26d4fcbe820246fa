#include <algorithm>

#include "slalom/constructors.hpp"
#include "slalom/errors.hpp"
#include "slalom/forcing.hpp"
#include "slalom/random.hpp"
#include "slalom/suites.hpp"

namespace slalom {

namespace {

// |I_n| = 2n+2 with eps_n = 2^-(n+1): block mass 2^{n+1}.
struct MassPair {
  IntervalPartition I = IntervalPartition::arithmetic(2, 2);
  TailBoundedSeq eps = TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2));
  DivergenceCertificate div = divergence_from_lower_bound("2^{n+1}", [](Index n) { return Rational(pow2(n + 1)); });
};

// Block lengths drawn from [lo, hi], fixed by the seed.
IntervalPartition seeded_lengths(std::uint64_t seed, Index lo, Index hi) {
  return IntervalPartition::from_lengths("seeded-lengths", {{"seed", seed}, {"lo", lo}, {"hi", hi}},
                                         [seed, lo, hi](Index n) { return lo + splitmix64(seed ^ (n * 0x9e37)) % (hi - lo + 1); });
}

// |I_0| = 1, |I_n| = n after that.
IntervalPartition identity_lengths() {
  return IntervalPartition::from_lengths("identity-lengths", json::object(), [](Index n) { return n == 0 ? 1 : n; });
}

void merge_claim(const SuiteSpec& spec, Report& r) {
  MassPair mp;
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("merge#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    const Index count = 1 + inst % 8;
    std::vector<BlockSlalom> phis;
    for (Index i = 0; i < count; ++i) {
      const Index c = rng.between(1, 4);
      phis.push_back(BlockSlalom::random_sparse(mp.I, rng.next(), 0, c)
                         .with_certificate(vanishing_from_size_bound(c, mp.div)));
    }
    MergeResult m = merge_slaloms(phis, mp.eps, spec.horizon);
    r.facts(m.facts);
    std::vector<Index> ks;
    for (Index n = 0; n <= count + 1; ++n) ks.push_back(m.group_start(n));
    r.note({{"slaloms", count}, {"k", ks}});
    // the certificate k_{N+1} checked directly
    r.facts(check_vanishing(m.phi, mp.eps, *m.phi.certificate(), 8, spec.horizon).facts);
  }
}

void contributivity(const SuiteSpec& spec, Report& r) {
  const Index h = spec.horizon;
  {
    r.instance("|I_n|=n, eps=2^-n");
    IntervalPartition I = identity_lengths();
    TailBoundedSeq eps = TailBoundedSeq::geometric(1, ratio(1, 2));
    ContributivityEvidence ev;
    ev.bounded = BoundednessCertificate{"2^|I_n| eps_n <= 2", 2};
    r.facts(check_boundedness(I, eps, *ev.bounded, h).facts);
    r.verdict("not S*-contributive", 0, sstar_contributive(I, eps, h, ev), Truth::Fails);
    r.verdict("not E-contributive", 0, e_contributive(I, eps, h, ev), Truth::Fails);
  }
  {
    r.instance("|I_n|=n, eps'=n 2^-n");
    IntervalPartition I = identity_lengths();
    TailBoundedSeq eps = TailBoundedSeq::linear_geometric(1, ratio(1, 2));
    ContributivityEvidence ev;
    ev.divergence = divergence_from_lower_bound("mass = n", [](Index n) { return Rational(big(n)); });
    r.facts(check_divergence(I, eps, *ev.divergence, 16).facts);
    r.verdict("S*-contributive", 0, sstar_contributive(I, eps, h, ev), Truth::Holds);
    r.verdict("E-contributive", 0, e_contributive(I, eps, h, ev), Truth::Holds);
  }
  {
    r.instance("|I_k|=2(k+1), eps=2^-(k+1)");
    MassPair mp;
    ContributivityEvidence ev;
    DivergenceCertificate d = forcing_example_space().divergence;
    ev.divergence = d;
    for (std::uint64_t M : sample_levels()) {
      Index brute = 0;
      while (pow2(brute + 1) < big(M)) ++brute;
      r.fact(Fact::compare("threshold(M) = min{k : 2^{k+1} >= M}", M, Rational(big(d.threshold(Rational(big(M))))),
                           Relation::Equal, Rational(big(brute))));
    }
    r.facts(check_divergence(mp.I, mp.eps, d, 16).facts);
    r.verdict("S*-contributive", 0, sstar_contributive(mp.I, mp.eps, h, ev), Truth::Holds);
    r.verdict("E-contributive", 0, e_contributive(mp.I, mp.eps, h, ev), Truth::Holds);
  }
}

void prop_210b(const SuiteSpec& spec, Report& r) {
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("pad#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    const Index b = rng.between(1, 4);
    IntervalPartition I = IntervalPartition::arithmetic(1, b);
    const Index den = rng.between(2, 4);
    TailBoundedSeq eps = TailBoundedSeq::geometric(ratio(1, den), ratio(rng.between(2, 3), 4));
    BlockSlalom phi = BlockSlalom::random_sparse(I, rng.next(), 0, 2);
    PadResult p = pad_to_eps(phi, eps, spec.horizon);
    r.facts(p.facts);
    r.count("qualifying blocks", p.qualifying.size());
    r.note({{"block offset", b}, {"eps", eps.to_json()}, {"qualifying", p.qualifying.size()}});
  }
}

void prop_210c(const SuiteSpec& spec, Report& r) {
  MassPair mp;
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("s-not-e#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    const Index c = rng.between(0, 3);
    BlockSlalom psi = BlockSlalom::random_sparse(mp.I, rng.next(), 0, c)
                          .with_certificate(vanishing_from_size_bound(c, mp.div));
    const Index period = rng.between(2, 4);
    IndexSet B{"n = 0 mod " + std::to_string(period), [period](Index n) { return n % period == 0; }};
    SNotEResult w = s_not_e_witness(mp.I, mp.eps, B, psi, spec.horizon);
    r.facts(w.facts);
    r.fact(Fact::claim("x hits phi_B infinitely often on the window", 0, w.hits.size() * 2 >= spec.horizon / period));
    r.fact(Fact::claim("x escapes psi on the window", 0, !w.escapes.empty()));
  }
}

void prop_210d(const SuiteSpec& spec, Report& r) {
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("interleave#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    IntervalPartition I = IntervalPartition::arithmetic(0, rng.between(1, 3));
    IntervalPartition J = IntervalPartition::arithmetic(1, 1);
    const Index c = rng.between(0, 2);
    BlockSlalom phi = BlockSlalom::random_sparse(I, rng.next(), 1, 2);
    BlockSlalom psi = BlockSlalom::random_sparse(J, rng.next(), 0, c);
    TailBoundedSeq bound = c == 0 ? TailBoundedSeq::zero() : TailBoundedSeq::geometric(ratio(c, 2), ratio(1, 2));
    InterleaveResult x = s_not_in_Efsigma_refuter(phi, psi, bound, spec.horizon);
    r.facts(x.facts);
    r.fact(Fact::claim("interleaving found", 0, x.empty_case || (!x.k.empty() && !x.j.empty())));
    r.note({{"empty case", x.empty_case}, {"k", x.k}, {"j", x.j}});
  }
}

template <class Transfer>
void transfer_suite(const SuiteSpec& spec, Report& r, Transfer transfer, const std::string& enum_check) {
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("transfer#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    IntervalPartition I = seeded_lengths(rng.next(), 1, 3);
    const Index group = rng.between(2, 4);
    IntervalPartition J = IntervalPartition::coarsen(I, group, rng.between(0, 1));
    BlockSlalom phi = BlockSlalom::random_sparse(I, rng.next(), rng.between(0, 1), rng.between(1, 4));
    TailBoundedSeq eps = TailBoundedSeq::geometric(1, ratio(1, 2));
    TransferResult t = transfer(phi, J, eps, spec.horizon);
    r.facts(t.checks);
    r.note({{"group", group}, {"preconditions hold", t.preconditions_hold()}});
    for (const auto& f : t.checks)
      if (f.check == enum_check) r.count("enumerated blocks");
  }
}

void transfer_e(const SuiteSpec& spec, Report& r) {
  transfer_suite(spec, r, transfer_E, "transfer_E: product size equals enumeration");
}

void transfer_s(const SuiteSpec& spec, Report& r) {
  transfer_suite(spec, r, transfer_S, "transfer_S: size equals enumeration");
}

void refuter(const SuiteSpec& spec, Report& r) {
  const Index h = spec.horizon;
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("refuter#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    IntervalPartition I = seeded_lengths(rng.next(), 2, 6);
    BlockSlalom phi = BlockSlalom::random_sparse(I, rng.next(), 1, 3);
    BlockSlalom psi = BlockSlalom::random_sparse(I, rng.next(), 0, 3);
    if (inst % 3 == 0) psi = unite(psi, phi);  // inclusion holds
    if (inclusion_failures(phi, psi, h).empty()) {
      r.count("included");
      r.verdict("pointwise inclusion not refuted", inst, pointwise_included(phi, psi, h),
                psi.known_superset_of(phi) ? Truth::Holds : Truth::Unknown);
      continue;
    }
    r.count("refuted");
    for (RefuterMode mode : {RefuterMode::Infinitely, RefuterMode::AlmostAll}) {
      const char* tag = mode == RefuterMode::Infinitely ? "[phi]_inf: " : "[phi]_*: ";
      RefuterResult res = refuter_point(phi, psi, h, mode);
      r.fact(Fact::claim(std::string(tag) + "no exceptions", inst, res.exceptions.empty()));
      std::size_t w = 0;
      bool ok = true;
      Index bad = 0;
      for (Index n = 0; n < h && ok; ++n) {
        const BigInt code = restrict(res.x, I, n).code;
        if (w < res.witnessed.size() && res.witnessed[w] == n) {
          ++w;
          ok = phi.at(n).contains(code) && !psi.at(n).contains(code);
        } else {
          ok = mode == RefuterMode::Infinitely ? !psi.at(n).contains(code) : phi.at(n).contains(code);
        }
        if (!ok) bad = n;
      }
      r.fact(Fact::claim(std::string(tag) + "refuter meets every block of the window", bad, ok));
    }
  }
}

void distinguish(const SuiteSpec& spec, Report& r) {
  r.instance("|I_n|=(n+1)^3");
  IntervalPartition I = IntervalPartition::polynomial({0, 0, 0, 1});
  DistinguishResult d = distinguish_eps_example(I, spec.horizon);
  r.facts(d.facts);
  r.verdict("sigma member for eps", 0, d.member_eps, Truth::Holds);
  r.verdict("refuted for eps'", 0, d.member_eps_prime, Truth::Fails);
  r.note({{"n_K", d.n_K}});
}

void eps_summable(const SuiteSpec& spec, Report& r) {
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("eps-from-summable#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    const Index c = rng.between(1, 4);
    IntervalPartition I = IntervalPartition::arithmetic(1, 1);
    BlockSlalom phi = BlockSlalom::random_sparse(I, rng.next(), 0, c);
    EpsResult e = eps_from_summable(phi, TailBoundedSeq::geometric(ratio(c, 2), ratio(1, 2)), spec.horizon);
    r.facts(e.facts);
    r.verdict("phi in Sigma for the built eps", inst, sigma_member(e.phi, e.eps, spec.horizon), Truth::Holds);
  }
}

void completion(const SuiteSpec& spec, Report& r) {
  MassPair mp;
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("complete#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    const Index c = rng.between(0, 3);
    BlockSlalom phi = BlockSlalom::random_sparse(mp.I, rng.next(), 0, c)
                          .with_certificate(vanishing_from_size_bound(c, mp.div));
    CompletionResult cr = complete_nonempty(phi, mp.eps, mp.div, spec.horizon);
    r.facts(cr.facts);
    r.facts(check_vanishing(cr.phi, mp.eps, *cr.phi.certificate(), 8, spec.horizon).facts);
  }
}

}  // namespace

void register_slalom_suites(std::map<std::string, SuiteInfo>& reg) {
  reg["merge-claim"] = {"merging up to 8 certified slaloms", 200, 24, merge_claim};
  reg["contributivity"] = {"the three contributivity instances", 64, 1, contributivity};
  reg["prop-2.10b"] = {"padding up to eps on qualifying blocks", 100, 50, prop_210b};
  reg["prop-2.10c"] = {"a point in [phi_B]_inf outside [psi]_*", 40, 30, prop_210c};
  reg["prop-2.10d"] = {"interleaved refuter against summable psi", 40, 30, prop_210d};
  reg["transfer-E"] = {"product transfer along domination", 40, 30, transfer_e};
  reg["transfer-S"] = {"union-of-cylinders transfer along refinement", 40, 30, transfer_s};
  reg["refuter"] = {"refuter points for failed pointwise inclusion", 48, 200, refuter};
  reg["distinguish"] = {"one phi certified for eps and refuted for eps'", 7, 1, distinguish};
  reg["eps-from-summable"] = {"eps built from summable ratios", 64, 30, eps_summable};
  reg["completion"] = {"nonempty completion", 64, 30, completion};
}

}  // namespace slalom
