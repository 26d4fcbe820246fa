#include <algorithm>

#include "slalom/constructors.hpp"
#include "slalom/errors.hpp"
#include "slalom/forcing.hpp"
#include "slalom/random.hpp"
#include "slalom/suites.hpp"
#include "slalom/tukey.hpp"
#include "slalom/twosmall.hpp"

namespace slalom {

namespace {

json facts_json(const std::vector<Fact>& fs) {
  json out = json::array();
  for (const auto& f : fs) out.push_back(f.to_json());
  return out;
}

TailBoundedSeq eps_param(const json& p, const char* key, TailBoundedSeq fallback) {
  return p.contains(key) ? TailBoundedSeq::from_json(p.at(key)) : fallback;
}

IntervalPartition partition_param(const json& p, const char* key, IntervalPartition fallback) {
  return p.contains(key) ? IntervalPartition::from_json(p.at(key)) : fallback;
}

json sizes(const BlockSlalom& phi, Index window) {
  json out = json::array();
  for (Index n = 0; n < window; ++n) out.push_back(to_string(phi.at(n).size()));
  return out;
}

// Block mass 2^{n+1}: |I_n| = 2n+2, eps_n = 2^-(n+1).
DivergenceCertificate mass_divergence() {
  return divergence_from_lower_bound("2^{n+1}", [](Index n) { return Rational(pow2(n + 1)); });
}

}  // namespace

std::vector<std::string> construct_names() {
  return {"delta",      "merge",      "eps-from-summable", "complete",  "pad",         "s-not-e",
          "interleave", "transfer-E", "transfer-S",        "distinguish", "alc",       "hardtukey",
          "na-params",  "u2small",    "forcing-session"};
}

json construct(const std::string& name, std::uint64_t seed, Index horizon, const json& params) {
  Rng rng(seed, 0);
  json b{{"constructor", name}, {"seed", seed}, {"horizon", horizon}};
  std::vector<Fact> facts;
  const IntervalPartition mass_I = IntervalPartition::arithmetic(2, 2);
  const TailBoundedSeq mass_eps = TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2));

  if (name == "delta") {
    TailBoundedSeq eps = eps_param(params, "eps", TailBoundedSeq::geometric(1, ratio(1, 2)));
    DeltaWitness d = build_delta(eps);
    const Index count = params.value("breakpoints", Index(10));
    std::vector<Index> bps = d.breakpoints(count);
    Rational sum = 0;
    for (Index i = 1, j = 0; i < count; ++i) {
      for (; j < bps[i]; ++j) sum += Rational(d.value(j)) * eps.term(j);
      facts.push_back(Fact::compare("sum_{j<n_i} delta_j eps_j < 2 sBound", i, sum, Relation::Less, 2 * d.s_bound()));
    }
    b["inputs"] = {{"eps", eps.to_json()}};
    b["outputs"] = {{"sBound", to_string(d.s_bound())}, {"breakpoints", bps}};
  } else if (name == "merge") {
    const Index count = params.value("count", Index(2));
    std::vector<BlockSlalom> phis;
    for (Index i = 0; i < count; ++i) {
      const Index c = rng.between(1, 3);
      phis.push_back(BlockSlalom::random_sparse(mass_I, rng.next(), 0, c)
                         .with_certificate(vanishing_from_size_bound(c, mass_divergence())));
    }
    MergeResult m = merge_slaloms(phis, mass_eps, horizon);
    facts = m.facts;
    std::vector<Index> ks;
    for (Index n = 0; n <= count + 1; ++n) ks.push_back(m.group_start(n));
    json ins = json::array();
    for (const auto& p : phis) ins.push_back(p.to_json(std::min<Index>(horizon, 8)));
    b["inputs"] = {{"slaloms", ins}, {"eps", mass_eps.to_json()}};
    b["outputs"] = {{"k", ks}, {"sizes", sizes(m.phi, horizon)}};
  } else if (name == "eps-from-summable") {
    IntervalPartition I = IntervalPartition::arithmetic(1, 1);
    BlockSlalom phi = BlockSlalom::random_sparse(I, seed, 0, 2);
    TailBoundedSeq ratios = TailBoundedSeq::geometric(1, ratio(1, 2));
    EpsResult e = eps_from_summable(phi, ratios, horizon);
    facts = e.facts;
    json terms = json::array();
    for (Index n = 0; n < horizon; ++n) terms.push_back(to_string(e.eps.term(n)));
    b["inputs"] = {{"phi", phi.to_json(std::min<Index>(horizon, 8))}, {"ratios", ratios.to_json()}};
    b["outputs"] = {{"eps", terms}, {"sBound", to_string(e.delta.s_bound())}, {"breakpoints", e.delta.breakpoints(8)}};
  } else if (name == "complete") {
    BlockSlalom phi = BlockSlalom::random_sparse(mass_I, seed, 0, 2)
                          .with_certificate(vanishing_from_size_bound(2, mass_divergence()));
    CompletionResult c = complete_nonempty(phi, mass_eps, mass_divergence(), horizon);
    facts = c.facts;
    b["inputs"] = {{"phi", sizes(phi, horizon)}};
    b["outputs"] = {{"completed", sizes(c.phi, horizon)}};
  } else if (name == "pad") {
    IntervalPartition I = partition_param(params, "partition", IntervalPartition::arithmetic(1, 2));
    TailBoundedSeq eps = eps_param(params, "eps", TailBoundedSeq::geometric(ratio(1, 2), ratio(3, 4)));
    BlockSlalom phi = BlockSlalom::random_sparse(I, seed, 0, 2);
    PadResult p = pad_to_eps(phi, eps, horizon);
    facts = p.facts;
    b["inputs"] = {{"eps", eps.to_json()}, {"phi", sizes(phi, horizon)}};
    b["outputs"] = {{"padded", sizes(p.phi, horizon)}, {"qualifying", p.qualifying}};
  } else if (name == "s-not-e") {
    BlockSlalom psi = BlockSlalom::random_sparse(mass_I, seed, 0, 2)
                          .with_certificate(vanishing_from_size_bound(2, mass_divergence()));
    SNotEResult w = s_not_e_witness(mass_I, mass_eps, {"evens", [](Index n) { return n % 2 == 0; }}, psi, horizon);
    facts = w.facts;
    b["inputs"] = {{"psi", sizes(psi, horizon)}, {"B", "evens"}};
    b["outputs"] = {{"hits", w.hits}, {"escapes", w.escapes}};
  } else if (name == "interleave") {
    IntervalPartition I = IntervalPartition::unit();
    IntervalPartition J = IntervalPartition::arithmetic(1, 1);
    BlockSlalom phi = BlockSlalom::random_sparse(I, seed, 1, 1);
    BlockSlalom psi = BlockSlalom::random_sparse(J, seed + 1, 1, 1);
    InterleaveResult x = s_not_in_Efsigma_refuter(phi, psi, TailBoundedSeq::geometric(ratio(1, 2), ratio(1, 2)), horizon);
    facts = x.facts;
    b["inputs"] = {{"phi", phi.to_json(8)}, {"psi", psi.to_json(8)}};
    b["outputs"] = {{"empty_case", x.empty_case}, {"k", x.k}, {"j", x.j}};
  } else if (name == "transfer-E" || name == "transfer-S") {
    IntervalPartition I = IntervalPartition::arithmetic(0, 2);
    IntervalPartition J = IntervalPartition::coarsen(I, params.value("group", Index(2)), params.value("shift", Index(1)));
    BlockSlalom phi = BlockSlalom::random_sparse(I, seed, 1, 2);
    TailBoundedSeq eps = TailBoundedSeq::geometric(1, ratio(1, 2));
    TransferResult t = name == "transfer-E" ? transfer_E(phi, J, eps, horizon) : transfer_S(phi, J, eps, horizon);
    facts = t.checks;
    b["inputs"] = {{"phi", sizes(phi, horizon)}, {"J", J.to_json(horizon)}};
    b["outputs"] = {{"psi", sizes(t.psi, horizon)}, {"preconditions", facts_json(t.preconditions)}};
  } else if (name == "distinguish") {
    DistinguishResult d = distinguish_eps_example(IntervalPartition::polynomial({0, 0, 0, 1}), horizon);
    facts = d.facts;
    b["inputs"] = {{"partition", "|I_n| = (n+1)^3"}};
    b["outputs"] = {{"eps", d.eps.to_json()}, {"eps_prime", d.eps_prime.to_json()}, {"n_K", d.n_K},
                    {"sizes", sizes(d.phi, horizon)}, {"member_eps", d.member_eps.to_json()},
                    {"member_eps_prime", d.member_eps_prime.to_json()}};
  } else if (name == "alc") {
    IntervalPartition I = partition_param(params, "partition", IntervalPartition::arithmetic(2, 2));
    TailBoundedSeq eps = eps_param(params, "eps", TailBoundedSeq::geometric(1, ratio(1, 2)));
    AlcParams p = alc_params(I, eps, horizon);
    facts = p.facts;
    json bs = json::array(), hs = json::array();
    for (Index n = 0; n < horizon; ++n) {
      bs.push_back(to_string(p.b(n)));
      hs.push_back(to_string(p.h(n)));
    }
    b["inputs"] = {{"partition", I.to_json(horizon)}, {"eps", eps.to_json()}};
    b["outputs"] = {{"b", bs}, {"h", hs}};
  } else if (name == "hardtukey") {
    IntervalPartition I = IntervalPartition::arithmetic(0, 2);
    TailBoundedSeq eps = TailBoundedSeq::geometric(Rational(pow2(20)), ratio(1, 2));
    const Index E = 20;
    std::vector<BlockSet> blocks;
    for (Index n = 0; n < E; ++n) blocks.push_back(BlockSet::of({rng.code(2)}));
    BlockSlalom phi = BlockSlalom::from_blocks(I, blocks);
    BlockSlalom src = phi;
    phi = phi.with_certificate({"scanned tail", [src, eps, E](std::uint64_t N) {
                                  Index n0 = E;
                                  while (n0 > 0 && Rational(big(N) * src.at(n0 - 1).size()) <
                                                       block_mass(src.partition(), eps, n0 - 1))
                                    --n0;
                                  return n0;
                                }});
    const Index groups = std::min<Index>(horizon, 5);
    std::vector<Index> bv;
    for (Index n = 0; n <= groups; ++n) {
      const Index t = phi.certificate()->threshold((n + 1) * (n + 1) * (n + 1));
      bv.push_back(bv.empty() ? t : std::max({bv.back() + 1, t}));
    }
    std::vector<std::vector<BigInt>> cols;
    for (Index n = 0; n < groups; ++n) {
      BlockTuple own;
      for (Index j = bv[n]; j < bv[n + 1]; ++j) own.push_back(phi.at(j).members(2));
      cols.push_back({code_tuple(I, bv[n], own)});
    }
    WidthSlalom S = WidthSlalom::from_columns("S", [](Index n) -> BigInt { return big(n + 1) * big(n + 1); }, cols);
    PipelineResult p = hardtukey_pipeline(phi, eps, [bv](Index n) { return bv.at(n); }, S, groups);
    facts = p.facts;
    b["inputs"] = {{"b", bv}, {"eps", eps.to_json()}};
    b["outputs"] = p.trace();
  } else if (name == "na-params") {
    NaParams p = na_to_E_params(horizon);
    facts = p.facts;
    json lens = json::array();
    for (Index n = 0; n < horizon; ++n) lens.push_back(p.I.length(n));
    b["outputs"] = {{"block_lengths", lens}, {"eps", p.eps.to_json()}};
  } else if (name == "u2small") {
    const Index kmax = std::min<Index>(horizon, 30);
    Point x = Point::random(seed);
    NullApprox fa = NullApprox::seeded(x, seed, params.value("extra", Index(1)));
    TwoSmallCoding c = u2small_coding(fa, eps_param(params, "eps", TailBoundedSeq::geometric(1, ratio(1, 2))));
    facts = u2small_chain_facts(c, kmax);
    Coverage cov = classify_coverage(c, x, kmax);
    facts.insert(facts.end(), cov.facts.begin(), cov.facts.end());
    b["inputs"] = {{"point", x.descriptor()}, {"approx", fa.name}};
    b["outputs"] = u2small_witness(c, kmax);
    b["outputs"]["coverage"] = {{"phi_blocks", cov.phi_blocks}, {"psi_blocks", cov.psi_blocks},
                                {"unclassified", cov.unclassified}};
  } else if (name == "forcing-session") {
    ForcingSession s(forcing_example_space());
    for (Index i = 0; i < std::max<Index>(horizon / 4, 2); ++i) {
      if (rng.percent(60)) s.add_point(Point::random(rng.next()));
      else s.extend(s.current().length() + 2);
    }
    facts = s.replay_facts();
    b["outputs"] = {{"transcript", s.transcript()}, {"condition", s.current().to_json()}};
  } else {
    throw UsageError("unknown constructor: " + name);
  }
  b["facts"] = facts_json(facts);
  b["pass"] = all_pass(facts);
  return b;
}

}  // namespace slalom
