#include <algorithm>

#include "slalom/errors.hpp"
#include "slalom/forcing.hpp"
#include "slalom/random.hpp"
#include "slalom/suites.hpp"

namespace slalom {

namespace {

// Fresh random points; seeds drawn from the generator never repeat in practice,
// and a repeat would surface as a TieError.
Point fresh_point(Rng& rng) { return Point::random(rng.next()); }

std::vector<BlockSet> random_stub(const ForcingSpace& P, Rng& rng, Index length) {
  std::vector<BlockSet> s;
  for (Index n = 0; n < length; ++n) {
    std::vector<BigInt> codes;
    const Index k = rng.between(0, 2);
    for (Index i = 0; i < k; ++i) codes.push_back(rng.code(P.I.length(n)));
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    s.push_back(BlockSet::of(codes));
  }
  return s;
}

ForcingCondition random_condition(const ForcingSpace& P, Rng& rng) {
  ForcingCondition c;
  c.s = random_stub(P, rng, rng.between(0, 3));
  c.N = rng.between(1, 3);
  const Index k = rng.between(0, 2);
  for (Index i = 0; i < k; ++i) c.F.push_back(fresh_point(rng));
  return extend_condition(P, c, std::max(c.length(), P.threshold(Rational(big(c.N * c.F.size())))));
}

ForcingCondition random_strengthening(const ForcingSpace& P, const ForcingCondition& c, Rng& rng) {
  ForcingCondition out = c;
  const Index ops = rng.between(1, 3);
  for (Index i = 0; i < ops; ++i) {
    switch (rng.between(0, 2)) {
      case 0: out = dense_add_point(P, out, fresh_point(rng)); break;
      case 1: out = extend_condition(P, out, out.length() + rng.between(0, 2)); break;
      default: out = raise_level(P, out, out.N + rng.between(0, 2)); break;
    }
  }
  return out;
}

void leq_fact(Report& r, const ForcingSpace& P, const std::string& check, Index i, const ForcingCondition& a,
              const ForcingCondition& b, bool expected) {
  LeqResult l = cond_leq(P, a, b);
  r.fact(Fact::claim(check, i, l.holds == expected, l.reason));
}

void validate_fact(Report& r, const ForcingSpace& P, const std::string& check, Index i, const ForcingCondition& c) {
  Verdict v = cond_validate(P, c);
  r.fact(Fact::claim(check, i, v.is_holds(), v.detail()));
}

void forcing_leq(const SuiteSpec& spec, Report& r) {
  const ForcingSpace P = forcing_example_space();
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("triple#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    const ForcingCondition c1 = random_condition(P, rng);
    const ForcingCondition c2 = random_strengthening(P, c1, rng);
    const ForcingCondition c3 = random_strengthening(P, c2, rng);
    const ForcingCondition* cs[] = {&c1, &c2, &c3};
    for (Index i = 0; i < 3; ++i) {
      validate_fact(r, P, "condition validates", i, *cs[i]);
      leq_fact(r, P, "reflexive", i, *cs[i], *cs[i], true);
    }
    leq_fact(r, P, "c2 <= c1", 0, c2, c1, true);
    leq_fact(r, P, "c3 <= c2", 0, c3, c2, true);
    leq_fact(r, P, "transitive: c3 <= c1", 0, c3, c1, true);
    if (!c1.F.empty()) {
      ForcingCondition dropped = c3;
      dropped.F.erase(std::remove_if(dropped.F.begin(), dropped.F.end(),
                                     [&](const Point& x) { return x.same_as(c1.F.front()); }),
                      dropped.F.end());
      leq_fact(r, P, "dropping a point of F breaks the order", 0, dropped, c1, false);
    }
    if (c3.N > c1.N) {
      ForcingCondition lowered = c3;
      lowered.N = c1.N - (c1.N > 1 ? 1 : 0);
      if (lowered.N < c1.N) leq_fact(r, P, "lowering N breaks the order", 0, lowered, c1, false);
    }
    // a random unrelated pair: the order is decided either way without error
    const ForcingCondition d = random_condition(P, rng);
    LeqResult l = cond_leq(P, d, c1);
    if (l.holds) leq_fact(r, P, "d <= c1 and c1 <= c1 give d <= c1", 0, d, c1, true);
    r.count("triples");
  }
}

void forcing_dense(const SuiteSpec& spec, Report& r) {
  const ForcingSpace P = forcing_example_space();
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("dense#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    ForcingCondition c = random_condition(P, rng);
    ForcingCondition d = dense_add_point(P, c, fresh_point(rng));
    validate_fact(r, P, "dense_add_point output validates", inst, d);
    leq_fact(r, P, "dense_add_point output <= input", inst, d, c, true);
    bool refused = false;
    try {
      dense_add_point(P, d, d.F.back());
    } catch (const PreconditionError&) {
      refused = true;
    }
    r.fact(Fact::claim("adding a point already in F is refused", inst, refused));
  }
}

// (s, N, m) with s long enough that every F of size <= m validates.
LinkedCellKey random_cell(const ForcingSpace& P, Rng& rng, Index m) {
  LinkedCellKey cell;
  cell.N = rng.between(1, 3);
  cell.m = m;
  cell.s = random_stub(P, rng, P.threshold(Rational(big(cell.N * m))) + rng.between(0, 1));
  return cell;
}

std::vector<Point> fresh_points(Rng& rng, Index k) {
  std::vector<Point> out;
  for (Index i = 0; i < k; ++i) out.push_back(fresh_point(rng));
  return out;
}

bool same_points(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a)
    if (std::none_of(b.begin(), b.end(), [&](const Point& y) { return y.same_as(x); })) return false;
  return true;
}

bool same_condition(const ForcingCondition& a, const ForcingCondition& b) {
  if (a.N != b.N || a.s.size() != b.s.size()) return false;
  for (Index n = 0; n < a.s.size(); ++n)
    if (!(a.s[n] == b.s[n])) return false;
  return same_points(a.F, b.F);
}

void forcing_dlimit(const SuiteSpec& spec, Report& r) {
  const ForcingSpace P = forcing_example_space();
  const Index W = spec.horizon;
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("dlimit#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    const Index m = rng.between(1, 3);
    LinkedCellKey cell = random_cell(P, rng, m);
    std::vector<ForcingCondition> fam;
    for (Index i = 0; i < W; ++i) fam.push_back({cell.s, cell.N, fresh_points(rng, rng.between(0, m))});

    const Index star = rng.between(0, W - 1);
    auto principal = UltrafilterOracle::principal(star, W);
    ForcingCondition lim = d_limit(P, cell, fam, *principal);
    r.fact(Fact::claim("principal limit equals p_{i*}", star, same_condition(lim, fam[star])));
    r.fact(Fact::claim("limit stays in the cell", star, cell.contains(lim)));
    r.facts(principal->check_log());

    std::vector<ForcingCondition> constant(W, fam[star]);
    auto pattern = UltrafilterOracle::pattern(rng.between(0, 2), rng.between(1, 3), 0, W);
    r.fact(Fact::claim("constant family has the constant limit", 0, same_condition(d_limit(P, cell, constant, *pattern), fam[star])));

    const ForcingCondition even{cell.s, cell.N, fresh_points(rng, m)};
    const ForcingCondition odd{cell.s, cell.N, fresh_points(rng, rng.between(0, m))};
    std::vector<ForcingCondition> alternating;
    for (Index i = 0; i < W; ++i) alternating.push_back(i % 2 == 0 ? even : odd);
    auto evens = UltrafilterOracle::pattern(0, 2, 0, W);
    r.fact(Fact::claim("even pattern picks the even condition", 0,
                       same_condition(d_limit(P, cell, alternating, *evens), even)));
    r.facts(evens->check_log());
    r.facts(pattern->check_log());
  }
}

void forcing_amalgamate(const SuiteSpec& spec, Report& r) {
  const ForcingSpace P = forcing_example_space();
  const Index W = spec.horizon;
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("amalgamate#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    const Index K = rng.between(1, 3);
    const std::uint64_t N = rng.between(1, 2);
    std::shared_ptr<UltrafilterOracle> oracle = inst % 2 == 0 ? UltrafilterOracle::principal(rng.between(0, W - 1), W)
                                                              : UltrafilterOracle::pattern(0, 2, 0, W);
    Index total = 0;
    std::vector<Index> ms;
    for (Index k = 0; k < K; ++k) {
      ms.push_back(rng.between(1, 2));
      total += ms.back();
    }
    const std::vector<BlockSet> s0 = random_stub(P, rng, P.threshold(Rational(big(N * 2 * total))));
    std::vector<LimitFamily> limits;
    std::vector<Point> all;
    for (Index k = 0; k < K; ++k) {
      LinkedCellKey cell{s0, N, ms[k]};
      const std::vector<Point> shared = fresh_points(rng, ms[k]);
      std::vector<ForcingCondition> fam;
      for (Index n = 0; n < W; ++n)
        fam.push_back({s0, N, n % 2 == 0 ? shared : fresh_points(rng, rng.between(0, ms[k]))});
      ForcingCondition qk = d_limit(P, cell, fam, *oracle);
      for (const auto& x : qk.F) all.push_back(x);
      limits.push_back({qk, fam});
    }
    ForcingCondition base{s0, N, all};
    const ForcingCondition q = extend_condition(P, base, s0.size() + rng.between(0, 2));
    for (Index k = 0; k < K; ++k) leq_fact(r, P, "q <= q_k", k, q, limits[k].q, true);
    std::set<Index> a = oracle->representatives();
    AmalgamateResult res = amalgamate(P, q, limits, *oracle, a);
    r.facts(res.facts);
    r.facts(oracle->check_log());
    r.note({{"oracle", oracle->name()}, {"n", res.n}, {"|F|", q.F.size()}, {"|F'|", res.q.F.size()}});
  }
}

void forcing_replay(const SuiteSpec& spec, Report& r) {
  const ForcingSpace P = forcing_example_space();
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("session#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    ForcingSession session(P);
    const Index ops = rng.between(3, spec.horizon);
    for (Index i = 0; i < ops; ++i) {
      switch (rng.between(0, 3)) {
        case 0:
        case 1: session.add_point(fresh_point(rng)); break;
        case 2: session.extend(session.current().length() + rng.between(1, 3)); break;
        default: session.raise(session.current().N + rng.between(0, 2)); break;
      }
    }
    session.extend(session.current().length() + 4);
    r.facts(session.replay_facts());
    ForcingSession again = ForcingSession::replay(P, session.transcript());
    r.fact(Fact::claim("transcript replays to the same condition", inst,
                       again.current().to_json() == session.current().to_json()));
    r.count("added points", session.joins().size());
  }
}

}  // namespace

void register_forcing_suites(std::map<std::string, SuiteInfo>& reg) {
  reg["forcing-leq"] = {"the order on random validated triples", 0, 1000, forcing_leq};
  reg["forcing-dense"] = {"adding a ground point", 0, 200, forcing_dense};
  reg["forcing-dlimit"] = {"D-limits under principal and pattern oracles", 12, 100, forcing_dlimit};
  reg["forcing-amalgamate"] = {"amalgamation of limits", 8, 100, forcing_amalgamate};
  reg["forcing-replay"] = {"generic prefix captures every added point", 12, 100, forcing_replay};
}

}  // namespace slalom
