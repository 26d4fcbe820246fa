#include "slalom/constructors.hpp"

#include <algorithm>
#include <mutex>

#include "slalom/errors.hpp"

namespace slalom {

BigInt extract_bits(const BigInt& code, Index offset, Index len) {
  BigInt shifted, out;
  mpz_fdiv_q_2exp(shifted.get_mpz_t(), code.get_mpz_t(), offset);
  mpz_fdiv_r_2exp(out.get_mpz_t(), shifted.get_mpz_t(), len);
  return out;
}

namespace {

Rational block_ratio(const BlockSet& s, Index len) { return Rational(s.size()) / Rational(pow2(len)); }

void require_same_partition(const BlockSlalom& a, const BlockSlalom& b) {
  if (a.partition().eventually_equal(b.partition()) != Index(0))
    throw PreconditionError("slaloms '" + a.name() + "' and '" + b.name() + "' use different partitions");
}

// Lazily computed increasing index sequence shared between copies.
struct LazyIndices {
  std::mutex mu;
  std::vector<Index> values;
  std::function<Index(Index, const std::vector<Index>&)> next;

  Index at(Index n) {
    std::lock_guard<std::mutex> lock(mu);
    while (values.size() <= n) values.push_back(next(values.size(), values));
    return values[n];
  }
  // Largest n with values[n] <= j; values[0] must be <= j.
  Index group_of(Index j) {
    Index n = 0;
    while (at(n + 1) <= j) ++n;
    return n;
  }
};

}  // namespace

MergeResult merge_slaloms(const std::vector<BlockSlalom>& phis, const TailBoundedSeq& eps, Index window) {
  if (phis.empty()) throw PreconditionError("merge needs at least one slalom");
  for (const auto& p : phis) {
    require_same_partition(phis.front(), p);
    if (!p.certificate()) throw PreconditionError("slalom '" + p.name() + "' has no vanishing certificate");
  }
  auto ks = std::make_shared<LazyIndices>();
  ks->next = [phis](Index n, const std::vector<Index>& prev) -> Index {
    if (n == 0) return 0;
    Index k = prev.back() + 1;
    const Index m = std::min<Index>(n, phis.size());
    for (Index i = 0; i < m; ++i) k = std::max(k, phis[i].certificate()->threshold(n * n));
    return k;
  };
  const IntervalPartition I = phis.front().partition();
  BlockSlalom phi(
      I,
      [phis, ks, I](Index j) {
        const Index n = ks->group_of(j);
        BlockSet out;
        for (Index i = 0; i < std::min<Index>(n, phis.size()); ++i) out = unite(out, phis[i].at(j), I.length(j));
        return out;
      },
      "merge");
  VanishingCertificate cert{"merge: k_{N+1}", [ks](std::uint64_t N) { return ks->at(N + 1); }};
  MergeResult out{phi.with_certificate(cert), [ks](Index n) { return ks->at(n); }, {}};

  for (Index j = 0; j < window; ++j) {
    const Index n = ks->group_of(j);
    const BlockSet s = out.phi.at(j);
    const Rational mass = block_mass(I, eps, j);
    if (n == 0) {
      out.facts.push_back(Fact::claim("merge: group 0 empty", j, s.empty()));
    } else {
      out.facts.push_back(Fact::compare("merge: n*|phi(j)| < 2^|I_j|*eps_j on group " + std::to_string(n), j,
                                        Rational(big(n) * s.size()), Relation::Less, mass));
    }
    for (Index i = 0; i < phis.size(); ++i) {
      if (j < ks->at(i + 1)) continue;
      bool inside = !member_outside(phis[i].at(j), s, I.length(j));
      out.facts.push_back(Fact::claim("merge: input " + std::to_string(i) + " inside output", j, inside));
    }
  }
  return out;
}

EpsResult eps_from_summable(const BlockSlalom& phi, const TailBoundedSeq& ratios, Index window) {
  const IntervalPartition I = phi.partition();
  auto guarded = [phi](Index n) -> Rational {
    BigInt c = phi.at(n).size();
    if (c == 0) c = 1;
    return Rational(c) / Rational(pow2(phi.block_length(n)));
  };
  std::vector<Fact> facts;
  for (Index n = 0; n < window; ++n)
    facts.push_back(Fact::compare("ratio bound covers max(|phi(n)|,1)/2^|I_n|", n, guarded(n),
                                  Relation::LessEq, ratios.term(n)));
  if (!all_pass(facts))
    throw CertificateError("ratio sequence does not bound the slalom: " + first_failure(facts)->check +
                           " at " + std::to_string(first_failure(facts)->index));

  DeltaWitness delta = build_delta(ratios);
  const Rational s_bound = delta.s_bound();
  TailBoundedSeq::Generator g;
  g.family = "delta_times_ratio";
  g.params = {{"slalom", phi.name()}, {"ratio_family", ratios.family()}};
  g.term = [delta, guarded](Index n) -> Rational { return Rational(delta.value(n)) * guarded(n); };
  g.tail_bound = [delta, s_bound](Index k) -> Rational { return s_bound * pow2q(1 - std::int64_t(delta.level(k))); };
  g.shrink = [delta, s_bound](const Rational& r) -> std::optional<Index> {
    if (r <= 0) return std::nullopt;
    Index i = 0;
    while (s_bound * pow2q(1 - std::int64_t(i)) >= r) ++i;
    return delta.breakpoint(i);
  };
  g.positive_from = 0;
  TailBoundedSeq eps = TailBoundedSeq::custom(std::move(g));

  VanishingCertificate cert{"1/delta_n -> 0", [delta](std::uint64_t N) {
                              return delta.breakpoint(ceil_log2(big(N + 1)));
                            }};
  BlockSlalom certified = phi.with_certificate(cert);
  for (Index n = 0; n < window; ++n) {
    facts.push_back(Fact::compare("eps_n = delta_n * max(|phi(n)|,1)/2^|I_n|", n, eps.term(n), Relation::Equal,
                                  Rational(delta.value(n)) * guarded(n)));
    facts.push_back(Fact::compare("|phi(n)|/(2^|I_n| eps_n) <= 1/delta_n", n, relative_size(phi, eps, n),
                                  Relation::LessEq, Rational(1) / Rational(delta.value(n))));
  }
  auto check = check_vanishing(certified, eps, cert, 16, window);
  facts.insert(facts.end(), check.facts.begin(), check.facts.end());
  for (Index i = 1; i < 12; ++i) {
    const Index b = delta.breakpoint(i);
    facts.push_back(Fact::compare("sum eps below breakpoint < 2 sBound", b, partial_sum(eps, 0, b),
                                  Relation::Less, 2 * s_bound));
  }
  return {eps, delta, certified, facts};
}

CompletionResult complete_nonempty(const BlockSlalom& phi, const TailBoundedSeq& eps,
                                   const DivergenceCertificate& divergence, Index window) {
  if (!divergence.is_full())
    throw PreconditionError("completion needs the full-limit divergence certificate");
  std::optional<VanishingCertificate> given = phi.certificate();
  // a size bound and full divergence already certify phi
  if (!given && phi.size_bound()) given = vanishing_from_size_bound(*phi.size_bound(), divergence);
  if (!given) throw PreconditionError("completion needs a vanishing certificate for phi");
  BlockSlalom src = phi;
  BlockSlalom out(
      phi.partition(),
      [src](Index n) {
        BlockSet s = src.at(n);
        return s.empty() ? BlockSet::of({BigInt(0)}) : s;
      },
      "complete(" + phi.name() + ")");
  auto inner = *given;
  auto div = divergence;
  out = out.with_certificate({"max(phi threshold, divergence threshold(N+1))", [inner, div](std::uint64_t N) {
                                return std::max(inner.threshold(N), div.threshold(Rational(big(N + 1))));
                              }});
  CompletionResult r{out, {}};
  for (Index n = 0; n < window; ++n) {
    const Index len = phi.block_length(n);
    r.facts.push_back(Fact::claim("completion contains phi(n)", n, !member_outside(phi.at(n), out.at(n), len)));
    r.facts.push_back(Fact::claim("completion nonempty", n, !out.at(n).empty()));
  }
  auto check = check_vanishing(out, eps, *out.certificate(), 16, window);
  r.facts.insert(r.facts.end(), check.facts.begin(), check.facts.end());
  return r;
}

bool pad_qualifies(const BlockSlalom& phi, const TailBoundedSeq& eps, Index n) {
  const Rational e = eps.term(n);
  const Rational cap = Rational(pow2(phi.block_length(n)));
  const Rational r = Rational(phi.at(n).size()) / cap;
  return Rational(1) / cap <= e && r < e && e < 1;
}

PadResult pad_to_eps(const BlockSlalom& phi, const TailBoundedSeq& eps, Index window) {
  BlockSlalom src = phi;
  TailBoundedSeq e = eps;
  BlockSlalom out(
      phi.partition(),
      [src, e](Index n) {
        if (!pad_qualifies(src, e, n)) return BlockSet();
        const BlockSet s = src.at(n);
        if (s.is_predicate()) throw PreconditionError("padding needs an explicit block");
        const BigInt target = ceil_of(e.term(n) * Rational(pow2(src.block_length(n))));
        // Least cutoff c with c + #{listed >= c} = target.
        const auto& listed = s.listed();
        auto f = [&](const BigInt& c) -> BigInt {
          auto it = std::lower_bound(listed.begin(), listed.end(), c);
          return c + big(std::distance(it, listed.end()));
        };
        BigInt lo = s.cutoff(), hi = target;
        while (lo < hi) {
          BigInt mid = (lo + hi) / 2;
          if (f(mid) >= target) hi = mid;
          else lo = mid + 1;
        }
        return BlockSet::initial_plus(lo, listed);
      },
      "pad(" + phi.name() + ")");
  PadResult r{out, {}, {}};
  for (Index n = 0; n < window; ++n) {
    if (!pad_qualifies(phi, eps, n)) {
      r.facts.push_back(Fact::claim("pad: non-qualifying block empty", n, out.at(n).empty()));
      continue;
    }
    r.qualifying.push_back(n);
    const Index len = phi.block_length(n);
    const Rational ratio = block_ratio(out.at(n), len);
    const Rational en = eps.term(n);
    r.facts.push_back(Fact::compare("pad: eps_n <= |phibar(n)|/2^|I_n|", n, en, Relation::LessEq, ratio));
    r.facts.push_back(Fact::compare("pad: |phibar(n)|/2^|I_n| < eps_n + 2^-|I_n|", n, ratio, Relation::Less,
                                    en + Rational(1) / Rational(pow2(len))));
    r.facts.push_back(Fact::compare("pad: eps_n + 2^-|I_n| <= 2 eps_n", n, en + Rational(1) / Rational(pow2(len)),
                                    Relation::LessEq, 2 * en));
    r.facts.push_back(Fact::claim("pad: phi(n) kept", n, !member_outside(phi.at(n), out.at(n), len)));
  }
  return r;
}

SNotEResult s_not_e_witness(const IntervalPartition& I, const TailBoundedSeq& eps, const IndexSet& B,
                            const BlockSlalom& psi, Index horizon) {
  if (psi.partition().eventually_equal(I) != Index(0)) throw PreconditionError("psi must live on I");
  IndexSet b = B;
  BlockSlalom phi_b(
      I, [b](Index n) { return b.contains(n) ? BlockSet::of({BigInt(0)}) : BlockSet(); }, "zero-on-" + B.name);
  SNotEResult r{Point::zeros(), phi_b, {}, {}, {}};
  if (psi.certificate()) {
    auto check = check_vanishing(psi, eps, *psi.certificate(), 16, horizon);
    r.facts.insert(r.facts.end(), check.facts.begin(), check.facts.end());
  }
  PointBuilder pb;
  for (Index n = 0; n < horizon; ++n) {
    if (B.contains(n)) continue;
    const Index len = I.length(n);
    auto code = psi.at(n).first_nonmember(len);
    if (!code) continue;
    pb.set_block(I.block(n), *code);
    r.escapes.push_back(n);
  }
  if (r.escapes.empty())
    throw CertificateError("psi is full on every scanned block off " + B.name);
  r.x = pb.build();
  std::size_t e = 0;
  for (Index n = 0; n < horizon; ++n) {
    const BigInt code = restrict(r.x, I, n).code;
    if (B.contains(n)) {
      const bool hit = phi_b.at(n).contains(code);
      if (hit) r.hits.push_back(n);
      r.facts.push_back(Fact::claim("x hits phi_B on B", n, hit));
    } else if (e < r.escapes.size() && r.escapes[e] == n) {
      ++e;
      r.facts.push_back(Fact::claim("x leaves psi on v", n, !psi.at(n).contains(code)));
    } else {
      r.facts.push_back(Fact::claim("x zero off v", n, code == 0));
    }
  }
  return r;
}

InterleaveResult s_not_in_Efsigma_refuter(const BlockSlalom& phi, const BlockSlalom& psi,
                                          const TailBoundedSeq& psi_ratios, Index horizon) {
  const IntervalPartition& I = phi.partition();
  const IntervalPartition& J = psi.partition();
  InterleaveResult r;
  const Index limit = I.endpoint(horizon);
  const Index jtop = J.first_at_or_after(limit);
  for (Index n = 0; n < jtop; ++n)
    r.facts.push_back(Fact::compare("psi ratio within summable bound", n, block_ratio(psi.at(n), J.length(n)),
                                    Relation::LessEq, psi_ratios.term(n)));
  for (Index n = jtop / 2; n < jtop; ++n)
    if (psi.at(n).empty()) r.empty_case = true;

  PointBuilder pb;
  Index p = 0;
  while (true) {
    Index k = I.first_at_or_after(p);
    while (k < horizon && phi.at(k).empty()) ++k;
    if (k >= horizon) break;
    pb.set_block(I.block(k), *phi.at(k).first_member(I.length(k)));
    r.k.push_back(k);
    p = I.endpoint(k + 1);
    Index j = J.first_at_or_after(p);
    std::optional<BigInt> code;
    for (; J.endpoint(j + 1) <= limit; ++j)
      if ((code = psi.at(j).first_nonmember(J.length(j)))) break;
    if (!code) break;
    pb.set_block(J.block(j), *code);
    r.j.push_back(j);
    p = J.endpoint(j + 1);
  }
  if (r.k.empty()) throw PreconditionError("phi is empty on the whole window");
  if (r.j.empty()) throw WindowExhausted("no J-block outside psi after an I-block with phi nonempty");
  r.x = pb.build();
  for (Index k : r.k) {
    r.facts.push_back(Fact::claim("x lands in phi(k)", k, phi.at(k).contains(restrict(r.x, I, k).code)));
    for (Index j : r.j) {
      const Block a = I.block(k), b = J.block(j);
      if (a.end > b.begin && b.end > a.begin)
        r.facts.push_back(Fact::claim("I_k and J_j disjoint", k, false, "overlaps J_" + std::to_string(j)));
    }
  }
  for (Index j : r.j)
    r.facts.push_back(Fact::claim("x leaves psi(j)", j, !psi.at(j).contains(restrict(r.x, J, j).code)));
  return r;
}

namespace {

struct SubinBlock {
  Index k;
  Index offset;  // position inside J_n
  Index len;
};

std::vector<SubinBlock> subin_blocks(const IntervalPartition& I, const IntervalPartition& J, Index n) {
  std::vector<SubinBlock> out;
  const IndexRange r = subin(I, J, n);
  const Index base = J.endpoint(n);
  for (Index k = r.begin; k < r.end; ++k) out.push_back({k, I.endpoint(k) - base, I.length(k)});
  return out;
}

Fact clause(const std::string& name, const std::vector<Index>& failures, Index lo, Index hi) {
  std::string detail = "window [" + std::to_string(lo) + "," + std::to_string(hi) + ")";
  if (!failures.empty()) detail += ", first failure at " + std::to_string(failures.front());
  return Fact::claim(name, failures.empty() ? lo : failures.front(), failures.empty(), detail);
}

}  // namespace

TransferResult transfer_E(const BlockSlalom& phi, const IntervalPartition& J, const TailBoundedSeq& eps,
                          Index horizon) {
  const IntervalPartition I = phi.partition();
  BlockSlalom src = phi;
  IntervalPartition Jc = J;
  BlockSlalom psi(
      J,
      [src, I, Jc](Index n) {
        auto parts = subin_blocks(I, Jc, n);
        BigInt size = 1;
        Index covered = 0;
        for (const auto& b : parts) {
          size *= src.at(b.k).size();
          covered += b.len;
        }
        size *= pow2(Jc.length(n) - covered);
        return BlockSet::predicate(
            size,
            [src, parts](const BigInt& code) {
              for (const auto& b : parts)
                if (!src.at(b.k).contains(extract_bits(code, b.offset, b.len))) return false;
              return true;
            },
            "product:" + src.name() + ":" + std::to_string(n));
      },
      "transfer_E(" + phi.name() + ")");
  TransferResult r{psi, {}, {}};

  const Index lo = horizon / 2;
  std::vector<Index> dominated, late;
  for (Index n = lo; n < horizon; ++n) {
    if (!has_contained_block(I, J, n)) dominated.push_back(n);
    IndexRange s = subin(I, J, n);
    if (s.empty() || s.begin < n) late.push_back(n);
  }
  r.preconditions.push_back(clause("I dominated by J on the window tail", dominated, lo, horizon));
  r.preconditions.push_back(Fact::claim("eps decreasing", 0, eps.decreasing()));
  r.preconditions.push_back(clause("min subin(n) >= n on the window tail", late, lo, horizon));

  for (Index n = 0; n < horizon; ++n) {
    const BlockSet s = psi.at(n);
    const Index len = J.length(n);
    auto parts = subin_blocks(I, J, n);
    if (len <= 12)
      r.checks.push_back(Fact::compare("transfer_E: product size equals enumeration", n, Rational(s.size()),
                                       Relation::Equal, Rational(brute_force_count(s, len))));
    if (parts.empty()) continue;
    bool small_eps = true;
    Rational rhs = 1;
    for (const auto& b : parts) {
      const Rational ek = eps.term(b.k);
      small_eps = small_eps && ek < 1;
      rhs *= block_ratio(phi.at(b.k), b.len) / ek;
    }
    if (!small_eps || parts.front().k < n) continue;
    r.checks.push_back(Fact::compare("transfer_E: ratio chain", n, block_ratio(s, len) / eps.term(n),
                                     Relation::LessEq, rhs));
  }
  return r;
}

BigInt union_of_cylinders_size(const BlockSlalom& phi, const IntervalPartition& J, Index n) {
  auto parts = subin_blocks(phi.partition(), J, n);
  const Index len = J.length(n);
  BigInt miss = pow2(len);
  for (const auto& b : parts) {
    miss /= pow2(b.len);
    miss *= pow2(b.len) - phi.at(b.k).size();
  }
  return pow2(len) - miss;
}

namespace {

BigInt inclusion_exclusion(const BlockSlalom& phi, const std::vector<SubinBlock>& parts, Index len) {
  BigInt total = 0;
  const std::size_t m = parts.size();
  for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
    BigInt term = 1;
    Index covered = 0;
    int bits = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) {
        term *= phi.at(parts[i].k).size();
        covered += parts[i].len;
        ++bits;
      }
    term *= pow2(len - covered);
    if (bits % 2) total += term;
    else total -= term;
  }
  return total;
}

}  // namespace

TransferResult transfer_S(const BlockSlalom& phi, const IntervalPartition& J, const TailBoundedSeq& eps,
                          Index horizon) {
  const IntervalPartition I = phi.partition();
  BlockSlalom src = phi;
  IntervalPartition Jc = J;
  BlockSlalom psi(
      J,
      [src, I, Jc](Index n) {
        auto parts = subin_blocks(I, Jc, n);
        const Index len = Jc.length(n);
        BigInt size = parts.size() <= 4 ? inclusion_exclusion(src, parts, len) : union_of_cylinders_size(src, Jc, n);
        return BlockSet::predicate(
            size,
            [src, parts](const BigInt& code) {
              for (const auto& b : parts)
                if (src.at(b.k).contains(extract_bits(code, b.offset, b.len))) return true;
              return false;
            },
            "cylinders:" + src.name() + ":" + std::to_string(n));
      },
      "transfer_S(" + phi.name() + ")");
  TransferResult r{psi, {}, {}};

  const Index lo = horizon / 2;
  std::vector<Index> refined, fast;
  for (Index n = lo; n < horizon; ++n) {
    if (!is_union_of_blocks(I, J, n)) refined.push_back(n);
    Rational s = 0;
    IndexRange sub = subin(I, J, n);
    for (Index k = sub.begin; k < sub.end; ++k) s += eps.term(k);
    if (s > eps.term(n)) fast.push_back(n);
  }
  r.preconditions.push_back(clause("I refines J on the window tail", refined, lo, horizon));
  r.preconditions.push_back(clause("sum over subin of eps_k <= eps_n on the window tail", fast, lo, horizon));

  for (Index n = 0; n < horizon; ++n) {
    const BlockSet s = psi.at(n);
    const Index len = J.length(n);
    auto parts = subin_blocks(I, J, n);
    if (parts.size() <= 4)
      r.checks.push_back(Fact::compare("transfer_S: inclusion-exclusion equals complement product", n,
                                       Rational(s.size()), Relation::Equal,
                                       Rational(union_of_cylinders_size(phi, J, n))));
    if (len <= 12)
      r.checks.push_back(Fact::compare("transfer_S: size equals enumeration", n, Rational(s.size()),
                                       Relation::Equal, Rational(brute_force_count(s, len))));
    Rational bound = 0;
    for (const auto& b : parts) bound += block_ratio(phi.at(b.k), b.len);
    r.checks.push_back(Fact::compare("transfer_S: ratio at most the sum of ratios", n, block_ratio(s, len),
                                     Relation::LessEq, bound));
  }
  return r;
}

BigInt xi(Index n, Index len) {
  const BigInt sq = big(n + 1) * big(n + 1);
  return ceil_of(Rational(pow2(len)) / Rational(sq)) - 1;
}

Index distinguish_threshold(Index K, Index lo) {
  // From m >= 3 on, 2^m (m-K+1) >= (m+1)^3 with m-K+1 >= 1 propagates to m+1.
  auto ok = [K](Index m) {
    if (m + 1 < K + 1) return false;
    return pow2(m) * big(m - K + 1) >= big(m + 1) * big(m + 1) * big(m + 1);
  };
  for (Index n = lo;; ++n) {
    bool all = true;
    for (Index m = n; m <= std::max<Index>(n, 3) && all; ++m) all = ok(m);
    if (all) return n;
  }
}

DistinguishResult distinguish_eps_example(const IntervalPartition& I, Index window) {
  for (Index n = 0; n < window; ++n)
    if (I.length(n) < (n + 1) * (n + 1) * (n + 1))
      throw PreconditionError("block " + std::to_string(n) + " shorter than (n+1)^3");
  TailBoundedSeq eps = TailBoundedSeq::sum({TailBoundedSeq::p_series(1, 2), TailBoundedSeq::linear_geometric(1, Rational(1, 2))});
  TailBoundedSeq eps_prime = TailBoundedSeq::p_series(1, 3);

  auto nk = std::make_shared<LazyIndices>();
  // values[0] is a sentinel 0 so that values[K] = n_K.
  nk->next = [](Index K, const std::vector<Index>& prev) -> Index {
    if (K == 0) return 0;
    return distinguish_threshold(K, K == 1 ? 0 : prev.back() + 1);
  };
  IntervalPartition Ic = I;
  BlockSlalom plain(
      I,
      [nk, Ic](Index i) {
        if (i < nk->at(1)) return BlockSet();
        Index K = 1;
        while (nk->at(K + 1) <= i) ++K;
        return BlockSet::initial(ceil_of(Rational(xi(i, Ic.length(i))) / Rational(big(K))));
      },
      "distinguish");
  VanishingCertificate cert{"n_{N+1}", [nk](std::uint64_t N) { return nk->at(N + 1); }};
  BlockSlalom phi = plain.with_certificate(cert);

  DistinguishResult r{eps, eps_prime, phi, {}, Verdict::unknown(0, ""), Verdict::unknown(0, ""), {}};
  for (Index K = 1; nk->at(K) < window; ++K) r.n_K.push_back(nk->at(K));

  for (Index i = 0; i < window; ++i) {
    const Index len = I.length(i);
    const BigInt x = xi(i, len);
    // Independent check of the closed form on the defining inequality.
    r.facts.push_back(Fact::claim("xi is the largest m with m/2^|I| < 1/(n+1)^2", i,
                                  Rational(x) / Rational(pow2(len)) < Rational(1, (i + 1) * (i + 1)) &&
                                      Rational(x + 1) / Rational(pow2(len)) >= Rational(1, (i + 1) * (i + 1))));
    if (i < nk->at(1)) continue;
    Index K = 1;
    while (nk->at(K + 1) <= i) ++K;
    const Rational ratio = block_ratio(phi.at(i), len);
    r.facts.push_back(Fact::compare("lower bound |phi(i)|/2^|I_i| >= 1/(i+1)^3", i, ratio, Relation::GreaterEq,
                                    eps_prime.term(i)));
    const Rational upper = Rational(1) / Rational(big((i + 1) * (i + 1) * K)) +
                           Rational(big(i)) / Rational(pow2(i) * big(K));
    r.facts.push_back(Fact::compare("upper chain on group K=" + std::to_string(K), i, ratio, Relation::LessEq,
                                    upper));
  }
  r.member_eps = sigma_member(phi, eps, window);
  r.member_eps_prime = sigma_member(plain, eps_prime, window, 1);
  r.facts.push_back(Fact::claim("phi certified in Sigma for eps", 0, r.member_eps.is_holds(), r.member_eps.detail()));
  r.facts.push_back(Fact::claim("phi refuted in Sigma for eps'", 0, r.member_eps_prime.is_fails(),
                                r.member_eps_prime.detail()));
  return r;
}

}  // namespace slalom
