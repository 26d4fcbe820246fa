#include "slalom/slaloms.hpp"

#include <atomic>

#include "slalom/errors.hpp"
#include "slalom/random.hpp"

namespace slalom {

namespace {
std::atomic<std::uint64_t> next_slalom{1};
}

BlockSlalom::BlockSlalom(IntervalPartition I, Generator at, std::string name) {
  auto impl = std::make_shared<Impl>(
      Impl{std::move(I), std::move(at), std::move(name), 0, {}, std::nullopt, std::nullopt, std::nullopt, nullptr});
  impl->id = next_slalom++;
  impl->memo = std::make_shared<Memo>();
  impl_ = std::move(impl);
}

BlockSlalom BlockSlalom::empty(IntervalPartition I) {
  return BlockSlalom(std::move(I), [](Index) { return BlockSet(); }, "empty").with_empty_from(0).with_size_bound(0);
}

BlockSlalom BlockSlalom::from_blocks(IntervalPartition I, std::vector<BlockSet> blocks) {
  const Index count = blocks.size();
  auto shared = std::make_shared<const std::vector<BlockSet>>(std::move(blocks));
  return BlockSlalom(
             std::move(I),
             [shared](Index n) { return n < shared->size() ? (*shared)[n] : BlockSet(); }, "listed")
      .with_empty_from(count);
}

BlockSlalom BlockSlalom::random_sparse(IntervalPartition I, std::uint64_t seed, Index min_size,
                                       Index max_size) {
  if (min_size > max_size) throw PreconditionError("min_size above max_size");
  IntervalPartition part = I;
  auto gen = [part, seed, min_size, max_size](Index n) {
    Rng rng(seed, n);
    const Index len = part.length(n);
    Index k = rng.between(min_size, max_size);
    if (len < 63 && (Index(1) << len) < k) k = Index(1) << len;
    std::vector<BigInt> codes;
    // sparse rejection sampling; dense small blocks fall back to a shuffle
    if (len <= 12 && 2 * k > (Index(1) << len)) {
      std::vector<Index> all(Index(1) << len);
      for (Index c = 0; c < all.size(); ++c) all[c] = c;
      for (Index i = 0; i < k; ++i) {
        Index j = rng.between(i, all.size() - 1);
        std::swap(all[i], all[j]);
        codes.push_back(big(all[i]));
      }
    } else {
      std::set<BigInt> seen;
      while (seen.size() < k) seen.insert(rng.code(len));
      codes.assign(seen.begin(), seen.end());
    }
    return BlockSet::of(std::move(codes));
  };
  return BlockSlalom(std::move(I), gen, "random_sparse:" + std::to_string(seed)).with_size_bound(max_size);
}

BlockSlalom BlockSlalom::from_json(const json& j) {
  IntervalPartition I = IntervalPartition::from_json(j.at("partition"));
  std::vector<BlockSet> blocks;
  for (const auto& b : j.at("blocks")) blocks.push_back(BlockSet::from_json(b));
  return from_blocks(std::move(I), std::move(blocks));
}

BlockSlalom BlockSlalom::with_certificate(VanishingCertificate c) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->cert = std::move(c);
  return BlockSlalom(std::move(impl));
}

BlockSlalom BlockSlalom::with_size_bound(Index c) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->size_bound = c;
  return BlockSlalom(std::move(impl));
}

BlockSlalom BlockSlalom::with_empty_from(Index n) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->empty_from = n;
  return BlockSlalom(std::move(impl));
}

BlockSet BlockSlalom::at(Index n) const {
  {
    std::lock_guard<std::mutex> lock(impl_->memo->mu);
    auto it = impl_->memo->blocks.find(n);
    if (it != impl_->memo->blocks.end()) return it->second;
  }
  BlockSet s = impl_->gen(n);
  std::lock_guard<std::mutex> lock(impl_->memo->mu);
  impl_->memo->blocks.emplace(n, s);
  return s;
}

bool BlockSlalom::known_superset_of(const BlockSlalom& other) const {
  return id() == other.id() || impl_->contains.count(other.id()) > 0;
}

json BlockSlalom::to_json(Index window) const {
  json blocks = json::array();
  for (Index n = 0; n < window; ++n) blocks.push_back(at(n).to_json());
  return {{"name", impl_->name}, {"partition", impl_->I.to_json(window)}, {"blocks", blocks}};
}

BlockSlalom unite(const BlockSlalom& a, const BlockSlalom& b) {
  if (a.partition().eventually_equal(b.partition()) != Index(0))
    throw PreconditionError("union needs slaloms over the same partition");
  BlockSlalom ca = a, cb = b;
  BlockSlalom out(
      a.partition(),
      [ca, cb](Index n) { return unite(ca.at(n), cb.at(n), ca.block_length(n)); },
      "union(" + a.name() + "," + b.name() + ")");
  auto impl = std::make_shared<BlockSlalom::Impl>(*out.impl_);
  impl->contains = a.impl_->contains;
  impl->contains.insert(b.impl_->contains.begin(), b.impl_->contains.end());
  impl->contains.insert(a.id());
  impl->contains.insert(b.id());
  if (a.size_bound() && b.size_bound()) impl->size_bound = *a.size_bound() + *b.size_bound();
  if (a.empty_from() && b.empty_from()) impl->empty_from = std::max(*a.empty_from(), *b.empty_from());
  return BlockSlalom(std::move(impl));
}

std::vector<Fact> check_block_ranges(const BlockSlalom& phi, Index window) {
  std::vector<Fact> out;
  for (Index n = 0; n < window; ++n) {
    BlockSet s = phi.at(n);
    const Index len = phi.block_length(n);
    out.push_back(Fact::compare("block size within capacity", n, Rational(s.size()), Relation::LessEq,
                                Rational(pow2(len))));
    if (auto bound = s.code_bound())
      out.push_back(Fact::compare("codes below 2^len", n, Rational(*bound), Relation::LessEq,
                                  Rational(pow2(len))));
    if (s.is_predicate() && len <= 12)
      out.push_back(Fact::compare("predicate size equals brute force", n, Rational(s.size()),
                                  Relation::Equal, Rational(brute_force_count(s, len))));
    if (phi.size_bound())
      out.push_back(Fact::compare("structural size bound", n, Rational(s.size()), Relation::LessEq,
                                  Rational(big(*phi.size_bound()))));
    if (phi.empty_from() && n >= *phi.empty_from())
      out.push_back(Fact::claim("structurally empty block", n, s.empty()));
  }
  return out;
}

Rational relative_size(const BlockSlalom& phi, const TailBoundedSeq& eps, Index n) {
  return Rational(phi.at(n).size()) / block_mass(phi.partition(), eps, n);
}

CertificateCheck check_vanishing(const BlockSlalom& phi, const TailBoundedSeq& eps,
                                 const VanishingCertificate& cert, Index span, Index limit) {
  CertificateCheck out;
  for (std::uint64_t N : sample_levels()) {
    Index t = cert.threshold(N);
    for (Index n = t; n < t + span && n < limit; ++n) {
      Fact f = Fact::compare("vanishing " + cert.name + " at N=" + std::to_string(N), n,
                             Rational(big(N) * phi.at(n).size()), Relation::Less,
                             block_mass(phi.partition(), eps, n));
      out.ok = out.ok && f.pass;
      out.facts.push_back(std::move(f));
    }
  }
  return out;
}

namespace {
Index span_for(Index horizon) { return std::max<Index>(4, std::min<Index>(horizon, 64)); }
}  // namespace

Verdict sigma_member(const BlockSlalom& phi, const TailBoundedSeq& eps, Index horizon,
                     std::uint64_t fail_level) {
  std::string note;
  if (phi.empty_from() && *phi.empty_from() <= horizon)
    return Verdict::holds("empty from block " + std::to_string(*phi.empty_from()));
  if (phi.certificate()) {
    auto check = check_vanishing(phi, eps, *phi.certificate(), span_for(horizon), horizon);
    if (check.ok) return Verdict::holds(phi.certificate()->name, "spot-validated");
    const Fact* bad = first_failure(check.facts);
    note = "certificate '" + phi.certificate()->name + "' contradicted at block " +
           std::to_string(bad->index) + "; ";
  }
  std::vector<Index> tail;
  for (Index n = horizon / 2; n < horizon; ++n) {
    Rational lhs = Rational(big(fail_level) * phi.at(n).size());
    if (lhs >= block_mass(phi.partition(), eps, n)) tail.push_back(n);
  }
  if (!tail.empty())
    return Verdict::fails(tail, note + "N=" + std::to_string(fail_level) +
                                    " violates N*|phi(n)| < 2^|I_n|*eps_n in the upper half of the window");
  return Verdict::unknown(horizon, note + "consistent up to horizon");
}

Verdict sstar_contributive(const IntervalPartition& I, const TailBoundedSeq& eps, Index horizon,
                           const ContributivityEvidence& ev) {
  std::string note;
  if (ev.divergence) {
    auto check = check_divergence(I, eps, *ev.divergence, span_for(horizon));
    if (check.ok) return Verdict::holds(ev.divergence->name, ev.divergence->is_full() ? "full limit" : "along a subsequence");
    note = "divergence certificate contradicted; ";
  }
  if (ev.bounded) {
    auto check = check_boundedness(I, eps, *ev.bounded, horizon);
    if (check.ok)
      return Verdict::fails({}, note + "mass bounded by " + to_string(ev.bounded->bound) + " (" +
                                    ev.bounded->name + ")");
    note += "boundedness certificate contradicted; ";
  }
  Rational running = 0;
  for (Index n = 0; n < horizon; ++n) running = std::max(running, block_mass(I, eps, n));
  return Verdict::unknown(horizon, note + "running max of mass " + to_string(running));
}

Verdict e_contributive(const IntervalPartition& I, const TailBoundedSeq& eps, Index horizon,
                       const ContributivityEvidence& ev) {
  ContributivityEvidence full = ev;
  if (full.divergence && !full.divergence->is_full()) full.divergence.reset();
  Verdict v = sstar_contributive(I, eps, horizon, full);
  if (v.is_unknown() && ev.divergence && !ev.divergence->is_full())
    return Verdict::unknown(horizon, v.detail() + "; only a subsequence certificate was supplied");
  return v;
}

std::vector<Index> hits(const Point& x, const BlockSlalom& phi, Index lo, Index hi) {
  std::vector<Index> out;
  for (Index n = lo; n < hi; ++n) {
    BlockSet s = phi.at(n);
    if (s.empty()) continue;
    if (s.contains(restrict(x, phi.partition(), n).code)) out.push_back(n);
  }
  return out;
}

Verdict io_verdict(const Point& x, const BlockSlalom& phi, Index horizon,
                   const std::optional<HitCertificate>& cert) {
  std::string note;
  if (cert) {
    bool ok = true;
    for (Index n = 0; n < horizon && ok; ++n) {
      Index h = cert->next_hit(n);
      ok = h >= n && phi.at(h).contains(restrict(x, phi.partition(), h).code);
    }
    if (ok) return Verdict::holds(cert->name, "hit generator validated on the window");
    note = "hit certificate contradicted; ";
  }
  if (phi.empty_from())
    return Verdict::fails({*phi.empty_from()}, note + "slalom empty from this block on");
  auto h = hits(x, phi, 0, horizon);
  std::string stats = std::to_string(h.size()) + " hits";
  if (!h.empty()) stats += ", last at " + std::to_string(h.back());
  return Verdict::unknown(horizon, note + stats);
}

Verdict ae_verdict(const Point& x, const BlockSlalom& phi, Index horizon,
                   const std::optional<MembershipCertificate>& cert) {
  auto h = hits(x, phi, 0, horizon);
  std::vector<bool> hit(horizon, false);
  for (Index n : h) hit[n] = true;
  std::string note;
  if (cert) {
    bool ok = true;
    for (Index n = cert->from; n < horizon; ++n) ok = ok && hit[n];
    if (ok) return Verdict::holds(cert->name, "membership validated from " + std::to_string(cert->from));
    note = "membership certificate contradicted; ";
  }
  std::vector<Index> escapes;
  for (Index n = horizon / 2; n < horizon; ++n)
    if (!hit[n]) escapes.push_back(n);
  if (!escapes.empty()) return Verdict::fails(escapes, note + "escapes in the upper half of the window");
  Index last_escape = 0;
  bool any = false;
  for (Index n = 0; n < horizon; ++n)
    if (!hit[n]) {
      any = true;
      last_escape = n;
    }
  return Verdict::unknown(horizon, note + "consistent up to horizon" +
                                       (any ? "; last escape at " + std::to_string(last_escape) : ""));
}

std::vector<Index> inclusion_failures(const BlockSlalom& phi, const BlockSlalom& psi, Index horizon) {
  std::vector<Index> out;
  for (Index n = 0; n < horizon; ++n)
    if (member_outside(phi.at(n), psi.at(n), phi.block_length(n))) out.push_back(n);
  return out;
}

Verdict pointwise_included(const BlockSlalom& phi, const BlockSlalom& psi, Index horizon) {
  auto failures = inclusion_failures(phi, psi, horizon);
  if (psi.known_superset_of(phi)) {
    if (!failures.empty()) throw std::logic_error("structural superset contradicted");
    return Verdict::holds(phi.id() == psi.id() ? "identity" : "built as a union containing phi");
  }
  if (phi.empty_from() && *phi.empty_from() <= horizon) {
    bool late = false;
    for (Index n : failures) late = late || n >= *phi.empty_from();
    if (!late) return Verdict::holds("phi empty from block " + std::to_string(*phi.empty_from()));
  }
  std::vector<Index> tail;
  for (Index n : failures)
    if (n >= horizon / 2) tail.push_back(n);
  if (!tail.empty()) return Verdict::fails(tail, "phi(n) not inside psi(n) in the upper half of the window");
  return Verdict::unknown(horizon, "consistent up to horizon");
}

RefuterResult refuter_point(const BlockSlalom& phi, const BlockSlalom& psi, Index horizon,
                            RefuterMode mode) {
  if (phi.partition().eventually_equal(psi.partition()) != Index(0))
    throw PreconditionError("refuter needs slaloms over the same partition");
  RefuterResult out;
  out.witnessed = inclusion_failures(phi, psi, horizon);
  if (out.witnessed.empty())
    throw PreconditionError("refuter unavailable: phi(n) inside psi(n) on the whole window");
  PointBuilder pb;
  std::size_t w = 0;
  for (Index n = 0; n < horizon; ++n) {
    const Index len = phi.block_length(n);
    std::optional<BigInt> code;
    if (w < out.witnessed.size() && out.witnessed[w] == n) {
      code = member_outside(phi.at(n), psi.at(n), len);
      ++w;
    } else if (mode == RefuterMode::Infinitely) {
      code = psi.at(n).first_nonmember(len);
    } else {
      code = phi.at(n).first_member(len);
    }
    if (!code) {
      if (mode == RefuterMode::AlmostAll)
        throw PreconditionError("phi empty at block " + std::to_string(n) + " inside the window");
      out.exceptions.push_back(n);
      continue;
    }
    pb.set_block(phi.partition().block(n), *code);
  }
  out.x = pb.build();
  return out;
}

}  // namespace slalom
