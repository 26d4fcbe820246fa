#include "slalom/sequences.hpp"

#include <algorithm>

#include "slalom/errors.hpp"

namespace slalom {

Rational rpow(const Rational& q, Index n) {
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), n);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), n);
  return ratio(num, den);
}

namespace {

// Least k >= 0 where a nonincreasing tail drops below r; walks up to limit.
std::optional<Index> walk_below(const std::function<Rational(Index)>& tail, const Rational& r,
                                Index limit = 1u << 20) {
  Index hi = 1;
  if (tail(0) < r) return 0;
  while (!(tail(hi) < r)) {
    if (hi > limit) return std::nullopt;
    hi *= 2;
  }
  Index lo = hi / 2;  // tail(lo) >= r
  while (hi - lo > 1) {
    Index mid = lo + (hi - lo) / 2;
    if (tail(mid) < r)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

void require_ratio(const Rational& q) {
  if (q <= 0 || q >= 1) throw PreconditionError("ratio must lie in (0,1): " + to_string(q));
}

}  // namespace

TailBoundedSeq TailBoundedSeq::geometric(const Rational& first, const Rational& q) {
  require_ratio(q);
  if (first <= 0) throw PreconditionError("geometric first term must be positive");
  Generator g;
  g.family = "geometric";
  g.params = {{"first", to_string(first)}, {"ratio", to_string(q)}};
  Rational scale = first / (Rational(1) - q);
  g.term = [first, q](Index n) { return Rational(first * rpow(q, n)); };
  g.tail_bound = [scale, q](Index k) { return Rational(scale * rpow(q, k)); };
  g.shrink = [scale, q](const Rational& r) -> std::optional<Index> {
    if (r <= 0) return std::nullopt;
    Rational t = scale;
    for (Index k = 0; k < (1u << 22); ++k) {
      if (t < r) return k;
      t *= q;
    }
    return std::nullopt;
  };
  g.decreasing = true;
  return custom(std::move(g));
}

TailBoundedSeq TailBoundedSeq::p_series(const Rational& c, unsigned p) {
  if (p < 2) throw PreconditionError("p-series needs p >= 2");
  if (c <= 0) throw PreconditionError("p-series scale must be positive");
  Generator g;
  g.family = "p_series";
  g.params = {{"c", to_string(c)}, {"p", p}};
  g.term = [c, p](Index n) {
    BigInt d;
    mpz_pow_ui(d.get_mpz_t(), big(n + 1).get_mpz_t(), p);
    return Rational(c / Rational(d));
  };
  // sum_{m >= k+1} m^{-p} <= integral_k^inf x^{-p} dx for k >= 1, and
  // <= 1 + 1/(p-1) for k = 0.
  auto tail = [c, p](Index k) {
    if (k == 0) return Rational(c * ratio(p, p - 1));
    BigInt d;
    mpz_pow_ui(d.get_mpz_t(), big(k).get_mpz_t(), p - 1);
    return Rational(c / (Rational(p - 1) * Rational(d)));
  };
  g.tail_bound = tail;
  g.shrink = [tail](const Rational& r) -> std::optional<Index> {
    if (r <= 0) return std::nullopt;
    return walk_below(tail, r, Index(1) << 40);
  };
  g.decreasing = true;
  return custom(std::move(g));
}

TailBoundedSeq TailBoundedSeq::linear_geometric(const Rational& c, const Rational& q) {
  require_ratio(q);
  if (c <= 0) throw PreconditionError("scale must be positive");
  Generator g;
  g.family = "linear_geometric";
  g.params = {{"c", to_string(c)}, {"ratio", to_string(q)}};
  g.term = [c, q](Index n) { return Rational(c * Rational(big(n)) * rpow(q, n)); };
  Rational one_minus = Rational(1) - q;
  // sum_{n >= k} n q^n = q^k (k(1-q) + q) / (1-q)^2
  auto tail = [c, q, one_minus](Index k) {
    return Rational(c * rpow(q, k) * (Rational(big(k)) * one_minus + q) /
                    (one_minus * one_minus));
  };
  g.tail_bound = tail;
  g.shrink = [tail](const Rational& r) -> std::optional<Index> {
    if (r <= 0) return std::nullopt;
    return walk_below(tail, r, Index(1) << 24);
  };
  g.decreasing = false;
  g.positive_from = 1;
  return custom(std::move(g));
}

TailBoundedSeq TailBoundedSeq::sum(std::vector<TailBoundedSeq> parts) {
  if (parts.empty()) throw PreconditionError("empty sum");
  Generator g;
  g.family = "sum";
  json arr = json::array();
  bool dec = true;
  std::optional<Index> from;
  for (const auto& p : parts) {
    arr.push_back(p.to_json());
    dec = dec && p.decreasing();
    auto pf = p.impl_->gen.positive_from;
    if (pf && (!from || *pf < *from)) from = std::max<Index>(*pf, p.prefix().size());
  }
  g.params = {{"parts", arr}};
  g.term = [parts](Index n) {
    Rational s = 0;
    for (const auto& p : parts) s += p.term(n);
    return s;
  };
  g.tail_bound = [parts](Index k) {
    Rational s = 0;
    for (const auto& p : parts) s += p.tail_bound(k);
    return s;
  };
  g.shrink = [parts](const Rational& r) -> std::optional<Index> {
    Rational share = r / Rational(big(parts.size()));
    Index k = 0;
    for (const auto& p : parts) {
      auto kp = p.shrink(share);
      if (!kp) return std::nullopt;
      k = std::max(k, *kp);
    }
    return k;
  };
  g.decreasing = dec;
  g.positive_from = from;
  return custom(std::move(g));
}

TailBoundedSeq TailBoundedSeq::zero() {
  Generator g;
  g.family = "zero";
  g.term = [](Index) { return Rational(0); };
  g.tail_bound = [](Index) { return Rational(0); };
  g.shrink = [](const Rational& r) -> std::optional<Index> {
    if (r <= 0) return std::nullopt;
    return 0;
  };
  g.decreasing = false;
  g.positive_from = std::nullopt;
  return custom(std::move(g));
}

TailBoundedSeq TailBoundedSeq::custom(Generator g) {
  if (!g.term || !g.tail_bound || !g.shrink)
    throw PreconditionError("generator needs term, tail bound and shrink");
  auto impl = std::make_shared<Impl>();
  impl->gen = std::move(g);
  return TailBoundedSeq(std::move(impl));
}

TailBoundedSeq TailBoundedSeq::with_prefix(std::vector<Rational> prefix) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->prefix = std::move(prefix);
  const Index p = impl->prefix.size();
  impl->prefix_suffix_sums.assign(p + 1, Rational(0));
  impl->prefix_suffix_sums[p] = impl->gen.tail_bound(p);
  for (Index k = p; k-- > 0;) {
    if (impl->prefix[k] < 0) throw PreconditionError("negative prefix term");
    impl->prefix_suffix_sums[k] = impl->prefix_suffix_sums[k + 1] + impl->prefix[k];
  }
  return TailBoundedSeq(std::move(impl));
}

TailBoundedSeq TailBoundedSeq::as_nonnegative() const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->nonnegative_only = true;
  return TailBoundedSeq(std::move(impl));
}

TailBoundedSeq::Sign TailBoundedSeq::sign() const {
  if (impl_->nonnegative_only) return Sign::NonNegative;
  const auto& pf = impl_->gen.positive_from;
  if (!pf || *pf > impl_->prefix.size()) return Sign::NonNegative;
  for (const auto& q : impl_->prefix)
    if (q <= 0) return Sign::NonNegative;
  return Sign::Positive;
}

Rational TailBoundedSeq::term(Index n) const {
  if (n < impl_->prefix.size()) return impl_->prefix[n];
  return impl_->gen.term(n);
}

Rational TailBoundedSeq::tail_bound(Index k) const {
  if (k < impl_->prefix.size()) return impl_->prefix_suffix_sums[k];
  return impl_->gen.tail_bound(k);
}

std::optional<Index> TailBoundedSeq::shrink(const Rational& r) const {
  if (r <= 0) return std::nullopt;
  auto k = impl_->gen.shrink(r);
  if (!k) return std::nullopt;
  return std::max<Index>(*k, impl_->prefix.size());
}

Index TailBoundedSeq::first_below(const Rational& r, Index lo) const {
  auto s = shrink(r);
  if (!s) throw CertificateError("shrink cannot reach " + to_string(r) + " for " + family());
  Index hi = std::max(*s, lo);
  if (!(tail_bound(hi) < r))
    throw CertificateError("shrink result " + std::to_string(hi) + " misses target " +
                           to_string(r) + " for " + family());
  if (tail_bound(lo) < r) return lo;
  // tail_bound(lo) >= r > tail_bound(hi)
  while (hi - lo > 1) {
    Index mid = lo + (hi - lo) / 2;
    if (tail_bound(mid) < r)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

bool TailBoundedSeq::decreasing() const {
  if (!impl_->gen.decreasing) return false;
  const auto& p = impl_->prefix;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (!(p[i] > p[i + 1])) return false;
  if (!p.empty() && !(p.back() > impl_->gen.term(p.size()))) return false;
  return true;
}

json TailBoundedSeq::to_json() const {
  json pre = json::array();
  for (const auto& q : impl_->prefix) pre.push_back(to_string(q));
  return {{"family", impl_->gen.family}, {"params", impl_->gen.params}, {"prefix", pre}};
}

TailBoundedSeq TailBoundedSeq::from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  const json params = j.value("params", json::object());
  auto rat = [&](const char* key) { return parse_rational(params.at(key).get<std::string>()); };
  std::optional<TailBoundedSeq> base;
  if (family == "geometric")
    base = geometric(rat("first"), rat("ratio"));
  else if (family == "p_series")
    base = p_series(rat("c"), params.at("p").get<unsigned>());
  else if (family == "linear_geometric")
    base = linear_geometric(rat("c"), rat("ratio"));
  else if (family == "zero")
    base = zero();
  else if (family == "sum") {
    std::vector<TailBoundedSeq> parts;
    for (const auto& p : params.at("parts")) parts.push_back(from_json(p));
    base = sum(std::move(parts));
  } else
    throw PreconditionError("unknown sequence family: " + family);
  std::vector<Rational> prefix;
  for (const auto& s : j.value("prefix", json::array())) prefix.push_back(parse_rational(s.get<std::string>()));
  if (prefix.empty()) return *base;
  return base->with_prefix(std::move(prefix));
}

std::vector<Fact> TailBoundedSeq::validate(Index window) const {
  std::vector<Fact> out;
  const bool strict = sign() == Sign::Positive;
  for (Index n = 0; n < window; ++n) {
    Rational t = term(n);
    out.push_back(Fact::compare(strict ? "term positive" : "term nonnegative", n, t,
                                strict ? Relation::Greater : Relation::GreaterEq, Rational(0)));
  }
  for (Index k = 0; k + 1 < window; ++k)
    out.push_back(Fact::compare("tail bound nonincreasing", k, tail_bound(k + 1), Relation::LessEq,
                                tail_bound(k)));
  for (Index k : {Index(0), Index(1), window / 3, window / 2}) {
    if (k >= window) continue;
    Rational acc = 0;
    Rational bound = tail_bound(k);
    for (Index m = k; m < window; ++m) {
      acc += term(m);
      if (m + 1 == window || (m - k) % 16 == 0)
        out.push_back(Fact::compare("partial sum under tail bound", m, acc, Relation::LessEq, bound));
    }
  }
  Rational top = tail_bound(0);
  if (top > 0) {
    for (Index e : {1, 2, 5, 10, 20}) {
      Rational r = top * pow2q(-static_cast<std::int64_t>(e));
      auto k = shrink(r);
      if (!k) {
        out.push_back(Fact::claim("shrink reaches target", e, false, to_string(r)));
        continue;
      }
      out.push_back(Fact::compare("tail at shrink below target", *k, tail_bound(*k), Relation::Less, r));
    }
  }
  return out;
}

Rational partial_sum(const TailBoundedSeq& eps, Index from, Index to) {
  if (from > to) throw PreconditionError("partial_sum needs from <= to");
  Rational s = 0;
  for (Index n = from; n < to; ++n) s += eps.term(n);
  return s;
}

DeltaWitness::DeltaWitness(TailBoundedSeq eps)
    : eps_(std::move(eps)), s_bound_(eps_.tail_bound(0)), state_(std::make_shared<State>()) {
  if (s_bound_ <= 0) throw PreconditionError("delta construction needs a positive tail bound");
  state_->bps.push_back(0);
}

void DeltaWitness::extend_to(std::size_t count) const {
  std::lock_guard<std::mutex> lock(state_->mu);
  auto& bps = state_->bps;
  while (bps.size() < count) {
    const Index i = bps.size();
    Rational target = s_bound_ / Rational(pow2(2 * i));
    bps.push_back(eps_.first_below(target, bps.back() + 1));
  }
}

Index DeltaWitness::breakpoint(Index i) const {
  extend_to(i + 1);
  std::lock_guard<std::mutex> lock(state_->mu);
  return state_->bps[i];
}

std::vector<Index> DeltaWitness::breakpoints(Index count) const {
  extend_to(count);
  std::lock_guard<std::mutex> lock(state_->mu);
  return {state_->bps.begin(), state_->bps.begin() + count};
}

Index DeltaWitness::level(Index j) const {
  Index i = 1;
  while (breakpoint(i) <= j) ++i;
  return i - 1;
}

DeltaWitness build_delta(const TailBoundedSeq& eps) { return DeltaWitness(eps); }

}  // namespace slalom
