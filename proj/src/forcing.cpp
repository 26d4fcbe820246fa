#include "slalom/forcing.hpp"

#include <algorithm>

#include "slalom/errors.hpp"

namespace slalom {

ForcingSpace forcing_example_space() {
  DivergenceCertificate d;
  d.name = "min{k : 2^{k+1} >= M}";
  d.threshold = [](const Rational& M) -> Index {
    const BigInt c = ceil_of(M);
    if (c <= 2) return 0;
    return ceil_log2(c) - 1;
  };
  return {IntervalPartition::arithmetic(2, 2), TailBoundedSeq::geometric(Rational(1, 2), Rational(1, 2)), d};
}

bool ForcingCondition::has_point(const Point& x) const {
  return std::any_of(F.begin(), F.end(), [&](const Point& y) { return y.same_as(x); });
}

json ForcingCondition::to_json() const {
  json blocks = json::array(), pts = json::array();
  for (const auto& b : s) blocks.push_back(b.to_json());
  for (const auto& x : F) pts.push_back(x.descriptor());
  return {{"s", blocks}, {"N", N}, {"F", pts}};
}

ForcingCondition ForcingCondition::from_json(const json& j) {
  ForcingCondition c;
  for (const auto& b : j.at("s")) c.s.push_back(BlockSet::from_json(b));
  c.N = j.at("N").get<std::uint64_t>();
  for (const auto& p : j.at("F")) c.F.push_back(Point::from_json(p));
  return c;
}

namespace {

void require_distinct(const std::vector<Point>& F, Index depth) {
  for (std::size_t i = 0; i < F.size(); ++i)
    for (std::size_t j = i + 1; j < F.size(); ++j)
      if (compare_points(F[i], F[j], depth) == 0)
        throw PreconditionError("F lists the point " + F[i].key() + " twice");
}

// First n in [from, threshold(M)) with M > mass(n), scanning exactly.
std::optional<Index> first_width_violation(const ForcingSpace& P, Index from, const Rational& M) {
  if (M <= 0) return std::nullopt;
  const Index top = std::max(from, P.threshold(M));
  for (Index n = from; n < top; ++n)
    if (M > P.mass(n)) return n;
  // spot check the certificate just past its threshold
  for (Index n = top; n < top + 4; ++n)
    if (M > P.mass(n)) throw CertificateError("divergence certificate contradicted at block " + std::to_string(n));
  return std::nullopt;
}

BlockSet restrictions(const ForcingSpace& P, const std::vector<Point>& F, Index n) {
  std::vector<BigInt> codes;
  for (const auto& y : F) codes.push_back(restrict(y, P.I, n).code);
  return BlockSet::of(std::move(codes));
}

}  // namespace

Verdict cond_validate(const ForcingSpace& P, const ForcingCondition& c) {
  if (!P.divergence.is_full()) throw PreconditionError("validation needs a full divergence certificate");
  if (c.N < 1) return Verdict::fails({}, "N must be positive");
  for (Index n = 0; n < c.s.size(); ++n) {
    if (c.s[n].is_predicate()) return Verdict::fails({n}, "s(n) must be explicit");
    auto bound = c.s[n].code_bound();
    if (bound && *bound > pow2(P.I.length(n))) return Verdict::fails({n}, "code outside the block");
  }
  try {
    require_distinct(c.F, P.depth);
  } catch (const PreconditionError& e) {
    return Verdict::fails({}, e.what());
  }
  if (c.F.empty()) return Verdict::holds("F empty");
  const Rational M = Rational(big(c.N) * big(c.F.size()));
  if (auto bad = first_width_violation(P, c.length(), M))
    return Verdict::fails({*bad}, "N|F| = " + to_string(M) + " exceeds 2^|I_n| eps_n");
  return Verdict::holds(P.divergence.name, "exact scan to the threshold for N|F|");
}

LeqResult cond_leq(const ForcingSpace& P, const ForcingCondition& t, const ForcingCondition& s) {
  if (s.length() > t.length()) return {false, "s longer than t"};
  for (Index n = 0; n < s.length(); ++n)
    if (!(s.s[n] == t.s[n])) return {false, "t does not extend s at block " + std::to_string(n)};
  if (t.N < s.N) return {false, "M < N"};
  for (const auto& x : s.F)
    if (!t.has_point(x)) return {false, "F not inside H: " + x.key()};
  for (Index n = s.length(); n < t.length(); ++n) {
    for (const auto& x : s.F)
      if (!t.s[n].contains(restrict(x, P.I, n).code))
        return {false, "point " + x.key() + " misses t(" + std::to_string(n) + ")"};
    if (Rational(big(s.N) * t.s[n].size()) > P.mass(n))
      return {false, "N|t(" + std::to_string(n) + ")| exceeds 2^|I_n| eps_n"};
  }
  return {true, ""};
}

ForcingCondition extend_condition(const ForcingSpace& P, const ForcingCondition& c, Index length) {
  ForcingCondition out = c;
  for (Index n = c.length(); n < length; ++n) out.s.push_back(restrictions(P, c.F, n));
  return out;
}

ForcingCondition dense_add_point(const ForcingSpace& P, const ForcingCondition& c, const Point& x) {
  for (const auto& y : c.F)
    if (compare_points(x, y, P.depth) == 0) throw PreconditionError("point " + x.key() + " already in F");
  const Index L = std::max(c.length(), P.threshold(Rational(big(c.N) * big(c.F.size() + 1))));
  ForcingCondition out = extend_condition(P, c, L);
  out.F.push_back(x);
  return out;
}

ForcingCondition raise_level(const ForcingSpace& P, const ForcingCondition& c, std::uint64_t M) {
  if (M < c.N) throw PreconditionError("raise_level cannot lower N");
  const Index L = std::max(c.length(), P.threshold(Rational(big(M) * big(c.F.size()))));
  ForcingCondition out = extend_condition(P, c, L);
  out.N = M;
  return out;
}

bool LinkedCellKey::contains(const ForcingCondition& c) const {
  if (c.N != N || c.F.size() > m || c.s.size() != s.size()) return false;
  for (Index n = 0; n < s.size(); ++n)
    if (!(c.s[n] == s[n])) return false;
  return true;
}

std::shared_ptr<UltrafilterOracle> UltrafilterOracle::principal(Index i_star, Index window) {
  if (i_star >= window) throw PreconditionError("principal index outside the window");
  std::shared_ptr<UltrafilterOracle> o(new UltrafilterOracle());
  o->name_ = "principal(" + std::to_string(i_star) + ")";
  o->window_ = window;
  o->reps_ = {i_star};
  return o;
}

std::shared_ptr<UltrafilterOracle> UltrafilterOracle::pattern(Index start, Index period, Index residue, Index window) {
  if (period == 0 || residue >= period) throw PreconditionError("bad pattern");
  std::shared_ptr<UltrafilterOracle> o(new UltrafilterOracle());
  o->name_ = "pattern(" + std::to_string(start) + "," + std::to_string(period) + "," + std::to_string(residue) + ")";
  o->window_ = window;
  for (Index i = start; i < window; ++i)
    if (i % period == residue) o->reps_.insert(i);
  if (o->reps_.empty()) throw PreconditionError("pattern has no representative inside the window");
  return o;
}

bool UltrafilterOracle::large(const std::set<Index>& A) {
  const bool ans = std::includes(A.begin(), A.end(), reps_.begin(), reps_.end());
  std::lock_guard<std::mutex> lock(mu_);
  log_.emplace_back(A, ans);
  return ans;
}

std::size_t UltrafilterOracle::decide(const std::vector<std::set<Index>>& family) {
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < family.size(); ++i)
    if (large(family[i])) {
      if (pick) throw OracleInconsistency(name_ + ": two disjoint large sets");
      pick = i;
    }
  if (!pick) throw OracleInconsistency(name_ + ": representatives split across the family");
  return *pick;
}

std::vector<Fact> UltrafilterOracle::check_log() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<Fact> out;
  for (std::size_t i = 0; i < log_.size(); ++i)
    for (std::size_t j = 0; j < log_.size(); ++j) {
      const auto& [A, la] = log_[i];
      const auto& [B, lb] = log_[j];
      if (la && std::includes(B.begin(), B.end(), A.begin(), A.end()) && !lb)
        out.push_back(Fact::claim("oracle log superset closed", j, false, "query " + std::to_string(i)));
      if (la && lb && i < j) {
        std::set<Index> both;
        std::set_intersection(A.begin(), A.end(), B.begin(), B.end(), std::inserter(both, both.begin()));
        if (both.empty()) out.push_back(Fact::claim("oracle log intersection consistent", j, false));
      }
    }
  out.push_back(Fact::claim("oracle log consistent", log_.size(), out.empty()));
  return out;
}

std::vector<Point> sorted_points(const std::vector<Point>& F, Index depth) {
  std::vector<Point> out = F;
  std::sort(out.begin(), out.end(), [depth](const Point& a, const Point& b) { return compare_points(a, b, depth) < 0; });
  return out;
}

ForcingCondition d_limit(const ForcingSpace& P, const LinkedCellKey& cell, const std::vector<ForcingCondition>& family,
                         UltrafilterOracle& oracle) {
  if (family.size() < oracle.window()) throw PreconditionError("family shorter than the oracle window");
  const Index w = oracle.window();
  for (Index i = 0; i < w; ++i)
    if (!cell.contains(family[i])) throw PreconditionError("condition " + std::to_string(i) + " outside the cell");
  std::vector<std::set<Index>> levels(cell.m + 1);
  for (Index i = 0; i < w; ++i) levels[family[i].F.size()].insert(i);
  const Index m_star = oracle.decide(levels);
  const std::set<Index>& A = levels[m_star];
  auto sorted = std::make_shared<std::vector<std::vector<Point>>>(w);
  for (Index i : A) (*sorted)[i] = sorted_points(family[i].F, P.depth);

  ForcingCondition out{cell.s, cell.N, {}};
  std::vector<Index> reps;
  for (Index i : A)
    if (oracle.representatives().count(i)) reps.push_back(i);
  for (Index k = 0; k < m_star; ++k) {
    bool shared = true;
    for (Index i : reps) shared = shared && (*sorted)[i][k].same_as((*sorted)[reps.front()][k]);
    if (shared) {
      out.F.push_back((*sorted)[reps.front()][k]);
      continue;
    }
    // x_k(p) is the bit b whose set {i in A : x_{i,k}(p) = b} is large.
    std::string name = "dlimit[" + oracle.name() + "," + std::to_string(k) + "]";
    for (Index i : reps) name += ":" + (*sorted)[i][k].key();
    std::vector<Index> members(A.begin(), A.end());
    UltrafilterOracle* o = &oracle;
    out.F.push_back(Point::derived(name, [sorted, members, k, o](Index p) {
      std::set<Index> ones;
      for (Index i : members)
        if ((*sorted)[i][k].bit(p)) ones.insert(i);
      if (o->large(ones)) return true;
      std::set<Index> zeros;
      for (Index i : members)
        if (!ones.count(i)) zeros.insert(i);
      if (o->large(zeros)) return false;
      throw OracleInconsistency("no large side at bit " + std::to_string(p));
    }));
  }
  return out;
}

AmalgamateResult amalgamate(const ForcingSpace& P, const ForcingCondition& q, const std::vector<LimitFamily>& limits,
                            UltrafilterOracle& oracle, const std::set<Index>& a) {
  AmalgamateResult r;
  Index extra = 0;
  for (std::size_t k = 0; k < limits.size(); ++k) {
    auto leq = cond_leq(P, q, limits[k].q);
    if (!leq) throw PreconditionError("q is not stronger than q_" + std::to_string(k) + ": " + leq.reason);
    extra += limits[k].q.F.size();
  }
  const Index width = q.F.size() + extra;
  const Rational M = Rational(big(q.N) * big(width));
  if (auto bad = first_width_violation(P, q.length(), M))
    throw PreconditionError("width precondition fails at block " + std::to_string(*bad) +
                            ": N(|F| + sum m_*) exceeds 2^|I_n| eps_n");
  r.facts.push_back(Fact::claim("width precondition N(|F| + sum m_*) <= 2^|I_n| eps_n beyond |s|", q.length(), true,
                                "scanned to the threshold for " + to_string(M)));

  const Index w = oracle.window();
  for (std::size_t k = 0; k < limits.size(); ++k) {
    const auto& L = limits[k];
    std::set<Index> bk;
    for (Index n = 0; n < w && n < L.family.size(); ++n) {
      const auto& p = L.family[n];
      if (p.F.size() != L.q.F.size()) continue;
      bool ok = true;
      for (const auto& x : p.F)
        for (Index l = L.q.length(); l < q.length() && ok; ++l) ok = q.s[l].contains(restrict(x, P.I, l).code);
      if (ok) bk.insert(n);
    }
    r.facts.push_back(Fact::claim("b_" + std::to_string(k) + " large", k, oracle.large(bk)));
    r.b.push_back(std::move(bk));
  }
  std::optional<Index> pick;
  for (Index n : a) {
    bool in_all = true;
    for (const auto& bk : r.b) in_all = in_all && bk.count(n);
    if (in_all) {
      pick = n;
      break;
    }
  }
  if (!pick) {
    std::string msg = "a and the b_k have no common index on the window; sizes:";
    for (const auto& bk : r.b) msg += " " + std::to_string(bk.size());
    throw WindowExhausted(msg);
  }
  r.n = *pick;
  r.q = q;
  for (const auto& L : limits)
    for (const auto& x : L.family[r.n].F)
      if (!r.q.has_point(x)) r.q.F.push_back(x);
  require_distinct(r.q.F, P.depth);

  r.facts.push_back(Fact::compare("|F'| <= |F| + sum m_*", r.n, Rational(big(r.q.F.size())), Relation::LessEq,
                                  Rational(big(width))));
  Verdict v = cond_validate(P, r.q);
  r.facts.push_back(Fact::claim("q' validates", r.n, v.is_holds(), v.detail()));
  auto leq = cond_leq(P, r.q, q);
  r.facts.push_back(Fact::claim("q' <= q", r.n, leq.holds, leq.reason));
  for (std::size_t k = 0; k < limits.size(); ++k) {
    auto l2 = cond_leq(P, r.q, limits[k].family[r.n]);
    r.facts.push_back(Fact::claim("q' <= p_{" + std::to_string(k) + ",n}", r.n, l2.holds, l2.reason));
  }
  return r;
}

ForcingSession::ForcingSession(ForcingSpace P) : P_(std::move(P)) { history_.push_back(ForcingCondition{}); }

void ForcingSession::add_point(const Point& x) {
  history_.push_back(dense_add_point(P_, current(), x));
  joins_.emplace_back(x, current().length());
  ops_.push_back({{"op", "add"}, {"point", x.descriptor()}});
}

void ForcingSession::extend(Index length) {
  history_.push_back(extend_condition(P_, current(), std::max(length, current().length())));
  ops_.push_back({{"op", "extend"}, {"length", length}});
}

void ForcingSession::raise(std::uint64_t M) {
  history_.push_back(raise_level(P_, current(), M));
  ops_.push_back({{"op", "raise"}, {"N", M}});
}

ForcingSession ForcingSession::replay(ForcingSpace P, const json& transcript) {
  ForcingSession s(std::move(P));
  for (const auto& op : transcript) {
    const std::string kind = op.at("op");
    if (kind == "add") s.add_point(Point::from_json(op.at("point")));
    else if (kind == "extend") s.extend(op.at("length").get<Index>());
    else if (kind == "raise") s.raise(op.at("N").get<std::uint64_t>());
    else throw PreconditionError("unknown session op " + kind);
  }
  return s;
}

std::vector<Fact> ForcingSession::replay_facts() const {
  std::vector<Fact> out;
  for (Index i = 0; i < history_.size(); ++i) {
    Verdict v = cond_validate(P_, history_[i]);
    out.push_back(Fact::claim("session step validates", i, v.is_holds(), v.detail()));
    if (i > 0) {
      auto leq = cond_leq(P_, history_[i], history_[i - 1]);
      out.push_back(Fact::claim("session step is stronger", i, leq.holds, leq.reason));
    }
  }
  const ForcingCondition& g = current();
  for (const auto& [x, join] : joins_) {
    bool captured = true;
    Index miss = 0;
    for (Index n = join; n < g.length() && captured; ++n)
      if (!g.s[n].contains(restrict(x, P_.I, n).code)) {
        captured = false;
        miss = n;
      }
    out.push_back(Fact::claim("generic prefix captures " + x.key() + " from its join", join, captured,
                              captured ? "" : "missed at block " + std::to_string(miss)));
  }
  return out;
}

}  // namespace slalom
