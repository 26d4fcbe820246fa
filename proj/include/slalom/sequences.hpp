#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "slalom/rational.hpp"
#include "slalom/verdict.hpp"

namespace slalom {

Rational rpow(const Rational& q, Index n);

// A nonnegative rational sequence together with a certified bound on every
// tail sum and a way to push that bound below any positive target.
class TailBoundedSeq {
 public:
  struct Generator {
    std::string family;
    json params = json::object();
    std::function<Rational(Index)> term;
    // Must satisfy sum_{n >= k} term(n) <= tail_bound(k), nonincreasing in k.
    std::function<Rational(Index)> tail_bound;
    // Some k with tail_bound(k) < r, or nothing if the bound never gets there.
    std::function<std::optional<Index>(const Rational&)> shrink;
    bool decreasing = false;
    // Terms are strictly positive from this index on; nothing if not known.
    std::optional<Index> positive_from = 0;
  };

  enum class Sign { Positive, NonNegative };

  static TailBoundedSeq geometric(const Rational& first, const Rational& ratio);
  // c / (n+1)^p with p >= 2.
  static TailBoundedSeq p_series(const Rational& c, unsigned p);
  // c * n * ratio^n. The n = 0 term vanishes, so positivity needs a prefix.
  static TailBoundedSeq linear_geometric(const Rational& c, const Rational& ratio);
  static TailBoundedSeq sum(std::vector<TailBoundedSeq> parts);
  static TailBoundedSeq zero();
  static TailBoundedSeq custom(Generator g);

  // Replace the first prefix.size() terms; the generator supplies the rest.
  TailBoundedSeq with_prefix(std::vector<Rational> prefix) const;
  TailBoundedSeq as_nonnegative() const;

  Rational term(Index n) const;
  Rational tail_bound(Index k) const;
  std::optional<Index> shrink(const Rational& r) const;
  // Least k >= lo with tail_bound(k) < r. Throws CertificateError when the
  // shrink map cannot reach r.
  Index first_below(const Rational& r, Index lo = 0) const;

  bool decreasing() const;
  Sign sign() const;
  const std::string& family() const { return impl_->gen.family; }
  const std::vector<Rational>& prefix() const { return impl_->prefix; }

  json to_json() const;
  static TailBoundedSeq from_json(const json& j);

  // Sampled checks of positivity, tail certificates and shrink.
  std::vector<Fact> validate(Index window) const;

 private:
  struct Impl {
    Generator gen;
    std::vector<Rational> prefix;
    std::vector<Rational> prefix_suffix_sums;
    bool nonnegative_only = false;
  };
  explicit TailBoundedSeq(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

Rational partial_sum(const TailBoundedSeq& eps, Index from, Index to);

// delta_j = 2^i on [n_i, n_{i+1}), built so that sum delta_j eps_j < 2 sBound.
class DeltaWitness {
 public:
  explicit DeltaWitness(TailBoundedSeq eps);

  const TailBoundedSeq& eps() const { return eps_; }
  const Rational& s_bound() const { return s_bound_; }
  Index breakpoint(Index i) const;
  Index level(Index j) const;
  BigInt value(Index j) const { return pow2(level(j)); }
  // Breakpoints n_0..n_{count-1}.
  std::vector<Index> breakpoints(Index count) const;

 private:
  struct State {
    std::mutex mu;
    std::vector<Index> bps;
  };
  void extend_to(std::size_t count) const;

  TailBoundedSeq eps_;
  Rational s_bound_;
  std::shared_ptr<State> state_;
};

DeltaWitness build_delta(const TailBoundedSeq& eps);

}  // namespace slalom
