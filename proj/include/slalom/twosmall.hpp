#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "slalom/partitions.hpp"
#include "slalom/point.hpp"
#include "slalom/sequences.hpp"
#include "slalom/slaloms.hpp"
#include "slalom/verdict.hpp"

namespace slalom {

// F_n, a set of length-n words (bit p of a word is position p), with a
// certified bound on |F_n|/2^n.
struct NullApprox {
  std::string name;
  std::function<std::vector<BigInt>(Index)> F;
  TailBoundedSeq ratios;

  static NullApprox empty();
  // F_n = {x|n} for the given point.
  static NullApprox along(const Point& x);
  // F_n = {x|n} plus up to `extra` seeded random words, capped by 2^n;
  // bounded by (extra+1)/2^n.
  static NullApprox seeded(const Point& x, std::uint64_t seed, Index extra);

  std::vector<Fact> validate(Index window) const;
};

// x|n as a word of length n.
BigInt prefix_word(const Point& x, Index n);

// I_k = L_{2k} + L_{2k+1}, I'_k = L_{2k+1} + L_{2k+2}.
struct EvenOdd {
  IntervalPartition I;
  IntervalPartition I_prime;
};
EvenOdd derive_even_odd(const IntervalPartition& L);

// n_1 = 0, m_k = min{j > n_k : 2^{n_k} tail(j) < eps_k/k},
// n_{k+1} = min{j > m_k : 2^{m_k} tail(j) < eps_k/k}, extended on demand.
class U2Split {
 public:
  U2Split(NullApprox fa, TailBoundedSeq eps);

  Index n(Index k) const;  // k >= 1
  Index m(Index k) const;  // k >= 1
  const NullApprox& approx() const { return fa_; }
  const TailBoundedSeq& eps() const { return eps_; }
  // The target eps_k/k.
  Rational target(Index k) const;
  // Minimality of m_k and n_{k+1} checked at j and j-1.
  std::vector<Fact> minimality(Index k) const;
  // L with endpoints n_1, m_1, n_2, m_2, ...
  IntervalPartition partition() const;

 private:
  struct State {
    std::mutex mu;
    std::vector<Index> ends;  // n_1, m_1, n_2, m_2, ...
  };
  Index endpoint(Index e) const;

  NullApprox fa_;
  TailBoundedSeq eps_;
  std::shared_ptr<State> state_;
};

U2Split u2small_split(const NullApprox& fa, const TailBoundedSeq& eps);

// Words w of length len, matched against the low bits of a block code.
struct PrefixCylinders {
  Index block_len = 0;
  std::vector<std::pair<Index, BigInt>> words;  // antichain, sorted by length
  BigInt size() const;
  bool contains(const BigInt& code) const;
};

// Block b of I is I_{k} with k = b+1, covering [n_k, n_{k+1}); phi there
// collects the restrictions of F_i for i in [m_k, n_{k+1}). psi does the
// same over I' with i in [n_{k+1}, m_{k+1}). Both certified with
// threshold(N) = N-1.
struct TwoSmallCoding {
  U2Split split;
  IntervalPartition L;
  IntervalPartition I;
  IntervalPartition I_prime;
  BlockSlalom phi;
  BlockSlalom psi;
};

PrefixCylinders u2small_cylinders(const U2Split& s, Index k, bool prime);
TwoSmallCoding u2small_coding(const NullApprox& fa, const TailBoundedSeq& eps);

// The three chain inequalities for phi and psi at every k in [1, kmax].
std::vector<Fact> u2small_chain_facts(const TwoSmallCoding& c, Index kmax);

struct Coverage {
  std::vector<Index> approx_hits;  // n with x|n in F_n
  std::vector<Index> phi_blocks;   // k with a hit in [m_k, n_{k+1})
  std::vector<Index> psi_blocks;   // k with a hit in [n_{k+1}, m_{k+1})
  std::vector<Index> unclassified; // hits below m_1
  std::vector<Fact> facts;
};

// Scans positions below n_{kmax+1}.
Coverage classify_coverage(const TwoSmallCoding& c, const Point& x, Index kmax);

json u2small_witness(const TwoSmallCoding& c, Index kmax);

}  // namespace slalom
