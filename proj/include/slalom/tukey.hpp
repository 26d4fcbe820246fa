#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slalom/certificates.hpp"
#include "slalom/partitions.hpp"
#include "slalom/point.hpp"
#include "slalom/sequences.hpp"
#include "slalom/slaloms.hpp"
#include "slalom/verdict.hpp"

namespace slalom {

// Largest block length the coding will materialize (lambda_i <= 2^16).
inline constexpr Index kMaxCodedBits = 4;

// A slalom in the product of the columns [0, b(n)) with |S(n)| <= h(n).
struct WidthSlalom {
  enum class Kind { Generic, Full, Empty };
  std::string name;
  // Column size b(n); nothing means the column is all of omega.
  std::function<std::optional<BigInt>(Index)> base;
  std::function<BigInt(Index)> width;
  std::function<BlockSet(Index)> at;
  Kind kind = Kind::Generic;

  static WidthSlalom from_columns(std::string name, std::function<BigInt(Index)> width,
                                  std::vector<std::vector<BigInt>> columns);
};

std::vector<Fact> check_width(const WidthSlalom& s, Index window);

// lambda = |P(2^len)| = 2^{2^len}
BigInt lambda(Index len);
// Subsets of 2^len indexed by their bitmask over codes.
BigInt subset_index(const std::vector<BigInt>& codes, Index len);
std::vector<BigInt> subset_from_index(const BigInt& index, Index len);

using BlockTuple = std::vector<std::vector<BigInt>>;

// kappa = product of lambda_i over blocks [lo, hi).
BigInt kappa(const IntervalPartition& I, Index lo, Index hi);
// Lexicographic rank, first block most significant.
BigInt code_tuple(const IntervalPartition& I, Index lo, const BlockTuple& t);
BlockTuple decode_tuple(const IntervalPartition& I, Index lo, Index hi, const BigInt& K);

// Codes of f(n), the tuple on [a(n), a(n+1)), for n < count.
std::vector<BigInt> code_phi(const IntervalPartition& I, const std::function<Index(Index)>& a,
                             const std::function<BlockTuple(Index)>& f, Index count);
std::vector<BlockTuple> decode_phi(const IntervalPartition& I, const std::function<Index(Index)>& a,
                                   const std::vector<BigInt>& codes);

struct AlcParams {
  std::function<BigInt(Index)> b;  // 2^{|I_n|}
  std::function<BigInt(Index)> h;  // floor(2^{|I_n|} eps_n)
  std::vector<Fact> facts;
};

AlcParams alc_params(const IntervalPartition& I, const TailBoundedSeq& eps, Index window);
// Concatenate per-block codes into a point; later positions read 0.
Point concat(const IntervalPartition& I, const std::vector<BigInt>& s);
// phi as a width slalom, emptied below threshold(1).
WidthSlalom trim(const BlockSlalom& phi, const TailBoundedSeq& eps);

struct PartitionFromB {
  IntervalPartition I;
  TailBoundedSeq eps;
  std::function<BigInt(Index)> b_prime;
  DeltaWitness delta;
  // For width-h slaloms over I: N|phi(n)| <= N h(n) < h(n) delta_n.
  VanishingCertificate width_certificate;
  std::vector<Fact> facts;
};

// `ratios` certifies sum h/b. Needs b(n) >= 2 and h(n) >= 1.
PartitionFromB partition_from_b(std::function<BigInt(Index)> b, std::function<BigInt(Index)> h,
                                const TailBoundedSeq& ratios, Index window);

enum class LcMode { EverywhereTail, InfinitelyOften };

Verdict lc_alc_eval(const std::function<BigInt(Index)>& x, const WidthSlalom& phi, LcMode mode, Index horizon);

struct PipelineGroup {
  Index n = 0;
  Index lo = 0, hi = 0;  // blocks [b(n), b(n+1))
  BigInt code;           // code of phi on the group
  Index k = 0;           // k^X_n
  bool code_in_s = false;
  std::vector<BigInt> kept;    // S-bar codes
  std::vector<BigInt> dropped; // S codes outside kappa or failing the filter
};

struct PipelineResult {
  BlockSlalom psi;  // over I, covering blocks [b(0), b(groups))
  std::vector<PipelineGroup> groups;
  bool dominated = false;  // k^X <= b on the window
  bool captured = false;   // codes of F^X(b) in S on the window
  bool vacuous() const { return !(dominated && captured); }
  std::string vacuous_reason;
  std::vector<Fact> facts;
  json trace() const;
};

PipelineResult hardtukey_pipeline(const BlockSlalom& phi, const TailBoundedSeq& eps,
                                  const std::function<Index(Index)>& b, const WidthSlalom& S, Index groups);

struct NaSample {
  Point x;
  std::optional<MembershipCertificate> cert;
};

struct NaReport {
  Verdict overall = Verdict::unknown(0, "");
  std::vector<Verdict> per_point;
};

NaReport na_witness_check(const BlockSlalom& phi, const std::vector<NaSample>& samples, Index horizon);

struct NaParams {
  IntervalPartition I;
  TailBoundedSeq eps;
  DivergenceCertificate divergence;
  std::vector<Fact> facts;
};

// |I_0| = 1, |I_n| = n + ceil(log2 n^2), eps_n = 2^-n.
NaParams na_to_E_params(Index horizon);
Index na_block_length(Index n);
inline Point psi_minus(const Point& x) { return x; }

}  // namespace slalom
