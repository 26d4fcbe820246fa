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

// Bits [offset, offset+len) of code, as a code of its own.
BigInt extract_bits(const BigInt& code, Index offset, Index len);

struct MergeResult {
  BlockSlalom phi;
  // k_n; block group n is [k_n, k_{n+1}).
  std::function<Index(Index)> group_start;
  std::vector<Fact> facts;
};

// Union of phis[i] for i < n on group n. Every input needs a certificate.
MergeResult merge_slaloms(const std::vector<BlockSlalom>& phis, const TailBoundedSeq& eps, Index window);

struct EpsResult {
  TailBoundedSeq eps;
  DeltaWitness delta;
  BlockSlalom phi;  // the input, now carrying the certificate for eps
  std::vector<Fact> facts;
};

// `ratios` must bound max(|phi(n)|,1)/2^{|I_n|} termwise; checked on the window.
EpsResult eps_from_summable(const BlockSlalom& phi, const TailBoundedSeq& ratios, Index window);

struct CompletionResult {
  BlockSlalom phi;
  std::vector<Fact> facts;
};

// Empty blocks become {0}. Needs a full divergence certificate for (I, eps).
CompletionResult complete_nonempty(const BlockSlalom& phi, const TailBoundedSeq& eps,
                                   const DivergenceCertificate& divergence, Index window);

struct PadResult {
  BlockSlalom phi;
  std::vector<Index> qualifying;  // qualifying blocks inside the window
  std::vector<Fact> facts;
};

// Raise each qualifying block to ceil(eps_n 2^{|I_n|}) codes with the
// smallest unused codes; every other block becomes empty.
PadResult pad_to_eps(const BlockSlalom& phi, const TailBoundedSeq& eps, Index window);
bool pad_qualifies(const BlockSlalom& phi, const TailBoundedSeq& eps, Index n);

struct IndexSet {
  std::string name;
  std::function<bool(Index)> contains;
};

struct SNotEResult {
  Point x = Point::zeros();
  BlockSlalom phi_b;  // {0} on B, empty elsewhere
  std::vector<Index> hits;     // window indices of B, where x hits phi_b
  std::vector<Index> escapes;  // window indices of v, where x leaves psi
  std::vector<Fact> facts;
};

SNotEResult s_not_e_witness(const IntervalPartition& I, const TailBoundedSeq& eps, const IndexSet& B,
                            const BlockSlalom& psi, Index horizon);

struct InterleaveResult {
  Point x = Point::zeros();
  bool empty_case = false;  // psi empty in the upper half of the window
  std::vector<Index> k;     // I-blocks where x lands in phi
  std::vector<Index> j;     // J-blocks where x leaves psi
  std::vector<Fact> facts;
};

// `psi_ratios` bounds |psi(n)|/2^{|J_n|} termwise; checked on the window.
InterleaveResult s_not_in_Efsigma_refuter(const BlockSlalom& phi, const BlockSlalom& psi,
                                          const TailBoundedSeq& psi_ratios, Index horizon);

struct TransferResult {
  BlockSlalom psi;
  std::vector<Fact> preconditions;
  std::vector<Fact> checks;
  bool preconditions_hold() const { return all_pass(preconditions); }
};

TransferResult transfer_E(const BlockSlalom& phi, const IntervalPartition& J, const TailBoundedSeq& eps,
                          Index horizon);
TransferResult transfer_S(const BlockSlalom& phi, const IntervalPartition& J, const TailBoundedSeq& eps,
                          Index horizon);

// Union of the cylinders over phi on subin blocks, counted exactly.
BigInt union_of_cylinders_size(const BlockSlalom& phi, const IntervalPartition& J, Index n);

struct DistinguishResult {
  TailBoundedSeq eps;
  TailBoundedSeq eps_prime;
  BlockSlalom phi;
  std::vector<Index> n_K;  // n_1, n_2, ... up to the window
  Verdict member_eps;
  Verdict member_eps_prime;
  std::vector<Fact> facts;
};

// max{m : m/2^len < 1/(n+1)^2}
BigInt xi(Index n, Index len);
// Least n >= lo with 2^m (m-K+1) >= (m+1)^3 for every m >= n.
Index distinguish_threshold(Index K, Index lo);

DistinguishResult distinguish_eps_example(const IntervalPartition& I, Index window);

}  // namespace slalom
