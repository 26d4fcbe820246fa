#pragma once

#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slalom/block_set.hpp"
#include "slalom/certificates.hpp"
#include "slalom/partitions.hpp"
#include "slalom/point.hpp"
#include "slalom/sequences.hpp"
#include "slalom/verdict.hpp"

namespace slalom {

// phi(n), a set of codes of I_n, for every n.
class BlockSlalom {
 public:
  using Generator = std::function<BlockSet(Index)>;

  BlockSlalom(IntervalPartition I, Generator at, std::string name = "generated");
  static BlockSlalom empty(IntervalPartition I);
  // Listed blocks, then empty.
  static BlockSlalom from_blocks(IntervalPartition I, std::vector<BlockSet> blocks);
  // Seeded random codes; block sizes uniform in [min_size, max_size], capped
  // by the block's capacity.
  static BlockSlalom random_sparse(IntervalPartition I, std::uint64_t seed, Index min_size,
                                   Index max_size);
  static BlockSlalom from_json(const json& j);

  BlockSlalom with_certificate(VanishingCertificate c) const;
  BlockSlalom with_size_bound(Index c) const;
  BlockSlalom with_empty_from(Index n) const;

  const IntervalPartition& partition() const { return impl_->I; }
  BlockSet at(Index n) const;
  Index block_length(Index n) const { return impl_->I.length(n); }
  const std::optional<VanishingCertificate>& certificate() const { return impl_->cert; }
  std::optional<Index> size_bound() const { return impl_->size_bound; }
  std::optional<Index> empty_from() const { return impl_->empty_from; }
  bool known_superset_of(const BlockSlalom& other) const;
  std::uint64_t id() const { return impl_->id; }
  const std::string& name() const { return impl_->name; }

  json to_json(Index window) const;

 private:
  struct Memo {
    std::mutex mu;
    std::map<Index, BlockSet> blocks;
  };
  struct Impl {
    IntervalPartition I;
    Generator gen;
    std::string name;
    std::uint64_t id = 0;
    std::set<std::uint64_t> contains;  // ids of slaloms this one contains pointwise
    std::optional<VanishingCertificate> cert;
    std::optional<Index> size_bound;
    std::optional<Index> empty_from;
    std::shared_ptr<Memo> memo;
  };
  explicit BlockSlalom(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend BlockSlalom unite(const BlockSlalom& a, const BlockSlalom& b);
};

BlockSlalom unite(const BlockSlalom& a, const BlockSlalom& b);

// Codes fit their blocks; predicate cardinalities match brute force on
// blocks of at most 12 bits.
std::vector<Fact> check_block_ranges(const BlockSlalom& phi, Index window);

// Samples (N, n) with threshold(N) <= n < threshold(N) + span and n < limit.
CertificateCheck check_vanishing(const BlockSlalom& phi, const TailBoundedSeq& eps,
                                 const VanishingCertificate& cert, Index span,
                                 Index limit = std::numeric_limits<Index>::max());

// |phi(n)| / (2^{|I_n|} eps_n)
Rational relative_size(const BlockSlalom& phi, const TailBoundedSeq& eps, Index n);

Verdict sigma_member(const BlockSlalom& phi, const TailBoundedSeq& eps, Index horizon,
                     std::uint64_t fail_level = 1);

struct ContributivityEvidence {
  std::optional<DivergenceCertificate> divergence;
  std::optional<BoundednessCertificate> bounded;
};

Verdict sstar_contributive(const IntervalPartition& I, const TailBoundedSeq& eps, Index horizon,
                           const ContributivityEvidence& evidence);
Verdict e_contributive(const IntervalPartition& I, const TailBoundedSeq& eps, Index horizon,
                       const ContributivityEvidence& evidence);

std::vector<Index> hits(const Point& x, const BlockSlalom& phi, Index lo, Index hi);

// For every n: next_hit(n) >= n and x hits phi there.
struct HitCertificate {
  std::string name;
  std::function<Index(Index)> next_hit;
};
// x hits phi at every n >= from.
struct MembershipCertificate {
  std::string name;
  Index from = 0;
};

Verdict io_verdict(const Point& x, const BlockSlalom& phi, Index horizon,
                   const std::optional<HitCertificate>& cert = std::nullopt);
Verdict ae_verdict(const Point& x, const BlockSlalom& phi, Index horizon,
                   const std::optional<MembershipCertificate>& cert = std::nullopt);

// Indices n < horizon with phi(n) not inside psi(n).
std::vector<Index> inclusion_failures(const BlockSlalom& phi, const BlockSlalom& psi, Index horizon);
Verdict pointwise_included(const BlockSlalom& phi, const BlockSlalom& psi, Index horizon);

enum class RefuterMode {
  Infinitely,  // x in [phi]_inf but not [psi]_inf: avoid psi off the witnesses
  AlmostAll,   // x in [phi]_* but not [psi]_*: stay in phi off the witnesses
};

struct RefuterResult {
  Point x = Point::zeros();
  std::vector<Index> witnessed;
  // Window blocks where the off-witness requirement had no available code.
  std::vector<Index> exceptions;
};

RefuterResult refuter_point(const BlockSlalom& phi, const BlockSlalom& psi, Index horizon,
                            RefuterMode mode);

}  // namespace slalom
