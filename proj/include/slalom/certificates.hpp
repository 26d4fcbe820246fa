#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slalom/partitions.hpp"
#include "slalom/rational.hpp"
#include "slalom/sequences.hpp"
#include "slalom/verdict.hpp"

namespace slalom {

// For all n >= threshold(N): N*|phi(n)| < 2^{|I_n|} * eps_n.
struct VanishingCertificate {
  std::string name;
  std::function<Index(std::uint64_t)> threshold;
};

// For all n >= threshold(M): 2^{|I_n|} * eps_n >= M. With `along` set the
// guarantee is only for n = along(j), j >= threshold(M).
struct DivergenceCertificate {
  std::string name;
  std::function<Index(const Rational&)> threshold;
  std::function<Index(Index)> along;
  bool is_full() const { return !along; }
};

// For all n: 2^{|I_n|} * eps_n <= bound.
struct BoundednessCertificate {
  std::string name;
  Rational bound;
};

// 2^{|I_n|} * eps_n
Rational block_mass(const IntervalPartition& I, const TailBoundedSeq& eps, Index n);

// `lower` must be a nondecreasing, unbounded lower bound for the block mass;
// the threshold is found by search and validated like any certificate.
DivergenceCertificate divergence_from_lower_bound(std::string name,
                                                  std::function<Rational(Index)> lower);
// If |phi(n)| <= c everywhere then N*|phi(n)| <= N*c < N*c + 1 <= mass.
VanishingCertificate vanishing_from_size_bound(Index c, const DivergenceCertificate& d);

struct CertificateCheck {
  bool ok = true;
  std::vector<Fact> facts;
};

const std::vector<std::uint64_t>& sample_levels();
const std::vector<Rational>& sample_masses();

CertificateCheck check_divergence(const IntervalPartition& I, const TailBoundedSeq& eps,
                                  const DivergenceCertificate& cert, Index span);
CertificateCheck check_boundedness(const IntervalPartition& I, const TailBoundedSeq& eps,
                                   const BoundednessCertificate& cert, Index window);

}  // namespace slalom
