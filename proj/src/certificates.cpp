#include "slalom/certificates.hpp"

#include "slalom/errors.hpp"

namespace slalom {

Rational block_mass(const IntervalPartition& I, const TailBoundedSeq& eps, Index n) {
  return Rational(pow2(I.length(n))) * eps.term(n);
}

DivergenceCertificate divergence_from_lower_bound(std::string name,
                                                  std::function<Rational(Index)> lower) {
  DivergenceCertificate d;
  d.name = std::move(name);
  d.threshold = [lower](const Rational& m) -> Index {
    if (lower(0) >= m) return 0;
    Index hi = 1;
    while (!(lower(hi) >= m)) {
      if (hi > (Index(1) << 40)) throw CertificateError("lower bound never reaches " + to_string(m));
      hi *= 2;
    }
    Index lo = hi / 2;
    while (hi - lo > 1) {
      Index mid = lo + (hi - lo) / 2;
      if (lower(mid) >= m)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  };
  return d;
}

VanishingCertificate vanishing_from_size_bound(Index c, const DivergenceCertificate& d) {
  if (!d.is_full()) throw PreconditionError("size-bound certificates need a full divergence certificate");
  auto th = d.threshold;
  return {"size bound " + std::to_string(c) + " under " + d.name,
          [th, c](std::uint64_t N) { return th(Rational(big(N) * big(c) + 1)); }};
}

const std::vector<std::uint64_t>& sample_levels() {
  static const std::vector<std::uint64_t> levels{1, 2, 3, 4, 5, 7, 8, 16, 31, 64, 100, 128, 1000, 1024};
  return levels;
}

const std::vector<Rational>& sample_masses() {
  static const std::vector<Rational> masses{Rational(1, 2), Rational(1), Rational(2), Rational(3),
                                            Rational(5), Rational(8),    Rational(10), Rational(17),
                                            Rational(100), Rational(1000)};
  return masses;
}

namespace {
constexpr Index kMaxSampledBlock = Index(1) << 20;
}  // namespace

CertificateCheck check_divergence(const IntervalPartition& I, const TailBoundedSeq& eps,
                                  const DivergenceCertificate& cert, Index span) {
  CertificateCheck out;
  for (const auto& m : sample_masses()) {
    Index t = cert.threshold(m);
    for (Index j = t; j < t + span; ++j) {
      Index n = cert.is_full() ? j : cert.along(j);
      // sparse subsequences get past any materializable block quickly
      if (n > kMaxSampledBlock) break;
      Fact f = Fact::compare("divergence " + cert.name + " at M=" + to_string(m), n,
                             block_mass(I, eps, n), Relation::GreaterEq, m);
      out.ok = out.ok && f.pass;
      out.facts.push_back(std::move(f));
    }
  }
  return out;
}

CertificateCheck check_boundedness(const IntervalPartition& I, const TailBoundedSeq& eps,
                                   const BoundednessCertificate& cert, Index window) {
  CertificateCheck out;
  for (Index n = 0; n < window; ++n) {
    Fact f = Fact::compare("bounded mass " + cert.name, n, block_mass(I, eps, n), Relation::LessEq,
                           cert.bound);
    out.ok = out.ok && f.pass;
    out.facts.push_back(std::move(f));
  }
  return out;
}

}  // namespace slalom
