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

struct Block {
  Index begin = 0;
  Index end = 0;
  Index length() const { return end - begin; }
};

struct IndexRange {
  Index begin = 0;
  Index end = 0;
  bool empty() const { return begin >= end; }
  Index size() const { return empty() ? 0 : end - begin; }
};

// Blocks I_n = [k_n, k_{n+1}) covering [k_0, infinity).
class IntervalPartition {
 public:
  static IntervalPartition unit(Index offset = 0);
  // |I_n| = a*n + b
  static IntervalPartition arithmetic(Index a, Index b, Index offset = 0);
  // |I_n| = sum_i coeffs[i] * (n+1)^i
  static IntervalPartition polynomial(std::vector<Index> coeffs, Index offset = 0);
  // k_n = scale * base^n
  static IntervalPartition powers(Index base, Index scale = 1);
  static IntervalPartition from_lengths(std::string family, json params,
                                        std::function<Index(Index)> length, Index offset = 0);
  static IntervalPartition from_endpoints(std::string family, json params,
                                          std::function<Index(Index)> endpoint);
  // J_n = union of base blocks [shift + group*n, shift + group*(n+1)).
  static IntervalPartition coarsen(const IntervalPartition& base, Index group, Index shift = 0);

  // Override the first endpoints; later blocks continue from the last one.
  IntervalPartition with_prefix(std::vector<Index> endpoints) const;

  Index offset() const { return endpoint(0); }
  Index endpoint(Index n) const;
  Index length(Index n) const { return endpoint(n + 1) - endpoint(n); }
  Block block(Index n) const { return {endpoint(n), endpoint(n + 1)}; }
  // Least m with k_m >= position.
  Index first_at_or_after(Index position) const;
  std::optional<Index> block_containing(Index position) const;
  bool is_endpoint(Index position) const;
  std::vector<Index> endpoints(Index count) const;

  const std::string& family() const;
  const json& params() const;
  const std::vector<Index>& endpoints_prefix() const;
  bool reloadable() const;

  json to_json(Index window = 8) const;
  static IntervalPartition from_json(const json& j);

  // Index from which both partitions have the same endpoints, when that is
  // known from how they were built.
  std::optional<Index> eventually_equal(const IntervalPartition& other) const;
  // Position from which every integer is an endpoint, if built that way.
  std::optional<Index> unit_from() const;
  struct Coarsening {
    const IntervalPartition* base;
    Index group;
    Index shift;
  };
  std::optional<Coarsening> coarsening() const;

 private:
  enum class Kind { Lengths, Endpoints, Coarsen };
  struct Impl;
  explicit IntervalPartition(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// A structural reason for a tail relation between partitions.
struct ContainmentCertificate {
  std::string name;
  Index from = 0;
};

std::optional<ContainmentCertificate> certify_refines(const IntervalPartition& I,
                                                      const IntervalPartition& J);

// Some I-block inside J_n.
bool has_contained_block(const IntervalPartition& I, const IntervalPartition& J, Index n);
// J_n is a union of I-blocks.
bool is_union_of_blocks(const IntervalPartition& I, const IntervalPartition& J, Index n);

Verdict rel_sq(const IntervalPartition& I, const IntervalPartition& J, Index horizon);
Verdict rel_refines(const IntervalPartition& I, const IntervalPartition& J, Index horizon);
// {k : I_k inside J_n}, always consecutive.
IndexRange subin(const IntervalPartition& I, const IntervalPartition& J, Index n);
Verdict overlap_refute(const IntervalPartition& I, const IntervalPartition& J,
                       const IntervalPartition& K, Index horizon);

struct IntegerSequence {
  std::string name;
  json params = json::object();
  std::function<Index(Index)> at;
};

IntervalPartition partition_from_set(const IntegerSequence& a);

// A utility outside the theory: endpoints common to both partitions, in order. Only a
// partition when the common set is infinite; scans stop after search_limit
// endpoints of I.
IntervalPartition common_coarsening(const IntervalPartition& I, const IntervalPartition& J,
                                    Index search_limit = Index(1) << 20);

}  // namespace slalom
