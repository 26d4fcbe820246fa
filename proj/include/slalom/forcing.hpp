#pragma once

#include <memory>
#include <mutex>
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

struct ForcingSpace {
  IntervalPartition I;
  TailBoundedSeq eps;
  DivergenceCertificate divergence;  // full limit
  Index depth = 256;                 // distinguishing depth for points

  Rational mass(Index n) const { return block_mass(I, eps, n); }
  // First n from which the mass is at least M.
  Index threshold(const Rational& M) const { return divergence.threshold(M); }
};

// |I_n| = 2(n+1), eps_n = 2^-(n+1), so the block mass is 2^{n+1} and the
// threshold for M is min{k : 2^{k+1} >= M}.
ForcingSpace forcing_example_space();

// (s, N, F)
struct ForcingCondition {
  std::vector<BlockSet> s;
  std::uint64_t N = 1;
  std::vector<Point> F;

  Index length() const { return s.size(); }
  bool has_point(const Point& x) const;
  json to_json() const;
  static ForcingCondition from_json(const json& j);
};

// N|F| <= 2^{|I_n|} eps_n for n >= |s|: exact scan up to the divergence
// threshold, the certificate beyond.
Verdict cond_validate(const ForcingSpace& P, const ForcingCondition& c);

struct LeqResult {
  bool holds = false;
  std::string reason;
  explicit operator bool() const { return holds; }
};

// stronger <= weaker
LeqResult cond_leq(const ForcingSpace& P, const ForcingCondition& stronger, const ForcingCondition& weaker);

// Lengthen s by t(n) = {y|I_n : y in F} up to the threshold for N(|F|+1),
// then add x.
ForcingCondition dense_add_point(const ForcingSpace& P, const ForcingCondition& c, const Point& x);
// Lengthen s to `length` with the minimal blocks.
ForcingCondition extend_condition(const ForcingSpace& P, const ForcingCondition& c, Index length);
// Raise N to M, lengthening first so the condition stays valid.
ForcingCondition raise_level(const ForcingSpace& P, const ForcingCondition& c, std::uint64_t M);

struct LinkedCellKey {
  std::vector<BlockSet> s;
  std::uint64_t N = 1;
  Index m = 0;
  bool contains(const ForcingCondition& c) const;
};

// Stand-in for an ultrafilter on a finite index window [0, window).
class UltrafilterOracle {
 public:
  // A is large iff i_star is in A.
  static std::shared_ptr<UltrafilterOracle> principal(Index i_star, Index window);
  // Representatives R = {i >= start : i = residue mod period} inside the
  // window; A is large iff R is inside A.
  static std::shared_ptr<UltrafilterOracle> pattern(Index start, Index period, Index residue, Index window);

  bool large(const std::set<Index>& A);
  // The unique large member of a family of disjoint sets; throws
  // OracleInconsistency when there is none.
  std::size_t decide(const std::vector<std::set<Index>>& family);
  const std::set<Index>& representatives() const { return reps_; }
  Index window() const { return window_; }
  std::string name() const { return name_; }
  // Superset closure and intersection consistency over the query log.
  std::vector<Fact> check_log() const;

 private:
  UltrafilterOracle() = default;
  std::string name_;
  Index window_ = 0;
  std::set<Index> reps_;
  mutable std::mutex mu_;
  std::vector<std::pair<std::set<Index>, bool>> log_;
};

// Coordinatewise limit of (s, N, F_i) for i in the oracle window.
ForcingCondition d_limit(const ForcingSpace& P, const LinkedCellKey& cell,
                         const std::vector<ForcingCondition>& family, UltrafilterOracle& oracle);

struct LimitFamily {
  ForcingCondition q;                    // its limit
  std::vector<ForcingCondition> family;  // p_{k,n}, n < window
};

struct AmalgamateResult {
  ForcingCondition q;
  Index n = 0;
  std::vector<std::set<Index>> b;
  std::vector<Fact> facts;
};

AmalgamateResult amalgamate(const ForcingSpace& P, const ForcingCondition& q, const std::vector<LimitFamily>& limits,
                            UltrafilterOracle& oracle, const std::set<Index>& a);

// Lexicographically sorted copy of F.
std::vector<Point> sorted_points(const std::vector<Point>& F, Index depth);

// A recorded sequence of density operations from (empty, 1, {}).
class ForcingSession {
 public:
  explicit ForcingSession(ForcingSpace P);

  const ForcingCondition& current() const { return history_.back(); }
  const std::vector<ForcingCondition>& history() const { return history_; }
  void add_point(const Point& x);
  void extend(Index length);
  void raise(std::uint64_t M);

  // Points with the length of s right after each was added.
  const std::vector<std::pair<Point, Index>>& joins() const { return joins_; }
  json transcript() const { return ops_; }
  static ForcingSession replay(ForcingSpace P, const json& transcript);
  // Every added point lands in the generic prefix from its join on, and each
  // step is a stronger valid condition.
  std::vector<Fact> replay_facts() const;

 private:
  ForcingSpace P_;
  std::vector<ForcingCondition> history_;
  std::vector<std::pair<Point, Index>> joins_;
  json ops_ = json::array();
};

}  // namespace slalom
