#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slalom/rational.hpp"
#include "slalom/verdict.hpp"

namespace slalom {

// Blocks of more than this many bits are never enumerated.
inline constexpr Index kEnumerableBits = 20;
// Cap on stored codes in a single explicit block.
inline constexpr std::size_t kMaxStoredCodes = std::size_t(1) << 20;

// A set of codes of one block. Either an initial segment [0, cutoff) plus
// finitely many listed codes above it, or a cardinality with a membership
// test.
class BlockSet {
 public:
  BlockSet();
  static BlockSet of(std::vector<BigInt> codes);
  static BlockSet initial(const BigInt& count);
  static BlockSet initial_plus(const BigInt& cutoff, std::vector<BigInt> codes);
  static BlockSet full(Index len) { return initial(pow2(len)); }
  static BlockSet predicate(BigInt size, std::function<bool(const BigInt&)> contains, std::string name);

  bool is_predicate() const { return static_cast<bool>(test_); }
  const BigInt& size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(const BigInt& code) const;
  const BigInt& cutoff() const { return cutoff_; }
  const std::vector<BigInt>& listed() const { return listed_; }
  const std::string& name() const { return name_; }
  // Largest member plus one, for range checks; nothing for predicate sets.
  std::optional<BigInt> code_bound() const;

  std::optional<BigInt> first_member(Index len) const;
  std::optional<BigInt> first_nonmember(Index len) const;
  // Every member in increasing order; refuses sets that would be too large.
  std::vector<BigInt> members(Index len) const;

  json to_json() const;
  static BlockSet from_json(const json& j);

 private:
  BigInt size_;
  BigInt cutoff_;
  std::vector<BigInt> listed_;
  std::function<bool(const BigInt&)> test_;
  std::string name_;
};

bool operator==(const BlockSet& a, const BlockSet& b);

BlockSet unite(const BlockSet& a, const BlockSet& b, Index len);
// Some member of a outside b, searching at most a bounded number of codes.
std::optional<BigInt> member_outside(const BlockSet& a, const BlockSet& b, Index len);
// Exhaustive count of codes accepted by the membership test (len <= 20).
BigInt brute_force_count(const BlockSet& s, Index len);

json code_to_json(const BigInt& c);
BigInt code_from_json(const json& j);

}  // namespace slalom
