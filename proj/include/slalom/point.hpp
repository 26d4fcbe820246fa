#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "slalom/partitions.hpp"
#include "slalom/rational.hpp"
#include "slalom/verdict.hpp"

namespace slalom {

// A point of Cantor space, given by a deterministic bit generator.
class Point {
 public:
  static Point constant(std::vector<bool> prefix, bool tail);
  static Point zeros() { return constant({}, false); }
  static Point ones() { return constant({}, true); }
  static Point periodic(std::vector<bool> prefix, std::vector<bool> pattern);
  static Point random(std::uint64_t seed);
  // Not serializable; the name must identify the point.
  static Point derived(std::string name, std::function<bool(Index)> bit);
  static Point from_json(const json& j);

  bool bit(Index p) const;
  const json& descriptor() const { return impl_->descriptor; }
  const std::string& key() const { return impl_->key; }
  bool same_as(const Point& other) const { return key() == other.key(); }

 private:
  struct Impl {
    enum class Kind { Constant, Periodic, Random, Derived } kind = Kind::Constant;
    std::vector<bool> prefix;
    bool tail = false;
    std::vector<bool> pattern;
    std::uint64_t seed = 0;
    std::function<bool(Index)> fn;
    json descriptor;
    std::string key;
  };
  explicit Point(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend BigInt restrict_code(const Point& x, Block b);
};

// Lexicographic comparison decided by the first differing bit below depth.
// Returns 0 only for points with the same descriptor; throws TieError if
// distinct descriptors agree on [0, depth).
int compare_points(const Point& a, const Point& b, Index depth);

struct BlockWord {
  Index block = 0;
  BigInt code;
};

// Bit b of the code is x(begin + b).
BigInt restrict_code(const Point& x, Block b);
BlockWord restrict(const Point& x, const IntervalPartition& I, Index n);

// Writes a finite prefix block by block; unset positions read 0.
class PointBuilder {
 public:
  void set_block(Block b, const BigInt& code);
  Point build() const;

 private:
  std::vector<bool> bits_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace slalom
