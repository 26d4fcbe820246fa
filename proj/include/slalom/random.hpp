#pragma once

#include <random>

#include "slalom/rational.hpp"

namespace slalom {

// Seeded generator used by every randomized construction.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return eng_(); }
  // Uniform in [lo, hi].
  Index between(Index lo, Index hi);
  bool percent(unsigned p) { return between(0, 99) < p; }
  // Uniform code of len bits.
  BigInt code(Index len);
  // Uniform in [0, bound).
  BigInt below(const BigInt& bound);

 private:
  std::mt19937_64 eng_;
};

}  // namespace slalom
