#include "slalom/random.hpp"

#include "slalom/errors.hpp"
#include "slalom/point.hpp"

namespace slalom {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : eng_(splitmix64(seed ^ splitmix64(stream))) {}

Index Rng::between(Index lo, Index hi) {
  if (hi < lo) throw PreconditionError("empty range");
  std::uniform_int_distribution<Index> d(lo, hi);
  return d(eng_);
}

BigInt Rng::code(Index len) {
  BigInt c;
  for (Index i = 0; i < len; i += 64) {
    std::uint64_t w = eng_();
    Index take = std::min<Index>(64, len - i);
    for (Index b = 0; b < take; ++b)
      if ((w >> b) & 1) mpz_setbit(c.get_mpz_t(), i + b);
  }
  return c;
}

BigInt Rng::below(const BigInt& bound) {
  if (bound <= 0) throw PreconditionError("empty range");
  const Index len = bit_length(bound);
  for (;;) {
    BigInt c = code(len);
    if (c < bound) return c;
  }
}

}  // namespace slalom
