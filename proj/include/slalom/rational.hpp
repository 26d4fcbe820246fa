#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace slalom {

using BigInt = mpz_class;
using Rational = mpq_class;
using Index = std::uint64_t;

BigInt big(Index v);
BigInt pow2(Index e);
// 2^e for a possibly negative exponent.
Rational pow2q(std::int64_t e);
Rational ratio(const BigInt& num, const BigInt& den);
Rational ratio(Index num, Index den);

BigInt floor_of(const Rational& q);
BigInt ceil_of(const Rational& q);
// Number of bits needed to write v (0 for v = 0).
Index bit_length(const BigInt& v);
// floor(log2 v) for v >= 1.
Index floor_log2(const BigInt& v);
Index ceil_log2(const BigInt& v);
Index to_index(const BigInt& v);
bool fits_index(const BigInt& v);

// Always "p/q" with q >= 1.
std::string to_string(const Rational& q);
std::string to_string(const BigInt& v);
Rational parse_rational(std::string_view text);
BigInt parse_bigint(std::string_view text);

}  // namespace slalom
