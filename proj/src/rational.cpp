#include "slalom/rational.hpp"

#include <stdexcept>

#include "slalom/errors.hpp"

namespace slalom {

BigInt big(Index v) { return BigInt(static_cast<unsigned long>(v)); }

BigInt pow2(Index e) {
  BigInt r;
  mpz_setbit(r.get_mpz_t(), e);
  return r;
}

Rational pow2q(std::int64_t e) {
  if (e >= 0) return Rational(pow2(static_cast<Index>(e)));
  return Rational(BigInt(1), pow2(static_cast<Index>(-e)));
}

Rational ratio(const BigInt& num, const BigInt& den) {
  if (den == 0) throw PreconditionError("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational ratio(Index num, Index den) { return ratio(big(num), big(den)); }

BigInt floor_of(const Rational& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

BigInt ceil_of(const Rational& q) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Index bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

Index floor_log2(const BigInt& v) {
  if (v < 1) throw PreconditionError("log2 of a non-positive integer");
  return bit_length(v) - 1;
}

Index ceil_log2(const BigInt& v) {
  Index f = floor_log2(v);
  return pow2(f) == v ? f : f + 1;
}

bool fits_index(const BigInt& v) { return v >= 0 && mpz_fits_ulong_p(v.get_mpz_t()); }

Index to_index(const BigInt& v) {
  if (!fits_index(v)) throw PreconditionError("integer out of index range: " + v.get_str());
  return v.get_ui();
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const BigInt& v) { return v.get_str(); }

BigInt parse_bigint(std::string_view text) {
  BigInt v;
  std::string s(text);
  if (s.empty() || v.set_str(s, 10) != 0) throw PreconditionError("not an integer: " + s);
  return v;
}

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_bigint(text));
  BigInt num = parse_bigint(text.substr(0, slash));
  BigInt den = parse_bigint(text.substr(slash + 1));
  return ratio(num, den);
}

}  // namespace slalom
