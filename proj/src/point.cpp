#include "slalom/point.hpp"

#include <algorithm>

#include "slalom/errors.hpp"

namespace slalom {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

static std::string bits_to_string(const std::vector<bool>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

static std::vector<bool> string_to_bits(const std::string& s) {
  std::vector<bool> out;
  for (char c : s) {
    if (c != '0' && c != '1') throw PreconditionError("bit strings use 0 and 1 only");
    out.push_back(c == '1');
  }
  return out;
}

Point Point::constant(std::vector<bool> prefix, bool tail) {
  while (!prefix.empty() && prefix.back() == tail) prefix.pop_back();
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::Constant;
  impl->tail = tail;
  impl->descriptor = {{"kind", "constant"}, {"prefix", bits_to_string(prefix)}, {"tail", tail ? 1 : 0}};
  impl->prefix = std::move(prefix);
  impl->key = impl->descriptor.dump();
  return Point(std::move(impl));
}

Point Point::periodic(std::vector<bool> prefix, std::vector<bool> pattern) {
  if (pattern.empty()) throw PreconditionError("empty period");
  // primitive root of the pattern
  const std::size_t len = pattern.size();
  for (std::size_t d = 1; d <= len; ++d) {
    if (len % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < len && ok; ++i) ok = pattern[i] == pattern[i - d];
    if (ok) {
      pattern.resize(d);
      break;
    }
  }
  if (pattern.size() == 1) return constant(std::move(prefix), pattern[0]);
  while (!prefix.empty() && prefix.back() == pattern.back()) {
    prefix.pop_back();
    std::rotate(pattern.rbegin(), pattern.rbegin() + 1, pattern.rend());
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::Periodic;
  impl->descriptor = {{"kind", "periodic"},
                      {"prefix", bits_to_string(prefix)},
                      {"pattern", bits_to_string(pattern)}};
  impl->prefix = std::move(prefix);
  impl->pattern = std::move(pattern);
  impl->key = impl->descriptor.dump();
  return Point(std::move(impl));
}

Point Point::random(std::uint64_t seed) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::Random;
  impl->seed = seed;
  impl->descriptor = {{"kind", "random"}, {"seed", seed}};
  impl->key = impl->descriptor.dump();
  return Point(std::move(impl));
}

Point Point::derived(std::string name, std::function<bool(Index)> bit) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::Derived;
  impl->fn = std::move(bit);
  impl->descriptor = {{"kind", "derived"}, {"name", std::move(name)}};
  impl->key = impl->descriptor.dump();
  return Point(std::move(impl));
}

Point Point::from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant")
    return constant(string_to_bits(j.value("prefix", std::string())), j.value("tail", 0) != 0);
  if (kind == "periodic")
    return periodic(string_to_bits(j.value("prefix", std::string())),
                    string_to_bits(j.at("pattern").get<std::string>()));
  if (kind == "random") return random(j.at("seed").get<std::uint64_t>());
  throw PreconditionError("point kind cannot be rebuilt from JSON: " + kind);
}

bool Point::bit(Index p) const {
  const Impl& d = *impl_;
  switch (d.kind) {
    case Impl::Kind::Constant:
      return p < d.prefix.size() ? d.prefix[p] : d.tail;
    case Impl::Kind::Periodic:
      return p < d.prefix.size() ? d.prefix[p] : d.pattern[(p - d.prefix.size()) % d.pattern.size()];
    case Impl::Kind::Random:
      return (splitmix64(d.seed * 0x100000001b3ULL ^ (p >> 6)) >> (p & 63)) & 1;
    case Impl::Kind::Derived:
      return d.fn(p);
  }
  return false;
}

int compare_points(const Point& a, const Point& b, Index depth) {
  if (a.same_as(b)) return 0;
  for (Index p = 0; p < depth; ++p) {
    bool x = a.bit(p), y = b.bit(p);
    if (x != y) return x ? 1 : -1;
  }
  throw TieError("points " + a.key() + " and " + b.key() + " agree up to depth " +
                 std::to_string(depth));
}

BigInt restrict_code(const Point& x, Block b) {
  const auto& d = *x.impl_;
  if (d.kind == Point::Impl::Kind::Constant && b.begin >= d.prefix.size())
    return d.tail ? BigInt(pow2(b.length()) - 1) : BigInt(0);
  BigInt code;
  for (Index i = 0; i < b.length(); ++i)
    if (x.bit(b.begin + i)) mpz_setbit(code.get_mpz_t(), i);
  return code;
}

BlockWord restrict(const Point& x, const IntervalPartition& I, Index n) {
  return {n, restrict_code(x, I.block(n))};
}

void PointBuilder::set_block(Block b, const BigInt& code) {
  if (bit_length(code) > b.length()) throw PreconditionError("code does not fit the block");
  if (bits_.size() < b.end) bits_.resize(b.end, false);
  for (Index i = 0; i < b.length(); ++i) bits_[b.begin + i] = mpz_tstbit(code.get_mpz_t(), i);
}

Point PointBuilder::build() const { return Point::constant(bits_, false); }

}  // namespace slalom
