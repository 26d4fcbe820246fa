#include "slalom/block_set.hpp"

#include <algorithm>

#include "slalom/errors.hpp"

namespace slalom {

namespace {

void normalize(BigInt& cutoff, std::vector<BigInt>& listed) {
  std::sort(listed.begin(), listed.end());
  listed.erase(std::unique(listed.begin(), listed.end()), listed.end());
  listed.erase(std::remove_if(listed.begin(), listed.end(), [&](const BigInt& c) { return c < cutoff; }),
               listed.end());
  std::size_t absorbed = 0;
  while (absorbed < listed.size() && listed[absorbed] == cutoff) {
    ++cutoff;
    ++absorbed;
  }
  listed.erase(listed.begin(), listed.begin() + absorbed);
  if (listed.size() > kMaxStoredCodes) throw PreconditionError("too many stored codes in one block");
}

constexpr Index kSearchLimit = Index(1) << 20;

}  // namespace

BlockSet::BlockSet() : size_(0), cutoff_(0) {}

BlockSet BlockSet::of(std::vector<BigInt> codes) { return initial_plus(BigInt(0), std::move(codes)); }

BlockSet BlockSet::initial(const BigInt& count) { return initial_plus(count, {}); }

BlockSet BlockSet::initial_plus(const BigInt& cutoff, std::vector<BigInt> codes) {
  if (cutoff < 0) throw PreconditionError("negative cutoff");
  for (const auto& c : codes)
    if (c < 0) throw PreconditionError("negative code");
  BlockSet s;
  s.cutoff_ = cutoff;
  s.listed_ = std::move(codes);
  normalize(s.cutoff_, s.listed_);
  s.size_ = s.cutoff_ + big(s.listed_.size());
  return s;
}

BlockSet BlockSet::predicate(BigInt size, std::function<bool(const BigInt&)> contains, std::string name) {
  if (size < 0) throw PreconditionError("negative size");
  BlockSet s;
  s.size_ = std::move(size);
  s.test_ = std::move(contains);
  s.name_ = std::move(name);
  return s;
}

bool BlockSet::contains(const BigInt& code) const {
  if (test_) return test_(code);
  if (code < 0) return false;
  if (code < cutoff_) return true;
  return std::binary_search(listed_.begin(), listed_.end(), code);
}

std::optional<BigInt> BlockSet::code_bound() const {
  if (test_) return std::nullopt;
  if (!listed_.empty()) return BigInt(listed_.back() + 1);
  return cutoff_;
}

std::optional<BigInt> BlockSet::first_member(Index len) const {
  if (size_ == 0) return std::nullopt;
  if (!test_) return cutoff_ > 0 ? BigInt(0) : listed_.front();
  const BigInt top = pow2(len);
  BigInt c = 0;
  for (Index tries = 0; c < top && tries < kSearchLimit; ++tries, ++c)
    if (test_(c)) return c;
  return std::nullopt;
}

std::optional<BigInt> BlockSet::first_nonmember(Index len) const {
  const BigInt top = pow2(len);
  if (size_ >= top) return std::nullopt;
  if (!test_) {
    BigInt c = cutoff_;
    for (const auto& l : listed_) {
      if (l != c) break;
      ++c;
    }
    if (c < top) return c;
    return std::nullopt;
  }
  BigInt c = 0;
  for (Index tries = 0; c < top && tries < kSearchLimit; ++tries, ++c)
    if (!test_(c)) return c;
  return std::nullopt;
}

std::vector<BigInt> BlockSet::members(Index len) const {
  std::vector<BigInt> out;
  if (test_) {
    if (len > kEnumerableBits) throw PreconditionError("refusing to enumerate a block of " + std::to_string(len) + " bits");
    const Index top = Index(1) << len;
    for (Index c = 0; c < top; ++c)
      if (test_(big(c))) out.push_back(big(c));
    return out;
  }
  if (size_ > big(kMaxStoredCodes)) throw PreconditionError("refusing to enumerate a large block set");
  for (BigInt c = 0; c < cutoff_; ++c) out.push_back(c);
  out.insert(out.end(), listed_.begin(), listed_.end());
  return out;
}

json code_to_json(const BigInt& c) {
  if (fits_index(c)) return json(c.get_ui());
  return json(c.get_str());
}

BigInt code_from_json(const json& j) {
  if (j.is_string()) return parse_bigint(j.get<std::string>());
  return big(j.get<Index>());
}

json BlockSet::to_json() const {
  if (test_) return {{"size", to_string(size_)}, {"predicate", name_}};
  json codes = json::array();
  for (const auto& c : listed_) codes.push_back(code_to_json(c));
  if (cutoff_ == 0) return codes;
  if (listed_.empty()) return {{"size", to_string(size_)}, {"predicate", "initial"}};
  return {{"size", to_string(size_)}, {"predicate", "initial+codes"}, {"cutoff", to_string(cutoff_)},
          {"codes", codes}};
}

BlockSet BlockSet::from_json(const json& j) {
  if (j.is_array()) {
    std::vector<BigInt> codes;
    for (const auto& c : j) codes.push_back(code_from_json(c));
    return of(std::move(codes));
  }
  const std::string pred = j.at("predicate").get<std::string>();
  const BigInt size = code_from_json(j.at("size"));
  if (pred == "initial") return initial(size);
  if (pred == "initial+codes") {
    std::vector<BigInt> codes;
    for (const auto& c : j.at("codes")) codes.push_back(code_from_json(c));
    BlockSet s = initial_plus(code_from_json(j.at("cutoff")), std::move(codes));
    if (s.size() != size) throw PreconditionError("stated size disagrees with the codes");
    return s;
  }
  throw PreconditionError("block predicate cannot be rebuilt from JSON: " + pred);
}

bool operator==(const BlockSet& a, const BlockSet& b) {
  if (a.is_predicate() || b.is_predicate())
    throw PreconditionError("predicate sets are compared by enumeration only");
  return a.cutoff() == b.cutoff() && a.listed() == b.listed();
}

BlockSet unite(const BlockSet& a, const BlockSet& b, Index len) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (!a.is_predicate() && !b.is_predicate()) {
    BigInt cutoff = std::max(a.cutoff(), b.cutoff());
    std::vector<BigInt> codes = a.listed();
    codes.insert(codes.end(), b.listed().begin(), b.listed().end());
    return BlockSet::initial_plus(cutoff, std::move(codes));
  }
  if (len > kEnumerableBits)
    throw PreconditionError("union of predicate sets needs enumeration beyond " +
                            std::to_string(kEnumerableBits) + " bits");
  std::vector<BigInt> codes = a.members(len);
  auto more = b.members(len);
  codes.insert(codes.end(), more.begin(), more.end());
  return BlockSet::of(std::move(codes));
}

std::optional<BigInt> member_outside(const BlockSet& a, const BlockSet& b, Index len) {
  if (a.empty()) return std::nullopt;
  if (!a.is_predicate()) {
    Index tries = 0;
    for (BigInt c = 0; c < a.cutoff() && tries < kSearchLimit; ++c, ++tries)
      if (!b.contains(c)) return c;
    for (const auto& c : a.listed())
      if (!b.contains(c)) return c;
    return std::nullopt;
  }
  const BigInt top = pow2(len);
  Index tries = 0;
  for (BigInt c = 0; c < top && tries < kSearchLimit; ++c, ++tries)
    if (a.contains(c) && !b.contains(c)) return c;
  return std::nullopt;
}

BigInt brute_force_count(const BlockSet& s, Index len) {
  if (len > kEnumerableBits) throw PreconditionError("block too large for brute force");
  BigInt n = 0;
  const Index top = Index(1) << len;
  for (Index c = 0; c < top; ++c)
    if (s.contains(big(c))) ++n;
  return n;
}

}  // namespace slalom
