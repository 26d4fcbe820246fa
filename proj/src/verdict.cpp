#include "slalom/verdict.hpp"

namespace slalom {

std::string to_string(Truth t) {
  switch (t) {
    case Truth::Holds: return "holds";
    case Truth::Fails: return "fails";
    case Truth::Unknown: return "unknown";
  }
  return "unknown";
}

Verdict Verdict::holds(std::string certificate, std::string detail) {
  Verdict v;
  v.truth_ = Truth::Holds;
  v.certificate_ = std::move(certificate);
  v.detail_ = std::move(detail);
  return v;
}

Verdict Verdict::fails(std::vector<Index> witness, std::string detail) {
  Verdict v;
  v.truth_ = Truth::Fails;
  v.witness_ = std::move(witness);
  v.detail_ = std::move(detail);
  return v;
}

Verdict Verdict::unknown(Index horizon, std::string detail) {
  Verdict v;
  v.truth_ = Truth::Unknown;
  v.horizon_ = horizon;
  v.detail_ = std::move(detail);
  return v;
}

json Verdict::to_json() const {
  json j{{"verdict", to_string(truth_)}};
  if (!certificate_.empty()) j["certificate"] = certificate_;
  if (!witness_.empty()) j["witness"] = witness_;
  if (truth_ == Truth::Unknown) j["horizon"] = horizon_;
  if (!detail_.empty()) j["detail"] = detail_;
  return j;
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Less: return "<";
    case Relation::LessEq: return "<=";
    case Relation::Equal: return "==";
    case Relation::GreaterEq: return ">=";
    case Relation::Greater: return ">";
  }
  return "?";
}

static bool evaluate(const Rational& a, Relation r, const Rational& b) {
  switch (r) {
    case Relation::Less: return a < b;
    case Relation::LessEq: return a <= b;
    case Relation::Equal: return a == b;
    case Relation::GreaterEq: return a >= b;
    case Relation::Greater: return a > b;
  }
  return false;
}

Fact Fact::compare(std::string check, Index index, const Rational& lhs, Relation rel,
                   const Rational& rhs) {
  Fact f;
  f.check = std::move(check);
  f.index = index;
  f.lhs = lhs;
  f.rhs = rhs;
  f.rel = rel;
  f.pass = evaluate(lhs, rel, rhs);
  return f;
}

Fact Fact::claim(std::string check, Index index, bool pass, std::string detail) {
  Fact f;
  f.check = std::move(check);
  f.index = index;
  f.pass = pass;
  f.detail = std::move(detail);
  return f;
}

json Fact::to_json() const {
  json j{{"check", check}, {"index", index}};
  if (lhs && rhs) {
    j["lhs"] = to_string(*lhs);
    j["rel"] = to_string(rel);
    j["rhs"] = to_string(*rhs);
  }
  if (!detail.empty()) j["detail"] = detail;
  j["pass"] = pass;
  return j;
}

bool all_pass(const std::vector<Fact>& facts) { return first_failure(facts) == nullptr; }

const Fact* first_failure(const std::vector<Fact>& facts) {
  for (const auto& f : facts)
    if (!f.pass) return &f;
  return nullptr;
}

}  // namespace slalom
