#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slalom/rational.hpp"

namespace slalom {

using json = nlohmann::json;

enum class Truth { Holds, Fails, Unknown };

std::string to_string(Truth t);

// Three-valued answer to a tail statement scanned up to a finite horizon.
class Verdict {
 public:
  static Verdict holds(std::string certificate, std::string detail = {});
  static Verdict fails(std::vector<Index> witness, std::string detail);
  static Verdict unknown(Index horizon, std::string detail);

  Truth truth() const { return truth_; }
  bool is_holds() const { return truth_ == Truth::Holds; }
  bool is_fails() const { return truth_ == Truth::Fails; }
  bool is_unknown() const { return truth_ == Truth::Unknown; }
  const std::string& certificate() const { return certificate_; }
  const std::vector<Index>& witness() const { return witness_; }
  Index horizon() const { return horizon_; }
  const std::string& detail() const { return detail_; }

  json to_json() const;

 private:
  Truth truth_ = Truth::Unknown;
  std::string certificate_;
  std::vector<Index> witness_;
  Index horizon_ = 0;
  std::string detail_;
};

enum class Relation { Less, LessEq, Equal, GreaterEq, Greater };

std::string to_string(Relation r);

// One verified fact. Comparisons keep both sides exactly.
struct Fact {
  std::string check;
  Index index = 0;
  bool pass = false;
  std::optional<Rational> lhs;
  std::optional<Rational> rhs;
  Relation rel = Relation::Equal;
  std::string detail;

  static Fact compare(std::string check, Index index, const Rational& lhs, Relation rel,
                      const Rational& rhs);
  static Fact claim(std::string check, Index index, bool pass, std::string detail = {});

  json to_json() const;
};

bool all_pass(const std::vector<Fact>& facts);
const Fact* first_failure(const std::vector<Fact>& facts);

}  // namespace slalom
