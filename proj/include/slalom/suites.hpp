#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "slalom/verdict.hpp"

namespace slalom {

// Bad command line, unknown suite or unknown kind.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SuiteSpec {
  std::string suite;
  std::uint64_t seed = 1;
  Index horizon = 0;    // 0 picks the suite default
  Index instances = 0;  // 0 picks the suite default
};

// Collects report lines for one suite run. Every fact and every note is
// tagged with the instance it came from.
class Report {
 public:
  void instance(std::string label) { label_ = std::move(label); }
  void note(json info);
  void fact(const Fact& f);
  void facts(const std::vector<Fact>& fs);
  // A verdict compared against the expected truth value.
  void verdict(const std::string& check, Index index, const Verdict& v, Truth expected);
  // An exception that ends the current instance.
  void error(const std::string& kind, const std::string& what);
  void count(const std::string& counter, Index by = 1) { counters_[counter] += by; }

  Index checked() const { return checked_; }
  Index failed() const { return failed_; }
  bool certificate_error() const { return certificate_error_; }
  const std::vector<json>& lines() const { return lines_; }
  const std::map<std::string, Index>& counters() const { return counters_; }

 private:
  std::string label_;
  std::vector<json> lines_;
  std::map<std::string, Index> counters_;
  Index checked_ = 0;
  Index failed_ = 0;
  bool certificate_error_ = false;
};

struct SuiteResult {
  SuiteSpec spec;  // with defaults filled in
  Report report;
  double seconds = 0;
  bool pass() const { return report.failed() == 0; }
  json summary() const;
  // JSON lines: header, facts and notes, summary. Only the header carries
  // the timestamp.
  std::string jsonl(const std::string& timestamp) const;
};

struct SuiteInfo {
  std::string description;
  Index default_horizon;
  Index default_instances;
  std::function<void(const SuiteSpec&, Report&)> run;
};

const std::map<std::string, SuiteInfo>& suite_registry();
std::vector<std::string> suite_names();
SuiteResult run_suite(SuiteSpec spec);

// Registration hooks, one per source file.
void register_sequence_suites(std::map<std::string, SuiteInfo>& r);
void register_slalom_suites(std::map<std::string, SuiteInfo>& r);
void register_tukey_suites(std::map<std::string, SuiteInfo>& r);
void register_forcing_suites(std::map<std::string, SuiteInfo>& r);

// Seeded instance generation for the gen subcommand.
json gen_instance(const std::string& kind, std::uint64_t seed, const json& params);
std::vector<std::string> gen_kinds();

// Runs a constructor and returns its witness bundle.
json construct(const std::string& name, std::uint64_t seed, Index horizon, const json& params);
std::vector<std::string> construct_names();

}  // namespace slalom
