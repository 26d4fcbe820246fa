#include "slalom/suites.hpp"

#include <chrono>
#include <sstream>

#include "slalom/errors.hpp"
#include "slalom/partitions.hpp"
#include "slalom/point.hpp"
#include "slalom/random.hpp"
#include "slalom/sequences.hpp"
#include "slalom/slaloms.hpp"

namespace slalom {

void Report::note(json info) { lines_.push_back({{"instance", label_}, {"note", std::move(info)}}); }

void Report::fact(const Fact& f) {
  json j = f.to_json();
  j["instance"] = label_;
  lines_.push_back(std::move(j));
  ++checked_;
  if (!f.pass) ++failed_;
}

void Report::facts(const std::vector<Fact>& fs) {
  for (const auto& f : fs) fact(f);
}

void Report::verdict(const std::string& check, Index index, const Verdict& v, Truth expected) {
  Fact f = Fact::claim(check, index, v.truth() == expected,
                       "expected " + to_string(expected) + ", got " + v.to_json().dump());
  fact(f);
}

void Report::error(const std::string& kind, const std::string& what) {
  lines_.push_back({{"instance", label_}, {"error", kind}, {"detail", what}, {"pass", false}});
  ++checked_;
  ++failed_;
  if (kind == "certificate") certificate_error_ = true;
}

json SuiteResult::summary() const {
  json counters = json::object();
  for (const auto& [k, v] : report.counters()) counters[k] = v;
  return {{"summary", spec.suite},  {"seed", spec.seed},       {"horizon", spec.horizon},
          {"instances", spec.instances}, {"checked", report.checked()}, {"failed", report.failed()},
          {"counters", counters},     {"pass", pass()}};
}

std::string SuiteResult::jsonl(const std::string& timestamp) const {
  std::ostringstream out;
  out << json{{"suite", spec.suite}, {"seed", spec.seed}, {"horizon", spec.horizon},
              {"instances", spec.instances}, {"timestamp", timestamp}}
             .dump()
      << '\n';
  for (const auto& line : report.lines()) out << line.dump() << '\n';
  out << summary().dump() << '\n';
  return out.str();
}

namespace {

// The breakpoints by a direct scan over k, independent of first_below.
std::vector<Index> scan_breakpoints(const TailBoundedSeq& eps, Index count) {
  const Rational s = eps.tail_bound(0);
  std::vector<Index> out{0};
  Rational target = s;
  for (Index i = 1; i < count; ++i) {
    target /= 4;
    Index k = out.back() + 1;
    while (!(eps.tail_bound(k) < target)) ++k;
    out.push_back(k);
  }
  return out;
}

TailBoundedSeq random_eps(Rng& rng, Index i) {
  if (i % 2 == 0) {
    Index den = rng.between(2, 7);
    Index num = rng.between(1, den - 1);
    return TailBoundedSeq::geometric(ratio(rng.between(1, 8), rng.between(1, 8)), ratio(num, den));
  }
  return TailBoundedSeq::p_series(ratio(rng.between(1, 9), rng.between(1, 4)), unsigned(rng.between(3, 5)));
}

void delta_suite(const SuiteSpec& spec, Report& r) {
  const Index count = std::max<Index>(spec.horizon, 11);
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("eps#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    TailBoundedSeq eps = random_eps(rng, inst);
    DeltaWitness d = build_delta(eps);
    std::vector<Index> bps = d.breakpoints(count);
    std::vector<Index> expect = scan_breakpoints(eps, count);
    r.fact(Fact::claim("breakpoints match a direct minimization", inst, bps == expect));
    r.note({{"eps", eps.to_json()}, {"sBound", to_string(d.s_bound())}, {"breakpoints", bps}});

    Rational sum = 0;
    Index j = 0;
    BigInt prev = d.value(0);
    bool monotone = true;
    for (Index i = 1; i < count; ++i) {
      for (; j < bps[i]; ++j) {
        BigInt v = d.value(j);
        if (v < prev) monotone = false;
        prev = v;
        sum += Rational(v) * eps.term(j);
      }
      r.fact(Fact::compare("delta(n_i) = 2^i", i, Rational(d.value(bps[i])), Relation::Equal, Rational(pow2(i))));
      r.fact(Fact::compare("sum_{j<n_i} delta_j eps_j < 2 sBound", i, sum, Relation::Less, 2 * d.s_bound()));
    }
    r.fact(Fact::claim("delta nondecreasing below the last breakpoint", bps.back(), monotone));
    r.fact(Fact::compare("partial sum below the tail bound", bps.back(), partial_sum(eps, 0, bps.back()),
                         Relation::LessEq, eps.tail_bound(0)));
    r.count("breakpoints", count);
  }
}

void sequence_validate(const SuiteSpec& spec, Report& r) {
  for (Index inst = 0; inst < spec.instances; ++inst) {
    r.instance("eps#" + std::to_string(inst));
    Rng rng(spec.seed, inst);
    r.facts(random_eps(rng, inst).validate(spec.horizon));
  }
}

}  // namespace

void register_sequence_suites(std::map<std::string, SuiteInfo>& reg) {
  reg["lemma-a9"] = {"delta construction: breakpoints, delta(n_i) = 2^i, sums below 2 sBound", 11, 100, delta_suite};
  reg["sequences"] = {"tail-bound certificates of generated sequences", 64, 40, sequence_validate};
}

const std::map<std::string, SuiteInfo>& suite_registry() {
  static const std::map<std::string, SuiteInfo> reg = [] {
    std::map<std::string, SuiteInfo> r;
    register_sequence_suites(r);
    register_slalom_suites(r);
    register_tukey_suites(r);
    register_forcing_suites(r);
    return r;
  }();
  return reg;
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, info] : suite_registry()) out.push_back(name);
  return out;
}

SuiteResult run_suite(SuiteSpec spec) {
  const auto& reg = suite_registry();
  auto it = reg.find(spec.suite);
  if (it == reg.end()) throw UsageError("unknown suite: " + spec.suite);
  if (spec.horizon == 0) spec.horizon = it->second.default_horizon;
  if (spec.instances == 0) spec.instances = it->second.default_instances;
  SuiteResult res;
  res.spec = spec;
  const auto start = std::chrono::steady_clock::now();
  try {
    it->second.run(spec, res.report);
  } catch (const CertificateError& e) {
    res.report.error("certificate", e.what());
  } catch (const std::exception& e) {
    res.report.error("exception", e.what());
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<std::string> gen_kinds() { return {"eps", "partition", "slalom", "point"}; }

namespace {

TailBoundedSeq eps_from_params(const json& p, Rng& rng) {
  const std::string family = p.value("family", std::string("geometric"));
  if (family == "geometric")
    return TailBoundedSeq::geometric(parse_rational(p.value("first", std::string("1"))),
                                     parse_rational(p.value("ratio", std::string("1/2"))));
  if (family == "p-series")
    return TailBoundedSeq::p_series(parse_rational(p.value("c", std::string("1"))), p.value("p", 2u));
  if (family == "random") return random_eps(rng, rng.between(0, 1));
  throw UsageError("unknown sequence family: " + family);
}

IntervalPartition partition_from_params(const json& p) {
  const std::string family = p.value("family", std::string("arithmetic"));
  if (family == "arithmetic") return IntervalPartition::arithmetic(p.value("a", Index(2)), p.value("b", Index(2)));
  if (family == "unit") return IntervalPartition::unit();
  if (family == "powers") return IntervalPartition::powers(p.value("base", Index(2)), p.value("scale", Index(1)));
  if (family == "polynomial")
    return IntervalPartition::polynomial(p.value("coeffs", std::vector<Index>{1, 1}));
  throw UsageError("unknown partition family: " + family);
}

}  // namespace

json gen_instance(const std::string& kind, std::uint64_t seed, const json& params) {
  Rng rng(seed, 0);
  const Index window = params.value("window", Index(8));
  try {
    if (kind == "eps") {
      json out = eps_from_params(params, rng).to_json();
      return out;
    }
    if (kind == "partition") return partition_from_params(params).to_json(window);
    if (kind == "slalom") {
      IntervalPartition I = partition_from_params(params.value("partition", json::object()));
      return BlockSlalom::random_sparse(I, seed, params.value("min", Index(0)), params.value("max", Index(3)))
          .to_json(window);
    }
    if (kind == "point") {
      Point x = Point::random(seed);
      std::string bits;
      for (Index p = 0; p < window; ++p) bits += x.bit(p) ? '1' : '0';
      return {{"point", x.descriptor()}, {"prefix", bits}};
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad parameters: ") + e.what());
  }
  throw UsageError("unknown instance kind: " + kind);
}

}  // namespace slalom
