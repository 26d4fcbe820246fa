#include "slalom/partitions.hpp"

#include <algorithm>
#include <atomic>

#include "slalom/errors.hpp"

namespace slalom {

namespace {
std::atomic<std::uint64_t> next_source{1};
}

struct IntervalPartition::Impl {
  Kind kind = Kind::Lengths;
  std::string family;
  json params = json::object();
  bool reloadable = true;
  std::uint64_t source = 0;  // shared by copies that differ only in prefix
  std::function<Index(Index)> length;
  std::function<Index(Index)> endpoint;
  std::shared_ptr<const IntervalPartition> base;
  Index group = 1;
  Index shift = 0;
  Index offset = 0;
  std::vector<Index> prefix;

  struct Memo {
    std::mutex mu;
    std::vector<Index> ends;
  };
  std::shared_ptr<Memo> memo = std::make_shared<Memo>();
};

IntervalPartition::IntervalPartition(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

static std::string source_key(const std::string& family, const json& params) {
  return family + params.dump();
}

IntervalPartition IntervalPartition::from_lengths(std::string family, json params,
                                                  std::function<Index(Index)> length,
                                                  Index offset) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Lengths;
  impl->family = std::move(family);
  impl->params = std::move(params);
  impl->length = std::move(length);
  impl->offset = offset;
  impl->reloadable = false;
  impl->source = next_source++;
  return IntervalPartition(std::move(impl));
}

IntervalPartition IntervalPartition::from_endpoints(std::string family, json params,
                                                    std::function<Index(Index)> endpoint) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Endpoints;
  impl->family = std::move(family);
  impl->params = std::move(params);
  impl->endpoint = std::move(endpoint);
  impl->reloadable = false;
  impl->source = next_source++;
  return IntervalPartition(std::move(impl));
}

namespace {
// Named families share a source identity by descriptor.
std::mutex registry_mu;
std::vector<std::pair<std::string, std::uint64_t>> registry;

std::uint64_t named_source(const std::string& key) {
  std::lock_guard<std::mutex> lock(registry_mu);
  for (const auto& [k, id] : registry)
    if (k == key) return id;
  registry.emplace_back(key, next_source++);
  return registry.back().second;
}
}  // namespace


IntervalPartition IntervalPartition::unit(Index offset) {
  auto p = from_lengths("unit", json::object(), [](Index) { return Index(1); }, offset);
  auto impl = std::make_shared<Impl>(*p.impl_);
  impl->reloadable = true;
  impl->source = named_source("unit");
  return IntervalPartition(std::move(impl));
}

IntervalPartition IntervalPartition::arithmetic(Index a, Index b, Index offset) {
  json params{{"a", a}, {"b", b}};
  auto p = from_lengths("arithmetic", params, [a, b](Index n) { return a * n + b; }, offset);
  auto impl = std::make_shared<Impl>(*p.impl_);
  impl->reloadable = true;
  impl->source = named_source(source_key("arithmetic", params));
  return IntervalPartition(std::move(impl));
}

IntervalPartition IntervalPartition::polynomial(std::vector<Index> coeffs, Index offset) {
  json params{{"coeffs", coeffs}};
  auto p = from_lengths(
      "polynomial", params,
      [coeffs](Index n) {
        Index v = 0, pw = 1;
        for (Index c : coeffs) {
          v += c * pw;
          pw *= n + 1;
        }
        return v;
      },
      offset);
  auto impl = std::make_shared<Impl>(*p.impl_);
  impl->reloadable = true;
  impl->source = named_source(source_key("polynomial", params));
  return IntervalPartition(std::move(impl));
}

IntervalPartition IntervalPartition::powers(Index base, Index scale) {
  if (base < 2 || scale < 1) throw PreconditionError("powers needs base >= 2 and scale >= 1");
  json params{{"base", base}, {"scale", scale}};
  auto p = from_endpoints("powers", params, [base, scale](Index n) {
    Index v = scale;
    for (Index i = 0; i < n; ++i) v *= base;
    return v;
  });
  auto impl = std::make_shared<Impl>(*p.impl_);
  impl->reloadable = true;
  impl->source = named_source(source_key("powers", params));
  return IntervalPartition(std::move(impl));
}

IntervalPartition IntervalPartition::coarsen(const IntervalPartition& base, Index group, Index shift) {
  if (group == 0) throw PreconditionError("coarsening group must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Coarsen;
  impl->family = "coarsen";
  impl->params = {{"base", base.to_json()}, {"group", group}, {"shift", shift}};
  impl->base = std::make_shared<IntervalPartition>(base);
  impl->group = group;
  impl->shift = shift;
  impl->reloadable = base.reloadable();
  impl->source = next_source++;
  return IntervalPartition(std::move(impl));
}

IntervalPartition IntervalPartition::with_prefix(std::vector<Index> endpoints) const {
  for (std::size_t i = 1; i < endpoints.size(); ++i)
    if (endpoints[i] <= endpoints[i - 1])
      throw PreconditionError("endpoint prefix must be strictly increasing");
  auto impl = std::make_shared<Impl>(*impl_);
  impl->prefix = std::move(endpoints);
  if (!impl->prefix.empty()) impl->offset = impl->prefix.front();
  impl->memo = std::make_shared<Impl::Memo>();
  return IntervalPartition(std::move(impl));
}

Index IntervalPartition::endpoint(Index n) const {
  const Impl& d = *impl_;
  if (n < d.prefix.size()) return d.prefix[n];
  switch (d.kind) {
    case Kind::Lengths: {
      // memo[i] = k_{start + i}
      const Index start = d.prefix.empty() ? 0 : d.prefix.size() - 1;
      std::lock_guard<std::mutex> lock(d.memo->mu);
      auto& ends = d.memo->ends;
      if (ends.empty()) ends.push_back(d.prefix.empty() ? d.offset : d.prefix.back());
      while (ends.size() <= n - start) {
        Index len = d.length(start + ends.size() - 1);
        if (len == 0)
          throw PreconditionError("empty block at index " + std::to_string(start + ends.size() - 1) +
                                  " in " + d.family);
        ends.push_back(ends.back() + len);
      }
      return ends[n - start];
    }
    case Kind::Endpoints: {
      Index v = d.endpoint(n);
      if (n > 0) {
        Index prev = (n - 1 < d.prefix.size()) ? d.prefix[n - 1] : d.endpoint(n - 1);
        if (v <= prev)
          throw PreconditionError("endpoints not strictly increasing at index " + std::to_string(n) +
                                  " in " + d.family);
      }
      return v;
    }
    case Kind::Coarsen: {
      Index v = d.base->endpoint(d.shift + d.group * n);
      if (n > 0 && n == d.prefix.size() && !d.prefix.empty() && v <= d.prefix.back())
        throw PreconditionError("coarsening does not continue the prefix");
      return v;
    }
  }
  return 0;
}

Index IntervalPartition::first_at_or_after(Index position) const {
  if (endpoint(0) >= position) return 0;
  Index hi = 1;
  while (endpoint(hi) < position) hi *= 2;
  Index lo = hi / 2;  // endpoint(lo) < position <= endpoint(hi)
  while (hi - lo > 1) {
    Index mid = lo + (hi - lo) / 2;
    if (endpoint(mid) < position)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

std::optional<Index> IntervalPartition::block_containing(Index position) const {
  if (position < offset()) return std::nullopt;
  Index m = first_at_or_after(position);
  if (endpoint(m) == position) return m;
  return m - 1;
}

bool IntervalPartition::is_endpoint(Index position) const {
  return endpoint(first_at_or_after(position)) == position;
}

std::vector<Index> IntervalPartition::endpoints(Index count) const {
  std::vector<Index> out;
  out.reserve(count);
  for (Index n = 0; n < count; ++n) out.push_back(endpoint(n));
  return out;
}

const std::string& IntervalPartition::family() const { return impl_->family; }
const json& IntervalPartition::params() const { return impl_->params; }
const std::vector<Index>& IntervalPartition::endpoints_prefix() const { return impl_->prefix; }
bool IntervalPartition::reloadable() const { return impl_->reloadable; }

json IntervalPartition::to_json(Index window) const {
  Index count = std::max<Index>(window + 1, impl_->prefix.size());
  json family = impl_->reloadable ? json(impl_->family) : json("custom:" + impl_->family);
  return {{"family", family},
          {"params", impl_->params},
          {"endpoints_prefix", endpoints(count)},
          {"offset", offset()}};
}

IntervalPartition IntervalPartition::from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  const json params = j.value("params", json::object());
  const Index offset = j.value("offset", Index(0));
  std::optional<IntervalPartition> p;
  if (family == "unit")
    p = unit(offset);
  else if (family == "arithmetic")
    p = arithmetic(params.at("a").get<Index>(), params.at("b").get<Index>(), offset);
  else if (family == "polynomial")
    p = polynomial(params.at("coeffs").get<std::vector<Index>>(), offset);
  else if (family == "powers")
    p = powers(params.at("base").get<Index>(), params.value("scale", Index(1)));
  else if (family == "coarsen")
    p = coarsen(from_json(params.at("base")), params.at("group").get<Index>(),
                params.value("shift", Index(0)));
  else
    throw PreconditionError("partition family cannot be rebuilt from JSON: " + family);
  auto prefix = j.value("endpoints_prefix", std::vector<Index>{});
  if (prefix.empty()) return *p;
  if (prefix.front() != offset) throw PreconditionError("offset disagrees with endpoints_prefix");
  return p->with_prefix(std::move(prefix));
}

std::optional<Index> IntervalPartition::eventually_equal(const IntervalPartition& other) const {
  const Impl& a = *impl_;
  const Impl& b = *other.impl_;
  if (a.kind != b.kind) return std::nullopt;
  switch (a.kind) {
    case Kind::Lengths: {
      if (a.source != b.source) return std::nullopt;
      Index q = std::max<Index>({a.prefix.empty() ? 0 : a.prefix.size() - 1,
                                 b.prefix.empty() ? 0 : b.prefix.size() - 1});
      if (endpoint(q) != other.endpoint(q)) return std::nullopt;
      return q;
    }
    case Kind::Endpoints: {
      if (a.source != b.source) return std::nullopt;
      return std::max<Index>(a.prefix.size(), b.prefix.size());
    }
    case Kind::Coarsen: {
      if (a.group != b.group || a.shift != b.shift) return std::nullopt;
      auto q = a.base->eventually_equal(*b.base);
      if (!q) return std::nullopt;
      Index n = 0;
      while (a.shift + a.group * n < *q) ++n;
      return std::max<Index>({n, a.prefix.size(), b.prefix.size()});
    }
  }
  return std::nullopt;
}

std::optional<Index> IntervalPartition::unit_from() const {
  if (impl_->kind != Kind::Lengths || impl_->family != "unit" || !impl_->reloadable)
    return std::nullopt;
  return impl_->prefix.empty() ? impl_->offset : impl_->prefix.back();
}

std::optional<IntervalPartition::Coarsening> IntervalPartition::coarsening() const {
  if (impl_->kind != Kind::Coarsen) return std::nullopt;
  return Coarsening{impl_->base.get(), impl_->group, impl_->shift};
}

std::optional<ContainmentCertificate> certify_refines(const IntervalPartition& I,
                                                      const IntervalPartition& J) {
  if (auto q = I.eventually_equal(J)) return ContainmentCertificate{"eventually equal endpoints", *q};
  if (auto u = I.unit_from()) return ContainmentCertificate{"unit blocks", J.first_at_or_after(*u)};
  if (auto c = J.coarsening()) {
    if (auto inner = certify_refines(I, *c->base)) {
      Index n = 0;
      while (c->shift + c->group * n < inner->from) ++n;
      n = std::max<Index>(n, J.endpoints_prefix().size());
      return ContainmentCertificate{"coarsening of " + inner->name, n};
    }
  }
  return std::nullopt;
}

bool has_contained_block(const IntervalPartition& I, const IntervalPartition& J, Index n) {
  Block b = J.block(n);
  Index m = I.first_at_or_after(b.begin);
  return I.endpoint(m + 1) <= b.end;
}

bool is_union_of_blocks(const IntervalPartition& I, const IntervalPartition& J, Index n) {
  Block b = J.block(n);
  return b.begin >= I.offset() && I.is_endpoint(b.begin) && I.is_endpoint(b.end);
}

namespace {

Verdict tail_verdict(const std::vector<Index>& failures, Index horizon,
                     const std::optional<ContainmentCertificate>& cert, const std::string& what) {
  if (cert) {
    for (Index n : failures)
      if (n >= cert->from)
        throw std::logic_error("certificate '" + cert->name + "' contradicted at " + std::to_string(n));
    return Verdict::holds(cert->name, what + " from index " + std::to_string(cert->from));
  }
  std::vector<Index> tail;
  for (Index n : failures)
    if (n >= horizon / 2) tail.push_back(n);
  if (!tail.empty())
    return Verdict::fails(tail, what + " fails at indices recurring in the upper half of the window");
  std::string note = "consistent up to horizon";
  if (!failures.empty()) note += "; last failure at " + std::to_string(failures.back());
  return Verdict::unknown(horizon, note);
}

}  // namespace

Verdict rel_sq(const IntervalPartition& I, const IntervalPartition& J, Index horizon) {
  std::vector<Index> failures;
  for (Index n = 0; n < horizon; ++n)
    if (!has_contained_block(I, J, n)) failures.push_back(n);
  return tail_verdict(failures, horizon, certify_refines(I, J), "block containment");
}

Verdict rel_refines(const IntervalPartition& I, const IntervalPartition& J, Index horizon) {
  std::vector<Index> failures;
  for (Index n = 0; n < horizon; ++n)
    if (!is_union_of_blocks(I, J, n)) failures.push_back(n);
  return tail_verdict(failures, horizon, certify_refines(I, J), "refinement");
}

IndexRange subin(const IntervalPartition& I, const IntervalPartition& J, Index n) {
  Block b = J.block(n);
  Index lo = I.first_at_or_after(b.begin);
  Index hi = lo;
  while (I.endpoint(hi + 1) <= b.end) ++hi;
  return {lo, hi};
}

Verdict overlap_refute(const IntervalPartition& I, const IntervalPartition& J,
                       const IntervalPartition& K, Index horizon) {
  const Index top = K.endpoint(horizon);
  std::optional<Index> last_shared;
  for (Index m = 0;; ++m) {
    Index e = I.endpoint(m);
    if (e > top) break;
    if (J.is_endpoint(e)) last_shared = e;
  }
  if (last_shared && *last_shared >= top / 2)
    throw PreconditionError("shared endpoints of I and J reach " + std::to_string(*last_shared) +
                            " of " + std::to_string(top) + "; they look cofinal");
  std::vector<Index> refuted;
  std::string first_detail;
  for (Index m = 0; m < horizon; ++m) {
    if (last_shared && K.endpoint(m) <= *last_shared) continue;
    bool on_i = is_union_of_blocks(I, K, m);
    bool on_j = is_union_of_blocks(J, K, m);
    if (on_i && on_j)
      throw std::logic_error("block " + std::to_string(m) + " starts at a shared endpoint past the last one");
    if (refuted.empty())
      first_detail = std::string("K_") + std::to_string(m) + (on_i ? " is" : " is not") +
                     " a union of I-blocks and" + (on_j ? " is" : " is not") + " a union of J-blocks";
    refuted.push_back(m);
  }
  if (refuted.empty())
    return Verdict::unknown(horizon, "no block of K starts past the last shared endpoint");
  return Verdict::fails(refuted, "K refutes joint refinement; " + first_detail);
}

IntervalPartition partition_from_set(const IntegerSequence& a) {
  for (Index i = 1; i < 64; ++i)
    if (a.at(i) <= a.at(i - 1))
      throw PreconditionError("set generator not strictly increasing at " + std::to_string(i));
  return IntervalPartition::from_endpoints(a.name, a.params, a.at);
}

IntervalPartition common_coarsening(const IntervalPartition& I, const IntervalPartition& J,
                                    Index search_limit) {
  struct State {
    std::mutex mu;
    std::vector<Index> common;
    Index next_i = 0;
  };
  auto st = std::make_shared<State>();
  auto fn = [I, J, st, search_limit](Index n) {
    std::lock_guard<std::mutex> lock(st->mu);
    while (st->common.size() <= n) {
      Index scanned = 0;
      for (;; ++st->next_i) {
        if (++scanned > search_limit)
          throw WindowExhausted("no further common endpoint within the search limit");
        Index e = I.endpoint(st->next_i);
        if (J.is_endpoint(e)) {
          st->common.push_back(e);
          ++st->next_i;
          break;
        }
      }
    }
    return st->common[n];
  };
  return IntervalPartition::from_endpoints("common_coarsening", json::object(), fn);
}

}  // namespace slalom
