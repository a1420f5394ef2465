#pragma once

// Validity analysis. Checks are organized as a hierarchy:
//   VC1  one limit         : threshold is a natural number
//   VC2  one limitation    : VC1 per limit + pairwise consistency + capacity
//   VC3  one plan          : VC2 per limitation + related-metric consistency
//   VC4  whole pricing     : VC3 per plan + cross-plan price coherence
//
// Capacity checks aggregate over every limitation that guards the same
// (operation, metric) inside a plan, whatever the window kind: a daily quota
// and a per-second rate on the same metric bound the same consumer, so their
// demand intervals are aggregated before being compared against capacity.
//
// All comparisons are exact. Percentages are rendered (4 significant digits)
// only when a conflict or report entry is written out.

#include "sla4oai/diagnostics.hpp"
#include "sla4oai/io.hpp"
#include "sla4oai/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sla4oai {

using Json = nlohmann::json;

// ----------------------------------------------------------------- conflicts

enum class Criterion { vc1_1, vc2_2, vc2_3, vc2_4, vc3_2, vc4_2 };

inline std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::vc1_1: return "VC1_1";
    case Criterion::vc2_2: return "VC2_2";
    case Criterion::vc2_3: return "VC2_3";
    case Criterion::vc2_4: return "VC2_4";
    case Criterion::vc3_2: return "VC3_2";
    case Criterion::vc4_2: return "VC4_2";
  }
  return "VC1_1";
}

struct Conflict {
  Criterion criterion;
  std::vector<std::string> subjects;  // model locations, prioritized first
  Json explanation;                   // always carries a "summary" string

  friend bool operator==(const Conflict& a, const Conflict& b) {
    return a.criterion == b.criterion && a.subjects == b.subjects &&
           a.explanation == b.explanation;
  }
};

struct Exclusion {
  std::string location;
  std::string reason;

  friend bool operator==(const Exclusion&, const Exclusion&) = default;
  friend auto operator<=>(const Exclusion&, const Exclusion&) = default;
};

// Which capacity bounded a given (plan, operation, metric) group.
struct CapacityUse {
  std::string plan;
  ApiOperation operation;
  std::string metric;
  Capacity capacity;

  friend bool operator==(const CapacityUse&, const CapacityUse&) = default;
};

struct ConflictReport {
  std::vector<Conflict> conflicts;    // sorted by (criterion, subjects)
  std::vector<Exclusion> exclusions;  // sorted, deduplicated
  std::vector<CapacityUse> capacities;

  bool valid() const { return conflicts.empty(); }
};

struct CheckResult {
  std::vector<Conflict> conflicts;
  std::vector<Exclusion> exclusions;

  void merge(CheckResult&& other) {
    for (auto& c : other.conflicts) conflicts.push_back(std::move(c));
    for (auto& e : other.exclusions) exclusions.push_back(std::move(e));
  }
};

// ------------------------------------------------------------- priority rules

// Ordered, injectable tie-breaking rules for deciding which of two limits
// "wins" attention in a conflict payload. After all rules pass, ties fall to
// lexicographic metric name and finally declaration order, so the outcome is
// total and deterministic.
struct PriorityPolicy {
  enum class Rule { shorter_period_first, rate_over_quota, requests_metric_first };

  std::vector<Rule> rules{Rule::shorter_period_first, Rule::rate_over_quota,
                          Rule::requests_metric_first};

  static PriorityPolicy standard() { return {}; }

  struct View {
    std::optional<Rational> period_seconds;
    WindowKind window = WindowKind::quota;
    std::string metric;
    size_t order = 0;  // declaration order
  };

  // < 0: a first, > 0: b first.
  int compare(const View& a, const View& b) const {
    for (Rule rule : rules) {
      switch (rule) {
        case Rule::shorter_period_first:
          if (a.period_seconds && b.period_seconds &&
              *a.period_seconds != *b.period_seconds)
            return *a.period_seconds < *b.period_seconds ? -1 : 1;
          break;
        case Rule::rate_over_quota:
          if (a.window != b.window)
            return a.window == WindowKind::rate ? -1 : 1;
          break;
        case Rule::requests_metric_first:
          if ((a.metric == "requests") != (b.metric == "requests"))
            return a.metric == "requests" ? -1 : 1;
          break;
      }
    }
    if (a.metric != b.metric) return a.metric < b.metric ? -1 : 1;
    if (a.order != b.order) return a.order < b.order ? -1 : 1;
    return 0;
  }
};

// ------------------------------------------------------------- bpu calculus

// Demand interval of one limit as a fraction of capacity: min_pu is the
// sustained per-capacity-period consumption when the budget is spread
// uniformly over the limit period; max_pu is the burst where the whole
// budget lands inside one capacity period.
inline PURange compute_bpu(const ThresholdLimit& limit, const Capacity& capacity) {
  if (!limit.threshold.is_numeric())
    throw std::invalid_argument("compute_bpu needs a numeric threshold");
  if (!limit.period)
    throw std::invalid_argument("compute_bpu needs a limit with a period");
  if (capacity.threshold <= 0)
    throw std::invalid_argument("capacity threshold must be positive");
  Rational periods(period_seconds(*limit.period), period_seconds(capacity.period));
  Rational max_pu = limit.threshold.value / capacity.threshold;
  Rational min_pu = max_pu / periods;
  // A limit period shorter than the capacity period legitimately flips the
  // pair; callers treat that as an inverted interval, so emit it raw.
  return PURange::raw(min_pu, max_pu);
}

// Pointwise intersection of demand intervals. An inverted result is a legal
// outcome (the limits over-constrain each other) and is reported, never
// clamped away.
inline PURange aggregate_bpu(const std::vector<PURange>& ranges) {
  if (ranges.empty())
    throw std::invalid_argument("aggregate_bpu needs at least one range");
  Rational min_pu = ranges.front().min_pu;
  Rational max_pu = ranges.front().max_pu;
  for (size_t i = 1; i < ranges.size(); ++i) {
    min_pu = std::max(min_pu, ranges[i].min_pu);
    max_pu = std::min(max_pu, ranges[i].max_pu);
  }
  return PURange::raw(min_pu, max_pu);
}

struct NoCapacityDerivable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Falls back to the most permissive limit as the capacity estimate: every
// numeric period-bearing limit is normalized to uniform per-second
// throughput; the greatest one wins and its own (threshold, period) form the
// capacity. Ties prefer the shorter period (the finer grid), then the first
// one declared.
inline Capacity derive_default_capacity(
    const std::vector<const Limitation*>& limitations,
    const std::string& metric) {
  const ThresholdLimit* best = nullptr;
  Rational best_rate;
  Integer best_period_s;
  for (const Limitation* lim : limitations) {
    if (lim->metric != metric) continue;
    for (const ThresholdLimit& limit : lim->limits) {
      if (!limit.threshold.is_numeric() || !limit.period) continue;
      // A capacity must be positive; a non-positive threshold (a VC1 conflict
      // in its own right) can never serve as the fallback estimate.
      if (limit.threshold.value <= 0) continue;
      Integer ps = period_seconds(*limit.period);
      Rational rate = limit.threshold.value / Rational(ps);
      bool wins = !best || rate > best_rate ||
                  (rate == best_rate && ps < best_period_s);
      if (wins) {
        best = &limit;
        best_rate = rate;
        best_period_s = ps;
      }
    }
  }
  if (!best)
    throw NoCapacityDerivable("no numeric period-bearing limit to derive from");
  Capacity cap;
  cap.metric = metric;
  cap.threshold = best->threshold.value;
  cap.period = *best->period;
  cap.provenance = Capacity::Provenance::derived_default;
  return cap;
}

// ------------------------------------------------------------ check helpers

namespace detail {

inline std::string limitation_location(const std::string& plan,
                                       const Limitation& lim) {
  return pointer({"plans", plan,
                  lim.window == WindowKind::quota ? "quotas" : "rates",
                  lim.operation.path, to_string(lim.operation.method),
                  lim.metric});
}

inline std::string limit_location(const std::string& plan, const Limitation& lim,
                                  size_t index) {
  return limitation_location(plan, lim) + "/" + std::to_string(index);
}

inline Json limit_json(const ThresholdLimit& limit) {
  Json j;
  j["threshold"] = to_string(limit.threshold);
  if (limit.period) j["period"] = to_string(*limit.period);
  return j;
}

inline Json capacity_json(const Capacity& cap) {
  return Json{{"metric", cap.metric},
              {"threshold", decimal_string(cap.threshold)},
              {"period", to_string(cap.period)},
              {"provenance", to_string(cap.provenance)}};
}

}  // namespace detail

// --------------------------------------------------------------------- VC1

// A usable threshold is a natural number: an integer >= 0. Unlimited and
// custom thresholds are not conflicts; they are recorded as exclusions so
// the report says why no numeric check happened.
inline CheckResult check_vc1(const ThresholdLimit& limit,
                             const std::string& location) {
  CheckResult result;
  switch (limit.threshold.kind) {
    case Threshold::Kind::unlimited:
      result.exclusions.push_back(
          {location, "unlimited threshold; excluded from numeric checks"});
      return result;
    case Threshold::Kind::custom:
      result.exclusions.push_back(
          {location, "custom threshold; excluded from automated checks"});
      return result;
    case Threshold::Kind::numeric:
      break;
  }
  const Rational& value = limit.threshold.value;
  if (value < 0 || !is_integral(value)) {
    Json expl;
    expl["summary"] = "threshold " + decimal_string(value) +
                      " is not a natural number";
    expl["threshold"] = decimal_string(value);
    result.conflicts.push_back({Criterion::vc1_1, {location}, std::move(expl)});
  }
  return result;
}

// --------------------------------------------------------------------- VC2

namespace detail {

struct GroupMember {
  const Limitation* limitation;
  const ThresholdLimit* limit;
  size_t limit_index;
  std::string location;
  size_t order;  // position across the group, for policy tie-breaks
};

inline PriorityPolicy::View view_of(const GroupMember& m) {
  return {m.limit->period
              ? std::optional<Rational>(Rational(period_seconds(*m.limit->period)))
              : std::nullopt,
          m.limitation->window, m.limitation->metric, m.order};
}

// VC2.2 / VC2.3: pairwise consistency of numeric period-bearing limits
// belonging to one limitation.
inline void check_limit_pairs(const std::string& plan, const Limitation& lim,
                              const std::optional<Capacity>& capacity,
                              const PriorityPolicy& policy, CheckResult& out) {
  std::vector<GroupMember> members;
  for (size_t i = 0; i < lim.limits.size(); ++i) {
    const ThresholdLimit& limit = lim.limits[i];
    if (!limit.threshold.is_numeric() || !limit.period) continue;
    members.push_back({&lim, &limit, i, limit_location(plan, lim, i), i});
  }
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = i + 1; j < members.size(); ++j) {
      const GroupMember& a = members[i];
      const GroupMember& b = members[j];
      Integer pa = period_seconds(*a.limit->period);
      Integer pb = period_seconds(*b.limit->period);
      if (pa == pb) {
        // Same window, same period: two different budgets cannot both be
        // the binding one.
        if (a.limit->threshold.value != b.limit->threshold.value) {
          const GroupMember& first =
              policy.compare(view_of(a), view_of(b)) <= 0 ? a : b;
          const GroupMember& second = &first == &a ? b : a;
          Json expl;
          expl["summary"] =
              "limits over the same period " + to_string(*a.limit->period) +
              " declare different thresholds " +
              decimal_string(a.limit->threshold.value) + " and " +
              decimal_string(b.limit->threshold.value);
          expl["period"] = to_string(*a.limit->period);
          expl["thresholds"] = Json::array(
              {decimal_string(first.limit->threshold.value),
               decimal_string(second.limit->threshold.value)});
          out.conflicts.push_back({Criterion::vc2_3,
                                   {first.location, second.location},
                                   std::move(expl)});
        }
        continue;
      }
      const GroupMember& shorter = pa < pb ? a : b;
      const GroupMember& longer = pa < pb ? b : a;
      // The longer-period limit must allow at least the shorter one's whole
      // budget, otherwise the shorter limit can never be used in full. With
      // a shared capacity C this is exactly max_pu(longer) < max_pu(shorter);
      // C cancels, so the comparison needs no capacity to be decided.
      if (longer.limit->threshold.value < shorter.limit->threshold.value) {
        Json expl;
        expl["summary"] =
            "the " + to_string(*longer.limit->period) + " limit of " +
            decimal_string(longer.limit->threshold.value) +
            " is below the " + to_string(*shorter.limit->period) +
            " limit of " + decimal_string(shorter.limit->threshold.value) +
            "; the shorter window's budget is unreachable";
        expl["shorter"] = limit_json(*shorter.limit);
        expl["longer"] = limit_json(*longer.limit);
        if (capacity) {
          expl["shorter"]["max_pu"] =
              format_percent(compute_bpu(*shorter.limit, *capacity).max_pu);
          expl["longer"]["max_pu"] =
              format_percent(compute_bpu(*longer.limit, *capacity).max_pu);
          expl["capacity"] = capacity_json(*capacity);
        }
        const GroupMember& first =
            policy.compare(view_of(shorter), view_of(longer)) <= 0 ? shorter
                                                                   : longer;
        const GroupMember& second = &first == &shorter ? longer : shorter;
        out.conflicts.push_back({Criterion::vc2_2,
                                 {first.location, second.location},
                                 std::move(expl)});
      }
    }
  }
}

// VC2.4 over every limitation guarding one (operation, metric): aggregate
// the demand intervals and compare against capacity.
inline void check_capacity_group(const std::string& plan,
                                 const std::vector<const Limitation*>& group,
                                 const std::optional<Capacity>& capacity,
                                 CheckResult& out) {
  std::string group_loc =
      group.empty() ? "/" : limitation_location(plan, *group.front());
  if (!capacity) {
    out.exclusions.push_back(
        {group_loc,
         "no capacity declared and none derivable; capacity check skipped"});
    return;
  }
  std::vector<PURange> ranges;
  std::vector<std::string> subjects;
  for (const Limitation* lim : group) {
    for (size_t i = 0; i < lim->limits.size(); ++i) {
      const ThresholdLimit& limit = lim->limits[i];
      std::string loc = limit_location(plan, *lim, i);
      if (limit.threshold.kind == Threshold::Kind::unlimited && limit.period) {
        out.exclusions.push_back(
            {loc, "unlimited threshold cannot be bounded by capacity; "
                  "excluded from aggregation"});
        continue;
      }
      if (!limit.threshold.is_numeric() || !limit.period) continue;
      ranges.push_back(compute_bpu(limit, *capacity));
      subjects.push_back(std::move(loc));
    }
  }
  if (ranges.empty()) {
    out.exclusions.push_back(
        {group_loc, "no numeric period-bearing limits; capacity check skipped"});
    return;
  }
  PURange aggregate = aggregate_bpu(ranges);
  if (aggregate.inverted())
    out.exclusions.push_back(
        {group_loc,
         "aggregated demand interval is inverted (min " +
             format_percent(aggregate.min_pu) + " > max " +
             format_percent(aggregate.max_pu) +
             "); the limits over-constrain each other"});
  if (aggregate.max_pu > 1) {
    Json expl;
    expl["summary"] = "limits demand up to " + format_percent(aggregate.max_pu) +
                      " of the " + to_string(capacity->provenance) +
                      " capacity " + decimal_string(capacity->threshold) +
                      " per " + to_string(capacity->period);
    expl["aggregate"] = Json{{"min_pu", format_percent(aggregate.min_pu)},
                             {"max_pu", format_percent(aggregate.max_pu)}};
    expl["capacity"] = capacity_json(*capacity);
    out.conflicts.push_back(
        {Criterion::vc2_4, std::move(subjects), std::move(expl)});
  }
}

// Informational: a quota and a rate sharing a normalized period with
// different thresholds never form a VC2_3 conflict (different window
// semantics), but the asymmetry is worth surfacing.
inline void note_cross_kind_periods(const std::string& plan,
                                    const std::vector<const Limitation*>& group,
                                    CheckResult& out) {
  for (size_t i = 0; i < group.size(); ++i) {
    for (size_t j = i + 1; j < group.size(); ++j) {
      if (group[i]->window == group[j]->window) continue;
      for (size_t a = 0; a < group[i]->limits.size(); ++a) {
        const ThresholdLimit& la = group[i]->limits[a];
        if (!la.threshold.is_numeric() || !la.period) continue;
        for (size_t b = 0; b < group[j]->limits.size(); ++b) {
          const ThresholdLimit& lb = group[j]->limits[b];
          if (!lb.threshold.is_numeric() || !lb.period) continue;
          if (period_seconds(*la.period) != period_seconds(*lb.period)) continue;
          if (la.threshold.value == lb.threshold.value) continue;
          out.exclusions.push_back(
              {limit_location(plan, *group[i], a),
               "quota and rate share period " + to_string(*la.period) +
                   " with different thresholds (" +
                   decimal_string(la.threshold.value) + " vs " +
                   decimal_string(lb.threshold.value) +
                   "); window kinds differ, so this is informational only"});
        }
      }
    }
  }
}

inline CheckResult check_vc2_group(const std::string& plan,
                                   const std::vector<const Limitation*>& group,
                                   const std::optional<Capacity>& capacity,
                                   const PriorityPolicy& policy) {
  CheckResult result;
  for (const Limitation* lim : group) {
    for (size_t i = 0; i < lim->limits.size(); ++i)
      result.merge(check_vc1(lim->limits[i], limit_location(plan, *lim, i)));
    check_limit_pairs(plan, *lim, capacity, policy, result);
  }
  note_cross_kind_periods(plan, group, result);
  check_capacity_group(plan, group, capacity, result);
  return result;
}

}  // namespace detail

// One limitation in isolation. The plan-level driver uses the group variant
// so that quotas and rates on the same (operation, metric) share one
// capacity comparison; standalone calls see the same semantics with a group
// of one.
inline CheckResult check_vc2(const Limitation& limitation,
                             const std::optional<Capacity>& capacity,
                             const PriorityPolicy& policy = {},
                             const std::string& plan = "-") {
  std::optional<Capacity> cap = capacity;
  if (!cap) {
    try {
      cap = derive_default_capacity({&limitation}, limitation.metric);
    } catch (const NoCapacityDerivable&) {
      // reported as an exclusion by the group check
    }
  }
  return detail::check_vc2_group(plan, {&limitation}, cap, policy);
}

// --------------------------------------------------------------------- VC3

using CapacityMap = std::map<std::pair<ApiOperation, std::string>, Capacity>;

namespace detail {

// VC3.2: limits of related metrics must be jointly satisfiable on the same
// operation. With "1 unit of a consumes f units of b", b's budget admits at
// most T_b / f units of a; a larger T_a is unreachable.
inline void check_related_metrics(const std::string& plan, const Plan& model,
                                  const std::vector<MetricRelationship>& rels,
                                  const PriorityPolicy& policy,
                                  CheckResult& out) {
  for (const MetricRelationship& rel : rels) {
    for (const Limitation& la : model.limitations) {
      if (la.metric != rel.metric_a) continue;
      for (const Limitation& lb : model.limitations) {
        if (lb.metric != rel.metric_b) continue;
        if (la.operation != lb.operation) continue;
        for (size_t i = 0; i < la.limits.size(); ++i) {
          const ThresholdLimit& lim_a = la.limits[i];
          if (!lim_a.threshold.is_numeric() || !lim_a.period) continue;
          for (size_t j = 0; j < lb.limits.size(); ++j) {
            const ThresholdLimit& lim_b = lb.limits[j];
            if (!lim_b.threshold.is_numeric() || !lim_b.period) continue;
            Integer pa = period_seconds(*lim_a.period);
            Integer pb = period_seconds(*lim_b.period);
            bool scaled = pa != pb;
            // Same period: T_a > T_b / f. Different periods: compare uniform
            // per-second rates, which assumes consumption scales uniformly.
            Rational lhs = scaled ? lim_a.threshold.value / Rational(pa)
                                  : lim_a.threshold.value;
            Rational rhs = scaled
                               ? lim_b.threshold.value / Rational(pb) / rel.factor
                               : lim_b.threshold.value / rel.factor;
            if (lhs <= rhs) continue;
            std::string loc_a = limit_location(plan, la, i);
            std::string loc_b = limit_location(plan, lb, j);
            Json expl;
            Rational allowed = lim_b.threshold.value / rel.factor;
            expl["summary"] =
                "metric '" + rel.metric_a + "' allows " +
                decimal_string(lim_a.threshold.value) + " / " +
                to_string(*lim_a.period) + " but the '" + rel.metric_b +
                "' budget admits only " + decimal_string(allowed) +
                " (factor " + decimal_string(rel.factor) + ")";
            expl["metric-a"] = rel.metric_a;
            expl["metric-b"] = rel.metric_b;
            expl["factor"] = decimal_string(rel.factor);
            expl["declared"] = decimal_string(lim_a.threshold.value);
            expl["admitted-by-related"] = decimal_string(allowed);
            if (scaled) expl["assumption"] = "uniform-scaling";
            PriorityPolicy::View va{Rational(pa), la.window, la.metric, 0};
            PriorityPolicy::View vb{Rational(pb), lb.window, lb.metric, 1};
            bool a_first = policy.compare(va, vb) <= 0;
            expl["prioritized"] = a_first ? loc_a : loc_b;
            out.conflicts.push_back(
                {Criterion::vc3_2,
                 a_first ? std::vector<std::string>{loc_a, loc_b}
                         : std::vector<std::string>{loc_b, loc_a},
                 std::move(expl)});
          }
        }
      }
    }
  }
}

// Declared capacity lookup: exact method entry first, then an `all` entry.
inline std::optional<Capacity> lookup_capacity(
    const CapacityMap& declared, const ApiOperation& op, const std::string& metric) {
  if (auto it = declared.find({op, metric}); it != declared.end())
    return it->second;
  if (auto it = declared.find({{op.path, HttpMethod::all}, metric});
      it != declared.end())
    return it->second;
  return std::nullopt;
}

struct GroupedPlan {
  // (operation, metric) -> member limitations, in declaration order
  std::vector<std::pair<std::pair<ApiOperation, std::string>,
                        std::vector<const Limitation*>>> groups;
};

inline GroupedPlan group_limitations(const Plan& plan) {
  GroupedPlan grouped;
  for (const Limitation& lim : plan.limitations) {
    std::pair<ApiOperation, std::string> key{lim.operation, lim.metric};
    auto it = std::find_if(grouped.groups.begin(), grouped.groups.end(),
                           [&](const auto& g) { return g.first == key; });
    if (it == grouped.groups.end()) {
      grouped.groups.push_back({key, {&lim}});
    } else {
      it->second.push_back(&lim);
    }
  }
  return grouped;
}

}  // namespace detail

// One plan: every limitation group plus related-metric consistency.
// `declared` capacities win over derivation; `uses` (optional) records which
// capacity actually bounded each group.
inline CheckResult check_vc3(const Plan& plan,
                             const std::vector<MetricRelationship>& relationships,
                             const CapacityMap& declared = {},
                             const PriorityPolicy& policy = {},
                             std::vector<CapacityUse>* uses = nullptr) {
  CheckResult result;
  detail::GroupedPlan grouped = detail::group_limitations(plan);
  for (const auto& [key, group] : grouped.groups) {
    std::optional<Capacity> capacity =
        detail::lookup_capacity(declared, key.first, key.second);
    if (!capacity) {
      try {
        capacity = derive_default_capacity(group, key.second);
      } catch (const NoCapacityDerivable&) {
        // the group check records the exclusion
      }
    }
    if (capacity && uses)
      uses->push_back({plan.name, key.first, key.second, *capacity});
    result.merge(detail::check_vc2_group(plan.name, group, capacity, policy));
  }
  detail::check_related_metrics(plan.name, plan, relationships, policy, result);
  return result;
}

// --------------------------------------------------------------------- VC4

namespace detail {

inline Rational cost_per_second(const Cost& cost) {
  return cost.amount / Rational(period_seconds(cost.period));
}

// VC4.2: a plan that costs strictly less must not offer strictly more. Only
// equivalent limitations (same operation, metric, window kind) with limits
// over the same normalized period are compared.
inline void check_plan_pair(const Plan& cheaper, const Plan& pricier,
                            CheckResult& out) {
  for (const Limitation& lc : cheaper.limitations) {
    const Limitation* match = nullptr;
    for (const Limitation& lp : pricier.limitations)
      if (equivalent_limitations(lc, lp)) { match = &lp; break; }
    if (!match) {
      out.exclusions.push_back(
          {limitation_location(cheaper.name, lc),
           "no equivalent limitation in plan '" + pricier.name +
               "'; price comparison skipped"});
      continue;
    }
    for (size_t i = 0; i < lc.limits.size(); ++i) {
      const ThresholdLimit& cheap = lc.limits[i];
      if (!cheap.period) continue;
      if (cheap.threshold.kind == Threshold::Kind::unlimited) {
        out.exclusions.push_back(
            {limit_location(cheaper.name, lc, i),
             "unlimited threshold in the cheaper plan; treated as "
             "pay-per-use, price comparison skipped"});
        continue;
      }
      if (!cheap.threshold.is_numeric()) continue;
      for (size_t j = 0; j < match->limits.size(); ++j) {
        const ThresholdLimit& rich = match->limits[j];
        if (!rich.threshold.is_numeric() || !rich.period) continue;
        if (period_seconds(*cheap.period) != period_seconds(*rich.period))
          continue;
        if (cheap.threshold.value <= rich.threshold.value) continue;
        Json expl;
        expl["summary"] =
            "plan '" + cheaper.name + "' costs less (" +
            decimal_string(cheaper.cost.amount) + " " + cheaper.cost.currency +
            " / " + to_string(cheaper.cost.period) + " vs " +
            decimal_string(pricier.cost.amount) + " " + pricier.cost.currency +
            " / " + to_string(pricier.cost.period) + ") yet allows " +
            decimal_string(cheap.threshold.value) + " instead of " +
            decimal_string(rich.threshold.value) + " per " +
            to_string(*cheap.period);
        expl["cheaper"] = Json{{"plan", cheaper.name},
                               {"threshold", decimal_string(cheap.threshold.value)},
                               {"cost-per-second",
                                format_sig4(cost_per_second(cheaper.cost))}};
        expl["pricier"] = Json{{"plan", pricier.name},
                               {"threshold", decimal_string(rich.threshold.value)},
                               {"cost-per-second",
                                format_sig4(cost_per_second(pricier.cost))}};
        expl["period"] = to_string(*cheap.period);
        out.conflicts.push_back(
            {Criterion::vc4_2,
             {limit_location(cheaper.name, lc, i),
              limit_location(pricier.name, *match, j)},
             std::move(expl)});
      }
    }
  }
}

inline bool criterion_order(const Conflict& a, const Conflict& b) {
  if (a.criterion != b.criterion) return a.criterion < b.criterion;
  return a.subjects < b.subjects;
}

inline void finalize(ConflictReport& report) {
  std::sort(report.conflicts.begin(), report.conflicts.end(), criterion_order);
  report.conflicts.erase(
      std::unique(report.conflicts.begin(), report.conflicts.end()),
      report.conflicts.end());
  std::sort(report.exclusions.begin(), report.exclusions.end());
  report.exclusions.erase(
      std::unique(report.exclusions.begin(), report.exclusions.end()),
      report.exclusions.end());
}

}  // namespace detail

// Whole-pricing analysis. `declared` capacities take precedence over derived
// ones; every capacity actually used is recorded with its provenance.
inline ConflictReport validity(const Pricing& pricing,
                               const CapacityMap& declared = {},
                               const PriorityPolicy& policy = {}) {
  ConflictReport report;
  CheckResult merged;
  for (const Plan& plan : pricing.plans)
    merged.merge(check_vc3(plan, pricing.relationships, declared, policy,
                           &report.capacities));

  // VC4.2 on every unordered plan pair with comparable fixed costs.
  for (size_t i = 0; i < pricing.plans.size(); ++i) {
    for (size_t j = i + 1; j < pricing.plans.size(); ++j) {
      const Plan& a = pricing.plans[i];
      const Plan& b = pricing.plans[j];
      bool custom = false;
      for (const Plan* p : {&a, &b}) {
        if (p->cost.kind == Cost::Kind::custom) {
          merged.exclusions.push_back(
              {pointer({"plans", p->name, "pricing"}),
               "custom price; cross-plan price comparison skipped"});
          custom = true;
        }
      }
      if (custom) continue;
      Rational ca = detail::cost_per_second(a.cost);
      Rational cb = detail::cost_per_second(b.cost);
      if (ca == cb) continue;  // same price: nothing to contradict
      const Plan& cheaper = ca < cb ? a : b;
      const Plan& pricier = ca < cb ? b : a;
      detail::check_plan_pair(cheaper, pricier, merged);
    }
  }

  report.conflicts = std::move(merged.conflicts);
  report.exclusions = std::move(merged.exclusions);
  detail::finalize(report);
  return report;
}

inline ConflictReport check_vc4(const Pricing& pricing,
                                const PriorityPolicy& policy = {}) {
  return validity(pricing, {}, policy);
}

// ------------------------------------------------------------ report output

inline Json report_to_json(const ConflictReport& report) {
  Json j;
  j["verdict"] = report.valid() ? "valid" : "invalid";
  j["conflicts"] = Json::array();
  for (const Conflict& c : report.conflicts)
    j["conflicts"].push_back(Json{{"criterion", to_string(c.criterion)},
                                  {"subjects", c.subjects},
                                  {"explanation", c.explanation}});
  j["exclusions"] = Json::array();
  for (const Exclusion& e : report.exclusions)
    j["exclusions"].push_back(Json{{"location", e.location},
                                   {"reason", e.reason}});
  j["capacities"] = Json::array();
  for (const CapacityUse& u : report.capacities)
    j["capacities"].push_back(Json{{"plan", u.plan},
                                   {"operation", to_string(u.operation)},
                                   {"metric", u.metric},
                                   {"capacity", detail::capacity_json(u.capacity)}});
  return j;
}

inline Json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
  Json arr = Json::array();
  for (const Diagnostic& d : diags)
    arr.push_back(Json{{"severity", to_string(d.severity)},
                       {"code", d.code},
                       {"location", d.location},
                       {"message", d.message}});
  return arr;
}

// --------------------------------------------------------- end-to-end runner

// Shared by the CLI and the HTTP service so both produce the same body for
// the same inputs.
struct AnalysisOutcome {
  std::vector<Diagnostic> diagnostics;
  std::optional<ConflictReport> report;
  bool syntax_ok = false;
};

inline AnalysisOutcome run_validity(
    const std::string& text, const MaterializeOptions& options = {},
    const std::optional<std::string>& capacity_text = std::nullopt,
    const PriorityPolicy& policy = {}) {
  AnalysisOutcome outcome;
  MaterializeResult mat = materialize(text, options);
  outcome.diagnostics = std::move(mat.diagnostics);
  outcome.syntax_ok = mat.syntax_ok;
  if (!mat.pricing) return outcome;

  CapacityMap declared;
  if (capacity_text) {
    CapacityResult caps = load_capacity_sidecar(*capacity_text);
    for (auto& d : caps.diagnostics) outcome.diagnostics.push_back(std::move(d));
    for (const DeclaredCapacity& dc : caps.capacities)
      declared[{dc.operation, dc.capacity.metric}] = dc.capacity;
  }
  outcome.report = validity(*mat.pricing, declared, policy);
  return outcome;
}

inline Json outcome_to_json(const AnalysisOutcome& outcome) {
  Json j;
  j["diagnostics"] = diagnostics_to_json(outcome.diagnostics);
  if (outcome.report) j["report"] = report_to_json(*outcome.report);
  return j;
}

}  // namespace sla4oai
