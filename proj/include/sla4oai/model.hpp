#pragma once

// Domain model for materialized pricing plans.
//
// DESIGN
//  - Value types only; analysis never mutates a Pricing once lowered.
//  - Thresholds, costs and utilizations are exact rationals end to end;
//    doubles exist only in rendered reports.
//  - A Limitation is fully concrete: one operation (path + method), one
//    metric, one window kind. Glob patterns are resolved away before the
//    model is built, and each limitation carries the source entry it came
//    from so diagnostics can point back at the document.
//  - Window kinds: a quota meters a static (calendar-anchored) window, a
//    rate meters a sliding window. That distinction only matters to the
//    window simulator; capacity analysis treats both as budget-per-period.

#include "sla4oai/rational.hpp"
#include "sla4oai/timeunit.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sla4oai {

// ---------------------------------------------------------------- operations

enum class HttpMethod { get, put, post, del, options, head, patch, trace, all };

inline std::string to_string(HttpMethod m) {
  switch (m) {
    case HttpMethod::get:     return "get";
    case HttpMethod::put:     return "put";
    case HttpMethod::post:    return "post";
    case HttpMethod::del:     return "delete";
    case HttpMethod::options: return "options";
    case HttpMethod::head:    return "head";
    case HttpMethod::patch:   return "patch";
    case HttpMethod::trace:   return "trace";
    case HttpMethod::all:     return "all";
  }
  return "all";
}

inline std::optional<HttpMethod> parse_http_method(std::string_view s) {
  for (HttpMethod m : {HttpMethod::get, HttpMethod::put, HttpMethod::post,
                       HttpMethod::del, HttpMethod::options, HttpMethod::head,
                       HttpMethod::patch, HttpMethod::trace, HttpMethod::all})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

struct ApiOperation {
  std::string path;  // normalized: leading '/', no trailing '/'
  HttpMethod method = HttpMethod::all;

  friend bool operator==(const ApiOperation&, const ApiOperation&) = default;
  friend auto operator<=>(const ApiOperation&, const ApiOperation&) = default;
};

inline std::string to_string(const ApiOperation& op) {
  std::string m = to_string(op.method);
  for (char& c : m) c = static_cast<char>(c >= 'a' && c <= 'z' ? c - 32 : c);
  return m + " " + op.path;
}

// ---------------------------------------------------------------- thresholds

enum class WindowKind { quota, rate };  // quota: static window, rate: sliding

inline std::string to_string(WindowKind k) {
  return k == WindowKind::quota ? "quota" : "rate";
}

enum class ThresholdType { max };  // the only supported comparison direction

struct Threshold {
  enum class Kind { numeric, unlimited, custom };
  Kind kind = Kind::numeric;
  Rational value;  // meaningful only when kind == numeric

  static Threshold numeric(Rational v) { return {Kind::numeric, std::move(v)}; }
  static Threshold unlimited() { return {Kind::unlimited, 0}; }
  static Threshold custom() { return {Kind::custom, 0}; }

  bool is_numeric() const { return kind == Kind::numeric; }
  friend bool operator==(const Threshold&, const Threshold&) = default;
};

inline std::string to_string(const Threshold& t) {
  switch (t.kind) {
    case Threshold::Kind::numeric:   return decimal_string(t.value);
    case Threshold::Kind::unlimited: return "unlimited";
    case Threshold::Kind::custom:    return "custom";
  }
  return "custom";
}

// Cost attached to consumption beyond / within a limit.
struct OverageCost {
  Integer overage_unit = 1;  // billing granularity in metric units
  Rational unit_cost;        // price per overage_unit beyond the threshold

  friend bool operator==(const OverageCost&, const OverageCost&) = default;
};

struct OperationCost {
  Integer volume = 1;  // metered volume per billed unit
  Rational unit_cost;  // price per volume consumed

  friend bool operator==(const OperationCost&, const OperationCost&) = default;
};

using CostAttachment = std::variant<OverageCost, OperationCost>;

// One threshold over an optional period. A limit without a period caps a
// single observation (e.g. payload size per request) rather than a window;
// such limits are excluded from capacity analysis.
struct ThresholdLimit {
  Threshold threshold;
  ThresholdType type = ThresholdType::max;
  std::optional<Period> period;

  friend bool operator==(const ThresholdLimit&, const ThresholdLimit&) = default;
};

inline std::string to_string(const ThresholdLimit& l) {
  std::string s = to_string(l.threshold);
  if (l.period) s += " / " + to_string(*l.period);
  return s;
}

// Where in the source document a limitation came from (pre-glob-resolution).
struct SourceRef {
  std::string plan;
  std::string path_pattern;
  std::string method_pattern;
  std::string metric;

  friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

struct Limitation {
  ApiOperation operation;
  std::string metric;
  WindowKind window = WindowKind::quota;
  std::vector<ThresholdLimit> limits;  // never empty
  std::optional<CostAttachment> cost;
  SourceRef source;

  friend bool operator==(const Limitation&, const Limitation&) = default;
};

// Two limitations are comparable across plans when they guard the same
// operation and metric through the same window kind.
inline bool equivalent_limitations(const Limitation& a, const Limitation& b) {
  return a.operation == b.operation && a.metric == b.metric &&
         a.window == b.window;
}

// ---------------------------------------------------------------- plan model

struct Cost {
  enum class Kind { fixed, custom };
  Kind kind = Kind::fixed;
  Rational amount;            // meaningful only when kind == fixed
  std::string currency;       // ISO 4217 code
  Period period{1, TimeUnit::month};  // billing period
  std::optional<OverageCost> overage;
  std::optional<OperationCost> operation_cost;

  friend bool operator==(const Cost&, const Cost&) = default;
};

struct Metric {
  std::string name;
  enum class ValueType { integer, number };
  ValueType type = ValueType::integer;
  std::optional<std::string> format;
  std::optional<std::string> unit;
  std::optional<std::string> description;
  enum class Resolution { check, consumption };
  std::optional<Resolution> resolution;

  friend bool operator==(const Metric&, const Metric&) = default;
};

// "1 unit of metric_a consumes factor units of metric_b."
struct MetricRelationship {
  std::string metric_a;
  std::string metric_b;
  Rational factor;  // > 0

  friend bool operator==(const MetricRelationship&, const MetricRelationship&) = default;
};

struct Plan {
  std::string name;
  Cost cost;
  std::vector<Limitation> limitations;

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct Pricing {
  std::vector<Plan> plans;  // document order; names unique
  std::map<std::string, Metric> metrics;
  std::vector<MetricRelationship> relationships;
  std::string currency;  // document-level default

  const Plan* find_plan(std::string_view name) const {
    for (const Plan& p : plans)
      if (p.name == name) return &p;
    return nullptr;
  }

  friend bool operator==(const Pricing&, const Pricing&) = default;
};

// ------------------------------------------------------------------ capacity

struct Capacity {
  std::string metric;
  Rational threshold;  // > 0
  Period period{1, TimeUnit::second};
  enum class Provenance { declared, derived_default };
  Provenance provenance = Provenance::declared;

  friend bool operator==(const Capacity&, const Capacity&) = default;
};

inline std::string to_string(Capacity::Provenance p) {
  return p == Capacity::Provenance::declared ? "declared" : "derived-default";
}

// --------------------------------------------------------------- pu interval

// Closed interval of percentages of capacity a limit pins the consumer to.
// Constructed ranges are ordered; aggregate_bpu may legitimately produce an
// inverted pair (witnessing over-constrained limits) through PURange::raw.
struct PURange {
  Rational min_pu;
  Rational max_pu;

  PURange(Rational min, Rational max) : min_pu(std::move(min)), max_pu(std::move(max)) {
    if (min_pu > max_pu)
      throw std::invalid_argument("PURange: min_pu exceeds max_pu");
  }

  static PURange raw(Rational min, Rational max) {
    PURange r;
    r.min_pu = std::move(min);
    r.max_pu = std::move(max);
    return r;
  }

  bool inverted() const { return min_pu > max_pu; }
  friend bool operator==(const PURange&, const PURange&) = default;

 private:
  PURange() = default;
};

// ------------------------------------------------------------- normalization

// Raised when a limit cannot be expressed on a time grid (no period).
struct NormalizationUnsupported : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A limit rebased onto a chosen time unit: `threshold` units allowed per
// `periods` periods of that unit. nullopt threshold means unbounded.
struct NormalizedLimit {
  std::optional<Rational> threshold;
  Rational periods;  // limit period expressed in the target unit, > 0

  friend bool operator==(const NormalizedLimit&, const NormalizedLimit&) = default;
};

inline NormalizedLimit normalize_limit(const ThresholdLimit& limit, TimeUnit unit) {
  if (!limit.period)
    throw NormalizationUnsupported("limit has no period; nothing to normalize");
  if (limit.threshold.kind == Threshold::Kind::custom)
    throw NormalizationUnsupported("custom threshold has no numeric value");
  Rational periods(period_seconds(*limit.period), Integer(seconds_per(unit)));
  if (limit.threshold.kind == Threshold::Kind::unlimited)
    return {std::nullopt, periods};
  return {limit.threshold.value, periods};
}

}  // namespace sla4oai
