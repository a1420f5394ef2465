#pragma once

// Raw (pre-resolution) representation of an SLA document. The parser fills
// this in while validating shapes; glob patterns and method groups are still
// patterns here. lower_to_model() turns the resolved form into a Pricing.

#include "sla4oai/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sla4oai {

struct ContextInfo {
  std::string id;
  std::string sla_version;        // the 'sla' field, kept verbatim
  std::string type;               // "plans" or "instance"
  std::string api;                // URI or relative path of the OpenAPI doc
  std::optional<std::string> provider;

  friend bool operator==(const ContextInfo&, const ContextInfo&) = default;
};

struct InfrastructureInfo {
  std::string supervisor;
  std::string monitor;

  friend bool operator==(const InfrastructureInfo&, const InfrastructureInfo&) = default;
};

// One entry of a quotas/rates limit list, validated but not yet resolved.
struct RawLimit {
  Threshold threshold = Threshold::unlimited();  // absent max == unlimited
  ThresholdType type = ThresholdType::max;
  std::optional<Period> period;  // absent: inherited or observation-scoped
  std::optional<CostAttachment> cost;
  std::string location;  // document pointer, for diagnostics

  friend bool operator==(const RawLimit&, const RawLimit&) = default;
};

struct RawLimitGroup {
  std::string metric;
  std::vector<RawLimit> limits;  // non-empty

  friend bool operator==(const RawLimitGroup&, const RawLimitGroup&) = default;
};

struct RawMethodSection {
  std::string method;  // "get", "post", ..., or "all"
  std::vector<RawLimitGroup> groups;

  friend bool operator==(const RawMethodSection&, const RawMethodSection&) = default;
};

struct RawPathSection {
  std::string pattern;  // as written (normalized), may contain '*'
  std::vector<RawMethodSection> methods;

  friend bool operator==(const RawPathSection&, const RawPathSection&) = default;
};

struct PlanSection {
  std::string name;
  Cost pricing;  // defaults (document-level currency/period) already applied
  std::vector<RawPathSection> quotas;
  std::vector<RawPathSection> rates;

  friend bool operator==(const PlanSection&, const PlanSection&) = default;
};

struct Sla4oaiDocument {
  ContextInfo context;
  std::optional<InfrastructureInfo> infrastructure;
  std::string availability;  // ISO-8601 text kept verbatim, never interpreted
  std::map<std::string, Metric> metrics;
  std::vector<PlanSection> plans;  // document order; instance docs get one
  std::vector<MetricRelationship> relationships;
  std::string default_currency;          // resolved (may be fallback)
  Period default_period{1, TimeUnit::month};

  friend bool operator==(const Sla4oaiDocument&, const Sla4oaiDocument&) = default;
};

}  // namespace sla4oai
