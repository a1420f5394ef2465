#pragma once

// Document I/O: parsing + shape validation, OpenAPI linking, glob
// resolution, lowering into the Pricing model, capacity sidecars, and
// canonical serialization.
//
// Reading goes through yaml-cpp (JSON is a subset of the YAML it accepts);
// numeric scalars are taken as raw text and re-parsed into exact rationals so
// no value ever bounces through a double. Writing uses our own emitters
// (doctree.hpp) for byte-stable output.

#include "sla4oai/diagnostics.hpp"
#include "sla4oai/doctree.hpp"
#include "sla4oai/document.hpp"
#include "sla4oai/glob.hpp"
#include "sla4oai/model.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace sla4oai {

// ----------------------------------------------------------- resource loader

// Resolves a URI or path to document bytes. Injectable so the CLI, the
// service and the tests can pin down exactly what the analyzer may touch.
using ResourceLoader =
    std::function<std::optional<std::string>(const std::string& uri)>;

inline bool is_url(std::string_view uri) {
  return uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0;
}

// Default policy: local files only, resolved against base_dir; any URL is
// refused. Network access must be opted into explicitly (see cli.hpp).
inline ResourceLoader offline_loader(std::string base_dir = ".") {
  return [base_dir](const std::string& uri) -> std::optional<std::string> {
    if (uri.empty() || is_url(uri)) return std::nullopt;
    std::string path = uri;
    if (path.front() != '/') {
      std::string prefix = path.rfind("./", 0) == 0 ? path.substr(2) : path;
      path = base_dir.empty() ? prefix : base_dir + "/" + prefix;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
}

// ---------------------------------------------------------------- parse data

struct ParseResult {
  std::optional<Sla4oaiDocument> document;
  std::vector<Diagnostic> diagnostics;
};

struct SyntaxResult {
  bool valid = false;
  std::vector<Diagnostic> diagnostics;
};

namespace detail {

inline void diag(std::vector<Diagnostic>& out, Severity sev, std::string code,
                 std::string location, std::string message) {
  out.push_back({sev, std::move(code), std::move(location), std::move(message)});
}

inline std::optional<std::string> scalar_of(const YAML::Node& n) {
  if (n && n.IsScalar()) return n.Scalar();
  return std::nullopt;
}

// Integer scalar in canonical form (optional sign + digits).
inline std::optional<std::int64_t> int_of(const YAML::Node& n) {
  auto s = scalar_of(n);
  if (!s) return std::nullopt;
  try {
    size_t used = 0;
    long long v = std::stoll(*s, &used);
    if (used != s->size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

inline std::optional<Rational> number_of(const YAML::Node& n) {
  auto s = scalar_of(n);
  if (!s) return std::nullopt;
  return parse_rational(*s);
}

inline std::optional<Period> parse_period(const YAML::Node& n,
                                          const std::string& loc,
                                          std::vector<Diagnostic>& diags) {
  if (!n || !n.IsMap()) {
    diag(diags, Severity::error, "INVALID_PERIOD", loc,
         "period must be a mapping with amount and unit");
    return std::nullopt;
  }
  auto amount = int_of(n["amount"]);
  if (!amount || *amount < 1) {
    diag(diags, Severity::error, "NONPOSITIVE_PERIOD", loc + "/amount",
         "period amount must be an integer >= 1");
    return std::nullopt;
  }
  auto unit_text = scalar_of(n["unit"]);
  auto unit = unit_text ? parse_time_unit(*unit_text) : std::nullopt;
  if (!unit) {
    diag(diags, Severity::error, "INVALID_TIME_UNIT", loc + "/unit",
         "period unit must be one of second/minute/hour/day/week/month/year");
    return std::nullopt;
  }
  return Period{*amount, *unit};
}

// Limit cost block. The accepted shape is exactly the nested one:
//   cost: { overage: { overage: <units>, cost: <price> } }
//   cost: { operation: { volume: <units>, cost: <price> } }
// The doubled "overage" key is how existing documents write it, so that is
// what we read and what serialize_document writes back; flattened variants
// are rejected rather than guessed at.
inline std::optional<CostAttachment> parse_limit_cost(
    const YAML::Node& n, const std::string& loc,
    std::vector<Diagnostic>& diags) {
  if (!n.IsMap()) {
    diag(diags, Severity::error, "INVALID_COST", loc,
         "cost must be a mapping holding overage or operation");
    return std::nullopt;
  }
  const YAML::Node overage = n["overage"];
  const YAML::Node operation = n["operation"];
  if (static_cast<bool>(overage) == static_cast<bool>(operation)) {
    diag(diags, Severity::error, "INVALID_COST", loc,
         "cost must hold exactly one of overage or operation");
    return std::nullopt;
  }
  if (overage) {
    if (!overage.IsMap() || !overage["overage"] || !overage["cost"]) {
      diag(diags, Severity::error, "INVALID_COST", loc + "/overage",
           "overage cost needs nested overage (unit count) and cost fields");
      return std::nullopt;
    }
    auto unit = int_of(overage["overage"]);
    auto price = number_of(overage["cost"]);
    if (!unit || *unit < 1 || !price || *price < 0) {
      diag(diags, Severity::error, "INVALID_COST", loc + "/overage",
           "overage unit must be a positive integer and cost non-negative");
      return std::nullopt;
    }
    return CostAttachment(OverageCost{Integer(*unit), *price});
  }
  if (!operation.IsMap() || !operation["volume"] || !operation["cost"]) {
    diag(diags, Severity::error, "INVALID_COST", loc + "/operation",
         "operation cost needs volume and cost fields");
    return std::nullopt;
  }
  auto volume = int_of(operation["volume"]);
  auto price = number_of(operation["cost"]);
  if (!volume || *volume < 1 || !price || *price < 0) {
    diag(diags, Severity::error, "INVALID_COST", loc + "/operation",
         "operation volume must be a positive integer and cost non-negative");
    return std::nullopt;
  }
  return CostAttachment(OperationCost{Integer(*volume), *price});
}

inline std::optional<RawLimit> parse_limit(const YAML::Node& n,
                                           const std::string& loc,
                                           std::vector<Diagnostic>& diags) {
  if (!n.IsMap()) {
    diag(diags, Severity::error, "INVALID_LIMIT", loc,
         "each limit must be a mapping");
    return std::nullopt;
  }
  RawLimit limit;
  limit.location = loc;
  bool custom = false;
  for (const auto& kv : n) {
    std::string key = kv.first.Scalar();
    if (key == "max" || key == "period" || key == "type" || key == "custom" ||
        key == "cost")
      continue;
    if (key.rfind("x-", 0) == 0) continue;  // extension, tolerated
    diag(diags, Severity::warning, "UNKNOWN_KEY", loc + "/" + key,
         "unrecognized limit field '" + key + "' is ignored");
  }
  if (const YAML::Node c = n["custom"]; c) {
    if (!c.IsScalar() || !(c.Scalar() == "true" || c.Scalar() == "false")) {
      diag(diags, Severity::error, "INVALID_LIMIT", loc + "/custom",
           "custom must be a boolean");
      return std::nullopt;
    }
    custom = c.Scalar() == "true";
  }
  if (const YAML::Node m = n["max"]; m) {
    if (custom) {
      diag(diags, Severity::error, "CUSTOM_WITH_AMOUNT", loc,
           "a limit cannot declare both max and custom: true");
      return std::nullopt;
    }
    auto text = scalar_of(m);
    if (text && *text == "unlimited") {
      limit.threshold = Threshold::unlimited();
    } else {
      auto value = text ? parse_rational(*text) : std::nullopt;
      if (!value) {
        diag(diags, Severity::error, "INVALID_MAX", loc + "/max",
             "max must be a number or the keyword unlimited");
        return std::nullopt;
      }
      // Negative / fractional values are deliberately *not* schema errors:
      // they parse into the model and the validity analysis (VC1) flags them.
      limit.threshold = Threshold::numeric(*value);
    }
  } else if (custom) {
    limit.threshold = Threshold::custom();
  } else {
    limit.threshold = Threshold::unlimited();  // no max declared
  }
  if (const YAML::Node t = n["type"]; t) {
    auto text = scalar_of(t);
    if (!text || !(*text == "MAX" || *text == "max")) {
      diag(diags, Severity::error, "UNSUPPORTED_THRESHOLD_TYPE", loc + "/type",
           "only MAX thresholds are supported");
      return std::nullopt;
    }
    limit.type = ThresholdType::max;
  }
  if (const YAML::Node p = n["period"]; p) {
    auto period = parse_period(p, loc + "/period", diags);
    if (!period) return std::nullopt;
    limit.period = *period;
  }
  if (const YAML::Node c = n["cost"]; c) {
    auto cost = parse_limit_cost(c, loc + "/cost", diags);
    if (!cost) return std::nullopt;
    limit.cost = *cost;
  }
  return limit;
}

// quotas/rates section: path -> method -> metric -> [limit, ...]
inline std::vector<RawPathSection> parse_limit_sections(
    const YAML::Node& n, const std::string& loc,
    std::vector<Diagnostic>& diags) {
  std::vector<RawPathSection> sections;
  if (!n) return sections;
  if (!n.IsMap()) {
    diag(diags, Severity::error, "INVALID_SECTION", loc,
         "quotas/rates must map paths to method sections");
    return sections;
  }
  for (const auto& path_kv : n) {
    RawPathSection section;
    section.pattern = normalize_path(path_kv.first.Scalar());
    std::string path_loc = loc + "/" + pointer_escape(path_kv.first.Scalar());
    if (!path_kv.second.IsMap()) {
      diag(diags, Severity::error, "INVALID_SECTION", path_loc,
           "path entry must map HTTP methods to metrics");
      continue;
    }
    std::set<std::string> seen_methods;
    for (const auto& method_kv : path_kv.second) {
      std::string method = method_kv.first.Scalar();
      std::string method_loc = path_loc + "/" + method;
      if (!parse_http_method(method)) {
        diag(diags, Severity::error, "INVALID_METHOD", method_loc,
             "unknown HTTP method '" + method + "'");
        continue;
      }
      if (!seen_methods.insert(method).second) {
        diag(diags, Severity::error, "DUPLICATE_KEY", method_loc,
             "method '" + method + "' appears twice under this path");
        continue;
      }
      RawMethodSection ms;
      ms.method = method;
      if (!method_kv.second.IsMap()) {
        diag(diags, Severity::error, "INVALID_SECTION", method_loc,
             "method entry must map metrics to limit lists");
        continue;
      }
      std::set<std::string> seen_metrics;
      for (const auto& metric_kv : method_kv.second) {
        RawLimitGroup group;
        group.metric = metric_kv.first.Scalar();
        std::string metric_loc = method_loc + "/" + pointer_escape(group.metric);
        if (!seen_metrics.insert(group.metric).second) {
          diag(diags, Severity::error, "DUPLICATE_KEY", metric_loc,
               "metric '" + group.metric + "' appears twice under this method");
          continue;
        }
        if (!metric_kv.second.IsSequence() || metric_kv.second.size() == 0) {
          diag(diags, Severity::error, "EMPTY_LIMITS", metric_loc,
               "metric must carry a non-empty list of limits");
          continue;
        }
        size_t index = 0;
        for (const auto& limit_node : metric_kv.second) {
          auto limit = parse_limit(limit_node, metric_loc + "/" +
                                   std::to_string(index), diags);
          if (limit) group.limits.push_back(std::move(*limit));
          ++index;
        }
        if (!group.limits.empty()) ms.groups.push_back(std::move(group));
      }
      section.methods.push_back(std::move(ms));
    }
    sections.push_back(std::move(section));
  }
  return sections;
}

struct PricingDefaults {
  std::optional<std::string> currency;
  std::optional<Period> period;
};

// Shared reader for the document-level and plan-level pricing blocks.
inline Cost parse_pricing(const YAML::Node& n, const std::string& loc,
                          const PricingDefaults& defaults,
                          std::vector<Diagnostic>& diags) {
  Cost cost;
  cost.kind = Cost::Kind::fixed;
  cost.amount = 0;
  bool custom = false;
  if (n && !n.IsMap()) {
    diag(diags, Severity::error, "INVALID_PRICING", loc,
         "pricing must be a mapping");
  } else if (n) {
    if (const YAML::Node c = n["custom"];
        c && c.IsScalar() && c.Scalar() == "true")
      custom = true;
    if (const YAML::Node c = n["cost"]; c) {
      if (custom) {
        diag(diags, Severity::error, "CUSTOM_WITH_AMOUNT", loc,
             "pricing cannot declare both cost and custom: true");
      }
      auto amount = number_of(c);
      if (!amount) {
        diag(diags, Severity::error, "INVALID_PRICING", loc + "/cost",
             "cost must be a number");
      } else if (*amount < 0) {
        diag(diags, Severity::error, "NEGATIVE_COST", loc + "/cost",
             "cost must be non-negative");
      } else {
        cost.amount = *amount;
      }
    }
    if (custom) cost.kind = Cost::Kind::custom;
    if (const YAML::Node c = n["currency"]; c && c.IsScalar())
      cost.currency = c.Scalar();
    if (const YAML::Node p = n["period"]; p) {
      auto period = parse_period(p, loc + "/period", diags);
      if (period) cost.period = *period;
    } else if (defaults.period) {
      cost.period = *defaults.period;
    }
    if (const YAML::Node o = n["overage"]; o) {
      // Plan-level overage mirrors the nested limit shape.
      auto parsed = parse_limit_cost(n, loc, diags);
      if (parsed && std::holds_alternative<OverageCost>(*parsed))
        cost.overage = std::get<OverageCost>(*parsed);
    }
  } else if (defaults.period) {
    cost.period = *defaults.period;
  }
  if (cost.currency.empty() && defaults.currency) cost.currency = *defaults.currency;
  return cost;
}

inline std::optional<Metric> parse_metric(const YAML::Node& n,
                                          const std::string& name,
                                          const std::string& loc,
                                          std::vector<Diagnostic>& diags) {
  if (!n.IsMap()) {
    diag(diags, Severity::error, "INVALID_METRIC", loc,
         "metric must be a mapping describing its type");
    return std::nullopt;
  }
  Metric m;
  m.name = name;
  auto type = scalar_of(n["type"]);
  if (!type || !(*type == "integer" || *type == "number")) {
    diag(diags, Severity::error, "INVALID_METRIC_TYPE", loc + "/type",
         "metric type must be integer or number");
    return std::nullopt;
  }
  m.type = *type == "integer" ? Metric::ValueType::integer
                              : Metric::ValueType::number;
  if (auto v = scalar_of(n["format"])) m.format = *v;
  if (auto v = scalar_of(n["unit"])) m.unit = *v;
  if (auto v = scalar_of(n["description"])) m.description = *v;
  if (const YAML::Node r = n["resolution"]; r) {
    auto text = scalar_of(r);
    if (text && *text == "check") m.resolution = Metric::Resolution::check;
    else if (text && *text == "consumption")
      m.resolution = Metric::Resolution::consumption;
    else
      diag(diags, Severity::error, "INVALID_RESOLUTION", loc + "/resolution",
           "resolution must be check or consumption");
  }
  return m;
}

inline ParseResult parse_document_node(const YAML::Node& root);

}  // namespace detail

// ------------------------------------------------------------ parse_document

inline ParseResult parse_document(const std::string& text) {
  ParseResult result;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    detail::diag(result.diagnostics, Severity::error, "EMPTY_INPUT", "/",
                 "document is empty");
    return result;
  }
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    detail::diag(result.diagnostics, Severity::error, "MALFORMED_DOCUMENT",
                 "/", std::string("cannot parse document: ") + e.what());
    return result;
  }
  return detail::parse_document_node(root);
}

namespace detail {

inline ParseResult parse_document_node(const YAML::Node& root) {
  ParseResult result;
  auto& diags = result.diagnostics;
  if (!root.IsMap()) {
    diag(diags, Severity::error, "NOT_A_MAPPING", "/",
         "document root must be a mapping");
    return result;
  }

  // An OpenAPI document is only accepted as a carrier for an inline x-sla
  // block; materialize() handles the by-reference form before parsing.
  if ((root["openapi"] || root["swagger"]) && !root["context"]) {
    if (const YAML::Node x = root["x-sla"]; x && x.IsMap())
      return parse_document_node(x);
    diag(diags, Severity::error, "NOT_AN_SLA_DOCUMENT", "/",
         "input is an OpenAPI document without an inline x-sla block");
    return result;
  }

  Sla4oaiDocument doc;

  static const std::set<std::string> known_keys = {
      "context", "infrastructure", "availability", "metrics", "plans",
      "pricing", "quotas",         "rates",        "configuration"};
  for (const auto& kv : root) {
    std::string key = kv.first.Scalar();
    if (known_keys.count(key) || key.rfind("x-", 0) == 0) continue;
    diag(diags, Severity::warning, "UNKNOWN_KEY", "/" + pointer_escape(key),
         "unrecognized top-level field '" + key + "' is ignored");
  }

  // --- context
  const YAML::Node context = root["context"];
  if (!context || !context.IsMap()) {
    diag(diags, Severity::error, "MISSING_CONTEXT", "/context",
         "document needs a context block with id and type");
  } else {
    if (auto v = scalar_of(context["id"])) doc.context.id = *v;
    else
      diag(diags, Severity::error, "MISSING_FIELD", "/context/id",
           "context.id is required");
    if (auto v = scalar_of(context["sla"])) doc.context.sla_version = *v;
    if (auto v = scalar_of(context["api"])) doc.context.api = *v;
    if (auto v = scalar_of(context["provider"])) doc.context.provider = *v;
    auto type = scalar_of(context["type"]);
    if (!type || !(*type == "plans" || *type == "instance")) {
      diag(diags, Severity::error, "INVALID_CONTEXT_TYPE", "/context/type",
           "context.type must be plans or instance");
    } else {
      doc.context.type = *type;
    }
  }

  // --- infrastructure (kept verbatim; the analysis never contacts it)
  if (const YAML::Node infra = root["infrastructure"]; infra && infra.IsMap()) {
    InfrastructureInfo info;
    if (auto v = scalar_of(infra["supervisor"])) info.supervisor = *v;
    if (auto v = scalar_of(infra["monitor"])) info.monitor = *v;
    doc.infrastructure = info;
  }

  // --- availability: opaque ISO-8601 text, stored as written
  if (auto v = scalar_of(root["availability"])) doc.availability = *v;

  // --- metrics
  if (const YAML::Node metrics = root["metrics"]; metrics && metrics.IsMap()) {
    for (const auto& kv : metrics) {
      std::string name = kv.first.Scalar();
      std::string loc = "/metrics/" + pointer_escape(name);
      if (doc.metrics.count(name)) {
        diag(diags, Severity::error, "DUPLICATE_KEY", loc,
             "metric '" + name + "' is declared twice");
        continue;
      }
      auto m = parse_metric(kv.second, name, loc, diags);
      if (m) doc.metrics.emplace(name, std::move(*m));
    }
  }

  // --- document-level pricing defaults
  PricingDefaults defaults;
  const YAML::Node top_pricing = root["pricing"];
  if (top_pricing && top_pricing.IsMap()) {
    if (auto v = scalar_of(top_pricing["currency"])) defaults.currency = *v;
    if (const YAML::Node p = top_pricing["period"]; p) {
      auto period = parse_period(p, "/pricing/period", diags);
      if (period) defaults.period = *period;
    }
  }

  // --- plans
  const YAML::Node plans = root["plans"];
  std::set<std::string> seen_plans;
  if (plans && plans.IsMap()) {
    for (const auto& kv : plans) {
      std::string name = kv.first.Scalar();
      std::string loc = "/plans/" + pointer_escape(name);
      if (!seen_plans.insert(name).second) {
        diag(diags, Severity::error, "DUPLICATE_PLAN", loc,
             "plan '" + name + "' is declared twice");
        continue;
      }
      if (!kv.second.IsMap()) {
        diag(diags, Severity::error, "INVALID_PLAN", loc,
             "plan must be a mapping");
        continue;
      }
      PlanSection plan;
      plan.name = name;
      plan.pricing = parse_pricing(kv.second["pricing"], loc + "/pricing",
                                   defaults, diags);
      plan.quotas =
          parse_limit_sections(kv.second["quotas"], loc + "/quotas", diags);
      plan.rates =
          parse_limit_sections(kv.second["rates"], loc + "/rates", diags);
      doc.plans.push_back(std::move(plan));
    }
  }

  // Instance documents (or plan documents written inline) may carry their
  // pricing and limits at the top level: fold them into one implicit plan.
  if (doc.plans.empty() && (root["quotas"] || root["rates"] || top_pricing)) {
    PlanSection plan;
    plan.name = "default";
    plan.pricing = parse_pricing(top_pricing, "/pricing", defaults, diags);
    plan.quotas = parse_limit_sections(root["quotas"], "/quotas", diags);
    plan.rates = parse_limit_sections(root["rates"], "/rates", diags);
    doc.plans.push_back(std::move(plan));
  }

  if (doc.plans.empty() && doc.context.type != "instance") {
    diag(diags, Severity::error, "MISSING_PLANS", "/plans",
         "a plans document must declare at least one plan");
  }

  // --- metric relationships (extension block; see serialize_document)
  if (const YAML::Node rel = root["x-metric-relationships"]; rel) {
    if (!rel.IsSequence()) {
      diag(diags, Severity::error, "INVALID_RELATIONSHIP",
           "/x-metric-relationships", "relationships must be a sequence");
    } else {
      size_t index = 0;
      for (const auto& entry : rel) {
        std::string loc = "/x-metric-relationships/" + std::to_string(index++);
        auto a = scalar_of(entry["metric-a"]);
        auto b = scalar_of(entry["metric-b"]);
        auto f = entry["factor"] ? number_of(entry["factor"]) : std::nullopt;
        if (!a || !b || !f) {
          diag(diags, Severity::error, "INVALID_RELATIONSHIP", loc,
               "relationship needs metric-a, metric-b and a numeric factor");
          continue;
        }
        if (*f <= 0) {
          diag(diags, Severity::error, "INVALID_FACTOR", loc + "/factor",
               "relationship factor must be positive");
          continue;
        }
        doc.relationships.push_back({*a, *b, *f});
      }
    }
  }

  // Resolve document-wide currency once so lowering is deterministic.
  if (defaults.currency) {
    doc.default_currency = *defaults.currency;
  } else {
    std::string found;
    for (const auto& plan : doc.plans)
      if (!plan.pricing.currency.empty()) { found = plan.pricing.currency; break; }
    doc.default_currency = found.empty() ? "USD" : found;
    if (found.empty() && !doc.plans.empty())
      diag(diags, Severity::warning, "MISSING_CURRENCY", "/pricing",
           "no currency declared anywhere; assuming USD");
  }
  if (defaults.period) doc.default_period = *defaults.period;
  for (auto& plan : doc.plans)
    if (plan.pricing.currency.empty()) plan.pricing.currency = doc.default_currency;

  if (!has_errors(diags)) result.document = std::move(doc);
  return result;
}

}  // namespace detail

inline SyntaxResult syntax_check(const std::string& text) {
  ParseResult parsed = parse_document(text);
  return {parsed.document.has_value() && !has_errors(parsed.diagnostics),
          std::move(parsed.diagnostics)};
}

// ------------------------------------------------------------------- linking

struct LinkResult {
  std::vector<ApiOperation> operations;  // sorted, deduplicated
  std::vector<Diagnostic> diagnostics;
  bool degraded = false;  // true when no OAS could be consulted
};

// Extracts the concrete operation surface from an OpenAPI document.
inline LinkResult parse_openapi(const std::string& text) {
  LinkResult result;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    detail::diag(result.diagnostics, Severity::error, "MALFORMED_DOCUMENT", "/",
                 std::string("cannot parse OpenAPI document: ") + e.what());
    return result;
  }
  const YAML::Node paths = root.IsMap() ? root["paths"] : YAML::Node();
  if (!paths || !paths.IsMap() || paths.size() == 0) {
    detail::diag(result.diagnostics, Severity::warning, "EMPTY_OAS", "/paths",
                 "OpenAPI document declares no paths");
    return result;
  }
  std::set<ApiOperation> ops;
  for (const auto& path_kv : paths) {
    std::string path = normalize_path(path_kv.first.Scalar());
    if (!path_kv.second.IsMap()) continue;
    for (const auto& method_kv : path_kv.second) {
      auto method = parse_http_method(method_kv.first.Scalar());
      if (method && *method != HttpMethod::all)
        ops.insert({path, *method});
    }
  }
  result.operations.assign(ops.begin(), ops.end());
  return result;
}

// Binds the SLA document to its API surface. `oas_text` overrides the
// document's context.api reference; otherwise the loader fetches it. When no
// OAS can be read the linker degrades to the literal paths spelled out in
// the document, each flagged, and reports an error for the broken reference.
inline LinkResult link_oas(const Sla4oaiDocument& doc,
                           const std::optional<std::string>& oas_text,
                           const ResourceLoader& loader) {
  LinkResult result;
  std::optional<std::string> text = oas_text;
  if (!text && !doc.context.api.empty()) {
    text = loader(doc.context.api);
    if (!text)
      detail::diag(result.diagnostics, Severity::error, "OAS_UNAVAILABLE",
                   "/context/api",
                   "cannot load OpenAPI document '" + doc.context.api + "'");
  } else if (!text) {
    detail::diag(result.diagnostics, Severity::warning, "NO_API_REFERENCE",
                 "/context/api", "document does not reference an OpenAPI file");
  }

  if (text) {
    LinkResult oas = parse_openapi(*text);
    for (auto& d : oas.diagnostics) result.diagnostics.push_back(std::move(d));
    result.operations = std::move(oas.operations);

    // Flag literal SLA paths that the API surface does not know about.
    std::set<std::string> flagged;
    for (const auto& plan : doc.plans) {
      for (const auto* sections : {&plan.quotas, &plan.rates}) {
        for (const auto& section : *sections) {
          if (section.pattern.find('*') != std::string::npos) continue;
          bool known = std::any_of(
              result.operations.begin(), result.operations.end(),
              [&](const ApiOperation& op) { return op.path == section.pattern; });
          if (!known && flagged.insert(section.pattern).second)
            detail::diag(result.diagnostics, Severity::warning, "UNKNOWN_PATH",
                         "/plans/" + pointer_escape(plan.name),
                         "path '" + section.pattern +
                             "' does not appear in the OpenAPI document");
        }
      }
    }
    return result;
  }

  // Degraded mode: fall back to the literal operations named by the SLA.
  result.degraded = true;
  std::set<ApiOperation> ops;
  std::set<std::string> flagged;
  for (const auto& plan : doc.plans) {
    for (const auto* sections : {&plan.quotas, &plan.rates}) {
      for (const auto& section : *sections) {
        if (section.pattern.find('*') != std::string::npos) continue;
        for (const auto& method : section.methods) {
          ops.insert({section.pattern, *parse_http_method(method.method)});
          if (flagged.insert(section.pattern + " " + method.method).second)
            detail::diag(result.diagnostics, Severity::warning, "DEGRADED_PATH",
                         "/plans/" + pointer_escape(plan.name),
                         "no OpenAPI surface; using literal path '" +
                             section.pattern + "' as-is");
        }
      }
    }
  }
  result.operations.assign(ops.begin(), ops.end());
  return result;
}

// ---------------------------------------------------------- glob resolution

struct ResolvedLimitation {
  std::string plan;
  Limitation limitation;

  friend bool operator==(const ResolvedLimitation&, const ResolvedLimitation&) = default;
};

struct ResolveResult {
  std::vector<ResolvedLimitation> limitations;
  std::vector<Diagnostic> diagnostics;
};

namespace detail {

struct GlobCandidate {
  const RawPathSection* section = nullptr;
  const RawMethodSection* method = nullptr;
  const RawLimitGroup* group = nullptr;
  GlobPattern pattern;
  bool concrete_method = false;
};

// Method concreteness dominates path specificity: a 'get' entry wins over an
// 'all' entry regardless of how specific the 'all' entry's path is.
inline bool candidate_beats(const GlobCandidate& a, const GlobCandidate& b) {
  if (a.concrete_method != b.concrete_method) return a.concrete_method;
  return a.pattern.more_specific_than(b.pattern);
}

inline bool candidate_ties(const GlobCandidate& a, const GlobCandidate& b) {
  return a.concrete_method == b.concrete_method &&
         a.pattern.same_specificity(b.pattern) &&
         !(a.section == b.section && a.method == b.method);
}

}  // namespace detail

// Resolves every pattern entry against the concrete operation surface.
// Output is deterministic and independent of pattern declaration order: for
// each (plan, operation, metric, window kind) there is at most one winner,
// and genuine specificity ties are reported as GLOB_TIE errors instead of
// being broken arbitrarily.
inline ResolveResult resolve_globs(const Sla4oaiDocument& doc,
                                   const std::vector<ApiOperation>& operations) {
  ResolveResult result;
  std::set<std::string> tie_reported, unmatched_reported;

  for (const auto& plan : doc.plans) {
    for (WindowKind kind : {WindowKind::quota, WindowKind::rate}) {
      const auto& sections = kind == WindowKind::quota ? plan.quotas : plan.rates;
      std::string kind_key = kind == WindowKind::quota ? "quotas" : "rates";

      // Track which patterns matched anything, for the unmatched warning.
      std::map<const RawPathSection*, bool> matched;
      for (const auto& section : sections) matched[&section] = false;

      // Metrics mentioned anywhere in this section.
      std::set<std::string> metrics;
      for (const auto& section : sections)
        for (const auto& method : section.methods)
          for (const auto& group : method.groups) metrics.insert(group.metric);

      for (const ApiOperation& op : operations) {
        for (const std::string& metric : metrics) {
          std::vector<detail::GlobCandidate> candidates;
          for (const auto& section : sections) {
            GlobPattern pattern = GlobPattern::parse(section.pattern);
            if (!pattern.matches(op.path)) continue;
            for (const auto& method : section.methods) {
              HttpMethod m = *parse_http_method(method.method);
              if (m != HttpMethod::all && m != op.method) continue;
              for (const auto& group : method.groups) {
                if (group.metric != metric) continue;
                matched[&section] = true;
                candidates.push_back({&section, &method, &group, pattern,
                                      m != HttpMethod::all});
              }
            }
          }
          if (candidates.empty()) continue;
          auto best = std::max_element(
              candidates.begin(), candidates.end(),
              [](const detail::GlobCandidate& a, const detail::GlobCandidate& b) {
                return detail::candidate_beats(b, a);
              });
          bool tied = std::any_of(
              candidates.begin(), candidates.end(),
              [&](const detail::GlobCandidate& c) {
                return detail::candidate_ties(c, *best);
              });
          if (tied) {
            std::string key = plan.name + "|" + kind_key + "|" + op.path + "|" +
                              to_string(op.method) + "|" + metric;
            if (tie_reported.insert(key).second)
              detail::diag(result.diagnostics, Severity::error, "GLOB_TIE",
                           pointer({"plans", plan.name, kind_key,
                                    best->section->pattern}),
                           "patterns of equal specificity both cover " +
                               to_string(op) + " for metric '" + metric + "'");
            continue;
          }

          Limitation lim;
          lim.operation = op;
          lim.metric = metric;
          lim.window = kind;
          lim.source = {plan.name, best->section->pattern,
                        best->method->method, metric};
          size_t cost_count = 0;
          for (const RawLimit& raw : best->group->limits) {
            lim.limits.push_back({raw.threshold, raw.type, raw.period});
            if (raw.cost) {
              if (++cost_count == 1) lim.cost = raw.cost;
            }
          }
          if (cost_count > 1)
            detail::diag(result.diagnostics, Severity::warning,
                         "MULTIPLE_COST_ATTACHMENTS",
                         pointer({"plans", plan.name, kind_key,
                                  best->section->pattern}),
                         "several limits carry cost blocks; the first one is "
                         "used for the limitation");
          result.limitations.push_back({plan.name, std::move(lim)});
        }
      }

      for (const auto& section : sections) {
        if (matched[&section]) continue;
        std::string key = plan.name + "|" + kind_key + "|" + section.pattern;
        if (unmatched_reported.insert(key).second)
          detail::diag(result.diagnostics, Severity::warning,
                       "UNMATCHED_PATTERN",
                       pointer({"plans", plan.name, kind_key, section.pattern}),
                       "pattern matches no operation of the API");
      }
    }
  }

  // Canonical order: plan (document order), then operation, metric, window.
  std::map<std::string, size_t> plan_order;
  for (size_t i = 0; i < doc.plans.size(); ++i) plan_order[doc.plans[i].name] = i;
  std::stable_sort(result.limitations.begin(), result.limitations.end(),
                   [&](const ResolvedLimitation& a, const ResolvedLimitation& b) {
                     auto pa = plan_order[a.plan], pb = plan_order[b.plan];
                     if (pa != pb) return pa < pb;
                     if (a.limitation.operation != b.limitation.operation)
                       return a.limitation.operation < b.limitation.operation;
                     if (a.limitation.metric != b.limitation.metric)
                       return a.limitation.metric < b.limitation.metric;
                     return a.limitation.window < b.limitation.window;
                   });
  return result;
}

// ------------------------------------------------------------------ lowering

struct LowerResult {
  std::optional<Pricing> pricing;
  std::vector<Diagnostic> diagnostics;
};

// Builds the Pricing model from a parsed document plus its resolved
// limitations. Never invents limits: every limitation in the output carries
// the source section it came from. Period-less limits are finalized here:
// a metric with resolution `check` caps a single observation and stays
// period-less; anything else inherits the plan's billing period (flagged for
// sliding windows, where inheriting a billing period is usually a mistake).
inline LowerResult lower_to_model(const Sla4oaiDocument& doc,
                                  const ResolveResult& resolved) {
  LowerResult result;
  Pricing pricing;
  pricing.currency = doc.default_currency;
  pricing.metrics = doc.metrics;

  for (const auto& rel : doc.relationships) {
    bool ok = true;
    for (const std::string* m : {&rel.metric_a, &rel.metric_b}) {
      if (!doc.metrics.count(*m)) {
        detail::diag(result.diagnostics, Severity::error, "UNDECLARED_METRIC",
                     "/x-metric-relationships",
                     "relationship references undeclared metric '" + *m + "'");
        ok = false;
      }
    }
    if (ok) pricing.relationships.push_back(rel);
  }

  for (const auto& section : doc.plans) {
    Plan plan;
    plan.name = section.name;
    plan.cost = section.pricing;
    for (const auto& entry : resolved.limitations) {
      if (entry.plan != section.name) continue;
      Limitation lim = entry.limitation;
      std::string kind_key = lim.window == WindowKind::quota ? "quotas" : "rates";
      std::string loc = pointer({"plans", section.name, kind_key,
                                 lim.source.path_pattern,
                                 lim.source.method_pattern, lim.metric});
      auto metric_it = doc.metrics.find(lim.metric);
      if (metric_it == doc.metrics.end()) {
        detail::diag(result.diagnostics, Severity::error, "UNDECLARED_METRIC",
                     loc, "limitation references undeclared metric '" +
                              lim.metric + "'");
        continue;
      }
      bool observation_scoped =
          metric_it->second.resolution == Metric::Resolution::check;
      for (auto& limit : lim.limits) {
        if (limit.period || observation_scoped) continue;
        limit.period = plan.cost.period;
        if (lim.window == WindowKind::rate)
          detail::diag(result.diagnostics, Severity::warning,
                       "INHERITED_RATE_PERIOD", loc,
                       "sliding-window limit has no period; inheriting the "
                       "billing period " + to_string(plan.cost.period));
      }
      plan.limitations.push_back(std::move(lim));
    }
    pricing.plans.push_back(std::move(plan));
  }

  result.pricing = std::move(pricing);
  return result;
}

// --------------------------------------------------------- capacity sidecar

struct DeclaredCapacity {
  ApiOperation operation;  // method may be `all` to cover every method
  Capacity capacity;

  friend bool operator==(const DeclaredCapacity&, const DeclaredCapacity&) = default;
};

struct CapacityResult {
  std::vector<DeclaredCapacity> capacities;
  std::vector<Diagnostic> diagnostics;
};

// Sidecar shape:
//   capacities:
//     /v3/person.enrich:
//       post:
//         requests: { threshold: 1000000, period: { amount: 1, unit: second } }
inline CapacityResult load_capacity_sidecar(const std::string& text) {
  CapacityResult result;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    detail::diag(result.diagnostics, Severity::error, "MALFORMED_DOCUMENT", "/",
                 std::string("cannot parse capacity sidecar: ") + e.what());
    return result;
  }
  const YAML::Node caps = root.IsMap() ? root["capacities"] : YAML::Node();
  if (!caps || !caps.IsMap()) {
    detail::diag(result.diagnostics, Severity::error, "INVALID_CAPACITY",
                 "/capacities", "sidecar needs a capacities mapping");
    return result;
  }
  for (const auto& path_kv : caps) {
    std::string path = normalize_path(path_kv.first.Scalar());
    std::string path_loc = "/capacities/" + pointer_escape(path_kv.first.Scalar());
    if (!path_kv.second.IsMap()) {
      detail::diag(result.diagnostics, Severity::error, "INVALID_CAPACITY",
                   path_loc, "path entry must map methods to metrics");
      continue;
    }
    for (const auto& method_kv : path_kv.second) {
      auto method = parse_http_method(method_kv.first.Scalar());
      std::string method_loc = path_loc + "/" + method_kv.first.Scalar();
      if (!method) {
        detail::diag(result.diagnostics, Severity::error, "INVALID_METHOD",
                     method_loc, "unknown HTTP method");
        continue;
      }
      if (!method_kv.second.IsMap()) {
        detail::diag(result.diagnostics, Severity::error, "INVALID_CAPACITY",
                     method_loc, "method entry must map metrics to capacities");
        continue;
      }
      for (const auto& metric_kv : method_kv.second) {
        std::string loc = method_loc + "/" + pointer_escape(metric_kv.first.Scalar());
        const YAML::Node body = metric_kv.second;
        auto threshold = body.IsMap() ? detail::number_of(body["threshold"])
                                      : std::nullopt;
        if (!threshold || *threshold <= 0 || !is_integral(*threshold)) {
          detail::diag(result.diagnostics, Severity::error, "INVALID_CAPACITY",
                       loc, "capacity threshold must be a positive integer");
          continue;
        }
        auto period = detail::parse_period(body["period"], loc + "/period",
                                           result.diagnostics);
        if (!period) continue;
        Capacity cap;
        cap.metric = metric_kv.first.Scalar();
        cap.threshold = *threshold;
        cap.period = *period;
        cap.provenance = Capacity::Provenance::declared;
        result.capacities.push_back({{path, *method}, std::move(cap)});
      }
    }
  }
  return result;
}

// -------------------------------------------------------------- serialization

enum class DocFormat { yaml, json };

// Optional header metadata for serialization; Pricing itself does not carry
// document identity, so a placeholder context is synthesized by default.
struct DocumentMeta {
  std::string id = "pricing";
  std::string sla_version = "1.0";
  std::string type = "plans";
  std::string api;
  std::optional<std::string> provider;
  std::optional<InfrastructureInfo> infrastructure;
  std::string availability;
};

namespace detail {

inline DocValue period_tree(const Period& p) {
  DocValue m = DocValue::mapping();
  m.add("amount", DocValue::number(std::to_string(p.amount)));
  m.add("unit", DocValue::string(to_string(p.unit)));
  return m;
}

inline DocValue cost_attachment_tree(const CostAttachment& cost) {
  DocValue m = DocValue::mapping();
  if (const auto* o = std::get_if<OverageCost>(&cost)) {
    DocValue inner = DocValue::mapping();
    inner.add("overage", DocValue::number(o->overage_unit.str()));
    inner.add("cost", DocValue::number(decimal_string(o->unit_cost)));
    m.add("overage", std::move(inner));
  } else {
    const auto& op = std::get<OperationCost>(cost);
    DocValue inner = DocValue::mapping();
    inner.add("volume", DocValue::number(op.volume.str()));
    inner.add("cost", DocValue::number(decimal_string(op.unit_cost)));
    m.add("operation", std::move(inner));
  }
  return m;
}

inline DocValue limit_tree(const ThresholdLimit& limit, bool carry_cost,
                           const std::optional<CostAttachment>& cost) {
  DocValue m = DocValue::mapping();
  switch (limit.threshold.kind) {
    case Threshold::Kind::numeric:
      m.add("max", DocValue::number(decimal_string(limit.threshold.value)));
      break;
    case Threshold::Kind::unlimited:
      break;  // no max field means unlimited
    case Threshold::Kind::custom:
      m.add("custom", DocValue::boolean(true));
      break;
  }
  if (limit.period) m.add("period", period_tree(*limit.period));
  if (carry_cost && cost) m.add("cost", cost_attachment_tree(*cost));
  return m;
}

inline void add_limit_sections(DocValue& plan_tree, const Plan& plan,
                               WindowKind kind, const char* key) {
  // path -> method -> metric -> limits, all canonically sorted.
  std::map<std::string, std::map<HttpMethod, std::map<std::string,
      const Limitation*>>> grouped;
  for (const Limitation& lim : plan.limitations) {
    if (lim.window != kind) continue;
    grouped[lim.operation.path][lim.operation.method][lim.metric] = &lim;
  }
  if (grouped.empty()) return;
  DocValue section = DocValue::mapping();
  for (const auto& [path, methods] : grouped) {
    DocValue path_tree = DocValue::mapping();
    for (const auto& [method, metrics] : methods) {
      DocValue method_tree = DocValue::mapping();
      for (const auto& [metric, lim] : metrics) {
        DocValue limits = DocValue::sequence();
        for (size_t i = 0; i < lim->limits.size(); ++i)
          limits.push(limit_tree(lim->limits[i], i == 0, lim->cost));
        method_tree.add(metric, std::move(limits));
      }
      path_tree.add(to_string(method), std::move(method_tree));
    }
    section.add(path, std::move(path_tree));
  }
  plan_tree.add(key, std::move(section));
}

}  // namespace detail

inline std::string serialize_document(const Pricing& pricing, DocFormat format,
                                      const DocumentMeta& meta = {}) {
  DocValue root = DocValue::mapping();

  DocValue context = DocValue::mapping();
  context.add("id", DocValue::string(meta.id));
  context.add("sla", DocValue::string(meta.sla_version));
  context.add("type", DocValue::string(meta.type));
  context.add("api", DocValue::string(meta.api));
  if (meta.provider) context.add("provider", DocValue::string(*meta.provider));
  root.add("context", std::move(context));

  if (meta.infrastructure) {
    DocValue infra = DocValue::mapping();
    infra.add("supervisor", DocValue::string(meta.infrastructure->supervisor));
    infra.add("monitor", DocValue::string(meta.infrastructure->monitor));
    root.add("infrastructure", std::move(infra));
  }
  if (!meta.availability.empty())
    root.add("availability", DocValue::string(meta.availability));

  if (!pricing.metrics.empty()) {
    DocValue metrics = DocValue::mapping();
    for (const auto& [name, metric] : pricing.metrics) {
      DocValue m = DocValue::mapping();
      m.add("type", DocValue::string(metric.type == Metric::ValueType::integer
                                         ? "integer" : "number"));
      if (metric.format) m.add("format", DocValue::string(*metric.format));
      if (metric.unit) m.add("unit", DocValue::string(*metric.unit));
      if (metric.description)
        m.add("description", DocValue::string(*metric.description));
      if (metric.resolution)
        m.add("resolution", DocValue::string(
            *metric.resolution == Metric::Resolution::check ? "check"
                                                            : "consumption"));
      metrics.add(name, std::move(m));
    }
    root.add("metrics", std::move(metrics));
  }

  DocValue pricing_defaults = DocValue::mapping();
  pricing_defaults.add("currency", DocValue::string(pricing.currency));
  root.add("pricing", std::move(pricing_defaults));

  if (!pricing.relationships.empty()) {
    DocValue rels = DocValue::sequence();
    for (const auto& rel : pricing.relationships) {
      DocValue r = DocValue::mapping();
      r.add("metric-a", DocValue::string(rel.metric_a));
      r.add("metric-b", DocValue::string(rel.metric_b));
      r.add("factor", DocValue::number(decimal_string(rel.factor)));
      rels.push(std::move(r));
    }
    root.add("x-metric-relationships", std::move(rels));
  }

  DocValue plans = DocValue::mapping();
  for (const Plan& plan : pricing.plans) {
    DocValue plan_tree = DocValue::mapping();
    DocValue cost_tree = DocValue::mapping();
    if (plan.cost.kind == Cost::Kind::custom)
      cost_tree.add("custom", DocValue::boolean(true));
    else
      cost_tree.add("cost", DocValue::number(decimal_string(plan.cost.amount)));
    cost_tree.add("currency", DocValue::string(plan.cost.currency));
    cost_tree.add("period", detail::period_tree(plan.cost.period));
    plan_tree.add("pricing", std::move(cost_tree));
    detail::add_limit_sections(plan_tree, plan, WindowKind::quota, "quotas");
    detail::add_limit_sections(plan_tree, plan, WindowKind::rate, "rates");
    plans.add(plan.name, std::move(plan_tree));
  }
  root.add("plans", std::move(plans));

  return format == DocFormat::yaml ? emit_yaml(root) : emit_json(root);
}

// ------------------------------------------------------------- materialize

// One-stop pipeline: text -> parsed document -> linked operations ->
// resolved limitations -> Pricing. Used by the CLI, the service and tests.
struct MaterializeOptions {
  std::optional<std::string> oas_text;  // overrides context.api
  ResourceLoader loader = offline_loader();
};

struct MaterializeResult {
  std::optional<Sla4oaiDocument> document;
  std::optional<Pricing> pricing;
  std::vector<Diagnostic> diagnostics;
  bool syntax_ok = false;
};

inline MaterializeResult materialize(const std::string& text,
                                     const MaterializeOptions& options = {}) {
  MaterializeResult result;

  // An OpenAPI carrier may point at its SLA by reference via x-sla.
  std::string sla_text = text;
  std::optional<std::string> oas_text = options.oas_text;
  try {
    YAML::Node probe = YAML::Load(text);
    if (probe.IsMap() && (probe["openapi"] || probe["swagger"]) &&
        probe["x-sla"] && probe["x-sla"].IsScalar()) {
      auto fetched = options.loader(probe["x-sla"].Scalar());
      if (!fetched) {
        detail::diag(result.diagnostics, Severity::error, "SLA_UNAVAILABLE",
                     "/x-sla", "cannot load referenced SLA document '" +
                         probe["x-sla"].Scalar() + "'");
        return result;
      }
      sla_text = *fetched;
      if (!oas_text) oas_text = text;  // the carrier is the API surface
    } else if (probe.IsMap() && (probe["openapi"] || probe["swagger"]) &&
               probe["x-sla"] && probe["x-sla"].IsMap() && !oas_text) {
      oas_text = text;  // inline x-sla: parse_document extracts it
    }
  } catch (...) {
    // parse_document reports the malformed input with a location
  }

  ParseResult parsed = parse_document(sla_text);
  result.diagnostics = std::move(parsed.diagnostics);
  result.syntax_ok = parsed.document.has_value();
  if (!parsed.document) return result;
  result.document = std::move(parsed.document);

  LinkResult linked = link_oas(*result.document, oas_text, options.loader);
  for (auto& d : linked.diagnostics) result.diagnostics.push_back(std::move(d));

  ResolveResult resolved = resolve_globs(*result.document, linked.operations);
  for (auto& d : resolved.diagnostics) result.diagnostics.push_back(std::move(d));

  LowerResult lowered = lower_to_model(*result.document, resolved);
  for (auto& d : lowered.diagnostics) result.diagnostics.push_back(std::move(d));
  result.pricing = std::move(lowered.pricing);
  return result;
}

}  // namespace sla4oai
