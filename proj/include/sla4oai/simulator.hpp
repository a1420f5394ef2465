#pragma once

// Discrete-event window simulator. This is the executable counterpart of the
// BPU calculus: limits are enforced against concrete consumption traces, and
// the extreme traces (uniform spread, single burst) realize exactly the
// min_pu / max_pu bounds that compute_bpu predicts. The simulator shares only
// the model types with the analysis; it never calls into it, so tests can use
// one as an oracle for the other.
//
// Window semantics:
//  - rate (sliding):  at time t the window is (t - w, t]  — half-open on the
//    left, so an event exactly w ago has just left the window.
//  - quota (static):  windows are the fixed intervals [k*w, (k+1)*w) anchored
//    at the epoch (anchor parameter, default 0).

#include "sla4oai/model.hpp"
#include "sla4oai/rational.hpp"
#include "sla4oai/timeunit.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace sla4oai {

struct TraceEvent {
  Rational at;         // seconds since epoch
  Integer units = 1;   // consumption carried by the event, > 0

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct ConsumptionTrace {
  std::vector<TraceEvent> events;  // non-decreasing timestamps

  static ConsumptionTrace of(std::vector<TraceEvent> events) {
    for (size_t i = 0; i < events.size(); ++i) {
      if (events[i].units <= 0)
        throw std::invalid_argument("trace events must carry positive units");
      if (i > 0 && events[i].at < events[i - 1].at)
        throw std::invalid_argument("trace timestamps must be non-decreasing");
    }
    ConsumptionTrace t;
    t.events = std::move(events);
    return t;
  }

  friend bool operator==(const ConsumptionTrace&, const ConsumptionTrace&) = default;
};

namespace detail {

inline Integer floor_div(const Integer& n, const Integer& d) {
  Integer q = n / d;
  if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
  return q;
}

inline Integer floor_rational(const Rational& q) {
  return floor_div(numerator(q), denominator(q));
}

// [start, start + width) of the static window containing `at`.
inline std::pair<Rational, Rational> static_window(const Rational& at,
                                                   const Rational& width,
                                                   const Rational& anchor) {
  Integer k = floor_rational((at - anchor) / width);
  Rational start = anchor + Rational(k) * width;
  return {start, start + width};
}

}  // namespace detail

// Units consumed in the window that `at` falls into. A sliding window only
// ever contains events at or before `at`; a static window is counted in
// full, later events included.
inline Integer count_window(const ConsumptionTrace& trace, const Rational& at,
                            const Period& window, WindowKind kind,
                            const Rational& anchor = 0) {
  Rational width{period_seconds(window)};
  Integer total = 0;
  if (kind == WindowKind::rate) {
    Rational lo = at - width;
    for (const TraceEvent& e : trace.events)
      if (e.at > lo && e.at <= at) total += e.units;
    return total;
  }
  auto [lo, hi] = detail::static_window(at, width, anchor);
  for (const TraceEvent& e : trace.events)
    if (e.at >= lo && e.at < hi) total += e.units;
  return total;
}

struct Rejection {
  size_t event_index;
  Integer occupancy;  // admitted units already in the window at that moment

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct EnforcementResult {
  Integer admitted = 0;  // number of admitted events
  std::vector<Rejection> rejected;
  std::vector<bool> decisions;  // per event, true = admitted
};

// Greedy enforcement: events are admitted in order whenever the window
// occupancy (admitted units only) still has room for the whole event.
// Decisions are final — a rejection never frees capacity, and admitting an
// event never revokes an earlier admission, so prefixes are stable.
inline EnforcementResult enforce(const ConsumptionTrace& trace,
                                 const ThresholdLimit& limit, WindowKind kind,
                                 const Rational& anchor = 0) {
  if (limit.threshold.kind == Threshold::Kind::custom)
    throw std::invalid_argument("cannot enforce a custom threshold");
  bool unlimited = limit.threshold.kind == Threshold::Kind::unlimited;
  if (!unlimited && !limit.period)
    throw std::invalid_argument("cannot enforce a limit without a period");
  if (!unlimited && !is_integral(limit.threshold.value))
    throw std::invalid_argument("cannot enforce a non-integer threshold");

  EnforcementResult result;
  result.decisions.reserve(trace.events.size());
  if (unlimited) {
    result.admitted = trace.events.size();
    result.decisions.assign(trace.events.size(), true);
    return result;
  }

  Integer threshold = numerator(limit.threshold.value);
  Rational width{period_seconds(*limit.period)};
  std::vector<const TraceEvent*> admitted;
  for (size_t i = 0; i < trace.events.size(); ++i) {
    const TraceEvent& e = trace.events[i];
    Integer occupancy = 0;
    if (kind == WindowKind::rate) {
      Rational lo = e.at - width;
      for (const TraceEvent* a : admitted)
        if (a->at > lo) occupancy += a->units;
    } else {
      auto [lo, hi] = detail::static_window(e.at, width, anchor);
      for (const TraceEvent* a : admitted)
        if (a->at >= lo && a->at < hi) occupancy += a->units;
    }
    if (threshold >= 0 && occupancy + e.units <= threshold) {
      admitted.push_back(&e);
      ++result.admitted;
      result.decisions.push_back(true);
    } else {
      result.rejected.push_back({i, occupancy});
      result.decisions.push_back(false);
    }
  }
  return result;
}

// The two admissible extremes of a numeric limit:
//  - uniform: the whole budget spread evenly over the limit period, one unit
//    every period/threshold — its sustained utilization is min_pu;
//  - burst:   the whole budget in a single instant at t = 0 — its densest
//    capacity slice is max_pu.
inline std::pair<ConsumptionTrace, ConsumptionTrace> realize_extreme_traces(
    const ThresholdLimit& limit, const Capacity& capacity) {
  if (!limit.threshold.is_numeric())
    throw std::invalid_argument("extreme traces need a numeric threshold");
  if (!limit.period)
    throw std::invalid_argument("extreme traces need a limit with a period");
  if (!is_integral(limit.threshold.value) || limit.threshold.value < 0)
    throw std::invalid_argument("extreme traces need a natural threshold");
  (void)capacity;  // reserved: traces are capacity-independent by design

  Integer t = numerator(limit.threshold.value);
  if (t > 1000000)
    throw std::invalid_argument("threshold too large to materialize a trace");
  Rational period{period_seconds(*limit.period)};

  ConsumptionTrace uniform, burst;
  size_t n = t.convert_to<size_t>();
  uniform.events.reserve(n);
  for (size_t k = 0; k < n; ++k)
    uniform.events.push_back({Rational(k) * period / Rational(Integer(n)), 1});
  if (t > 0) burst.events.push_back({Rational(0), t});
  return {std::move(uniform), std::move(burst)};
}

// Highest utilization of any single capacity window, slices anchored like
// static windows.
inline Rational max_slice_utilization(const ConsumptionTrace& trace,
                                      const Capacity& capacity,
                                      const Rational& anchor = 0) {
  if (capacity.threshold <= 0)
    throw std::invalid_argument("capacity threshold must be positive");
  Rational width{period_seconds(capacity.period)};
  std::vector<std::pair<Integer, Integer>> slices;  // (index, units)
  for (const TraceEvent& e : trace.events) {
    Integer k = detail::floor_rational((e.at - anchor) / width);
    bool found = false;
    for (auto& [idx, units] : slices)
      if (idx == k) { units += e.units; found = true; break; }
    if (!found) slices.push_back({k, e.units});
  }
  Rational best = 0;
  for (const auto& [idx, units] : slices)
    best = std::max(best, Rational(units) / capacity.threshold);
  return best;
}

// Average per-capacity-period utilization over one limit period: total
// consumption divided by the number of capacity periods the limit period
// spans, as a fraction of capacity.
inline Rational steady_utilization(const ConsumptionTrace& trace,
                                   const Period& limit_period,
                                   const Capacity& capacity) {
  if (capacity.threshold <= 0)
    throw std::invalid_argument("capacity threshold must be positive");
  Integer total = 0;
  for (const TraceEvent& e : trace.events) total += e.units;
  Rational periods{period_seconds(limit_period), period_seconds(capacity.period)};
  return Rational(total) / periods / capacity.threshold;
}

// ------------------------------------------------------------ CSV trace I/O

// Lines of "timestamp,units" with an optional header line; blank lines and
// '#' comments are skipped.
inline ConsumptionTrace load_trace_csv(const std::string& text) {
  std::vector<TraceEvent> events;
  size_t pos = 0;
  bool first_line = true;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
    pos = eol == std::string::npos ? text.size() : eol + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') { first_line = false; continue; }
    size_t comma = line.find(',');
    std::string ts = line.substr(0, comma);
    std::string units = comma == std::string::npos ? "1" : line.substr(comma + 1);
    auto at = parse_rational(ts);
    auto u = parse_rational(units);
    if (!at || !u) {
      if (first_line) { first_line = false; continue; }  // header row
      throw std::invalid_argument("malformed trace line: " + line);
    }
    if (!is_integral(*u) || *u <= 0)
      throw std::invalid_argument("trace units must be positive integers: " + line);
    events.push_back({*at, numerator(*u)});
    first_line = false;
  }
  return ConsumptionTrace::of(std::move(events));
}

}  // namespace sla4oai
