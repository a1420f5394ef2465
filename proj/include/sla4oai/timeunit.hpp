#pragma once

// Time units and periods. Every unit is pinned to a fixed number of seconds
// (month = 30 days, year = 365 days) so that period arithmetic is exact and
// deterministic; calendar-aware billing is out of scope.

#include "sla4oai/rational.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sla4oai {

enum class TimeUnit { second, minute, hour, day, week, month, year };

inline constexpr std::array<TimeUnit, 7> kAllTimeUnits = {
    TimeUnit::second, TimeUnit::minute, TimeUnit::hour,  TimeUnit::day,
    TimeUnit::week,   TimeUnit::month,  TimeUnit::year};

inline constexpr std::int64_t seconds_per(TimeUnit u) {
  switch (u) {
    case TimeUnit::second: return 1;
    case TimeUnit::minute: return 60;
    case TimeUnit::hour:   return 3600;
    case TimeUnit::day:    return 86400;
    case TimeUnit::week:   return 604800;
    case TimeUnit::month:  return 2592000;   // 30 days
    case TimeUnit::year:   return 31536000;  // 365 days
  }
  return 1;  // unreachable; keeps -Wreturn-type quiet
}

inline std::string to_string(TimeUnit u) {
  switch (u) {
    case TimeUnit::second: return "second";
    case TimeUnit::minute: return "minute";
    case TimeUnit::hour:   return "hour";
    case TimeUnit::day:    return "day";
    case TimeUnit::week:   return "week";
    case TimeUnit::month:  return "month";
    case TimeUnit::year:   return "year";
  }
  return "second";
}

// Accepts the singular unit names; a trailing "s" is tolerated ("seconds").
inline std::optional<TimeUnit> parse_time_unit(std::string_view name) {
  if (name.size() > 1 && name.back() == 's') name.remove_suffix(1);
  for (TimeUnit u : kAllTimeUnits)
    if (name == to_string(u)) return u;
  return std::nullopt;
}

// A duration expressed as <amount> x <unit>, amount >= 1.
struct Period {
  std::int64_t amount = 1;
  TimeUnit unit = TimeUnit::second;

  friend bool operator==(const Period&, const Period&) = default;
};

inline Integer period_seconds(const Period& p) {
  return Integer(p.amount) * seconds_per(p.unit);
}

inline std::string to_string(const Period& p) {
  return std::to_string(p.amount) + " " + to_string(p.unit) +
         (p.amount == 1 ? "" : "s");
}

}  // namespace sla4oai
