#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace mymove {

using Millis = std::chrono::milliseconds;
using Instant = std::chrono::sys_time<Millis>;

/// Half-open interval [start, end) on the virtual timeline.
struct Interval {
  Instant start;
  Instant end;

  Millis length() const { return end - start; }
  bool empty() const { return end <= start; }
  bool contains(Instant t) const { return t >= start && t < end; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Instant from_epoch_ms(std::int64_t ms) { return Instant{Millis{ms}}; }
inline std::int64_t to_epoch_ms(Instant t) { return t.time_since_epoch().count(); }

Instant floor_hour(Instant t);
Instant floor_minute(Instant t);
Instant floor_day(Instant t);

/// "2021-05-10T07:30:00.000Z"
std::string format_iso(Instant t);
/// Accepts "YYYY-MM-DDTHH:MM[:SS[.fff]]" with optional trailing 'Z' or
/// "+00:00". Throws Error(kInvalidArgument) on malformed input.
Instant parse_iso(std::string_view text);

/// "YYYY-MM-DD" for the UTC day containing t.
std::string format_date(Instant t);
Instant parse_date(std::string_view text);

/// Minutes since midnight, "HH:MM" (24h).
int parse_hhmm(std::string_view text);
std::string format_hhmm(int minutes_of_day);

double minutes_between(Instant a, Instant b);

}  // namespace mymove
