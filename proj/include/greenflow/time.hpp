#pragma once

// Instants, durations and calendar helpers shared across the project.
// All timestamps are UTC with millisecond resolution.

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace greenflow {

using Millis = std::chrono::milliseconds;
using Instant = std::chrono::sys_time<Millis>;

/// Parses either an epoch-milliseconds integer ("1682938800000") or an
/// ISO-8601 timestamp ("2023-05-01T10:00:00Z", "2023-05-01 10:00:00.250",
/// "2023-05-01T12:00:00+02:00"). Values without a zone designator are
/// interpreted as UTC. Throws std::invalid_argument on malformed input.
Instant parse_instant(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ", with ".mmm" inserted when the instant carries
/// sub-second precision.
std::string format_instant(Instant t);

Instant make_instant(int year, unsigned month, unsigned day, int hour = 0,
                     int minute = 0, int second = 0, int millisecond = 0);

/// Replaces the year while keeping month, day and time of day. February 29
/// collapses to February 28 when the target year is not a leap year.
Instant rebase_year(Instant t, int target_year);

/// Largest grid point <= t on the grid {origin + k * step}.
Instant floor_to(Instant t, Millis step, Instant origin = Instant{});

/// Smallest grid point >= t on the grid {origin + k * step}.
Instant ceil_to(Instant t, Millis step, Instant origin = Instant{});

inline double to_seconds(Millis d) {
  return static_cast<double>(d.count()) / 1000.0;
}

}  // namespace greenflow
