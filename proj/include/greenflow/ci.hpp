#pragma once

// Carbon-intensity time series: a uniformly spaced, right-open sequence of
// slots [slot_start, slot_start + interval) in gCO2e/kWh, plus adapters for
// common provider export formats.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "greenflow/time.hpp"

namespace greenflow {

enum class Signal { average, marginal };

std::string_view to_string(Signal s);
Signal signal_from_string(std::string_view text);

struct CISeries {
  std::string zone;
  Signal signal = Signal::average;
  Millis interval{};       // typically 3600 s or 300 s
  Instant first_slot_start{};
  std::vector<double> values;  // gCO2e/kWh, one per slot
  std::size_t filled_gaps = 0;  // slots synthesized by gap filling

  std::size_t size() const { return values.size(); }
  Instant slot_start(std::size_t i) const {
    return first_slot_start + interval * static_cast<std::int64_t>(i);
  }
  Instant coverage_begin() const { return first_slot_start; }
  Instant coverage_end() const {
    return slot_start(values.size());
  }
  /// True when [start, end) lies inside the covered range. An empty
  /// interval is always covered (no energy is priced).
  bool covers(Instant start, Instant end) const;
  /// Index of the slot containing t; throws OutOfRange outside coverage.
  std::size_t index_at(Instant t) const;
  /// Intensity of the slot containing t (ci_at). Right-open: the instant
  /// exactly at a slot boundary belongs to the later slot.
  double at(Instant t) const;
};

struct CIParseOptions {
  // Refuse gaps by default; when set, missing slots are filled by carrying
  // the previous value forward and counted in CISeries::filled_gaps.
  bool fill_gaps = false;
};

/// Parses a CSV export into a series. Formats are auto-detected from the
/// header:
///  - canonical:        timestamp_utc,ci_gco2e_per_kwh
///  - Electricity Maps: a "Datetime (UTC)" column plus the first
///                      "Carbon Intensity" column
///  - WattTime MOER:    point_time/value (or any *moer* column), given in
///                      lbs CO2/MWh and converted by 453.592 / 1000
CISeries parse_ci(std::string_view content, Signal signal, std::string zone,
                  const CIParseOptions& options = {});

struct SlotShare {
  std::size_t slot = 0;
  Instant slot_start{};
  double intensity = 0.0;
  std::int64_t overlap_ms = 0;
  double fraction = 0.0;  // overlap / (end - start)
};

/// Slots overlapped by [start, end) with their overlap fractions; the
/// fractions sum to 1 within 1e-9. Requires start < end and full coverage.
std::vector<SlotShare> overlap_weights(const CISeries& series, Instant start,
                                       Instant end);

/// Time-weighted mean intensity over [start, end), computed as
/// sum(overlap_ms * intensity) / (end - start).
double weighted_intensity(const CISeries& series, Instant start, Instant end);

}  // namespace greenflow
