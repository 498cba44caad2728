#pragma once

// Deterministic serialization: JSON with sorted keys and fixed six-decimal
// number formatting, plus the CSV table and plot-data writers. Identical
// inputs produce byte-identical output.

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "greenflow/footprint.hpp"
#include "greenflow/shift.hpp"
#include "greenflow/whatif.hpp"

namespace greenflow {

nlohmann::json to_json(const EnergyBreakdown& energy);
nlohmann::json to_json(const FootprintReport& report);
nlohmann::json to_json(const ShiftResult& result);
nlohmann::json to_json(const ProfileRanking& ranking);
nlohmann::json to_json(const ScaleRow& row);
nlohmann::json to_json(const NodeProfile& node);

/// Pretty-prints with two-space indentation, keys in sorted order, every
/// floating-point number as %.6f (negative zero normalized) and a trailing
/// newline. Throws IoError on non-finite values.
void write_json_fixed(std::ostream& os, const nlohmann::json& doc);

std::string csv_escape(const std::string& field);

void write_footprint_csv(std::ostream& os, const FootprintReport& report);
void write_shift_csv(std::ostream& os, const std::vector<ShiftResult>& results);
void write_ranking_csv(std::ostream& os,
                       const std::vector<ProfileRanking>& rankings);
void write_scale_csv(std::ostream& os, const std::vector<ScaleRow>& rows);

/// Whole shift: one row per candidate offset (footprint blank when the
/// offset is infeasible). Interrupted: one row per window placement.
void write_shift_plot_csv(std::ostream& os, const ShiftResult& result);

/// One row per series slot covering all profile runs from `start`, with the
/// slot intensity and a 0/1 marker per profile for slots its run overlaps.
void write_whatif_plot_csv(std::ostream& os,
                           const std::vector<ProfileRanking>& rankings,
                           Instant start, const CISeries& series);

}  // namespace greenflow
