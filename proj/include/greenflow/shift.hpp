#pragma once

// Carbon-aware what-if strategies: shifting the whole workflow in time, and
// interrupted execution that maps hourly execution windows onto the
// lowest-intensity slots within a flexibility budget.

#include <cstdint>
#include <string>
#include <vector>

#include "greenflow/ci.hpp"
#include "greenflow/footprint.hpp"
#include "greenflow/trace.hpp"

namespace greenflow {

struct ExecutionWindow {
  int index = 0;
  Instant window_start{};
  Instant window_end{};
  // Tasks are listed in the window containing their start. A task is
  // complete when it also ends by window_end, partial otherwise.
  std::vector<std::string> complete_tasks;
  std::vector<std::string> partial_tasks;
  double energy_kwh = 0.0;      // task energy apportioned by overlap
  Millis longest_partial{};     // longest full duration among partial tasks
};

/// Covers the trace span with consecutive windows of length `window`,
/// aligned to the grid {origin + k * window}, from the floor of the earliest
/// start to the ceiling of the latest end.
std::vector<ExecutionWindow> build_windows(const WorkflowTrace& trace,
                                           Millis window = Millis{3600000},
                                           Instant origin = Instant{},
                                           double pue = 1.0);

struct SlotAssignment {
  Millis slot_length{};
  std::vector<std::size_t> slot_index;  // chronological, one per window
  std::vector<Instant> slot_starts;     // parallel to slot_index
};

/// Picks the k = |windows| lowest-intensity slots (ties broken toward the
/// earlier slot) among the slots fully contained in
/// [first window start - flexibility_h, last window end + flexibility_h],
/// and assigns windows to them in chronological order. Window length must
/// equal the series interval.
SlotAssignment select_slots(const std::vector<ExecutionWindow>& windows,
                            const CISeries& series, int flexibility_h);

/// sum(window energy * assigned-slot intensity), compensated.
double assignment_emissions(const std::vector<ExecutionWindow>& windows,
                            const CISeries& series,
                            const SlotAssignment& assignment);

/// For every window whose assigned slot is not immediately followed by the
/// next window's slot, the longest partial task of that window must be
/// re-run, so its full duration is added once per interruption.
Millis interruption_overhead(const std::vector<ExecutionWindow>& windows,
                             const SlotAssignment& assignment);

enum class ShiftStrategy { whole, interrupted };

std::string_view to_string(ShiftStrategy s);

struct OffsetSample {
  std::int64_t offset_s = 0;
  double footprint_g = 0.0;
  bool feasible = false;
};

struct WindowPlacement {
  int window = 0;
  Instant original_start{};
  Instant assigned_start{};
  double intensity = 0.0;
  double energy_kwh = 0.0;
  double emissions_g = 0.0;
};

struct ShiftResult {
  ShiftStrategy strategy = ShiftStrategy::whole;
  int flexibility_h = 0;
  double baseline_g = 0.0;
  double best_g = 0.0;
  double reduction_pct = 0.0;
  std::int64_t chosen_offset_s = 0;          // whole
  Millis overhead{};                         // interrupted
  double overhead_pct = 0.0;                 // overhead / makespan * 100
  std::size_t offsets_evaluated = 0;         // whole
  std::size_t offsets_skipped = 0;           // whole, left CI coverage
  std::vector<OffsetSample> curve;           // whole, one per candidate
  std::vector<WindowPlacement> placements;   // interrupted, one per window
};

/// Evaluates the footprint at every offset k * step_s for
/// k in [-K, K], K = floor(flexibility_h * 3600 / step_s), skipping (and
/// counting) offsets that leave CI coverage. Ties break toward the smaller
/// footprint, then the smaller |offset|, then the earlier offset. The
/// baseline is the footprint at offset zero.
ShiftResult shift_whole(const WorkflowTrace& trace, const CISeries& series,
                        int flexibility_h, std::int64_t step_s = 3600,
                        double pue = 1.0);

/// Builds windows on the series' slot grid and searches the nested
/// flexibility budgets h = 0..flexibility_h hours, mapping windows onto the
/// k lowest-intensity slots for each h and keeping the cheapest assignment
/// (ties toward the smaller h). Searching the nested budgets instead of only
/// the outermost one keeps the reported reduction non-negative and
/// non-decreasing in flexibility_h; the h = 0 assignment is the original
/// placement and prices the baseline.
ShiftResult shift_interrupted(const WorkflowTrace& trace,
                              const CISeries& series, int flexibility_h,
                              double pue = 1.0);

}  // namespace greenflow
