#include "greenflow/shift.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "greenflow/errors.hpp"
#include "greenflow/numeric.hpp"

namespace greenflow {

std::string_view to_string(ShiftStrategy s) {
  return s == ShiftStrategy::whole ? "whole" : "interrupted";
}

std::vector<ExecutionWindow> build_windows(const WorkflowTrace& trace,
                                           Millis window, Instant origin,
                                           double pue) {
  if (trace.tasks.empty()) throw EmptyTrace();
  if (window.count() <= 0)
    throw ConfigError("window length must be positive");

  auto [lo, hi] = span(trace);
  Instant grid_lo = floor_to(lo, window, origin);
  Instant grid_hi = ceil_to(hi, window, origin);
  // Keep at least one window, and one containing every task start: a
  // zero-duration task may start exactly at the span's end.
  Instant latest_start = lo;
  for (const TaskRecord& task : trace.tasks)
    latest_start = std::max(latest_start, task.start);
  grid_hi = std::max(grid_hi, floor_to(latest_start, window, origin) + window);
  if (grid_hi == grid_lo) grid_hi = grid_lo + window;

  std::size_t count =
      static_cast<std::size_t>((grid_hi - grid_lo).count() / window.count());
  std::vector<ExecutionWindow> windows(count);
  std::vector<KahanSum> energy(count);
  for (std::size_t i = 0; i < count; ++i) {
    windows[i].index = static_cast<int>(i);
    windows[i].window_start = grid_lo + window * static_cast<std::int64_t>(i);
    windows[i].window_end = windows[i].window_start + window;
  }

  for (const TaskRecord& task : trace.tasks) {
    std::size_t home = static_cast<std::size_t>(
        (floor_to(task.start, window, origin) - grid_lo).count() /
        window.count());
    ExecutionWindow& w = windows[home];
    if (task.end <= w.window_end) {
      w.complete_tasks.push_back(task.task_id);
    } else {
      w.partial_tasks.push_back(task.task_id);
      w.longest_partial = std::max(w.longest_partial, task.duration());
    }

    std::int64_t dur = task.duration().count();
    if (dur == 0) continue;
    double total = task_energy(task, trace.node_for(task), pue).total_kwh();
    for (std::size_t i = home; i < count && windows[i].window_start < task.end;
         ++i) {
      Instant slot_lo = std::max(task.start, windows[i].window_start);
      Instant slot_hi = std::min(task.end, windows[i].window_end);
      std::int64_t overlap = (slot_hi - slot_lo).count();
      if (overlap <= 0) continue;
      energy[i].add(total * static_cast<double>(overlap) /
                    static_cast<double>(dur));
    }
  }
  for (std::size_t i = 0; i < count; ++i)
    windows[i].energy_kwh = energy[i].value();
  return windows;
}

SlotAssignment select_slots(const std::vector<ExecutionWindow>& windows,
                            const CISeries& series, int flexibility_h) {
  if (windows.empty())
    throw ConfigError("cannot assign slots without execution windows");
  if (flexibility_h < 0)
    throw ConfigError("flexibility must be non-negative");
  Millis window_len = windows.front().window_end - windows.front().window_start;
  if (window_len != series.interval)
    throw ConfigError(
        "execution window length must equal the carbon-intensity interval");

  Millis flex{static_cast<std::int64_t>(flexibility_h) * 3600 * 1000};
  Instant range_lo = windows.front().window_start - flex;
  Instant range_hi = windows.back().window_end + flex;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < series.size(); ++i) {
    Instant slot_lo = series.slot_start(i);
    if (slot_lo >= range_lo && slot_lo + series.interval <= range_hi)
      candidates.push_back(i);
  }
  if (candidates.size() < windows.size())
    throw InsufficientSlots(windows.size(), candidates.size());

  // k lowest by intensity, ties toward the earlier slot, then assigned in
  // chronological order.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (series.values[a] != series.values[b])
                       return series.values[a] < series.values[b];
                     return a < b;
                   });
  candidates.resize(windows.size());
  std::sort(candidates.begin(), candidates.end());

  SlotAssignment assignment;
  assignment.slot_length = series.interval;
  assignment.slot_index = std::move(candidates);
  for (std::size_t i : assignment.slot_index)
    assignment.slot_starts.push_back(series.slot_start(i));
  return assignment;
}

double assignment_emissions(const std::vector<ExecutionWindow>& windows,
                            const CISeries& series,
                            const SlotAssignment& assignment) {
  KahanSum total;
  for (std::size_t i = 0; i < windows.size(); ++i)
    total.add(windows[i].energy_kwh * series.values[assignment.slot_index[i]]);
  return total.value();
}

Millis interruption_overhead(const std::vector<ExecutionWindow>& windows,
                             const SlotAssignment& assignment) {
  Millis overhead{0};
  for (std::size_t i = 0; i + 1 < windows.size(); ++i) {
    bool contiguous = assignment.slot_starts[i + 1] ==
                      assignment.slot_starts[i] + assignment.slot_length;
    if (!contiguous) overhead += windows[i].longest_partial;
  }
  return overhead;
}

ShiftResult shift_whole(const WorkflowTrace& trace, const CISeries& series,
                        int flexibility_h, std::int64_t step_s, double pue) {
  if (trace.tasks.empty()) throw EmptyTrace();
  if (flexibility_h < 0) throw ConfigError("flexibility must be non-negative");
  if (step_s <= 0) throw ConfigError("step must be positive");

  auto [lo, hi] = span(trace);
  std::int64_t k_max = flexibility_h * 3600 / step_s;

  ShiftResult result;
  result.strategy = ShiftStrategy::whole;
  result.flexibility_h = flexibility_h;

  bool have_best = false;
  bool have_baseline = false;
  std::int64_t best_offset_s = 0;
  double best_g = 0.0;

  for (std::int64_t k = -k_max; k <= k_max; ++k) {
    std::int64_t offset_s = k * step_s;
    Millis offset{offset_s * 1000};
    OffsetSample sample;
    sample.offset_s = offset_s;
    sample.feasible = series.covers(lo + offset, hi + offset);
    if (!sample.feasible) {
      ++result.offsets_skipped;
      result.curve.push_back(sample);
      continue;
    }
    sample.footprint_g = footprint_total_g(trace, series, offset, pue);
    ++result.offsets_evaluated;
    result.curve.push_back(sample);

    if (offset_s == 0) {
      result.baseline_g = sample.footprint_g;
      have_baseline = true;
    }
    bool better = !have_best;
    if (have_best) {
      if (sample.footprint_g != best_g) {
        better = sample.footprint_g < best_g;
      } else if (std::abs(offset_s) != std::abs(best_offset_s)) {
        better = std::abs(offset_s) < std::abs(best_offset_s);
      } else {
        better = offset_s < best_offset_s;
      }
    }
    if (better) {
      have_best = true;
      best_offset_s = offset_s;
      best_g = sample.footprint_g;
    }
  }

  if (!have_best) throw NoFeasibleOffset();
  if (!have_baseline)
    throw OutOfRange(
        "carbon-intensity coverage does not include the unshifted execution, "
        "so there is no baseline to compare against");

  result.chosen_offset_s = best_offset_s;
  result.best_g = best_g;
  result.reduction_pct =
      result.baseline_g > 0.0
          ? 100.0 * (result.baseline_g - result.best_g) / result.baseline_g
          : 0.0;
  return result;
}

ShiftResult shift_interrupted(const WorkflowTrace& trace,
                              const CISeries& series, int flexibility_h,
                              double pue) {
  if (trace.tasks.empty()) throw EmptyTrace();
  if (flexibility_h < 0) throw ConfigError("flexibility must be non-negative");

  // Windows live on the series' slot grid so that every window corresponds
  // to exactly one slot.
  std::vector<ExecutionWindow> windows =
      build_windows(trace, series.interval, series.first_slot_start, pue);

  ShiftResult result;
  result.strategy = ShiftStrategy::interrupted;
  result.flexibility_h = flexibility_h;

  SlotAssignment best;
  double best_g = 0.0;
  bool have_best = false;
  for (int h = 0; h <= flexibility_h; ++h) {
    SlotAssignment assignment;
    try {
      assignment = select_slots(windows, series, h);
    } catch (const InsufficientSlots&) {
      if (h == 0)
        throw OutOfRange(
            "carbon-intensity coverage must include the original execution "
            "windows");
      continue;
    }
    double g = assignment_emissions(windows, series, assignment);
    if (h == 0) {
      // At zero flexibility the chosen slots are exactly the original
      // windows, which prices the baseline.
      result.baseline_g = g;
    }
    // Strict comparison keeps the smallest budget on ties, so constant
    // intensity stays at the original placement.
    if (!have_best || g < best_g) {
      have_best = true;
      best = std::move(assignment);
      best_g = g;
    }
  }

  result.best_g = best_g;
  result.reduction_pct =
      result.baseline_g > 0.0
          ? 100.0 * (result.baseline_g - result.best_g) / result.baseline_g
          : 0.0;
  result.overhead = interruption_overhead(windows, best);
  double makespan = makespan_s(trace);
  result.overhead_pct =
      makespan > 0.0 ? to_seconds(result.overhead) / makespan * 100.0 : 0.0;

  for (std::size_t i = 0; i < windows.size(); ++i) {
    WindowPlacement placement;
    placement.window = windows[i].index;
    placement.original_start = windows[i].window_start;
    placement.assigned_start = best.slot_starts[i];
    placement.intensity = series.values[best.slot_index[i]];
    placement.energy_kwh = windows[i].energy_kwh;
    placement.emissions_g = windows[i].energy_kwh * placement.intensity;
    result.placements.push_back(placement);
  }
  return result;
}

}  // namespace greenflow
