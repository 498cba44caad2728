#include "greenflow/footprint.hpp"

#include <cstdio>

#include "greenflow/errors.hpp"
#include "greenflow/numeric.hpp"

namespace greenflow {

namespace {

std::string offset_label(const std::string& base, Millis offset) {
  if (offset.count() == 0) return base;
  std::int64_t ms = offset.count();
  char sign = ms < 0 ? '-' : '+';
  std::int64_t abs_ms = ms < 0 ? -ms : ms;
  std::string amount = std::to_string(abs_ms / 1000);
  if (abs_ms % 1000 != 0) {
    char frac[8];
    std::snprintf(frac, sizeof frac, ".%03lld",
                  static_cast<long long>(abs_ms % 1000));
    amount += frac;
  }
  return base + " [offset " + sign + amount + "s]";
}

}  // namespace

double task_emissions(const TaskRecord& task, const EnergyBreakdown& energy,
                      const CISeries& series, Millis offset) {
  if (task.duration().count() == 0) return 0.0;
  double mean_ci =
      weighted_intensity(series, task.start + offset, task.end + offset);
  return energy.total_kwh() * mean_ci;
}

FootprintReport workflow_footprint(const WorkflowTrace& trace,
                                   const CISeries& series, Millis offset,
                                   const FootprintOptions& options) {
  if (trace.tasks.empty()) throw EmptyTrace();

  FootprintReport report;
  report.label = offset_label(trace.label, offset);
  report.signal = series.signal;
  report.zone = series.zone;
  report.offset = offset;

  KahanSum energy_total, emissions_total;
  for (const TaskRecord& task : trace.tasks) {
    PerTaskFootprint row;
    row.task_id = task.task_id;
    row.energy = task_energy(task, trace.node_for(task), options.pue);
    row.emissions_g = task_emissions(task, row.energy, series, offset);
    energy_total.add(row.energy.total_kwh());
    emissions_total.add(row.emissions_g);
    report.per_task.push_back(std::move(row));
  }
  report.total_energy_kwh = energy_total.value();
  report.total_emissions_g = emissions_total.value();

  if (options.include_reserved_memory) {
    double reserved = reserved_memory_energy_kwh(trace, options.pue);
    report.reserved_memory_kwh = reserved;
    auto [lo, hi] = span(trace);
    report.reserved_memory_emissions_g =
        (lo == hi) ? 0.0
                   : reserved * weighted_intensity(series, lo + offset,
                                                   hi + offset);
  }
  return report;
}

double footprint_total_g(const WorkflowTrace& trace, const CISeries& series,
                         Millis offset, double pue) {
  KahanSum emissions_total;
  for (const TaskRecord& task : trace.tasks) {
    EnergyBreakdown energy = task_energy(task, trace.node_for(task), pue);
    emissions_total.add(task_emissions(task, energy, series, offset));
  }
  return emissions_total.value();
}

}  // namespace greenflow
