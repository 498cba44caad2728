#pragma once

// Operational carbon footprint of a trace against a carbon-intensity series.

#include <optional>
#include <string>
#include <vector>

#include "greenflow/ci.hpp"
#include "greenflow/power.hpp"
#include "greenflow/trace.hpp"

namespace greenflow {

struct PerTaskFootprint {
  std::string task_id;
  EnergyBreakdown energy;
  double emissions_g = 0.0;
};

struct FootprintReport {
  std::string label;
  Signal signal = Signal::average;
  std::string zone;
  Millis offset{};
  std::vector<PerTaskFootprint> per_task;
  double total_energy_kwh = 0.0;
  double total_emissions_g = 0.0;
  std::optional<double> reserved_memory_kwh;
  std::optional<double> reserved_memory_emissions_g;
};

/// Energy is spread uniformly over the task's (offset-shifted) duration:
/// emissions = total_kwh * weighted_intensity over [start+offset, end+offset).
/// Zero-duration tasks emit nothing.
double task_emissions(const TaskRecord& task, const EnergyBreakdown& energy,
                      const CISeries& series, Millis offset = {});

struct FootprintOptions {
  double pue = 1.0;
  bool include_reserved_memory = false;
};

/// The workflow footprint with every task shifted by `offset`. Totals use
/// compensated summation; the offset is recorded in the report label.
FootprintReport workflow_footprint(const WorkflowTrace& trace,
                                   const CISeries& series, Millis offset = {},
                                   const FootprintOptions& options = {});

/// Total emissions only, on exactly the same summation path as
/// workflow_footprint (the two agree bit for bit).
double footprint_total_g(const WorkflowTrace& trace, const CISeries& series,
                         Millis offset = {}, double pue = 1.0);

}  // namespace greenflow
