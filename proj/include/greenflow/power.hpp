#pragma once

// Linear node power model and task/workflow energy integration.

#include "greenflow/trace.hpp"

namespace greenflow {

struct TaskPower {
  double cpu_w = 0.0;
  double mem_w = 0.0;
  double total_w() const { return cpu_w + mem_w; }
};

struct EnergyBreakdown {
  double cpu_kwh = 0.0;
  double mem_kwh = 0.0;
  double total_kwh() const { return cpu_kwh + mem_kwh; }
};

/// cpu_usage_pct / (100 * cpus_allocated), clamped to [0, 1].
double utilization(const TaskRecord& task);

/// cpu_w = (cpus_allocated / cores) * (p_idle + u * (p_max - p_idle)),
/// mem_w = (memory_bytes / 2^30) * mem_coeff_w_per_gb.
TaskPower task_power_w(const TaskRecord& task, const NodeProfile& node);

/// Power integrated over the task duration, scaled by the facility PUE.
EnergyBreakdown task_energy(const TaskRecord& task, const NodeProfile& node,
                            double pue = 1.0);

/// Component-wise compensated sum of task_energy over the trace.
EnergyBreakdown workflow_energy(const WorkflowTrace& trace, double pue = 1.0);

/// Energy that holding the nodes' full RAM for the makespan would draw:
/// sum over nodes of total_mem_gb * mem_coeff_w_per_gb, integrated over the
/// makespan. Reported separately from task energy and never included in
/// shifting comparisons.
double reserved_memory_energy_kwh(const WorkflowTrace& trace,
                                  const std::vector<NodeProfile>& nodes_in_use,
                                  double pue = 1.0);

/// Same, over the nodes actually referenced by the trace's tasks.
double reserved_memory_energy_kwh(const WorkflowTrace& trace, double pue = 1.0);

}  // namespace greenflow
