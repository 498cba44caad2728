#include "greenflow/power.hpp"

#include <algorithm>
#include <set>

#include "greenflow/errors.hpp"
#include "greenflow/numeric.hpp"

namespace greenflow {

namespace {

constexpr double kBytesPerGb = 1024.0 * 1024.0 * 1024.0;

double kwh_from_w_ms(double watts, std::int64_t ms) {
  // W * ms -> J / 3.6e6 -> kWh
  return watts * static_cast<double>(ms) / 3.6e9;
}

}  // namespace

double utilization(const TaskRecord& task) {
  double u = task.cpu_usage_pct /
             (100.0 * static_cast<double>(task.cpus_allocated));
  return std::clamp(u, 0.0, 1.0);
}

TaskPower task_power_w(const TaskRecord& task, const NodeProfile& node) {
  double share = static_cast<double>(task.cpus_allocated) /
                 static_cast<double>(node.cores);
  double u = utilization(task);
  TaskPower power;
  power.cpu_w = share * (node.p_idle_w + u * (node.p_max_w - node.p_idle_w));
  power.mem_w = (static_cast<double>(task.memory_bytes) / kBytesPerGb) *
                node.mem_coeff_w_per_gb;
  return power;
}

EnergyBreakdown task_energy(const TaskRecord& task, const NodeProfile& node,
                            double pue) {
  TaskPower power = task_power_w(task, node);
  std::int64_t ms = task.duration().count();
  EnergyBreakdown energy;
  energy.cpu_kwh = kwh_from_w_ms(power.cpu_w, ms) * pue;
  energy.mem_kwh = kwh_from_w_ms(power.mem_w, ms) * pue;
  return energy;
}

EnergyBreakdown workflow_energy(const WorkflowTrace& trace, double pue) {
  KahanSum cpu, mem;
  for (const TaskRecord& task : trace.tasks) {
    EnergyBreakdown e = task_energy(task, trace.node_for(task), pue);
    cpu.add(e.cpu_kwh);
    mem.add(e.mem_kwh);
  }
  EnergyBreakdown total;
  total.cpu_kwh = cpu.value();
  total.mem_kwh = mem.value();
  return total;
}

double reserved_memory_energy_kwh(const WorkflowTrace& trace,
                                  const std::vector<NodeProfile>& nodes_in_use,
                                  double pue) {
  if (trace.tasks.empty()) throw EmptyTrace();
  double watts = 0.0;
  for (const NodeProfile& node : nodes_in_use)
    watts += node.total_mem_gb * node.mem_coeff_w_per_gb;
  return watts * makespan_s(trace) / 3.6e6 * pue;
}

double reserved_memory_energy_kwh(const WorkflowTrace& trace, double pue) {
  std::set<std::string> used;
  for (const TaskRecord& task : trace.tasks) used.insert(task.node_id);
  std::vector<NodeProfile> nodes;
  for (const std::string& id : used) nodes.push_back(trace.nodes.at(id));
  return reserved_memory_energy_kwh(trace, nodes, pue);
}

}  // namespace greenflow
