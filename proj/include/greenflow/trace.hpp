#pragma once

// Workflow execution traces: task records, node power profiles and the
// parser for Nextflow-style tab-separated trace files.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "greenflow/time.hpp"

namespace greenflow {

inline constexpr double kDefaultMemCoeffWPerGb = 0.3725;

struct NodeProfile {
  std::string node_id;
  int cores = 1;
  double p_idle_w = 0.0;
  double p_max_w = 0.0;
  double mem_coeff_w_per_gb = kDefaultMemCoeffWPerGb;
  double total_mem_gb = 0.0;
};

struct TaskRecord {
  std::string task_id;
  std::string name;
  Instant start{};
  Instant end{};  // exclusive
  int cpus_allocated = 1;
  double cpu_usage_pct = 0.0;  // Nextflow %cpu scale: up to 100 * cpus_allocated
  std::uint64_t memory_bytes = 0;
  std::string node_id;

  Millis duration() const { return end - start; }
};

struct WorkflowTrace {
  std::string label;
  std::vector<TaskRecord> tasks;
  std::map<std::string, NodeProfile> nodes;  // roster, keyed by node_id

  const NodeProfile& node_for(const TaskRecord& task) const;
};

/// Checks every structural invariant (non-empty, end >= start, cpus within
/// node cores, memory within node capacity, known nodes) and throws the
/// matching error. parse_trace always returns a validated trace; call this
/// for traces assembled by hand.
void validate(const WorkflowTrace& trace);

struct TraceParseOptions {
  std::string label = "trace";
  // Node assigned to rows without a host column. May be empty when the
  // roster holds exactly one node.
  std::string default_node;
};

/// Parses a tab-separated trace with a header row. Required columns:
/// name (or process), start, complete, cpus, %cpu and one of
/// peak_rss / rss / memory. Optional: task_id and a host column
/// (hostname / machine / node / node_id). Timestamps may be epoch
/// milliseconds or ISO-8601; memory accepts raw bytes or Nextflow-style
/// binary units ("2 GB" = 2 * 2^30 bytes).
WorkflowTrace parse_trace(std::string_view content,
                          const std::map<std::string, NodeProfile>& roster,
                          const TraceParseOptions& options = {});

/// Canonical tab-separated form of a trace; parse_trace(serialize_trace(t))
/// reproduces t exactly.
std::string serialize_trace(const WorkflowTrace& trace);

/// [earliest start, latest end) over all tasks.
std::pair<Instant, Instant> span(const WorkflowTrace& trace);

/// Latest end minus earliest start, in seconds.
double makespan_s(const WorkflowTrace& trace);

}  // namespace greenflow
