#pragma once

// Command execution behind the CLI binary. main() only parses flags into a
// RunConfig; run() does the work, so tests can drive commands end to end.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greenflow/ci.hpp"
#include "greenflow/trace.hpp"

namespace greenflow {

enum class Command { estimate, shift, interrupt, whatif, cluster_compare };

enum class OutputFormat { json, csv };

struct RunConfig {
  Command command = Command::estimate;

  std::string trace_path;                // estimate / shift / interrupt
  std::vector<std::string> trace_paths;  // cluster_compare
  std::string node_config_path;
  std::string ci_path;
  std::string ci_average_path;   // cluster_compare
  std::string ci_marginal_path;  // cluster_compare
  Signal signal = Signal::average;
  std::string zone;

  std::vector<int> flexibility_h;  // shift / interrupt, one result per value
  // When set, flexibility values are total window widths split evenly
  // around the original start (must be even); otherwise they extend the
  // window by the full amount on each side.
  bool flexibility_is_total_width = false;
  std::int64_t step_s = 3600;  // shift

  std::string profiles_path;  // whatif
  std::string start;          // whatif, ISO-8601

  std::optional<int> rebase_year;
  bool fill_gaps = false;
  bool include_reserved_memory = false;
  std::optional<double> pue_override;

  OutputFormat format = OutputFormat::json;
  std::string output_path;     // empty: stdout
  std::string plot_data_path;  // shift / interrupt / whatif only
};

struct NodeConfig {
  std::map<std::string, NodeProfile> nodes;
  double pue = 1.0;
  std::string default_node;
};

/// Loads the JSON node roster: {"nodes": [{node_id, cores, p_idle_w,
/// p_max_w, total_mem_gb, mem_coeff_w_per_gb?}], "pue"?, "default_node"?}.
NodeConfig load_node_config(const std::string& path);

/// Executes the command and writes the report to `out` (or the configured
/// output file). Throws on failure.
void execute(const RunConfig& config, std::ostream& out);

/// execute() with every error translated to a machine-readable JSON object
/// on `err`; returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

std::string read_file(const std::string& path);

}  // namespace greenflow
