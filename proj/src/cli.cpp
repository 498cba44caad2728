#include "greenflow/cli.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "greenflow/errors.hpp"
#include "greenflow/report.hpp"

namespace greenflow {

namespace {

std::string path_stem(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = (slash == std::string::npos) ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
  return base.empty() ? "trace" : base;
}

// Shifts every timestamp by the delta that moves the earliest start into the
// target year, preserving all intervals between tasks.
void rebase_trace(WorkflowTrace& trace, int target_year) {
  auto [lo, hi] = span(trace);
  (void)hi;
  Millis delta = rebase_year(lo, target_year) - lo;
  for (TaskRecord& task : trace.tasks) {
    task.start += delta;
    task.end += delta;
  }
}

CISeries load_ci(const RunConfig& config, const std::string& path,
                 Signal signal) {
  CIParseOptions options;
  options.fill_gaps = config.fill_gaps;
  return parse_ci(read_file(path), signal, config.zone, options);
}

WorkflowTrace load_trace(const RunConfig& config, const NodeConfig& nodes,
                         const std::string& path) {
  TraceParseOptions options;
  options.label = path_stem(path);
  options.default_node = nodes.default_node;
  WorkflowTrace trace = parse_trace(read_file(path), nodes.nodes, options);
  if (config.rebase_year) rebase_trace(trace, *config.rebase_year);
  return trace;
}

int effective_flexibility(const RunConfig& config, int value) {
  if (value < 0) throw ConfigError("flexibility must be non-negative");
  if (!config.flexibility_is_total_width) return value;
  if (value % 2 != 0)
    throw ConfigError(
        "total window widths must be even so they split around the start");
  return value / 2;
}

nlohmann::json config_json(const RunConfig& config, const NodeConfig& nodes,
                           double pue) {
  nlohmann::json doc = {
      {"zone", config.zone},
      {"signal", std::string(to_string(config.signal))},
      {"pue", pue},
      {"fill_gaps", config.fill_gaps},
      {"rebase_year",
       config.rebase_year ? nlohmann::json(*config.rebase_year)
                          : nlohmann::json(nullptr)},
  };
  nlohmann::json roster = nlohmann::json::array();
  for (const auto& [id, node] : nodes.nodes) roster.push_back(to_json(node));
  doc["nodes"] = std::move(roster);
  return doc;
}

void write_output(const RunConfig& config, std::ostream& fallback,
                  const std::string& payload) {
  if (config.output_path.empty()) {
    fallback << payload;
    return;
  }
  std::ofstream out(config.output_path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + config.output_path);
  out << payload;
  if (!out) throw IoError("failed writing output file: " + config.output_path);
}

void write_plot(const RunConfig& config, const std::string& payload) {
  if (config.plot_data_path.empty()) return;
  std::ofstream out(config.plot_data_path, std::ios::binary);
  if (!out) throw IoError("cannot open plot file: " + config.plot_data_path);
  out << payload;
  if (!out) throw IoError("failed writing plot file: " + config.plot_data_path);
}

void run_estimate(const RunConfig& config, const NodeConfig& nodes,
                  double pue, std::ostream& out) {
  WorkflowTrace trace = load_trace(config, nodes, config.trace_path);
  CISeries series = load_ci(config, config.ci_path, config.signal);

  FootprintOptions options;
  options.pue = pue;
  options.include_reserved_memory = config.include_reserved_memory;
  FootprintReport report = workflow_footprint(trace, series, Millis{0}, options);

  std::ostringstream payload;
  if (config.format == OutputFormat::csv) {
    write_footprint_csv(payload, report);
  } else {
    nlohmann::json doc = {{"command", "estimate"},
                          {"config", config_json(config, nodes, pue)},
                          {"report", to_json(report)}};
    doc["config"]["trace_path"] = config.trace_path;
    doc["config"]["ci_path"] = config.ci_path;
    doc["config"]["filled_gaps"] = static_cast<std::int64_t>(series.filled_gaps);
    write_json_fixed(payload, doc);
  }
  write_output(config, out, payload.str());
}

void run_shift(const RunConfig& config, const NodeConfig& nodes, double pue,
               std::ostream& out) {
  WorkflowTrace trace = load_trace(config, nodes, config.trace_path);
  CISeries series = load_ci(config, config.ci_path, config.signal);
  if (config.flexibility_h.empty())
    throw ConfigError("at least one flexibility value is required");

  std::vector<ShiftResult> results;
  for (int value : config.flexibility_h) {
    int flex = effective_flexibility(config, value);
    ShiftResult result =
        (config.command == Command::shift)
            ? shift_whole(trace, series, flex, config.step_s, pue)
            : shift_interrupted(trace, series, flex, pue);
    results.push_back(std::move(result));
  }

  std::ostringstream payload;
  if (config.format == OutputFormat::csv) {
    write_shift_csv(payload, results);
  } else {
    nlohmann::json array = nlohmann::json::array();
    for (const ShiftResult& result : results) array.push_back(to_json(result));
    nlohmann::json doc = {
        {"command",
         config.command == Command::shift ? "shift" : "interrupt"},
        {"config", config_json(config, nodes, pue)},
        {"results", std::move(array)}};
    doc["config"]["trace_path"] = config.trace_path;
    doc["config"]["ci_path"] = config.ci_path;
    doc["config"]["filled_gaps"] = static_cast<std::int64_t>(series.filled_gaps);
    if (config.command == Command::shift)
      doc["config"]["step_s"] = config.step_s;
    write_json_fixed(payload, doc);
  }
  write_output(config, out, payload.str());

  if (!config.plot_data_path.empty()) {
    std::ostringstream plot;
    write_shift_plot_csv(plot, results.back());
    write_plot(config, plot.str());
  }
}

void run_whatif(const RunConfig& config, std::ostream& out) {
  std::vector<TaskProfile> profiles =
      parse_profiles(read_file(config.profiles_path));
  CISeries series = load_ci(config, config.ci_path, config.signal);
  Instant start;
  try {
    start = parse_instant(config.start);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad --start value: ") + e.what());
  }

  std::vector<ProfileRanking> rankings =
      compare_profiles(profiles, start, series);

  std::ostringstream payload;
  if (config.format == OutputFormat::csv) {
    write_ranking_csv(payload, rankings);
  } else {
    nlohmann::json array = nlohmann::json::array();
    for (const ProfileRanking& ranking : rankings)
      array.push_back(to_json(ranking));
    nlohmann::json doc = {
        {"command", "whatif"},
        {"config",
         {{"zone", config.zone},
          {"signal", std::string(to_string(config.signal))},
          {"fill_gaps", config.fill_gaps},
          {"filled_gaps", static_cast<std::int64_t>(series.filled_gaps)},
          {"profiles_path", config.profiles_path},
          {"ci_path", config.ci_path},
          {"start", format_instant(start)}}},
        {"ranking", std::move(array)}};
    write_json_fixed(payload, doc);
  }
  write_output(config, out, payload.str());

  if (!config.plot_data_path.empty()) {
    std::ostringstream plot;
    write_whatif_plot_csv(plot, rankings, start, series);
    write_plot(config, plot.str());
  }
}

void run_cluster_compare(const RunConfig& config, const NodeConfig& nodes,
                         double pue, std::ostream& out) {
  if (config.trace_paths.empty())
    throw ConfigError("at least one trace is required");
  CISeries average = load_ci(config, config.ci_average_path, Signal::average);
  CISeries marginal = load_ci(config, config.ci_marginal_path, Signal::marginal);

  std::vector<ScaleRun> runs;
  for (const std::string& path : config.trace_paths) {
    ScaleRun run;
    run.trace = load_trace(config, nodes, path);
    std::set<std::string> distinct;
    for (const TaskRecord& task : run.trace.tasks) distinct.insert(task.node_id);
    run.node_count = static_cast<int>(distinct.size());
    runs.push_back(std::move(run));
  }
  std::vector<ScaleRow> rows = cluster_scale_report(runs, average, marginal, pue);

  std::ostringstream payload;
  if (config.format == OutputFormat::csv) {
    write_scale_csv(payload, rows);
  } else {
    nlohmann::json array = nlohmann::json::array();
    for (const ScaleRow& row : rows) array.push_back(to_json(row));
    nlohmann::json doc = {{"command", "cluster-compare"},
                          {"config", config_json(config, nodes, pue)},
                          {"rows", std::move(array)}};
    doc["config"]["ci_average_path"] = config.ci_average_path;
    doc["config"]["ci_marginal_path"] = config.ci_marginal_path;
    write_json_fixed(payload, doc);
  }
  write_output(config, out, payload.str());
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading file: " + path);
  return buffer.str();
}

NodeConfig load_node_config(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("node config " + path + ": " + e.what());
  }

  NodeConfig config;
  try {
    if (doc.contains("pue")) config.pue = doc["pue"].get<double>();
    if (doc.contains("default_node"))
      config.default_node = doc["default_node"].get<std::string>();
    if (!doc.contains("nodes") || !doc["nodes"].is_array() ||
        doc["nodes"].empty())
      throw ConfigError("node config needs a non-empty 'nodes' array");
    for (const nlohmann::json& entry : doc["nodes"]) {
      NodeProfile node;
      node.node_id = entry.at("node_id").get<std::string>();
      node.cores = entry.at("cores").get<int>();
      node.p_idle_w = entry.at("p_idle_w").get<double>();
      node.p_max_w = entry.at("p_max_w").get<double>();
      node.total_mem_gb = entry.at("total_mem_gb").get<double>();
      if (entry.contains("mem_coeff_w_per_gb"))
        node.mem_coeff_w_per_gb = entry["mem_coeff_w_per_gb"].get<double>();
      if (node.cores < 1)
        throw ConfigError("node '" + node.node_id + "': cores must be >= 1");
      if (!(node.p_idle_w > 0) || node.p_max_w < node.p_idle_w)
        throw ConfigError("node '" + node.node_id +
                          "': requires p_max_w >= p_idle_w > 0");
      if (node.mem_coeff_w_per_gb < 0)
        throw ConfigError("node '" + node.node_id +
                          "': mem_coeff_w_per_gb must be non-negative");
      if (node.total_mem_gb < 0)
        throw ConfigError("node '" + node.node_id +
                          "': total_mem_gb must be non-negative");
      if (!config.nodes.emplace(node.node_id, node).second)
        throw ConfigError("duplicate node_id '" + node.node_id + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("node config " + path + ": " + e.what());
  }
  if (config.pue < 1.0)
    throw ConfigError("pue must be at least 1.0");
  if (!config.default_node.empty() &&
      config.nodes.find(config.default_node) == config.nodes.end())
    throw UnknownNode(config.default_node);
  return config;
}

void execute(const RunConfig& config, std::ostream& out) {
  if (!config.plot_data_path.empty() && config.command != Command::shift &&
      config.command != Command::interrupt && config.command != Command::whatif)
    throw ConfigError("plot data is only available for shift, interrupt and whatif");

  if (config.command == Command::whatif) {
    // Profiles carry measured energy, so no node model is involved.
    run_whatif(config, out);
    return;
  }

  NodeConfig nodes = load_node_config(config.node_config_path);
  double pue = config.pue_override.value_or(nodes.pue);
  if (pue < 1.0) throw ConfigError("pue must be at least 1.0");

  switch (config.command) {
    case Command::estimate:
      run_estimate(config, nodes, pue, out);
      return;
    case Command::shift:
    case Command::interrupt:
      run_shift(config, nodes, pue, out);
      return;
    case Command::whatif:
      return;  // handled above
    case Command::cluster_compare:
      run_cluster_compare(config, nodes, pue, out);
      return;
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    execute(config, out);
    return 0;
  } catch (const Error& e) {
    nlohmann::json doc = {
        {"error", {{"kind", e.kind()}, {"message", std::string(e.what())}}}};
    write_json_fixed(err, doc);
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json doc = {
        {"error", {{"kind", "Error"}, {"message", std::string(e.what())}}}};
    write_json_fixed(err, doc);
    return 1;
  }
}

}  // namespace greenflow
