// Command-line front end: flag parsing only, all work happens in run().

#include <CLI/CLI.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "greenflow/cli.hpp"
#include "greenflow/errors.hpp"

namespace {

void add_node_option(CLI::App* cmd, greenflow::RunConfig& config) {
  cmd->add_option("--nodes", config.node_config_path,
                  "Node roster JSON (cores, power model, memory)")
      ->envname("GREENFLOW_NODES")
      ->required();
}

void add_ci_options(CLI::App* cmd, greenflow::RunConfig& config,
                    std::string& signal) {
  cmd->add_option("--ci", config.ci_path, "Carbon-intensity CSV")->required();
  cmd->add_option("--signal", signal, "Intensity signal: average or marginal")
      ->required();
  cmd->add_option("--zone", config.zone, "Grid zone label")->required();
  cmd->add_flag("--fill-gaps", config.fill_gaps,
                "Fill gaps in the series by carrying the last value forward");
}

void add_common_options(CLI::App* cmd, greenflow::RunConfig& config,
                        std::string& format) {
  cmd->add_option("--rebase-year", config.rebase_year,
                  "Shift the trace so its first task starts in this year");
  cmd->add_option("--format", format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--output", config.output_path,
                  "Write the report here instead of stdout");
  cmd->add_option("--pue", config.pue_override,
                  "Facility PUE override (>= 1.0)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Operational carbon footprints and carbon-aware what-ifs for "
      "workflow execution traces"};
  app.require_subcommand(1);

  greenflow::RunConfig config;
  std::string signal = "average";
  std::string format = "json";

  CLI::App* estimate = app.add_subcommand(
      "estimate", "Energy and emissions of a trace as it ran");
  estimate->add_option("--trace", config.trace_path, "Execution trace (TSV)")
      ->required();
  add_node_option(estimate, config);
  add_ci_options(estimate, config, signal);
  add_common_options(estimate, config, format);
  estimate->add_flag("--reserved-memory", config.include_reserved_memory,
                     "Also report the nodes' reserved-memory energy");
  estimate->callback([&] { config.command = greenflow::Command::estimate; });

  CLI::App* shift = app.add_subcommand(
      "shift", "Best whole-workflow temporal shift within a flexibility window");
  shift->add_option("--trace", config.trace_path, "Execution trace (TSV)")
      ->required();
  add_node_option(shift, config);
  add_ci_options(shift, config, signal);
  add_common_options(shift, config, format);
  shift->add_option("--flexibility-h", config.flexibility_h,
                    "Flexibility in hours (repeatable; one result per value)")
      ->required();
  shift->add_flag("--flex-total", config.flexibility_is_total_width,
                  "Treat flexibility values as total window widths");
  shift->add_option("--step-s", config.step_s, "Offset step in seconds");
  shift->add_option("--plot-data", config.plot_data_path,
                    "Write per-offset plot data CSV here");
  shift->callback([&] { config.command = greenflow::Command::shift; });

  CLI::App* interrupt = app.add_subcommand(
      "interrupt", "Interrupted execution mapped to the lowest-intensity slots");
  interrupt->add_option("--trace", config.trace_path, "Execution trace (TSV)")
      ->required();
  add_node_option(interrupt, config);
  add_ci_options(interrupt, config, signal);
  add_common_options(interrupt, config, format);
  interrupt
      ->add_option("--flexibility-h", config.flexibility_h,
                   "Flexibility in hours (repeatable; one result per value)")
      ->required();
  interrupt->add_flag("--flex-total", config.flexibility_is_total_width,
                      "Treat flexibility values as total window widths");
  interrupt->add_option("--plot-data", config.plot_data_path,
                        "Write window-assignment plot data CSV here");
  interrupt->callback([&] { config.command = greenflow::Command::interrupt; });

  CLI::App* whatif = app.add_subcommand(
      "whatif", "Rank device or frequency profiles for a given start time");
  whatif->add_option("--profiles", config.profiles_path,
                     "Profile CSV: label,runtime_s,energy_kwh,source")
      ->required();
  whatif->add_option("--start", config.start, "Execution start (ISO-8601)")
      ->required();
  add_ci_options(whatif, config, signal);
  whatif->add_option("--format", format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  whatif->add_option("--output", config.output_path,
                     "Write the report here instead of stdout");
  whatif->add_option("--plot-data", config.plot_data_path,
                     "Write per-slot plot data CSV here");
  whatif->callback([&] { config.command = greenflow::Command::whatif; });

  CLI::App* cluster = app.add_subcommand(
      "cluster-compare", "Energy and emissions across cluster sizes");
  cluster
      ->add_option("--trace", config.trace_paths,
                   "Execution traces, one per cluster size (repeatable)")
      ->required();
  add_node_option(cluster, config);
  cluster->add_option("--ci-average", config.ci_average_path,
                      "Average-signal carbon-intensity CSV")
      ->required();
  cluster->add_option("--ci-marginal", config.ci_marginal_path,
                      "Marginal-signal carbon-intensity CSV")
      ->required();
  cluster->add_option("--zone", config.zone, "Grid zone label")->required();
  cluster->add_flag("--fill-gaps", config.fill_gaps,
                    "Fill gaps in the series by carrying the last value forward");
  add_common_options(cluster, config, format);
  cluster->callback(
      [&] { config.command = greenflow::Command::cluster_compare; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "{\n  \"error\": {\n    \"kind\": \"ConfigError\",\n"
              << "    \"message\": " << nlohmann::json(e.what()).dump()
              << "\n  }\n}\n";
    return 1;
  }

  try {
    config.signal = greenflow::signal_from_string(signal);
    config.format = format == "csv" ? greenflow::OutputFormat::csv
                                    : greenflow::OutputFormat::json;
  } catch (const greenflow::Error& e) {
    std::cerr << "{\n  \"error\": {\n    \"kind\": \"" << e.kind()
              << "\",\n    \"message\": " << nlohmann::json(e.what()).dump()
              << "\n  }\n}\n";
    return 1;
  }

  return greenflow::run(config, std::cout, std::cerr);
}
