#include <doctest/doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "greenflow/cli.hpp"
#include "greenflow/errors.hpp"
#include "greenflow/footprint.hpp"
#include "helpers.hpp"

using namespace greenflow;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::ofstream out(name, std::ios::binary);
  REQUIRE(out.good());
  out << content;
  out.close();
  return name;
}

RunConfig base_config(Command command) {
  RunConfig config;
  config.command = command;
  config.node_config_path = testutil::fixture_path("nodes.json");
  config.zone = "ZZ";
  return config;
}

std::string run_to_string(const RunConfig& config) {
  std::ostringstream out;
  execute(config, out);
  return out.str();
}

const std::string kSoloTrace =
    "name\tstart\tcomplete\tcpus\t%cpu\tpeak_rss\thostname\n"
    "solo\t2023-05-01T10:00:00Z\t2023-05-01T11:00:00Z\t4\t380\t2 GB\tn1\n";

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

}  // namespace

TEST_CASE("estimate reports the mixed trace end to end") {
  RunConfig config = base_config(Command::estimate);
  config.trace_path = testutil::fixture_path("trace_mixed.txt");
  config.ci_path = testutil::fixture_path("ci_constant_24h.csv");

  json doc = json::parse(run_to_string(config));
  CHECK(doc["command"] == "estimate");
  CHECK(doc["config"]["zone"] == "ZZ");
  CHECK(doc["config"]["signal"] == "average");
  CHECK(doc["config"]["pue"] == 1.0);
  CHECK(doc["config"]["filled_gaps"] == 0);
  CHECK(doc["config"]["nodes"].size() == 1);

  const json& report = doc["report"];
  CHECK(report["label"] == "trace_mixed");
  CHECK(report["offset_s"] == 0.0);
  REQUIRE(report["per_task"].size() == 3);

  WorkflowTrace trace = parse_trace(testutil::read_fixture("trace_mixed.txt"),
                                    {{"n1", testutil::test_node()}});
  CISeries series = parse_ci(testutil::read_fixture("ci_constant_24h.csv"),
                             Signal::average, "ZZ");
  FootprintReport expected = workflow_footprint(trace, series);
  CHECK(report["total_energy_kwh"].get<double>() ==
        doctest::Approx(expected.total_energy_kwh).epsilon(1e-5));
  CHECK(report["total_emissions_g"].get<double>() ==
        doctest::Approx(expected.total_emissions_g).epsilon(1e-5));
  for (const json& row : report["per_task"])
    CHECK(row["emissions_g"].get<double>() ==
          doctest::Approx(row["total_kwh"].get<double>() * 100.0)
              .epsilon(1e-4));
  CHECK(!report.contains("reserved_memory_kwh"));
}

TEST_CASE("estimate can price reserved memory") {
  RunConfig config = base_config(Command::estimate);
  config.trace_path = testutil::fixture_path("trace_mixed.txt");
  config.ci_path = testutil::fixture_path("ci_constant_24h.csv");
  config.include_reserved_memory = true;

  json doc = json::parse(run_to_string(config));
  CHECK(doc["report"]["reserved_memory_kwh"].get<double>() ==
        doctest::Approx(0.1152).epsilon(1e-5));
  CHECK(doc["report"]["reserved_memory_emissions_g"].get<double>() ==
        doctest::Approx(11.52).epsilon(1e-5));
}

TEST_CASE("estimate output is byte-identical across runs") {
  RunConfig config = base_config(Command::estimate);
  config.trace_path = testutil::fixture_path("trace_mixed.txt");
  config.ci_path = testutil::fixture_path("ci_dip.csv");
  CHECK(run_to_string(config) == run_to_string(config));
}

TEST_CASE("estimate writes to a file when asked") {
  RunConfig config = base_config(Command::estimate);
  config.trace_path = testutil::fixture_path("trace_mixed.txt");
  config.ci_path = testutil::fixture_path("ci_constant_24h.csv");
  config.output_path = "cli_estimate_out.json";

  std::ostringstream out;
  execute(config, out);
  CHECK(out.str().empty());
  json doc = json::parse(read_file(config.output_path));
  CHECK(doc["command"] == "estimate");
  std::remove(config.output_path.c_str());
}

TEST_CASE("estimate fills CI gaps only when allowed") {
  write_temp("cli_gap_trace.txt",
             "name\tstart\tcomplete\tcpus\t%cpu\tpeak_rss\thostname\n"
             "g\t2023-05-01T01:00:00Z\t2023-05-01T02:30:00Z\t4\t380\t2 "
             "GB\tn1\n");
  RunConfig config = base_config(Command::estimate);
  config.trace_path = "cli_gap_trace.txt";
  config.ci_path = testutil::fixture_path("ci_gap.csv");

  CHECK_THROWS_AS(run_to_string(config), NonUniformInterval);

  config.fill_gaps = true;
  json doc = json::parse(run_to_string(config));
  CHECK(doc["config"]["filled_gaps"] == 1);
  // The filled slot carries 120 forward, so the whole run sits at 120.
  CHECK(doc["report"]["total_emissions_g"].get<double>() ==
        doctest::Approx(doc["report"]["total_energy_kwh"].get<double>() * 120.0)
            .epsilon(1e-4));
  std::remove("cli_gap_trace.txt");
}

TEST_CASE("shift finds the dip and writes the curve") {
  write_temp("solo.txt", kSoloTrace);
  RunConfig config = base_config(Command::shift);
  config.trace_path = "solo.txt";
  config.ci_path = testutil::fixture_path("ci_dip.csv");
  config.flexibility_h = {24};
  config.plot_data_path = "cli_shift_plot.csv";

  json doc = json::parse(run_to_string(config));
  CHECK(doc["command"] == "shift");
  CHECK(doc["config"]["step_s"] == 3600);
  REQUIRE(doc["results"].size() == 1);
  const json& result = doc["results"][0];
  CHECK(result["strategy"] == "whole");
  CHECK(result["flexibility_h"] == 24);
  CHECK(result["chosen_offset_s"] == 7200);
  CHECK(result["offsets_evaluated"] == 49);
  CHECK(result["offsets_skipped"] == 0);
  CHECK(result["reduction_pct"].get<double>() ==
        doctest::Approx(250.0 / 3.0).epsilon(1e-6));
  CHECK(result["overhead_s"] == 0.0);

  std::string plot = read_file("cli_shift_plot.csv");
  CHECK(count_lines(plot) == 50);
  CHECK(plot.rfind("offset_s,footprint_g,feasible\n", 0) == 0);
  std::remove("solo.txt");
  std::remove("cli_shift_plot.csv");
}

TEST_CASE("shift accepts several flexibility values") {
  write_temp("solo2.txt", kSoloTrace);
  RunConfig config = base_config(Command::shift);
  config.trace_path = "solo2.txt";
  config.ci_path = testutil::fixture_path("ci_dip.csv");
  config.flexibility_h = {0, 1, 2};

  json doc = json::parse(run_to_string(config));
  REQUIRE(doc["results"].size() == 3);
  double previous = -1.0;
  for (const json& result : doc["results"]) {
    double reduction = result["reduction_pct"].get<double>();
    CHECK(reduction >= previous);
    previous = reduction;
  }
  CHECK(doc["results"][0]["reduction_pct"] == 0.0);
  CHECK(doc["results"][2]["chosen_offset_s"] == 7200);
  std::remove("solo2.txt");
}

TEST_CASE("shift treats total widths by halving them") {
  write_temp("solo3.txt", kSoloTrace);
  RunConfig config = base_config(Command::shift);
  config.trace_path = "solo3.txt";
  config.ci_path = testutil::fixture_path("ci_dip.csv");
  config.flexibility_is_total_width = true;

  SUBCASE("even widths work") {
    config.flexibility_h = {4};
    json doc = json::parse(run_to_string(config));
    REQUIRE(doc["results"].size() == 1);
    CHECK(doc["results"][0]["flexibility_h"] == 2);
    CHECK(doc["results"][0]["chosen_offset_s"] == 7200);
  }
  SUBCASE("odd widths are rejected") {
    config.flexibility_h = {3};
    CHECK_THROWS_AS(run_to_string(config), ConfigError);
  }
  std::remove("solo3.txt");
}

TEST_CASE("interrupt maps windows and writes placements") {
  RunConfig config = base_config(Command::interrupt);
  config.trace_path = testutil::fixture_path("trace_mixed.txt");
  config.ci_path = testutil::fixture_path("ci_dips.csv");
  config.flexibility_h = {24};
  config.plot_data_path = "cli_interrupt_plot.csv";

  json doc = json::parse(run_to_string(config));
  CHECK(doc["command"] == "interrupt");
  REQUIRE(doc["results"].size() == 1);
  const json& result = doc["results"][0];
  CHECK(result["strategy"] == "interrupted");
  REQUIRE(result["assignment"].size() == 3);
  CHECK(result["assignment"][0]["assigned_start"] == "2023-04-30T20:00:00Z");
  CHECK(result["assignment"][1]["assigned_start"] == "2023-04-30T21:00:00Z");
  CHECK(result["assignment"][2]["assigned_start"] == "2023-05-01T12:00:00Z");
  CHECK(result["overhead_s"] == 2700.0);

  double re_sum = 0.0;
  for (const json& p : result["assignment"])
    re_sum += p["emissions_g"].get<double>();
  CHECK(result["best_g"].get<double>() ==
        doctest::Approx(re_sum).epsilon(1e-5));

  std::string plot = read_file("cli_interrupt_plot.csv");
  CHECK(count_lines(plot) == 4);
  std::remove("cli_interrupt_plot.csv");
}

TEST_CASE("whatif ranks profiles without a node config") {
  RunConfig config;
  config.command = Command::whatif;
  config.zone = "ZZ";
  config.profiles_path = testutil::fixture_path("profiles.csv");
  config.ci_path = testutil::fixture_path("ci_constant_24h.csv");
  config.start = "2023-05-01T06:00:00Z";
  config.plot_data_path = "cli_whatif_plot.csv";

  json doc = json::parse(run_to_string(config));
  CHECK(doc["command"] == "whatif");
  REQUIRE(doc["ranking"].size() == 2);
  CHECK(doc["ranking"][0]["label"] == "edge");
  CHECK(doc["ranking"][0]["emissions_g"].get<double>() ==
        doctest::Approx(2.0).epsilon(1e-6));
  CHECK(doc["ranking"][1]["label"] == "cluster");
  CHECK(doc["ranking"][1]["emissions_g"].get<double>() ==
        doctest::Approx(7.0).epsilon(1e-6));

  // 06:00 to 06:50 touches a single slot.
  std::string plot = read_file("cli_whatif_plot.csv");
  CHECK(count_lines(plot) == 2);
  CHECK(plot.rfind("slot_start,intensity_gco2e_per_kwh,edge,cluster\n", 0) == 0);
  std::remove("cli_whatif_plot.csv");
}

TEST_CASE("whatif rejects a bad start instant") {
  RunConfig config;
  config.command = Command::whatif;
  config.zone = "ZZ";
  config.profiles_path = testutil::fixture_path("profiles.csv");
  config.ci_path = testutil::fixture_path("ci_constant_24h.csv");
  config.start = "yesterday";
  CHECK_THROWS_AS(run_to_string(config), ConfigError);
}

TEST_CASE("cluster-compare prices each run under both signals") {
  write_temp("solo4.txt", kSoloTrace);
  RunConfig config = base_config(Command::cluster_compare);
  config.trace_paths = {testutil::fixture_path("trace_mixed.txt"), "solo4.txt"};
  config.ci_average_path = testutil::fixture_path("ci_constant_24h.csv");
  config.ci_marginal_path = testutil::fixture_path("ci_constant_24h.csv");

  json doc = json::parse(run_to_string(config));
  CHECK(doc["command"] == "cluster-compare");
  REQUIRE(doc["rows"].size() == 2);
  // Both traces use one node; the tie breaks on the label.
  CHECK(doc["rows"][0]["label"] == "solo4");
  CHECK(doc["rows"][1]["label"] == "trace_mixed");
  for (const json& row : doc["rows"]) {
    CHECK(row["node_count"] == 1);
    CHECK(row["avg_emissions_gco2e"].get<double>() ==
          doctest::Approx(row["energy_kwh"].get<double>() * 100.0)
              .epsilon(1e-4));
    CHECK(row["avg_emissions_gco2e"] == row["marg_emissions_gco2e"]);
  }
  CHECK(doc["rows"][0]["makespan_h"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-6));
  std::remove("solo4.txt");
}

TEST_CASE("rebasing the trace year keeps the footprint under matching CI") {
  std::string ci_2021;
  ci_2021 += "timestamp_utc,ci_gco2e_per_kwh\n";
  for (int h = 0; h < 24; ++h) {
    char line[64];
    std::snprintf(line, sizeof line, "2021-05-01T%02d:00:00Z,100.0\n", h);
    ci_2021 += line;
  }
  write_temp("cli_ci_2021.csv", ci_2021);

  RunConfig rebased = base_config(Command::estimate);
  rebased.trace_path = testutil::fixture_path("trace_mixed.txt");
  rebased.ci_path = "cli_ci_2021.csv";
  rebased.rebase_year = 2021;

  RunConfig original = base_config(Command::estimate);
  original.trace_path = testutil::fixture_path("trace_mixed.txt");
  original.ci_path = testutil::fixture_path("ci_constant_24h.csv");

  json a = json::parse(run_to_string(rebased));
  json b = json::parse(run_to_string(original));
  CHECK(a["config"]["rebase_year"] == 2021);
  CHECK(b["config"]["rebase_year"].is_null());
  CHECK(a["report"]["total_emissions_g"] == b["report"]["total_emissions_g"]);

  RunConfig unrebased = base_config(Command::estimate);
  unrebased.trace_path = testutil::fixture_path("trace_mixed.txt");
  unrebased.ci_path = "cli_ci_2021.csv";
  CHECK_THROWS_AS(run_to_string(unrebased), OutOfRange);
  std::remove("cli_ci_2021.csv");
}

TEST_CASE("csv output format") {
  RunConfig config = base_config(Command::estimate);
  config.trace_path = testutil::fixture_path("trace_mixed.txt");
  config.ci_path = testutil::fixture_path("ci_constant_24h.csv");
  config.format = OutputFormat::csv;

  std::string csv = run_to_string(config);
  CHECK(csv.rfind("task_id,cpu_kwh,mem_kwh,total_kwh,emissions_g\n", 0) == 0);
  CHECK(count_lines(csv) == 4);

  SUBCASE("shift csv carries one row per flexibility") {
    write_temp("solo5.txt", kSoloTrace);
    RunConfig shift_config = base_config(Command::shift);
    shift_config.trace_path = "solo5.txt";
    shift_config.ci_path = testutil::fixture_path("ci_dip.csv");
    shift_config.flexibility_h = {0, 24};
    shift_config.format = OutputFormat::csv;
    std::string shift_csv = run_to_string(shift_config);
    CHECK(count_lines(shift_csv) == 3);
    CHECK(shift_csv.rfind("strategy,", 0) == 0);
    std::remove("solo5.txt");
  }
}

TEST_CASE("pue override beats the node config") {
  RunConfig config = base_config(Command::estimate);
  config.trace_path = testutil::fixture_path("trace_mixed.txt");
  config.ci_path = testutil::fixture_path("ci_constant_24h.csv");
  json plain = json::parse(run_to_string(config));

  config.pue_override = 1.5;
  json scaled = json::parse(run_to_string(config));
  CHECK(scaled["config"]["pue"] == 1.5);
  CHECK(scaled["report"]["total_energy_kwh"].get<double>() ==
        doctest::Approx(1.5 * plain["report"]["total_energy_kwh"].get<double>())
            .epsilon(1e-4));

  config.pue_override = 0.5;
  CHECK_THROWS_AS(run_to_string(config), ConfigError);
}

TEST_CASE("run translates failures into JSON errors") {
  RunConfig config = base_config(Command::estimate);
  config.trace_path = "does_not_exist.txt";
  config.ci_path = testutil::fixture_path("ci_constant_24h.csv");

  std::ostringstream out, err;
  int code = run(config, out, err);
  CHECK(code == 1);
  CHECK(out.str().empty());
  json doc = json::parse(err.str());
  CHECK(doc["error"]["kind"] == "IoError");
  CHECK(!doc["error"]["message"].get<std::string>().empty());

  SUBCASE("success returns zero") {
    RunConfig ok = base_config(Command::estimate);
    ok.trace_path = testutil::fixture_path("trace_mixed.txt");
    ok.ci_path = testutil::fixture_path("ci_constant_24h.csv");
    std::ostringstream out2, err2;
    CHECK(run(ok, out2, err2) == 0);
    CHECK(err2.str().empty());
  }
}

TEST_CASE("load_node_config validates the roster") {
  NodeConfig config = load_node_config(testutil::fixture_path("nodes.json"));
  CHECK(config.pue == 1.0);
  CHECK(config.default_node == "n1");
  REQUIRE(config.nodes.count("n1") == 1);
  CHECK(config.nodes["n1"].cores == 16);
  CHECK(config.nodes["n1"].total_mem_gb == 128.0);

  SUBCASE("rejects malformed configs") {
    write_temp("bad_nodes1.json", "{\"nodes\": []}");
    CHECK_THROWS_AS(load_node_config("bad_nodes1.json"), ConfigError);
    write_temp("bad_nodes2.json",
               "{\"nodes\": [{\"node_id\": \"a\", \"cores\": 0, \"p_idle_w\": "
               "1, \"p_max_w\": 2, \"total_mem_gb\": 4}]}");
    CHECK_THROWS_AS(load_node_config("bad_nodes2.json"), ConfigError);
    write_temp("bad_nodes3.json",
               "{\"default_node\": \"ghost\", \"nodes\": [{\"node_id\": "
               "\"a\", \"cores\": 2, \"p_idle_w\": 1, \"p_max_w\": 2, "
               "\"total_mem_gb\": 4}]}");
    CHECK_THROWS_AS(load_node_config("bad_nodes3.json"), UnknownNode);
    write_temp("bad_nodes4.json", "not json at all");
    CHECK_THROWS_AS(load_node_config("bad_nodes4.json"), ConfigError);
    for (const char* name :
         {"bad_nodes1.json", "bad_nodes2.json", "bad_nodes3.json",
          "bad_nodes4.json"})
      std::remove(name);
  }
}

TEST_CASE("plot data is refused outside shift, interrupt and whatif") {
  RunConfig config = base_config(Command::estimate);
  config.trace_path = testutil::fixture_path("trace_mixed.txt");
  config.ci_path = testutil::fixture_path("ci_constant_24h.csv");
  config.plot_data_path = "nope.csv";
  CHECK_THROWS_AS(run_to_string(config), ConfigError);
}
