#include <doctest/doctest.h>

#include <cmath>

#include "greenflow/errors.hpp"
#include "greenflow/power.hpp"
#include "helpers.hpp"

using namespace greenflow;

// 16-core node, 60 W idle, 200 W max, 0.4 W/GB.
// Task: 4 cpus at 380 %cpu with 2 GB resident.

TEST_CASE("task_power_w matches the hand-computed example") {
  NodeProfile node = testutil::test_node();
  Instant base = parse_instant("2023-05-01T10:00:00Z");
  TaskRecord task =
      testutil::make_task("a", base, base + Millis{3600 * 1000});

  // u = 380 / 400 = 0.95, cpu = (4/16) * (60 + 0.95 * 140) = 48.25 W
  // mem = 2 * 0.4 = 0.8 W
  TaskPower power = task_power_w(task, node);
  CHECK(power.cpu_w == doctest::Approx(48.25).epsilon(1e-12));
  CHECK(power.mem_w == doctest::Approx(0.8).epsilon(1e-12));

  SUBCASE("full utilization pins cpu power at the node share of p_max") {
    task.cpus_allocated = 8;
    task.cpu_usage_pct = 800.0;
    CHECK(task_power_w(task, node).cpu_w == doctest::Approx(100.0));
  }
  SUBCASE("idle pins cpu power at the node share of p_idle") {
    task.cpu_usage_pct = 0.0;
    CHECK(task_power_w(task, node).cpu_w ==
          doctest::Approx(4.0 / 16.0 * 60.0));
  }
  SUBCASE("utilization above 100 percent clamps") {
    task.cpu_usage_pct = 10000.0;
    CHECK(utilization(task) == 1.0);
    CHECK(task_power_w(task, node).cpu_w == doctest::Approx(4.0 / 16.0 * 200.0));
  }
}

TEST_CASE("task_energy integrates power over the duration") {
  NodeProfile node = testutil::test_node();
  node.cores = 8;
  node.p_idle_w = 40.0;
  node.p_max_w = 200.0;
  node.mem_coeff_w_per_gb = 0.5;
  Instant base = parse_instant("2023-05-01T10:00:00Z");

  // 2 cpus @ 100% of 2 cores, 8 GB, 2 h:
  // cpu = (2/8) * (40 + 1.0 * 160) = 50 ... use %cpu = 200.
  TaskRecord task = testutil::make_task("a", base, base + Millis{7200 * 1000},
                                        2, 200.0, 8ULL << 30);
  EnergyBreakdown energy = task_energy(task, node);
  CHECK(energy.cpu_kwh == doctest::Approx(0.100).epsilon(1e-12));
  CHECK(energy.mem_kwh == doctest::Approx(0.008).epsilon(1e-12));
  CHECK(energy.total_kwh() == doctest::Approx(0.108).epsilon(1e-12));

  SUBCASE("pue scales both components") {
    EnergyBreakdown scaled = task_energy(task, node, 1.5);
    CHECK(scaled.cpu_kwh == doctest::Approx(0.150).epsilon(1e-12));
    CHECK(scaled.mem_kwh == doctest::Approx(0.012).epsilon(1e-12));
  }
  SUBCASE("zero duration draws no energy") {
    task.end = task.start;
    EnergyBreakdown zero = task_energy(task, node);
    CHECK(zero.cpu_kwh == 0.0);
    CHECK(zero.mem_kwh == 0.0);
  }
}

TEST_CASE("energy breakdown total always equals the sum of its parts") {
  testutil::Rng rng(53);
  NodeProfile node = testutil::test_node();
  Instant base = parse_instant("2023-05-01T00:00:00Z");
  for (int i = 0; i < 100; ++i) {
    TaskRecord task = testutil::make_task(
        "t", base, base + Millis{rng.pick(0, 86400) * 1000LL},
        rng.pick(1, 16), rng.real(0, 1600), static_cast<std::uint64_t>(rng.pick(0, 1 << 30)) << 6);
    EnergyBreakdown energy = task_energy(task, node);
    double total = energy.total_kwh();
    CHECK(std::abs(total - (energy.cpu_kwh + energy.mem_kwh)) <=
          1e-12 * std::max(1.0, total));
  }
}

TEST_CASE("workflow_energy equals the sum over tasks") {
  testutil::Rng rng(59);
  Instant base = parse_instant("2023-05-01T00:00:00Z");
  std::vector<TaskRecord> tasks;
  for (int i = 0; i < 10; ++i) {
    auto start = base + Millis{rng.pick(0, 3600) * 1000LL};
    tasks.push_back(testutil::make_task("t" + std::to_string(i), start,
                                        start + Millis{rng.pick(1, 7200) * 1000LL},
                                        rng.pick(1, 16), rng.real(0, 800),
                                        1ULL << 30));
  }
  WorkflowTrace trace = testutil::make_trace(tasks);
  EnergyBreakdown total = workflow_energy(trace);
  double cpu = 0.0, mem = 0.0;
  for (const TaskRecord& task : trace.tasks) {
    EnergyBreakdown e = task_energy(task, trace.node_for(task));
    cpu += e.cpu_kwh;
    mem += e.mem_kwh;
  }
  CHECK(total.cpu_kwh == doctest::Approx(cpu).epsilon(1e-12));
  CHECK(total.mem_kwh == doctest::Approx(mem).epsilon(1e-12));
}

TEST_CASE("energy is monotone in duration, utilization and memory") {
  NodeProfile node = testutil::test_node();
  Instant base = parse_instant("2023-05-01T10:00:00Z");
  TaskRecord task = testutil::make_task("a", base, base + Millis{3600 * 1000},
                                        4, 200.0, 1ULL << 30);
  double reference = task_energy(task, node).total_kwh();

  TaskRecord longer = task;
  longer.end = task.end + Millis{60 * 1000};
  CHECK(task_energy(longer, node).total_kwh() >= reference);

  TaskRecord hotter = task;
  hotter.cpu_usage_pct = 399.0;
  CHECK(task_energy(hotter, node).total_kwh() >= reference);

  TaskRecord fatter = task;
  fatter.memory_bytes = 4ULL << 30;
  CHECK(task_energy(fatter, node).total_kwh() >= reference);
}

TEST_CASE("reserved_memory_energy matches the hand-computed example") {
  // 8 nodes with 128 GB at 0.4 W/GB over 3.13 h:
  // 8 * 128 * 0.4 = 409.6 W; 409.6 * 3.13 / 1000 = 1.282048 kWh.
  Instant base = parse_instant("2023-05-01T00:00:00Z");
  auto trace = testutil::make_trace({testutil::make_task(
      "a", base, base + Millis{static_cast<std::int64_t>(3.13 * 3600 * 1000)})});
  std::vector<NodeProfile> nodes;
  for (int i = 0; i < 8; ++i) nodes.push_back(testutil::test_node("n" + std::to_string(i)));
  CHECK(reserved_memory_energy_kwh(trace, nodes) ==
        doctest::Approx(1.282048).epsilon(1e-9));
}

TEST_CASE("reserved_memory_energy defaults to the nodes the trace uses") {
  Instant base = parse_instant("2023-05-01T00:00:00Z");
  WorkflowTrace trace;
  trace.label = "two-node";
  NodeProfile n1 = testutil::test_node("n1");
  NodeProfile n2 = testutil::test_node("n2");
  trace.nodes = {{"n1", n1}, {"n2", n2}};
  trace.tasks = {
      testutil::make_task("a", base, base + Millis{3600 * 1000}, 4, 100.0,
                          1ULL << 30, "n1"),
      testutil::make_task("b", base, base + Millis{3600 * 1000}, 4, 100.0,
                          1ULL << 30, "n2")};
  // 2 nodes * 128 GB * 0.4 W/GB * 1 h = 102.4 Wh
  CHECK(reserved_memory_energy_kwh(trace) ==
        doctest::Approx(0.1024).epsilon(1e-12));

  SUBCASE("zero makespan reserves no energy") {
    trace.tasks = {testutil::make_task("a", base, base, 1, 0.0, 0, "n1")};
    CHECK(reserved_memory_energy_kwh(trace) == 0.0);
  }
}
