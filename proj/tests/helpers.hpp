#pragma once

// Shared builders for unit tests: deterministic random instances, quick
// series/trace construction and fixture loading.

#include <doctest/doctest.h>

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "greenflow/ci.hpp"
#include "greenflow/trace.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(GREENFLOW_FIXTURES) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline greenflow::NodeProfile test_node(const std::string& id = "n1") {
  greenflow::NodeProfile node;
  node.node_id = id;
  node.cores = 16;
  node.p_idle_w = 60.0;
  node.p_max_w = 200.0;
  node.mem_coeff_w_per_gb = 0.4;
  node.total_mem_gb = 128.0;
  return node;
}

inline greenflow::TaskRecord make_task(const std::string& id,
                                       greenflow::Instant start,
                                       greenflow::Instant end, int cpus = 4,
                                       double pcpu = 380.0,
                                       std::uint64_t mem = 2ULL << 30,
                                       const std::string& node = "n1") {
  greenflow::TaskRecord task;
  task.task_id = id;
  task.name = id;
  task.start = start;
  task.end = end;
  task.cpus_allocated = cpus;
  task.cpu_usage_pct = pcpu;
  task.memory_bytes = mem;
  task.node_id = node;
  return task;
}

inline greenflow::WorkflowTrace make_trace(
    std::vector<greenflow::TaskRecord> tasks, const std::string& label = "test") {
  greenflow::WorkflowTrace trace;
  trace.label = label;
  trace.tasks = std::move(tasks);
  greenflow::NodeProfile node = test_node();
  trace.nodes[node.node_id] = node;
  return trace;
}

inline greenflow::CISeries make_series(greenflow::Instant first,
                                       std::vector<double> values,
                                       std::int64_t interval_s = 3600,
                                       greenflow::Signal signal =
                                           greenflow::Signal::average,
                                       const std::string& zone = "ZZ") {
  greenflow::CISeries series;
  series.zone = zone;
  series.signal = signal;
  series.interval = greenflow::Millis{interval_s * 1000};
  series.first_slot_start = first;
  series.values = std::move(values);
  return series;
}

// Deterministic generator for randomized properties.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  int pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  double real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace testutil
