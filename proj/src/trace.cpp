#include "greenflow/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "greenflow/errors.hpp"

namespace greenflow {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      out.emplace_back(trim(line.substr(pos)));
      break;
    }
    out.emplace_back(trim(line.substr(pos, tab - pos)));
    pos = tab + 1;
  }
  return out;
}

bool missing(std::string_view field) { return field.empty() || field == "-"; }

double parse_double(std::string_view s, std::size_t line, const std::string& col) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw UnparseableRow(line, "column '" + col + "' is not a number: '" +
                                   std::string(s) + "'");
  return v;
}

long parse_long(std::string_view s, std::size_t line, const std::string& col) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw UnparseableRow(line, "column '" + col + "' is not an integer: '" +
                                   std::string(s) + "'");
  return v;
}

// Nextflow memory strings use binary units: "2 GB" is 2 * 2^30 bytes. Raw
// integers are taken as bytes.
std::uint64_t parse_memory_bytes(std::string_view field, std::size_t line) {
  std::string_view s = trim(field);
  std::size_t num_end = 0;
  while (num_end < s.size() &&
         (std::isdigit(static_cast<unsigned char>(s[num_end])) ||
          s[num_end] == '.' || s[num_end] == '+' || s[num_end] == '-'))
    ++num_end;
  if (num_end == 0)
    throw UnparseableRow(line, "bad memory value: '" + std::string(s) + "'");
  double value = parse_double(s.substr(0, num_end), line, "memory");
  if (value < 0)
    throw UnparseableRow(line, "negative memory value");
  std::string unit = lower(trim(s.substr(num_end)));
  double mult = 1.0;
  if (unit.empty() || unit == "b") mult = 1.0;
  else if (unit == "kb" || unit == "k" || unit == "kib") mult = 1024.0;
  else if (unit == "mb" || unit == "m" || unit == "mib") mult = 1024.0 * 1024.0;
  else if (unit == "gb" || unit == "g" || unit == "gib") mult = 1024.0 * 1024.0 * 1024.0;
  else if (unit == "tb" || unit == "t" || unit == "tib") mult = 1024.0 * 1024.0 * 1024.0 * 1024.0;
  else
    throw UnparseableRow(line, "unknown memory unit: '" + unit + "'");
  return static_cast<std::uint64_t>(std::llround(value * mult));
}

Instant parse_time_field(std::string_view field, std::size_t line,
                         const std::string& col) {
  try {
    return parse_instant(field);
  } catch (const std::exception& e) {
    throw UnparseableRow(line, "column '" + col + "': " + e.what());
  }
}

std::size_t find_column(const std::vector<std::string>& header,
                        std::initializer_list<const char*> names) {
  for (const char* name : names) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (lower(header[i]) == name) return i;
  }
  return std::numeric_limits<std::size_t>::max();
}

constexpr std::size_t kNoColumn = std::numeric_limits<std::size_t>::max();

void check_task(const TaskRecord& task, const NodeProfile& node,
                std::size_t line) {
  if (task.end < task.start)
    throw UnparseableRow(line, "task '" + task.name + "' completes before it starts");
  if (task.cpus_allocated < 1)
    throw UnparseableRow(line, "cpus must be at least 1");
  if (task.cpus_allocated > node.cores)
    throw UnparseableRow(line, "task '" + task.name + "' allocates " +
                                   std::to_string(task.cpus_allocated) +
                                   " cpus but node '" + node.node_id +
                                   "' has " + std::to_string(node.cores));
  if (task.cpu_usage_pct < 0)
    throw UnparseableRow(line, "%cpu must be non-negative");
  double mem_gb = static_cast<double>(task.memory_bytes) / (1024.0 * 1024.0 * 1024.0);
  if (mem_gb > node.total_mem_gb)
    throw UnparseableRow(line, "task '" + task.name + "' uses " +
                                   std::to_string(mem_gb) + " GB but node '" +
                                   node.node_id + "' has " +
                                   std::to_string(node.total_mem_gb));
}

}  // namespace

const NodeProfile& WorkflowTrace::node_for(const TaskRecord& task) const {
  auto it = nodes.find(task.node_id);
  if (it == nodes.end()) throw UnknownNode(task.node_id);
  return it->second;
}

void validate(const WorkflowTrace& trace) {
  if (trace.tasks.empty()) throw EmptyTrace();
  std::size_t row = 1;
  for (const TaskRecord& task : trace.tasks) {
    const NodeProfile& node = trace.node_for(task);
    check_task(task, node, row);
    ++row;
  }
}

WorkflowTrace parse_trace(std::string_view content,
                          const std::map<std::string, NodeProfile>& roster,
                          const TraceParseOptions& options) {
  WorkflowTrace trace;
  trace.label = options.label;
  trace.nodes = roster;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::size_t col_name = kNoColumn, col_start = kNoColumn, col_complete = kNoColumn,
              col_cpus = kNoColumn, col_pcpu = kNoColumn, col_mem = kNoColumn,
              col_host = kNoColumn, col_task_id = kNoColumn;

  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string_view raw = (eol == std::string_view::npos)
                               ? content.substr(pos)
                               : content.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? content.size() + 1 : eol + 1;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    ++line_no;
    if (trim(raw).empty()) continue;

    if (header.empty()) {
      header = split_tabs(raw);
      // Strip a UTF-8 BOM left by some exporters.
      if (!header.empty() && header[0].size() >= 3 &&
          header[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
        header[0].erase(0, 3);
      col_name = find_column(header, {"name", "process"});
      col_start = find_column(header, {"start"});
      col_complete = find_column(header, {"complete"});
      col_cpus = find_column(header, {"cpus"});
      col_pcpu = find_column(header, {"%cpu"});
      col_mem = find_column(header, {"peak_rss", "rss", "memory"});
      col_host = find_column(header, {"hostname", "machine", "node", "node_id"});
      col_task_id = find_column(header, {"task_id"});
      if (col_name == kNoColumn) throw MissingColumn("name");
      if (col_start == kNoColumn) throw MissingColumn("start");
      if (col_complete == kNoColumn) throw MissingColumn("complete");
      if (col_cpus == kNoColumn) throw MissingColumn("cpus");
      if (col_pcpu == kNoColumn) throw MissingColumn("%cpu");
      if (col_mem == kNoColumn) throw MissingColumn("peak_rss");
      continue;
    }

    std::vector<std::string> fields = split_tabs(raw);
    if (fields.size() != header.size())
      throw UnparseableRow(line_no, "expected " + std::to_string(header.size()) +
                                        " columns, found " +
                                        std::to_string(fields.size()));
    auto required = [&](std::size_t col) -> const std::string& {
      const std::string& f = fields[col];
      if (missing(f))
        throw UnparseableRow(line_no, "column '" + header[col] + "' has no value");
      return f;
    };

    TaskRecord task;
    task.name = fields[col_name];
    task.task_id = (col_task_id != kNoColumn && !missing(fields[col_task_id]))
                       ? fields[col_task_id]
                       : std::to_string(trace.tasks.size() + 1);
    task.start = parse_time_field(required(col_start), line_no, header[col_start]);
    task.end = parse_time_field(required(col_complete), line_no, header[col_complete]);
    task.cpus_allocated =
        static_cast<int>(parse_long(required(col_cpus), line_no, header[col_cpus]));
    std::string pcpu = required(col_pcpu);
    if (!pcpu.empty() && pcpu.back() == '%') pcpu.pop_back();
    task.cpu_usage_pct = parse_double(trim(pcpu), line_no, header[col_pcpu]);
    task.memory_bytes = parse_memory_bytes(required(col_mem), line_no);

    if (col_host != kNoColumn && !missing(fields[col_host])) {
      task.node_id = fields[col_host];
    } else if (!options.default_node.empty()) {
      task.node_id = options.default_node;
    } else if (roster.size() == 1) {
      task.node_id = roster.begin()->first;
    } else {
      throw ConfigError(
          "trace row has no host and no default node is configured");
    }
    auto it = roster.find(task.node_id);
    if (it == roster.end()) throw UnknownNode(task.node_id);
    check_task(task, it->second, line_no);
    trace.tasks.push_back(std::move(task));
  }

  if (header.empty() || trace.tasks.empty()) throw EmptyTrace();
  return trace;
}

std::string serialize_trace(const WorkflowTrace& trace) {
  std::string out =
      "task_id\tname\tstart\tcomplete\tcpus\t%cpu\tpeak_rss\thostname\n";
  char buf[64];
  for (const TaskRecord& task : trace.tasks) {
    out += task.task_id;
    out += '\t';
    out += task.name;
    out += '\t';
    out += format_instant(task.start);
    out += '\t';
    out += format_instant(task.end);
    out += '\t';
    out += std::to_string(task.cpus_allocated);
    out += '\t';
    std::snprintf(buf, sizeof buf, "%.17g", task.cpu_usage_pct);
    out += buf;
    out += '\t';
    out += std::to_string(task.memory_bytes);
    out += '\t';
    out += task.node_id;
    out += '\n';
  }
  return out;
}

std::pair<Instant, Instant> span(const WorkflowTrace& trace) {
  if (trace.tasks.empty()) throw EmptyTrace();
  Instant lo = trace.tasks.front().start;
  Instant hi = trace.tasks.front().end;
  for (const TaskRecord& task : trace.tasks) {
    lo = std::min(lo, task.start);
    hi = std::max(hi, task.end);
  }
  return {lo, hi};
}

double makespan_s(const WorkflowTrace& trace) {
  auto [lo, hi] = span(trace);
  return to_seconds(hi - lo);
}

}  // namespace greenflow
