#include "greenflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "greenflow/errors.hpp"
#include "greenflow/numeric.hpp"

namespace greenflow {

namespace {

std::string fixed6(double v) {
  if (!std::isfinite(v)) throw IoError("non-finite value in report");
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_json_string(std::ostream& os, const std::string& s) {
  os << '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\b': os << "\\b"; break;
      case '\f': os << "\\f"; break;
      case '\n': os << "\\n"; break;
      case '\r': os << "\\r"; break;
      case '\t': os << "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          os << buf;
        } else {
          os << static_cast<char>(c);
        }
    }
  }
  os << '"';
}

void write_value(std::ostream& os, const nlohmann::json& j, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.cbegin(); it != j.cend(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad_in;
        write_json_string(os, it.key());
        os << ": ";
        write_value(os, it.value(), depth + 1);
      }
      os << '\n' << pad << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      bool first = true;
      for (const auto& item : j) {
        if (!first) os << ",\n";
        first = false;
        os << pad_in;
        write_value(os, item, depth + 1);
      }
      os << '\n' << pad << ']';
      return;
    }
    case nlohmann::json::value_t::string:
      write_json_string(os, j.get_ref<const std::string&>());
      return;
    case nlohmann::json::value_t::boolean:
      os << (j.get<bool>() ? "true" : "false");
      return;
    case nlohmann::json::value_t::number_integer:
      os << j.get<std::int64_t>();
      return;
    case nlohmann::json::value_t::number_unsigned:
      os << j.get<std::uint64_t>();
      return;
    case nlohmann::json::value_t::number_float:
      os << fixed6(j.get<double>());
      return;
    case nlohmann::json::value_t::null:
    default:
      os << "null";
      return;
  }
}

}  // namespace

void write_json_fixed(std::ostream& os, const nlohmann::json& doc) {
  write_value(os, doc, 0);
  os << '\n';
}

nlohmann::json to_json(const EnergyBreakdown& energy) {
  return {{"cpu_kwh", energy.cpu_kwh},
          {"mem_kwh", energy.mem_kwh},
          {"total_kwh", energy.total_kwh()}};
}

nlohmann::json to_json(const NodeProfile& node) {
  return {{"node_id", node.node_id},
          {"cores", node.cores},
          {"p_idle_w", node.p_idle_w},
          {"p_max_w", node.p_max_w},
          {"mem_coeff_w_per_gb", node.mem_coeff_w_per_gb},
          {"total_mem_gb", node.total_mem_gb}};
}

nlohmann::json to_json(const FootprintReport& report) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const PerTaskFootprint& row : report.per_task) {
    nlohmann::json entry = {{"task_id", row.task_id},
                            {"emissions_g", row.emissions_g}};
    entry.update(to_json(row.energy));
    tasks.push_back(std::move(entry));
  }
  nlohmann::json doc = {{"label", report.label},
                        {"signal", std::string(to_string(report.signal))},
                        {"zone", report.zone},
                        {"offset_s", static_cast<double>(report.offset.count()) / 1000.0},
                        {"per_task", std::move(tasks)},
                        {"total_energy_kwh", report.total_energy_kwh},
                        {"total_emissions_g", report.total_emissions_g}};
  if (report.reserved_memory_kwh)
    doc["reserved_memory_kwh"] = *report.reserved_memory_kwh;
  if (report.reserved_memory_emissions_g)
    doc["reserved_memory_emissions_g"] = *report.reserved_memory_emissions_g;
  return doc;
}

nlohmann::json to_json(const ShiftResult& result) {
  nlohmann::json doc = {
      {"strategy", std::string(to_string(result.strategy))},
      {"flexibility_h", result.flexibility_h},
      {"baseline_g", result.baseline_g},
      {"best_g", result.best_g},
      {"reduction_pct", result.reduction_pct},
      {"overhead_s", to_seconds(result.overhead)},
      {"overhead_pct", result.overhead_pct}};
  if (result.strategy == ShiftStrategy::whole) {
    doc["chosen_offset_s"] = result.chosen_offset_s;
    doc["offsets_evaluated"] = static_cast<std::int64_t>(result.offsets_evaluated);
    doc["offsets_skipped"] = static_cast<std::int64_t>(result.offsets_skipped);
  } else {
    nlohmann::json placements = nlohmann::json::array();
    for (const WindowPlacement& p : result.placements) {
      placements.push_back({{"window", p.window},
                            {"original_start", format_instant(p.original_start)},
                            {"assigned_start", format_instant(p.assigned_start)},
                            {"intensity_gco2e_per_kwh", p.intensity},
                            {"energy_kwh", p.energy_kwh},
                            {"emissions_g", p.emissions_g}});
    }
    doc["assignment"] = std::move(placements);
  }
  return doc;
}

nlohmann::json to_json(const ProfileRanking& ranking) {
  return {{"label", ranking.profile.label},
          {"runtime_s", ranking.profile.runtime_s},
          {"energy_kwh", ranking.profile.energy_kwh},
          {"source", std::string(to_string(ranking.profile.source))},
          {"emissions_g", ranking.emissions_g},
          {"feasible", ranking.feasible},
          {"note", ranking.note}};
}

nlohmann::json to_json(const ScaleRow& row) {
  return {{"node_count", row.node_count},
          {"label", row.label},
          {"makespan_h", row.makespan_h},
          {"energy_kwh", row.energy_kwh},
          {"avg_emissions_gco2e", row.avg_emissions_g},
          {"marg_emissions_gco2e", row.marg_emissions_g}};
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

void write_footprint_csv(std::ostream& os, const FootprintReport& report) {
  os << "task_id,cpu_kwh,mem_kwh,total_kwh,emissions_g\n";
  for (const PerTaskFootprint& row : report.per_task) {
    os << csv_escape(row.task_id) << ',' << fixed6(row.energy.cpu_kwh) << ','
       << fixed6(row.energy.mem_kwh) << ',' << fixed6(row.energy.total_kwh())
       << ',' << fixed6(row.emissions_g) << '\n';
  }
}

void write_shift_csv(std::ostream& os, const std::vector<ShiftResult>& results) {
  os << "strategy,flexibility_h,baseline_g,best_g,reduction_pct,"
        "chosen_offset_s,overhead_s,overhead_pct\n";
  for (const ShiftResult& r : results) {
    os << to_string(r.strategy) << ',' << r.flexibility_h << ','
       << fixed6(r.baseline_g) << ',' << fixed6(r.best_g) << ','
       << fixed6(r.reduction_pct) << ',' << r.chosen_offset_s << ','
       << fixed6(to_seconds(r.overhead)) << ',' << fixed6(r.overhead_pct)
       << '\n';
  }
}

void write_ranking_csv(std::ostream& os,
                       const std::vector<ProfileRanking>& rankings) {
  os << "rank,label,runtime_s,energy_kwh,source,emissions_g,feasible\n";
  int rank = 1;
  for (const ProfileRanking& r : rankings) {
    os << rank++ << ',' << csv_escape(r.profile.label) << ','
       << fixed6(r.profile.runtime_s) << ',' << fixed6(r.profile.energy_kwh)
       << ',' << to_string(r.profile.source) << ',' << fixed6(r.emissions_g)
       << ',' << (r.feasible ? 1 : 0) << '\n';
  }
}

void write_scale_csv(std::ostream& os, const std::vector<ScaleRow>& rows) {
  os << "nodes,label,makespan_h,energy_kwh,avg_emissions_gco2e,"
        "marg_emissions_gco2e\n";
  for (const ScaleRow& row : rows) {
    os << row.node_count << ',' << csv_escape(row.label) << ','
       << fixed6(row.makespan_h) << ',' << fixed6(row.energy_kwh) << ','
       << fixed6(row.avg_emissions_g) << ',' << fixed6(row.marg_emissions_g)
       << '\n';
  }
}

void write_shift_plot_csv(std::ostream& os, const ShiftResult& result) {
  if (result.strategy == ShiftStrategy::whole) {
    os << "offset_s,footprint_g,feasible\n";
    for (const OffsetSample& sample : result.curve) {
      os << sample.offset_s << ',';
      if (sample.feasible) os << fixed6(sample.footprint_g);
      os << ',' << (sample.feasible ? 1 : 0) << '\n';
    }
  } else {
    os << "window,original_start,assigned_start,intensity_gco2e_per_kwh,"
          "energy_kwh,emissions_g\n";
    for (const WindowPlacement& p : result.placements) {
      os << p.window << ',' << format_instant(p.original_start) << ','
         << format_instant(p.assigned_start) << ',' << fixed6(p.intensity)
         << ',' << fixed6(p.energy_kwh) << ',' << fixed6(p.emissions_g) << '\n';
    }
  }
}

void write_whatif_plot_csv(std::ostream& os,
                           const std::vector<ProfileRanking>& rankings,
                           Instant start, const CISeries& series) {
  os << "slot_start,intensity_gco2e_per_kwh";
  for (const ProfileRanking& r : rankings)
    os << ',' << csv_escape(r.profile.label);
  os << '\n';

  Instant latest_end = start;
  for (const ProfileRanking& r : rankings) {
    Millis runtime{static_cast<std::int64_t>(std::llround(r.profile.runtime_s * 1000.0))};
    latest_end = std::max(latest_end, start + runtime);
  }
  Instant plot_lo = std::max(series.coverage_begin(),
                             floor_to(start, series.interval,
                                      series.first_slot_start));
  Instant plot_hi = std::min(series.coverage_end(),
                             ceil_to(latest_end, series.interval,
                                     series.first_slot_start));
  for (Instant slot = plot_lo; slot < plot_hi; slot += series.interval) {
    os << format_instant(slot) << ',' << fixed6(series.at(slot));
    for (const ProfileRanking& r : rankings) {
      Millis runtime{static_cast<std::int64_t>(std::llround(r.profile.runtime_s * 1000.0))};
      bool overlaps = start < slot + series.interval && start + runtime > slot;
      os << ',' << (overlaps ? 1 : 0);
    }
    os << '\n';
  }
}

}  // namespace greenflow
