#include "greenflow/whatif.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "greenflow/errors.hpp"
#include "greenflow/footprint.hpp"
#include "greenflow/power.hpp"

namespace greenflow {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_commas(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.emplace_back(trim(line.substr(pos)));
      break;
    }
    out.emplace_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line,
                    const std::string& col) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw UnparseableRow(line, "column '" + col + "' is not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string_view to_string(ProfileSource s) {
  return s == ProfileSource::measured ? "measured" : "modeled";
}

std::vector<TaskProfile> parse_profiles(std::string_view content) {
  std::vector<TaskProfile> profiles;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::size_t col_label = 0, col_runtime = 0, col_energy = 0, col_source = 0;

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
      header = split_commas(raw);
      auto find = [&](const char* name) {
        for (std::size_t i = 0; i < header.size(); ++i)
          if (header[i] == name) return i;
        return std::numeric_limits<std::size_t>::max();
      };
      col_label = find("label");
      col_runtime = find("runtime_s");
      col_energy = find("energy_kwh");
      col_source = find("source");
      constexpr auto none = std::numeric_limits<std::size_t>::max();
      if (col_label == none) throw MissingColumn("label");
      if (col_runtime == none) throw MissingColumn("runtime_s");
      if (col_energy == none) throw MissingColumn("energy_kwh");
      if (col_source == none) throw MissingColumn("source");
      continue;
    }

    std::vector<std::string> fields = split_commas(raw);
    if (fields.size() != header.size())
      throw UnparseableRow(line_no, "expected " + std::to_string(header.size()) +
                                        " columns, found " +
                                        std::to_string(fields.size()));
    TaskProfile profile;
    profile.label = fields[col_label];
    profile.runtime_s = parse_double(fields[col_runtime], line_no, "runtime_s");
    profile.energy_kwh = parse_double(fields[col_energy], line_no, "energy_kwh");
    if (profile.runtime_s <= 0)
      throw UnparseableRow(line_no, "runtime_s must be positive");
    if (profile.energy_kwh < 0)
      throw UnparseableRow(line_no, "energy_kwh must be non-negative");
    if (fields[col_source] == "measured") {
      profile.source = ProfileSource::measured;
    } else if (fields[col_source] == "modeled") {
      profile.source = ProfileSource::modeled;
    } else {
      throw UnparseableRow(line_no, "source must be 'measured' or 'modeled'");
    }
    profiles.push_back(std::move(profile));
  }
  if (profiles.empty()) throw ConfigError("profile file contains no rows");
  return profiles;
}

double profile_emissions(const TaskProfile& profile, Instant start,
                         const CISeries& series) {
  Millis runtime{static_cast<std::int64_t>(std::llround(profile.runtime_s * 1000.0))};
  if (runtime.count() <= 0) return 0.0;
  return profile.energy_kwh * weighted_intensity(series, start, start + runtime);
}

std::vector<ProfileRanking> compare_profiles(
    const std::vector<TaskProfile>& profiles, Instant start,
    const CISeries& series) {
  std::vector<ProfileRanking> rankings;
  for (const TaskProfile& profile : profiles) {
    ProfileRanking ranking;
    ranking.profile = profile;
    try {
      ranking.emissions_g = profile_emissions(profile, start, series);
    } catch (const OutOfRange& e) {
      ranking.feasible = false;
      ranking.note = e.what();
    }
    rankings.push_back(std::move(ranking));
  }
  std::stable_sort(rankings.begin(), rankings.end(),
                   [](const ProfileRanking& a, const ProfileRanking& b) {
                     if (a.feasible != b.feasible) return a.feasible;
                     if (!a.feasible) return a.profile.label < b.profile.label;
                     if (a.emissions_g != b.emissions_g)
                       return a.emissions_g < b.emissions_g;
                     if (a.profile.runtime_s != b.profile.runtime_s)
                       return a.profile.runtime_s < b.profile.runtime_s;
                     return a.profile.label < b.profile.label;
                   });
  return rankings;
}

std::vector<ProfileRanking> frequency_sweep(
    const std::vector<TaskProfile>& points, Instant start,
    const CISeries& series) {
  return compare_profiles(points, start, series);
}

std::vector<ScaleRow> cluster_scale_report(const std::vector<ScaleRun>& runs,
                                           const CISeries& average,
                                           const CISeries& marginal,
                                           double pue) {
  std::vector<ScaleRow> rows;
  for (const ScaleRun& run : runs) {
    validate(run.trace);
    ScaleRow row;
    row.node_count = run.node_count;
    row.label = run.trace.label;
    row.makespan_h = makespan_s(run.trace) / 3600.0;
    row.energy_kwh = workflow_energy(run.trace, pue).total_kwh();
    row.avg_emissions_g = footprint_total_g(run.trace, average, Millis{0}, pue);
    row.marg_emissions_g = footprint_total_g(run.trace, marginal, Millis{0}, pue);
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ScaleRow& a, const ScaleRow& b) {
                     if (a.node_count != b.node_count)
                       return a.node_count < b.node_count;
                     return a.label < b.label;
                   });
  return rows;
}

}  // namespace greenflow
