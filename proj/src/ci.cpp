#include "greenflow/ci.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

#include "greenflow/errors.hpp"

namespace greenflow {

namespace {

// lbs CO2 per MWh to gCO2e per kWh.
constexpr double kLbsPerMwhToGramsPerKwh = 453.592 / 1000.0;

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

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.emplace_back(trim(cur));
  return out;
}

constexpr std::size_t kNoColumn = std::numeric_limits<std::size_t>::max();

struct ColumnPlan {
  std::size_t time_col = kNoColumn;
  std::size_t value_col = kNoColumn;
  double factor = 1.0;
};

std::size_t find_exact(const std::vector<std::string>& header,
                       std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (lower(header[i]) == lower(name)) return i;
  return kNoColumn;
}

std::size_t find_containing(const std::vector<std::string>& header,
                            std::string_view needle) {
  std::string n = lower(needle);
  for (std::size_t i = 0; i < header.size(); ++i)
    if (lower(header[i]).find(n) != std::string::npos) return i;
  return kNoColumn;
}

ColumnPlan plan_columns(const std::vector<std::string>& header) {
  ColumnPlan plan;

  plan.time_col = find_exact(header, "timestamp_utc");
  plan.value_col = find_exact(header, "ci_gco2e_per_kwh");
  if (plan.time_col != kNoColumn && plan.value_col != kNoColumn) return plan;

  // Electricity Maps export.
  std::size_t dt = find_containing(header, "datetime (utc)");
  std::size_t ci = find_containing(header, "carbon intensity");
  if (dt != kNoColumn && ci != kNoColumn) {
    plan.time_col = dt;
    plan.value_col = ci;
    return plan;
  }

  // WattTime MOER export, lbs CO2/MWh.
  std::size_t moer = find_containing(header, "moer");
  std::size_t wt_time = kNoColumn;
  for (const char* name : {"point_time", "timestamp", "datetime", "timestamp_utc"}) {
    wt_time = find_exact(header, name);
    if (wt_time != kNoColumn) break;
  }
  if (wt_time != kNoColumn &&
      (moer != kNoColumn || find_exact(header, "value") != kNoColumn)) {
    plan.time_col = wt_time;
    plan.value_col = (moer != kNoColumn) ? moer : find_exact(header, "value");
    plan.factor = kLbsPerMwhToGramsPerKwh;
    return plan;
  }

  throw MissingColumn("timestamp_utc");
}

}  // namespace

std::string_view to_string(Signal s) {
  return s == Signal::average ? "average" : "marginal";
}

Signal signal_from_string(std::string_view text) {
  if (text == "average") return Signal::average;
  if (text == "marginal") return Signal::marginal;
  throw ConfigError("signal must be 'average' or 'marginal', got '" +
                    std::string(text) + "'");
}

bool CISeries::covers(Instant start, Instant end) const {
  if (start == end) return true;
  if (start > end) return false;
  return start >= coverage_begin() && end <= coverage_end();
}

std::size_t CISeries::index_at(Instant t) const {
  if (values.empty()) throw EmptyCISeries();
  std::int64_t delta = (t - first_slot_start).count();
  std::int64_t width = interval.count();
  if (delta < 0 || delta >= width * static_cast<std::int64_t>(values.size()))
    throw OutOfRange("instant " + format_instant(t) +
                     " is outside carbon-intensity coverage [" +
                     format_instant(coverage_begin()) + ", " +
                     format_instant(coverage_end()) + ")");
  return static_cast<std::size_t>(delta / width);
}

double CISeries::at(Instant t) const { return values[index_at(t)]; }

CISeries parse_ci(std::string_view content, Signal signal, std::string zone,
                  const CIParseOptions& options) {
  CISeries series;
  series.zone = std::move(zone);
  series.signal = signal;

  std::vector<std::string> header;
  ColumnPlan plan;
  std::vector<Instant> stamps;
  std::vector<double> raw_values;

  std::size_t pos = 0;
  std::size_t line_no = 0;
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
      std::string first(raw);
      if (first.size() >= 3 && first.compare(0, 3, "\xEF\xBB\xBF") == 0)
        first.erase(0, 3);
      header = split_csv(first);
      plan = plan_columns(header);
      continue;
    }

    std::vector<std::string> fields = split_csv(raw);
    if (fields.size() <= std::max(plan.time_col, plan.value_col))
      throw UnparseableRow(line_no, "row has too few columns");
    Instant t;
    try {
      t = parse_instant(fields[plan.time_col]);
    } catch (const std::exception& e) {
      throw UnparseableRow(line_no, e.what());
    }
    const std::string& v = fields[plan.value_col];
    double value = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc{} || p != v.data() + v.size())
      throw UnparseableRow(line_no, "bad intensity value: '" + v + "'");
    value *= plan.factor;
    if (value < 0) throw NegativeIntensity(format_instant(t));
    stamps.push_back(t);
    raw_values.push_back(value);
  }

  if (stamps.size() < 2)
    throw EmptyCISeries(
        "carbon-intensity series needs at least two rows to establish its "
        "interval");

  // The interval is set by the first two rows and enforced everywhere else;
  // with gap filling, whole missing multiples carry the last value forward.
  Millis interval{(stamps[1] - stamps[0]).count()};
  if (interval.count() <= 0) throw NonUniformInterval(format_instant(stamps[1]));

  series.interval = interval;
  series.first_slot_start = stamps[0];
  series.values.push_back(raw_values[0]);
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    std::int64_t delta = (stamps[i] - stamps[i - 1]).count();
    if (delta <= 0) throw NonUniformInterval(format_instant(stamps[i]));
    if (delta != interval.count()) {
      bool whole_multiple = delta % interval.count() == 0;
      if (!options.fill_gaps || !whole_multiple)
        throw NonUniformInterval(format_instant(stamps[i]));
      std::int64_t missing = delta / interval.count() - 1;
      for (std::int64_t k = 0; k < missing; ++k)
        series.values.push_back(raw_values[i - 1]);
      series.filled_gaps += static_cast<std::size_t>(missing);
    }
    series.values.push_back(raw_values[i]);
  }
  return series;
}

std::vector<SlotShare> overlap_weights(const CISeries& series, Instant start,
                                       Instant end) {
  if (start >= end)
    throw std::invalid_argument("overlap_weights requires start < end");
  if (!series.covers(start, end))
    throw OutOfRange("interval [" + format_instant(start) + ", " +
                     format_instant(end) +
                     ") is outside carbon-intensity coverage [" +
                     format_instant(series.coverage_begin()) + ", " +
                     format_instant(series.coverage_end()) + ")");
  std::vector<SlotShare> shares;
  double total_ms = static_cast<double>((end - start).count());
  std::size_t i = series.index_at(start);
  for (; i < series.size() && series.slot_start(i) < end; ++i) {
    Instant slot_lo = series.slot_start(i);
    Instant slot_hi = slot_lo + series.interval;
    std::int64_t overlap =
        (std::min(end, slot_hi) - std::max(start, slot_lo)).count();
    SlotShare share;
    share.slot = i;
    share.slot_start = slot_lo;
    share.intensity = series.values[i];
    share.overlap_ms = overlap;
    share.fraction = static_cast<double>(overlap) / total_ms;
    shares.push_back(share);
  }
  return shares;
}

double weighted_intensity(const CISeries& series, Instant start, Instant end) {
  std::vector<SlotShare> shares = overlap_weights(series, start, end);
  double weighted = 0.0;
  for (const SlotShare& share : shares)
    weighted += static_cast<double>(share.overlap_ms) * share.intensity;
  return weighted / static_cast<double>((end - start).count());
}

}  // namespace greenflow
