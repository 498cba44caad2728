#include "greenflow/time.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace greenflow {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool is_integer(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
  if (i >= s.size()) return false;
  return std::all_of(s.begin() + i, s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

[[noreturn]] void bad(std::string_view text) {
  throw std::invalid_argument("unrecognized timestamp: " + std::string(text));
}

int to_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) bad(whole);
  return v;
}

}  // namespace

Instant parse_instant(std::string_view text) {
  using namespace std::chrono;
  std::string_view s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty timestamp");

  if (is_integer(s)) {
    std::int64_t ms = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), ms);
    if (ec != std::errc{} || p != s.data() + s.size()) bad(text);
    return Instant{Millis{ms}};
  }

  // ISO-8601: YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+HH:MM|-HHMM]
  if (s.size() < 16 || s[4] != '-' || s[7] != '-') bad(text);
  int y = to_int(s.substr(0, 4), text);
  int mo = to_int(s.substr(5, 2), text);
  int d = to_int(s.substr(8, 2), text);
  char sep = s[10];
  if (sep != 'T' && sep != 't' && sep != ' ') bad(text);
  if (s[13] != ':') bad(text);
  int hh = to_int(s.substr(11, 2), text);
  int mi = to_int(s.substr(14, 2), text);
  int sec = 0, ms = 0;
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (s.size() < 19) bad(text);
    sec = to_int(s.substr(17, 2), text);
    pos = 19;
  }
  if (pos < s.size() && s[pos] == '.') {
    std::size_t j = pos + 1;
    std::string frac;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
      frac += s[j++];
    if (frac.empty()) bad(text);
    frac = (frac + "000").substr(0, 3);
    ms = to_int(frac, text);
    pos = j;
  }
  Millis zone_adjust{0};
  if (pos < s.size()) {
    char c = s[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int sign = (c == '-') ? -1 : 1;
      ++pos;
      if (pos + 2 > s.size()) bad(text);
      int zh = to_int(s.substr(pos, 2), text);
      pos += 2;
      if (pos < s.size() && s[pos] == ':') ++pos;
      int zm = 0;
      if (pos < s.size()) {
        if (pos + 2 > s.size()) bad(text);
        zm = to_int(s.substr(pos, 2), text);
        pos += 2;
      }
      // Local time = UTC + offset, so subtract the offset to get UTC.
      zone_adjust = -Millis{sign * ((zh * 60LL + zm) * 60LL * 1000LL)};
    } else {
      bad(text);
    }
    if (pos != s.size()) bad(text);
  }

  year_month_day ymd{year{y} / month{static_cast<unsigned>(mo)} /
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mi > 59 || sec > 59) bad(text);
  Instant t = sys_days{ymd};
  t += hours{hh} + minutes{mi} + seconds{sec} + Millis{ms};
  return t + zone_adjust;
}

std::string format_instant(Instant t) {
  using namespace std::chrono;
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  hh_mm_ss<Millis> tod{t - dp};
  char buf[48];
  int n;
  if (tod.subseconds().count() != 0) {
    n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                      static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()),
                      static_cast<int>(tod.hours().count()),
                      static_cast<int>(tod.minutes().count()),
                      static_cast<int>(tod.seconds().count()),
                      static_cast<int>(tod.subseconds().count()));
  } else {
    n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                      static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()),
                      static_cast<int>(tod.hours().count()),
                      static_cast<int>(tod.minutes().count()),
                      static_cast<int>(tod.seconds().count()));
  }
  return std::string(buf, static_cast<std::size_t>(n));
}

Instant make_instant(int year, unsigned month, unsigned day, int hour,
                     int minute, int second, int millisecond) {
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year} / std::chrono::month{month} /
                     std::chrono::day{day}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");
  Instant t = sys_days{ymd};
  return t + hours{hour} + minutes{minute} + seconds{second} +
         Millis{millisecond};
}

Instant rebase_year(Instant t, int target_year) {
  using namespace std::chrono;
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  Millis time_of_day = t - dp;
  unsigned mo = static_cast<unsigned>(ymd.month());
  unsigned d = static_cast<unsigned>(ymd.day());
  if (mo == 2 && d == 29 && !year{target_year}.is_leap()) d = 28;
  Instant rebased = sys_days{year{target_year} / month{mo} / day{d}};
  return rebased + time_of_day;
}

Instant floor_to(Instant t, Millis step, Instant origin) {
  std::int64_t delta = (t - origin).count();
  std::int64_t s = step.count();
  std::int64_t q = delta / s;
  if (delta % s != 0 && delta < 0) --q;
  return origin + Millis{q * s};
}

Instant ceil_to(Instant t, Millis step, Instant origin) {
  Instant f = floor_to(t, step, origin);
  return (f == t) ? f : f + step;
}

}  // namespace greenflow
