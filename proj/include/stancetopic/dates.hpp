#pragma once

// UTC calendar helpers on top of <chrono>. Parsing is hand-rolled because
// std::chrono::parse is not available on every toolchain we target.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace stancetopic {

using Seconds = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

namespace dates {

namespace detail {
inline bool read_int(std::string_view s, std::size_t pos, std::size_t len, int &out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return true;
}
} // namespace detail

inline std::optional<Day> make_day(int y, int m, int d) {
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Day{ymd};
}

// "YYYY-MM-DD"
inline std::optional<Day> parse_date(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!detail::read_int(s, 0, 4, y) || !detail::read_int(s, 5, 2, m) || !detail::read_int(s, 8, 2, d)) {
    return std::nullopt;
  }
  return make_day(y, m, d);
}

// RFC 3339 date-time: YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM).
// Fractional seconds are truncated; the result is normalized to UTC.
inline std::optional<Seconds> parse_rfc3339(std::string_view s) {
  if (s.size() < 20) return std::nullopt;
  auto day = parse_date(s.substr(0, 10));
  if (!day) return std::nullopt;
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!detail::read_int(s, 11, 2, hh) || s[13] != ':' || !detail::read_int(s, 14, 2, mm) || s[16] != ':' ||
      !detail::read_int(s, 17, 2, ss)) {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t digits_start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == digits_start) return std::nullopt;
  }
  if (pos >= s.size()) return std::nullopt;
  int offset_minutes = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '+' ? 1 : -1;
    int oh = 0, om = 0;
    if (!detail::read_int(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !detail::read_int(s, pos + 4, 2, om)) {
      return std::nullopt;
    }
    if (oh > 23 || om > 59) return std::nullopt;
    offset_minutes = sign * (oh * 60 + om);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  using namespace std::chrono;
  return Seconds{*day} + hours{hh} + minutes{mm} + seconds{ss} - minutes{offset_minutes};
}

inline Day day_of(Seconds t) { return std::chrono::floor<std::chrono::days>(t); }

// Monday on or before `d`.
inline Day week_start(Day d) {
  const std::chrono::weekday wd{d};
  const unsigned since_monday = (wd.c_encoding() + 6) % 7;
  return d - std::chrono::days{since_monday};
}

inline std::string format_date(Day d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_rfc3339(Seconds t) {
  const Day d = day_of(t);
  const auto secs = (t - Seconds{d}).count();
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return format_date(d) + buf;
}

inline std::int64_t to_unix(Seconds t) { return t.time_since_epoch().count(); }
inline Seconds from_unix(std::int64_t s) { return Seconds{std::chrono::seconds{s}}; }

} // namespace dates

// Inclusive UTC time range used to filter ingestion.
struct CollectionWindow {
  Seconds begin = Seconds{Day{std::chrono::year{2012} / 12 / 16}};
  Seconds end = Seconds{Day{std::chrono::year{2013} / 12 / 31}} + std::chrono::seconds{86399};

  bool contains(Seconds t) const { return t >= begin && t <= end; }
  Day first_day() const { return dates::day_of(begin); }
  Day last_day() const { return dates::day_of(end); }
};

} // namespace stancetopic
