#pragma once

// UTC timestamp helpers. All timestamps are integer seconds since the Unix epoch.

#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace ossmood {

using Timestamp = std::int64_t;

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr Timestamp kDay = 86400;

inline double seconds_to_days(Timestamp s) { return static_cast<double>(s) / kSecondsPerDay; }

/// UTC day number (days since 1970-01-01), floor division.
inline std::int64_t day_index(Timestamp ts) {
  return ts >= 0 ? ts / kDay : -((-ts + kDay - 1) / kDay);
}

inline std::optional<Timestamp> civil_to_epoch(int y, unsigned mo, unsigned d, int h = 0,
                                               int mi = 0, int s = 0) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * kDay + h * 3600 + mi * 60 + s;
}

/// "YYYY-MM-DD" of the UTC day containing `ts`.
inline std::string format_date(Timestamp ts) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day_index(ts)}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_iso8601(Timestamp ts) {
  const auto day = day_index(ts);
  const auto rem = ts - day * kDay;
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(rem / 3600),
                static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
  return format_date(ts) + buf;
}

namespace detail {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return i_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[i_]; }
  void skip_space() {
    while (!done() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++i_;
    return true;
  }
  std::optional<int> number(std::size_t min_digits, std::size_t max_digits) {
    std::size_t n = 0;
    int v = 0;
    while (n < max_digits && !done() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      v = v * 10 + (s_[i_] - '0');
      ++i_;
      ++n;
    }
    if (n < min_digits) return std::nullopt;
    return v;
  }
  std::string_view word() {
    const auto start = i_;
    while (!done() && std::isalpha(static_cast<unsigned char>(s_[i_]))) ++i_;
    return s_.substr(start, i_ - start);
  }
  std::string_view rest() const { return done() ? std::string_view{} : s_.substr(i_); }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

// Parses "Z", "UTC", "GMT", "UT", "+hhmm", "+hh:mm", "-hhmm" and the US zone names of RFC 822.
// Returns the offset in seconds east of UTC.
inline std::optional<int> parse_zone(Cursor& c) {
  c.skip_space();
  if (c.done()) return 0;
  const char sign = c.peek();
  if (sign == '+' || sign == '-') {
    c.accept(sign);
    auto hh = c.number(2, 2);
    if (!hh) return std::nullopt;
    c.accept(':');
    auto mm = c.number(2, 2);
    const int off = *hh * 3600 + mm.value_or(0) * 60;
    return sign == '-' ? -off : off;
  }
  const auto w = c.word();
  struct Named {
    std::string_view name;
    int hours;
  };
  static constexpr Named kZones[] = {{"Z", 0},    {"UTC", 0},  {"GMT", 0},  {"UT", 0},
                                     {"EST", -5}, {"EDT", -4}, {"CST", -6}, {"CDT", -5},
                                     {"MST", -7}, {"MDT", -6}, {"PST", -8}, {"PDT", -7}};
  for (const auto& z : kZones)
    if (iequals(w, z.name)) return z.hours * 3600;
  // Unknown alphabetic zones are treated as UTC (RFC 2822 section 4.3).
  if (!w.empty()) return 0;
  return std::nullopt;
}

}  // namespace detail

/// ISO-8601 / Bugzilla timestamps: "2004-01-01", "2004-01-01T10:00:00Z",
/// "2004-01-01 10:00:00 +0100", optional fractional seconds.
inline std::optional<Timestamp> parse_iso8601(std::string_view text) {
  detail::Cursor c(text);
  c.skip_space();
  auto y = c.number(4, 4);
  if (!y || !c.accept('-')) return std::nullopt;
  auto mo = c.number(2, 2);
  if (!mo || !c.accept('-')) return std::nullopt;
  auto d = c.number(2, 2);
  if (!d) return std::nullopt;
  int h = 0, mi = 0, s = 0;
  if (c.accept('T') || c.accept('t') || c.accept(' ')) {
    auto hh = c.number(2, 2);
    if (!hh || !c.accept(':')) return std::nullopt;
    auto mm = c.number(2, 2);
    if (!mm) return std::nullopt;
    h = *hh;
    mi = *mm;
    if (c.accept(':')) {
      auto ss = c.number(2, 2);
      if (!ss) return std::nullopt;
      s = *ss;
      if (c.accept('.') || c.accept(',')) c.number(1, 12);
    }
  }
  auto base = civil_to_epoch(*y, static_cast<unsigned>(*mo), static_cast<unsigned>(*d), h, mi, s);
  if (!base) return std::nullopt;
  auto zone = detail::parse_zone(c);
  if (!zone) return std::nullopt;
  c.skip_space();
  if (!c.done()) return std::nullopt;
  return *base - *zone;
}

/// RFC 2822 mail dates: "Mon, 4 Jan 2001 12:00:00 +0100" (weekday and seconds optional).
inline std::optional<Timestamp> parse_rfc2822(std::string_view text) {
  detail::Cursor c(text);
  c.skip_space();
  if (std::isalpha(static_cast<unsigned char>(c.peek()))) {
    c.word();
    c.skip_space();
    c.accept(',');
  }
  c.skip_space();
  auto d = c.number(1, 2);
  if (!d) return std::nullopt;
  c.skip_space();
  const auto mon = c.word();
  static constexpr std::string_view kMonths[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                                 "jul", "aug", "sep", "oct", "nov", "dec"};
  unsigned mo = 0;
  for (unsigned i = 0; i < 12; ++i)
    if (detail::iequals(mon.substr(0, 3), kMonths[i]) && mon.size() >= 3) mo = i + 1;
  if (mo == 0) return std::nullopt;
  c.skip_space();
  auto y = c.number(2, 4);
  if (!y) return std::nullopt;
  if (*y < 50) *y += 2000;
  else if (*y < 1000) *y += 1900;
  c.skip_space();
  auto hh = c.number(1, 2);
  if (!hh || !c.accept(':')) return std::nullopt;
  auto mm = c.number(2, 2);
  if (!mm) return std::nullopt;
  int s = 0;
  if (c.accept(':')) {
    auto ss = c.number(2, 2);
    if (!ss) return std::nullopt;
    s = *ss;
  }
  auto base = civil_to_epoch(*y, mo, static_cast<unsigned>(*d), *hh, *mm, s);
  if (!base) return std::nullopt;
  auto zone = detail::parse_zone(c);
  // Trailing comments such as "(PST)" are ignored.
  return *base - zone.value_or(0);
}

}  // namespace ossmood
