#include "esslog/civil_time.hpp"

#include <charconv>
#include <cstdio>

namespace esslog {

// Howard Hinnant's algorithms, valid across the full proleptic range.
std::int64_t days_from_civil(const CivilDate& d) {
  std::int64_t y = d.year;
  y -= d.month <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (d.month + (d.month > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t days) {
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned day = doy - (153 * mp + 2) / 5 + 1;
  const unsigned month = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (month <= 2)), static_cast<int>(month),
                   static_cast<int>(day)};
}

std::string format_date(const CivilDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

namespace {

bool parse_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  const char* first = s.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, out);
  return ec == std::errc{} && ptr == first + len;
}

bool days_in_month_ok(int year, int month, int day) {
  static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12 || day < 1) return false;
  int n = lengths[month - 1];
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) n = 29;
  return day <= n;
}

} // namespace

std::optional<CivilDate> parse_date(std::string_view text) {
  CivilDate d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!parse_int(text, 0, 4, d.year) || !parse_int(text, 5, 2, d.month) ||
      !parse_int(text, 8, 2, d.day))
    return std::nullopt;
  if (!days_in_month_ok(d.year, d.month, d.day)) return std::nullopt;
  return d;
}

std::optional<double> parse_timestamp(std::string_view text) {
  // "YYYY-MM-DD HH:MM:SS" with an optional fractional part.
  if (text.size() < 19 || text[10] != ' ' || text[13] != ':' || text[16] != ':')
    return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  if (!date) return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!parse_int(text, 11, 2, hh) || !parse_int(text, 14, 2, mm) || !parse_int(text, 17, 2, ss))
    return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  double frac = 0.0;
  if (text.size() > 19) {
    if (text[19] != '.') return std::nullopt;
    const char* first = text.data() + 19;
    auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), frac);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  }
  return static_cast<double>(days_from_civil(*date)) * kSecondsPerDay + hh * 3600.0 +
         mm * 60.0 + ss + frac;
}

std::string format_timestamp(double epoch_seconds) {
  const std::int64_t whole = static_cast<std::int64_t>(std::floor(epoch_seconds));
  std::int64_t days = whole / 86400;
  std::int64_t sod = whole % 86400;
  if (sod < 0) {
    sod += 86400;
    days -= 1;
  }
  const CivilDate d = civil_from_days(days);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d", d.year, d.month, d.day,
                static_cast<int>(sod / 3600), static_cast<int>(sod / 60 % 60),
                static_cast<int>(sod % 60));
  return buf;
}

} // namespace esslog
