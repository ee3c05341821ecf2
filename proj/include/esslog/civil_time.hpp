#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace esslog {

/// Calendar date (proleptic Gregorian).
struct CivilDate {
  int year = 1970;
  int month = 1; //!< 1-12
  int day = 1;   //!< 1-31

  auto operator<=>(const CivilDate&) const = default;
};

/// Days since 1970-01-01 (negative before the epoch).
std::int64_t days_from_civil(const CivilDate& d);
CivilDate civil_from_days(std::int64_t days);

/// "YYYY-MM-DD"
std::string format_date(const CivilDate& d);
std::optional<CivilDate> parse_date(std::string_view text);

/// Parses "YYYY-MM-DD HH:MM:SS[.frac]" as seconds since the epoch.
/// The timestamp is taken at face value; zone handling happens at the
/// analysis layer via a fixed UTC offset.
std::optional<double> parse_timestamp(std::string_view text);

/// Inverse of parse_timestamp for whole-second instants (fraction truncated).
std::string format_timestamp(double epoch_seconds);

constexpr double kSecondsPerDay = 86400.0;

/// Day index of an instant under a fixed zone offset (hours east of UTC).
inline std::int64_t local_day_index(double epoch_seconds, double tz_offset_hours) {
  return static_cast<std::int64_t>(
      std::floor((epoch_seconds + tz_offset_hours * 3600.0) / kSecondsPerDay));
}

} // namespace esslog
