#ifndef AERONET_TIMEUTIL_HPP
#define AERONET_TIMEUTIL_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace aeronet::timeutil {

struct CivilDate {
  int year;
  unsigned month;  // 1..12
  unsigned day;    // 1..31
};

/// Days since 1970-01-01 for a proleptic-Gregorian civil date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);

/// Inverse of days_from_civil.
CivilDate civil_from_days(std::int64_t days);

/// Parses `YYYY-MM-DDTHH:MM:SSZ` into Unix seconds. Throws std::invalid_argument
/// on any other shape; only UTC (`Z`) is accepted.
std::int64_t parse_iso8601_utc(std::string_view text);

/// Formats Unix seconds as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601_utc(std::int64_t unix_seconds);

/// UTC calendar year of a Unix timestamp.
int utc_year(std::int64_t unix_seconds);

/// UTC calendar month (1..12) of a Unix timestamp.
unsigned utc_month(std::int64_t unix_seconds);

/// Parses a signed duration like `-48h`, `30m`, `3600s`, `2d` into seconds.
/// A bare integer is taken as seconds.
std::int64_t parse_duration_seconds(std::string_view text);

}  // namespace aeronet::timeutil

#endif
