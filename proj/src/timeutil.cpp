#include "aeronet/timeutil.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace aeronet::timeutil {

// Proleptic Gregorian <-> serial day conversions (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);              // [0, 399]
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;    // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;             // [0, 146096]
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);           // [0, 146096]
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);           // [0, 365]
  const unsigned mp = (5 * doy + 2) / 153;                                // [0, 11]
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;                        // [1, 31]
  const unsigned m = mp + (mp < 10 ? 3 : -9);                             // [1, 12]
  return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

namespace {

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  const auto* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::int64_t parse_iso8601_utc(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ, 20 characters.
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
  }
  const int year = parse_fixed_int(text, 0, 4);
  const int month = parse_fixed_int(text, 5, 2);
  const int day = parse_fixed_int(text, 8, 2);
  const int hour = parse_fixed_int(text, 11, 2);
  const int minute = parse_fixed_int(text, 14, 2);
  const int second = parse_fixed_int(text, 17, 2);
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 ||
      second > 60) {
    throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
  }
  return days_from_civil(year, static_cast<unsigned>(month),
                         static_cast<unsigned>(day)) *
             86400 +
         hour * 3600 + minute * 60 + second;
}

std::string format_iso8601_utc(std::int64_t t) {
  std::int64_t days = t / 86400;
  std::int64_t sod = t % 86400;
  if (sod < 0) {
    sod += 86400;
    days -= 1;
  }
  const CivilDate cd = civil_from_days(days);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", cd.year,
                cd.month, cd.day, static_cast<long long>(sod / 3600),
                static_cast<long long>((sod / 60) % 60),
                static_cast<long long>(sod % 60));
  return buf;
}

int utc_year(std::int64_t t) {
  std::int64_t days = t / 86400;
  if (t % 86400 < 0) days -= 1;
  return civil_from_days(days).year;
}

unsigned utc_month(std::int64_t t) {
  std::int64_t days = t / 86400;
  if (t % 86400 < 0) days -= 1;
  return civil_from_days(days).month;
}

std::int64_t parse_duration_seconds(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty duration");
  std::int64_t scale = 1;
  std::string_view digits = text;
  switch (text.back()) {
    case 'd': scale = 86400; digits.remove_suffix(1); break;
    case 'h': scale = 3600; digits.remove_suffix(1); break;
    case 'm': scale = 60; digits.remove_suffix(1); break;
    case 's': scale = 1; digits.remove_suffix(1); break;
    default: break;
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw std::invalid_argument("bad duration '" + std::string(text) + "'");
  }
  return value * scale;
}

}  // namespace aeronet::timeutil
