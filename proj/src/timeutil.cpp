#include "mobsense/timeutil.hpp"

#include <cstdio>
#include <cstdlib>

namespace mobsense {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

}  // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yr + (m <= 2));
}

std::optional<int> parse_tz_offset_minutes(const std::string& s) {
  if (s == "Z" || s == "z") return 0;
  if (s.size() < 2 || (s[0] != '+' && s[0] != '-')) return std::nullopt;
  const int sign = s[0] == '-' ? -1 : 1;
  std::string body = s.substr(1);
  int hh = 0, mm = 0;
  auto all_digits = [](const std::string& t) {
    for (char c : t)
      if (c < '0' || c > '9') return false;
    return !t.empty();
  };
  auto colon = body.find(':');
  if (colon != std::string::npos) {
    std::string h = body.substr(0, colon), m = body.substr(colon + 1);
    if (!all_digits(h) || !all_digits(m) || m.size() != 2) return std::nullopt;
    hh = std::atoi(h.c_str());
    mm = std::atoi(m.c_str());
  } else if (body.size() == 4 && all_digits(body)) {
    hh = std::atoi(body.substr(0, 2).c_str());
    mm = std::atoi(body.substr(2).c_str());
  } else if (body.size() <= 2 && all_digits(body)) {
    hh = std::atoi(body.c_str());
  } else {
    return std::nullopt;
  }
  if (hh > 18 || mm > 59) return std::nullopt;
  return sign * (hh * 60 + mm);
}

std::string format_tz_offset(int minutes) {
  char buf[16];
  int a = minutes < 0 ? -minutes : minutes;
  std::snprintf(buf, sizeof(buf), "%c%02d:%02d", minutes < 0 ? '-' : '+', a / 60, a % 60);
  return buf;
}

std::optional<std::int64_t> parse_iso8601(const std::string& s) {
  // YYYY-MM-DDTHH:MM:SS followed by Z or a numeric offset.
  int y, mo, d, h, mi, sec;
  int n = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &sec, &n) != 6)
    return std::nullopt;
  std::string rest = s.substr(static_cast<std::size_t>(n));
  // Drop fractional seconds if present.
  if (!rest.empty() && rest[0] == '.') {
    std::size_t i = 1;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    rest = rest.substr(i);
  }
  if (rest.empty()) return std::nullopt;  // an explicit offset or Z is required
  auto off = parse_tz_offset_minutes(rest);
  if (!off) return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  return days * 86400 + h * 3600 + mi * 60 + sec - static_cast<std::int64_t>(*off) * 60;
}

std::string format_iso8601_utc(std::int64_t ts) {
  std::int64_t days = floor_div(ts, 86400);
  std::int64_t rem = floor_mod(ts, 86400);
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

std::int64_t local_date_index(std::int64_t ts, int tz_offset_minutes) {
  return floor_div(ts + static_cast<std::int64_t>(tz_offset_minutes) * 60, 86400);
}

int local_hour(std::int64_t ts, int tz_offset_minutes) {
  return static_cast<int>(
      floor_mod(ts + static_cast<std::int64_t>(tz_offset_minutes) * 60, 86400) / 3600);
}

double local_hour_frac(std::int64_t ts, int tz_offset_minutes) {
  return static_cast<double>(
             floor_mod(ts + static_cast<std::int64_t>(tz_offset_minutes) * 60, 86400)) /
         3600.0;
}

std::string format_date(std::int64_t date_index) {
  int y;
  unsigned m, d;
  civil_from_days(date_index, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
  return buf;
}

}  // namespace mobsense
