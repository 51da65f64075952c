#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mobsense {

// Proleptic Gregorian calendar <-> days since 1970-01-01 (Hinnant's algorithms).
std::int64_t days_from_civil(int y, unsigned m, unsigned d);
void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d);

// Accepts "2018-03-05T01:23:45Z" and numeric offsets "+10:00" / "-0930" / "+10".
// Returns UTC seconds since epoch.
std::optional<std::int64_t> parse_iso8601(const std::string& s);
std::string format_iso8601_utc(std::int64_t ts);

// "+10:00" -> 600 minutes. Also accepts "Z", "+HHMM", "+HH", "-HH:MM".
std::optional<int> parse_tz_offset_minutes(const std::string& s);
std::string format_tz_offset(int minutes);

// Local calendar date (as days since epoch in local time) and hour of day
// under a fixed UTC offset.
std::int64_t local_date_index(std::int64_t ts, int tz_offset_minutes);
int local_hour(std::int64_t ts, int tz_offset_minutes);
double local_hour_frac(std::int64_t ts, int tz_offset_minutes);  // [0, 24)
std::string format_date(std::int64_t date_index);                // "2018-03-05"

}  // namespace mobsense
